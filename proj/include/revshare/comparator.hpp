#pragma once

// Developer and platform payoffs under each business model, with the
// developer re-optimizing effort against every fee structure.

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revshare/model.hpp"

namespace revshare {

struct ModelOutcome {
    ModelTag tag = ModelTag::Rsi;
    std::optional<ModelTag> chosen;  // member picked by a Hybrid model
    std::string label;               // BusinessModel::describe()
    double effort = 0.0;
    double gross_revenue = 0.0;
    double usage = 0.0;
    double developer_profit = 0.0;
    double platform_profit = 0.0;  // zero when the developer does not enter
    /// What the developer must pay before revenue comes in: per-request or
    /// per-period charges. Always zero under RSI.
    double upfront_cost = 0.0;
    double foc_residual = 0.0;  // marginal payoff of the active smooth piece at `effort`
    bool participates = false;     // developer_profit >= reservation profit
    bool capital_feasible = true;  // upfront_cost <= available capital
    bool entered = false;          // both of the above
};

/// Evaluates one model. Entry feasibility is judged on the developer's
/// unconstrained optimal plan: a developer whose plan needs more capital than
/// `capital` cannot take the model.
ModelOutcome evaluate_model(const DeveloperProfile& dev, const BusinessModel& model, double platform_cost,
                            double capital = std::numeric_limits<double>::infinity());

struct ComparisonTable {
    std::vector<ModelOutcome> rows;  // canonical order: tag, then label
    std::optional<ModelTag> preferred_by_developer;
    std::optional<ModelTag> preferred_by_platform;
};

/// Ranks the models among entered rows; ties (within 1e-12 relative) go to the
/// earlier row in canonical order, so RSI wins ties.
ComparisonTable compare_models(const DeveloperProfile& dev, std::span<const BusinessModel> models,
                               double platform_cost,
                               double capital = std::numeric_limits<double>::infinity());

/// Smallest capital on the ascending grid at which the developer prefers
/// pay-per-token at `token_price` over RSI under `rsi`; empty if RSI is
/// preferred everywhere on the grid.
std::optional<double> capital_frontier(const DeveloperProfile& dev, const CommissionPolicy& rsi, double token_price,
                                       std::span<const double> capital_grid, double platform_cost = 0.0);

}  // namespace revshare
