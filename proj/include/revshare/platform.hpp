#pragma once

// Outer stage of the game: the platform picks the commission rate anticipating
// every developer's best response and entry decision.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revshare/best_response.hpp"
#include "revshare/model.hpp"

namespace revshare {

struct DeveloperOutcome {
    std::string id;
    BestResponse response;
    bool entered = false;
    /// commission + ad share - c q for entrants, 0 otherwise.
    double platform_margin = 0.0;
};

struct PlatformEvaluation {
    double profit = 0.0;
    std::size_t entrants = 0;
    double commission = 0.0;
    double serving_cost = 0.0;
    std::vector<DeveloperOutcome> developers;  // ascending id order
};

/// Full breakdown of platform profit under `policy`. Non-entrants contribute
/// nothing; entrants under the activity threshold cost c q and pay nothing.
PlatformEvaluation evaluate_platform(const PlatformParams& params, const CommissionPolicy& policy,
                                     SolveMethod method = SolveMethod::Auto);

/// Pi = sum over entrants of (commission_i - c q_i). With `rate` set, the
/// policy's schedule is replaced by a flat rate (ad share and threshold kept).
double platform_profit(const PlatformParams& params, const CommissionPolicy& policy,
                       std::optional<double> rate = std::nullopt, SolveMethod method = SolveMethod::Auto);

struct ProfitSample {
    double alpha = 0.0;
    double profit = 0.0;
    std::size_t entrants = 0;
    bool operator==(const ProfitSample&) const = default;
};

/// Pi and N on an ascending grid of flat rates.
std::vector<ProfitSample> profit_curve(const PlatformParams& params, std::span<const double> alphas,
                                       const CommissionPolicy& base = {}, SolveMethod method = SolveMethod::Auto);

struct OptimizerOptions {
    double grid_step = 1e-3;
    double tolerance = 1e-8;  // refinement bracket width
    SolveMethod method = SolveMethod::Auto;
};

struct EquilibriumReport {
    double alpha = 0.0;
    double profit = 0.0;
    std::size_t entrants = 0;
    std::vector<DeveloperOutcome> per_developer;
    std::size_t grid_size = 0;
    int refinement_iterations = 0;
    std::vector<ProfitSample> samples;
    /// Rates at which a developer leaves: N is higher at the break and lower
    /// just above it.
    std::vector<double> participation_breaks;
    std::optional<double> analytic_alpha;
    bool degenerate = false;  // no rate yields positive profit
};

/// Stackelberg commission: dense grid over [0, 1], exact location of every
/// participation break inside the grid, and ternary refinement around the
/// best candidate within its constant-participation segment. Ties go to the
/// smallest rate.
EquilibriumReport optimize_alpha(const PlatformParams& params, const CommissionPolicy& base = {},
                                 const OptimizerOptions& options = {});

/// (1 + c/A)/2 clamped to [0, 1] for a single LinearEffort/Quadratic developer
/// with q = e, zero reservation profit and a plain flat policy; empty otherwise.
std::optional<double> closed_form_alpha(const PlatformParams& params, const CommissionPolicy& base = {});

struct MarginalDecomposition {
    double participation_term = 0.0;  // N'(alpha) * margin per entrant
    double intensive_term = 0.0;      // N(alpha) * d(margin per entrant)/d(alpha)
    bool smoothed = false;            // N from the reservation-profit CDF
    double total() const { return participation_term + intensive_term; }
};

/// Central-difference split of dPi/dalpha into the participation and
/// per-developer effects. Requires alpha in (0, 1) with [alpha - h, alpha + h]
/// inside [0, 1].
MarginalDecomposition marginal_decomposition(const PlatformParams& params, double alpha, double h,
                                             const CommissionPolicy& base = {},
                                             SolveMethod method = SolveMethod::Auto);

}  // namespace revshare
