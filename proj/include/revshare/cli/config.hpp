#pragma once

// Declarative experiment description for the revshare command-line tool.
//
// The text format is INI-like: top-level `key = value` lines, then sections
//
//   [platform]         cost
//   [policy]           kind (flat|degressive), rate, breakpoints, ad_share, activity_threshold
//   [solver]           method (auto|analytic|numeric), grid_step, tolerance
//   [developer <id>]   family, scale, elasticity, demand_base, demand_quality, demand_slope,
//                      usage_per_revenue, cost, cost_scale, cost_exponent, reservation, ad_yield
//   [population]       size, scale, elasticity, cost_scale, reservation, demand_base,
//                      demand_quality, demand_slope, cost_exponent, mix
//   [grid]             alpha_min, alpha_max, step, alphas
//   [compare]          rsi, token_price, subscription_fee, freemium, marketplace, hybrid,
//                      capital, capital_grid
//   [ledger]           path, freemium
//   [scenario]         id, count, amount, free_users
//   [pool]             success_probability, draws
//
// '#' starts a comment. Currency (breakpoints, fees, capital, reservation,
// scenario amount) is written in decimal units and must be a whole number of
// cents.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "revshare/best_response.hpp"
#include "revshare/ecosystem.hpp"
#include "revshare/model.hpp"

namespace revshare::cli {

enum class Command { Solve, Sweep, Compare, Scenario, Settle, Pool };
enum class OutputFormat { Csv, Json };

const char* to_string(Command c);
const char* to_string(OutputFormat f);
const char* to_string(SolveMethod m);
std::optional<Command> parse_command(std::string_view text);

struct SolverSpec {
    SolveMethod method = SolveMethod::Auto;
    double grid_step = 1e-3;
    double tolerance = 1e-8;
    bool operator==(const SolverSpec&) const = default;
};

struct GridSpec {
    double alpha_min = 0.0;
    double alpha_max = 1.0;
    double step = 1e-3;
    std::optional<std::vector<double>> alphas;  // explicit grid, overrides the range

    std::vector<double> values() const;
    bool operator==(const GridSpec&) const = default;
};

struct CompareSpec {
    bool rsi = true;
    std::optional<double> token_price;
    std::optional<double> subscription_fee;
    std::optional<FreemiumTerms> freemium;
    std::optional<MarketplaceTerms> marketplace;
    std::vector<ModelTag> hybrid;  // members taken from the models above
    std::optional<double> capital;
    std::vector<double> capital_grid;  // capital frontier between RSI and pay-per-token

    /// Business models in declaration order; RSI uses `policy`.
    std::vector<BusinessModel> models(const CommissionPolicy& policy) const;
    bool operator==(const CompareSpec&) const = default;
};

struct LedgerSpec {
    std::string path;
    bool freemium = false;
    bool operator==(const LedgerSpec&) const = default;
};

/// Reproduces one of the worked revenue-split examples:
///   1: count x amount subscriptions (default 1000 x $20.00)
///   2: count x amount sales (default 10000 x $0.50)
///   3: count premium x amount sales plus free_users free-tier requests (default 100 x $10.00, 400 free)
struct ScenarioSpec {
    int id = 1;
    std::optional<std::int64_t> count;
    std::optional<double> amount;
    std::int64_t free_users = 400;
    bool operator==(const ScenarioSpec&) const = default;
};

struct PoolSpec {
    double success_probability = 0.5;
    std::size_t draws = 10'000;
    bool operator==(const PoolSpec&) const = default;
};

struct ExperimentConfig {
    std::optional<Command> command;
    OutputFormat format = OutputFormat::Json;
    std::optional<std::string> output;
    std::uint64_t seed = 0;
    bool timestamp = true;

    double cost = 0.0;  // platform marginal cost per request
    std::optional<CommissionPolicy> policy;
    SolverSpec solver;
    std::vector<DeveloperProfile> developers;
    std::optional<PopulationSpec> population;
    GridSpec grid;
    CompareSpec compare;
    std::optional<LedgerSpec> ledger;
    ScenarioSpec scenario;
    PoolSpec pool;

    /// Developers listed explicitly, or the generated population (seeded
    /// with `seed`).
    PlatformParams platform() const;

    bool operator==(const ExperimentConfig&) const = default;
};

/// The single linear developer R = e, phi = e^2/2, q = e, pi_0 = 0.
DeveloperProfile canonical_developer();

/// Syntax errors throw ParseError with line and column; semantic problems are
/// left to validate().
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Config text that parses back to an identical ExperimentConfig.
std::string dump_config(const ExperimentConfig& config);

/// Every problem that would stop run() from accepting the config; empty iff
/// the config is runnable.
std::vector<std::string> validate(const ExperimentConfig& config);

/// Thrown by run() when validate() reports problems.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

}  // namespace revshare::cli
