#pragma once

// Seeded generator of heterogeneous developer populations, commission sweeps
// over them, and a Bernoulli risk-pooling simulation of platform profit.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revshare/best_response.hpp"
#include "revshare/model.hpp"
#include "revshare/random.hpp"

namespace revshare {

struct FamilyMix {
    double linear_effort = 1.0;
    double power_effort = 0.0;
    double linear_demand = 0.0;
    bool operator==(const FamilyMix&) const = default;
};

struct PopulationSpec {
    std::size_t size = 0;
    std::uint64_t seed = 0;
    Distribution scale = Distribution::uniform(0.5, 1.5);       // A
    Distribution elasticity = Distribution::uniform(0.3, 1.0);  // beta, PowerEffort
    Distribution cost_scale = Distribution::uniform(0.5, 2.0);  // k
    Distribution reservation = Distribution::uniform(0.0, 0.1);
    Distribution demand_base = Distribution::uniform(0.5, 2.0);     // a, LinearDemand
    Distribution demand_quality = Distribution::uniform(0.1, 1.0);  // b, LinearDemand
    Distribution demand_slope = Distribution::uniform(0.5, 2.0);    // d, LinearDemand
    double cost_exponent = 2.0;  // 2 gives Quadratic costs
    FamilyMix mix;

    std::vector<std::string> diagnostics() const;
    void validate() const;
    bool operator==(const PopulationSpec&) const = default;
};

struct GeneratedPopulation {
    std::vector<DeveloperProfile> profiles;
    std::size_t redraws = 0;  // rejected invalid draws
};

/// Draws `spec.size` developers; developer i uses its own substream of the
/// master seed, so the result does not depend on generation order. Ids are
/// "dev00000000"-style and sort in generation order.
GeneratedPopulation generate_population(const PopulationSpec& spec);

/// Generated population plus the platform cost, with the reservation
/// distribution attached for smoothed participation derivatives.
PlatformParams make_platform(const PopulationSpec& spec, double marginal_cost);

/// lo, lo + step, ..., hi (hi included when within half a step).
std::vector<double> make_grid(double lo, double hi, double step);

struct SweepPoint {
    double alpha = 0.0;
    double profit = 0.0;
    std::size_t entrants = 0;
    double mean_developer_profit = 0.0;  // over entrants
    double developer_surplus = 0.0;      // sum over entrants of (profit - reservation)
    bool operator==(const SweepPoint&) const = default;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double argmax_alpha = 0.0;  // smallest alpha attaining the largest profit
    std::uint64_t seed = 0;

    /// Columns alpha,profit,entrants,mean_developer_profit,developer_surplus
    /// with shortest round-trip number formatting.
    std::string to_csv() const;
};

SweepResult sweep(const PlatformParams& params, std::span<const double> alphas, const CommissionPolicy& base = {},
                  std::uint64_t seed = 0, SolveMethod method = SolveMethod::Auto);
SweepResult sweep(const PopulationSpec& spec, std::span<const double> alphas, double marginal_cost,
                  const CommissionPolicy& base = {}, SolveMethod method = SolveMethod::Auto);

struct RiskPoolingReport {
    double deterministic_profit = 0.0;  // every entrant succeeds
    double expected_profit = 0.0;       // s * sum commission - sum c q
    double mean = 0.0;
    double stddev = 0.0;
    double p05 = 0.0;  // nearest-rank 5th percentile
    double coefficient_of_variation = 0.0;
    std::size_t entrants = 0;
    std::size_t draws = 0;
};

/// Each entrant independently succeeds with probability `success_probability`
/// and pays its commission, or fails and pays nothing; serving cost c q is
/// incurred either way. Developer i's success draws come from its own
/// substream of `seed`.
RiskPoolingReport risk_pooling_report(const PlatformParams& params, const CommissionPolicy& policy,
                                      double success_probability, std::size_t draws, std::uint64_t seed);

}  // namespace revshare
