#include "revshare/ecosystem.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "revshare/error.hpp"
#include "revshare/parallel.hpp"
#include "revshare/participation.hpp"
#include "revshare/platform.hpp"

namespace revshare {

namespace {

constexpr const char* kModule = "mc-ecosystem";
constexpr std::uint64_t kPopulationStream = 1;
constexpr std::uint64_t kRiskStream = 2;
constexpr int kMaxRedraws = 10'000;

template <typename Valid>
double draw(const Distribution& dist, RandomStream& rng, std::size_t& redraws, const char* name, Valid&& valid) {
    for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        const double v = dist.sample(rng);
        if (valid(v)) return v;
        ++redraws;
    }
    throw DomainError(kModule, fmt::format("{} distribution {} produced no valid draw in {} attempts", name,
                                           dist.to_string(), kMaxRedraws));
}

DeveloperProfile draw_developer(const PopulationSpec& spec, std::size_t index, std::size_t& redraws) {
    RandomStream rng(spec.seed, kPopulationStream, index);
    DeveloperProfile dev;
    dev.id = fmt::format("dev{:08}", index);

    const double u = rng.uniform();
    const auto& mix = spec.mix;
    const RevenueFamily family = u < mix.linear_effort                      ? RevenueFamily::LinearEffort
                                 : u < mix.linear_effort + mix.power_effort ? RevenueFamily::PowerEffort
                                                                            : RevenueFamily::LinearDemand;
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };

    dev.cost = spec.cost_exponent == 2.0 ? EffortCost::quadratic(1.0) : EffortCost::power(1.0, spec.cost_exponent);
    dev.cost.scale = draw(spec.cost_scale, rng, redraws, "cost_scale", positive);

    switch (family) {
        case RevenueFamily::LinearEffort:
            dev.tech = RevenueTechnology::linear(draw(spec.scale, rng, redraws, "scale", positive));
            break;
        case RevenueFamily::PowerEffort: {
            const double a = draw(spec.scale, rng, redraws, "scale", positive);
            const double beta = draw(spec.elasticity, rng, redraws, "elasticity",
                                     [](double v) { return v > 0.0 && v <= 1.0; });
            dev.tech = RevenueTechnology::power(a, beta);
            break;
        }
        case RevenueFamily::LinearDemand: {
            // Quadratic costs need b^2/(2d) < k for a bounded undistorted payoff.
            for (int attempt = 0;; ++attempt) {
                const double a = draw(spec.demand_base, rng, redraws, "demand_base", nonneg);
                const double b = draw(spec.demand_quality, rng, redraws, "demand_quality", nonneg);
                const double d = draw(spec.demand_slope, rng, redraws, "demand_slope", positive);
                if (spec.cost_exponent > 2.0 || b * b / (2.0 * d) < dev.cost.scale) {
                    dev.tech = RevenueTechnology::linear_demand(a, b, d);
                    break;
                }
                ++redraws;
                if (attempt >= kMaxRedraws)
                    throw DomainError(kModule, "demand distributions never give a bounded developer payoff");
            }
            break;
        }
    }
    dev.reservation_profit = draw(spec.reservation, rng, redraws, "reservation", nonneg);
    return dev;
}

}  // namespace

std::vector<std::string> PopulationSpec::diagnostics() const {
    std::vector<std::string> out;
    auto check = [&](const char* name, const Distribution& d) {
        for (auto& msg : d.diagnostics()) out.push_back(fmt::format("{}: {}", name, msg));
    };
    check("scale", scale);
    check("elasticity", elasticity);
    check("cost_scale", cost_scale);
    check("reservation", reservation);
    check("demand_base", demand_base);
    check("demand_quality", demand_quality);
    check("demand_slope", demand_slope);
    if (!(cost_exponent >= 2.0)) out.push_back(fmt::format("cost exponent must be >= 2 (got {})", cost_exponent));
    const double total = mix.linear_effort + mix.power_effort + mix.linear_demand;
    if (mix.linear_effort < 0.0 || mix.power_effort < 0.0 || mix.linear_demand < 0.0)
        out.push_back("family mix proportions must be non-negative");
    if (std::abs(total - 1.0) > 1e-9) out.push_back(fmt::format("family mix proportions sum to {}, not 1", total));
    return out;
}

void PopulationSpec::validate() const {
    if (auto d = diagnostics(); !d.empty()) throw DomainError(kModule, d.front());
}

GeneratedPopulation generate_population(const PopulationSpec& spec) {
    spec.validate();
    GeneratedPopulation out;
    out.profiles.resize(spec.size);
    std::vector<std::size_t> redraws(spec.size, 0);
    parallel_for(spec.size, [&](std::size_t i) { out.profiles[i] = draw_developer(spec, i, redraws[i]); });
    for (auto r : redraws) out.redraws += r;
    return out;
}

PlatformParams make_platform(const PopulationSpec& spec, double marginal_cost) {
    PlatformParams params;
    params.marginal_cost = marginal_cost;
    params.population = generate_population(spec).profiles;
    params.reservation_distribution = spec.reservation;
    return params;
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
        throw DomainError(kModule, fmt::format("invalid grid [{}, {}] step {}", lo, hi, step));
    const auto intervals = static_cast<std::size_t>(std::floor((hi - lo) / step + 0.5));
    std::vector<double> grid(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) grid[i] = lo + static_cast<double>(i) * step;
    if (intervals > 0 && std::abs(grid.back() - hi) <= 0.5 * step) grid.back() = hi;
    return grid;
}

std::string SweepResult::to_csv() const {
    std::string out = "alpha,profit,entrants,mean_developer_profit,developer_surplus\n";
    for (const auto& p : points)
        out += fmt::format("{},{},{},{},{}\n", p.alpha, p.profit, p.entrants, p.mean_developer_profit,
                           p.developer_surplus);
    return out;
}

SweepResult sweep(const PlatformParams& params, std::span<const double> alphas, const CommissionPolicy& base,
                  std::uint64_t seed, SolveMethod method) {
    if (auto d = params.diagnostics(); !d.empty()) throw DomainError(kModule, d.front());
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        if (!(alphas[j] >= 0.0 && alphas[j] <= 1.0))
            throw DomainError(kModule, fmt::format("rate out of [0,1] ({})", alphas[j]));
        if (j > 0 && alphas[j] < alphas[j - 1]) throw DomainError(kModule, "alpha grid not sorted");
    }
    SweepResult out;
    out.seed = seed;
    out.points.resize(alphas.size());
    const auto order = params.id_order();
    parallel_for(alphas.size(), [&](std::size_t j) {
        const auto ev = evaluate_platform(params, base.with_rate(alphas[j]), method);
        SweepPoint p;
        p.alpha = alphas[j];
        p.profit = ev.profit;
        p.entrants = ev.entrants;
        // ev.developers follows id order.
        double total = 0.0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto& d = ev.developers[k];
            if (!d.entered) continue;
            total += d.response.net_profit;
            p.developer_surplus += d.response.net_profit - params.population[order[k]].reservation_profit;
        }
        p.mean_developer_profit = p.entrants > 0 ? total / static_cast<double>(p.entrants) : 0.0;
        out.points[j] = p;
    });
    if (!out.points.empty()) {
        const SweepPoint* best = &out.points.front();
        for (const auto& p : out.points)
            if (p.profit > best->profit) best = &p;
        out.argmax_alpha = best->alpha;
    }
    return out;
}

SweepResult sweep(const PopulationSpec& spec, std::span<const double> alphas, double marginal_cost,
                  const CommissionPolicy& base, SolveMethod method) {
    return sweep(make_platform(spec, marginal_cost), alphas, base, spec.seed, method);
}

RiskPoolingReport risk_pooling_report(const PlatformParams& params, const CommissionPolicy& policy,
                                      double success_probability, std::size_t draws, std::uint64_t seed) {
    if (!(success_probability >= 0.0 && success_probability <= 1.0))
        throw DomainError(kModule, fmt::format("success probability out of [0,1] ({})", success_probability));
    if (draws < 1) throw DomainError(kModule, "risk pooling needs at least one draw");

    const auto ev = evaluate_platform(params, policy);
    RiskPoolingReport out;
    out.draws = draws;
    out.entrants = ev.entrants;
    out.deterministic_profit = ev.profit;

    std::vector<double> totals(draws, 0.0);
    double commission = 0.0, cost = 0.0;
    // Developers in id order; developer k owns substream k of the seed.
    for (std::size_t k = 0; k < ev.developers.size(); ++k) {
        const auto& d = ev.developers[k];
        if (!d.entered) continue;
        const double serving = params.marginal_cost * d.response.usage;
        commission += d.response.commission;
        cost += serving;
        RandomStream rng(seed, kRiskStream, k);
        for (std::size_t b = 0; b < draws; ++b)
            totals[b] += (rng.bernoulli(success_probability) ? d.response.commission : 0.0) - serving;
    }
    out.expected_profit = success_probability * commission - cost;

    // Shifted by the first draw so identical draws give exactly zero spread.
    const double shift = totals.front();
    double sum = 0.0;
    for (double t : totals) sum += t - shift;
    const double offset = sum / static_cast<double>(draws);
    out.mean = shift + offset;
    double sq = 0.0;
    for (double t : totals) sq += (t - shift - offset) * (t - shift - offset);
    out.stddev = draws > 1 ? std::sqrt(sq / static_cast<double>(draws - 1)) : 0.0;
    out.coefficient_of_variation = out.mean != 0.0 ? out.stddev / std::abs(out.mean) : 0.0;

    std::sort(totals.begin(), totals.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(draws)));
    out.p05 = totals[std::max<std::size_t>(rank, 1) - 1];
    return out;
}

}  // namespace revshare
