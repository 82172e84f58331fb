#include "revshare/platform.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "revshare/error.hpp"
#include "revshare/parallel.hpp"
#include "revshare/participation.hpp"
#include "revshare/search.hpp"

namespace revshare {

namespace {

constexpr const char* kModule = "platform-optimizer";

void validate_inputs(const PlatformParams& params, const CommissionPolicy& policy) {
    if (auto d = params.diagnostics(); !d.empty()) throw DomainError(kModule, d.front());
    if (auto d = policy.diagnostics(); !d.empty()) throw DomainError(kModule, d.front());
}

void check_grid(std::span<const double> alphas) {
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        if (!(alphas[j] >= 0.0 && alphas[j] <= 1.0))
            throw DomainError(kModule, fmt::format("rate out of [0,1] ({})", alphas[j]));
        if (j > 0 && alphas[j] < alphas[j - 1])
            throw DomainError(kModule, fmt::format("alpha grid not sorted at index {}", j));
    }
}

PlatformEvaluation evaluate_unchecked(const PlatformParams& params, const CommissionPolicy& policy,
                                      SolveMethod method) {
    PlatformEvaluation out;
    const auto order = params.id_order();
    out.developers.reserve(order.size());
    for (std::size_t i : order) {
        const auto& dev = params.population[i];
        DeveloperOutcome o;
        o.id = dev.id;
        o.response = best_response(dev, policy, method);
        o.entered = enters(dev, o.response);
        if (o.entered) {
            const double cost = params.marginal_cost * o.response.usage;
            o.platform_margin = o.response.commission - cost;
            out.commission += o.response.commission;
            out.serving_cost += cost;
            out.profit += o.platform_margin;
            ++out.entrants;
        }
        out.developers.push_back(std::move(o));
    }
    return out;
}

ProfitSample sample_at(const PlatformParams& params, const CommissionPolicy& base, double alpha, SolveMethod method) {
    const auto ev = evaluate_unchecked(params, base.with_rate(alpha), method);
    return {alpha, ev.profit, ev.entrants};
}

std::vector<ProfitSample> curve_unchecked(const PlatformParams& params, std::span<const double> alphas,
                                          const CommissionPolicy& base, SolveMethod method) {
    std::vector<ProfitSample> out(alphas.size());
    parallel_for(alphas.size(), [&](std::size_t j) { out[j] = sample_at(params, base, alphas[j], method); });
    return out;
}

}  // namespace

PlatformEvaluation evaluate_platform(const PlatformParams& params, const CommissionPolicy& policy,
                                     SolveMethod method) {
    validate_inputs(params, policy);
    return evaluate_unchecked(params, policy, method);
}

double platform_profit(const PlatformParams& params, const CommissionPolicy& policy, std::optional<double> rate,
                       SolveMethod method) {
    if (rate && !(*rate >= 0.0 && *rate <= 1.0))
        throw DomainError(kModule, fmt::format("rate out of [0,1] ({})", *rate));
    const auto effective = rate ? policy.with_rate(*rate) : policy;
    return evaluate_platform(params, effective, method).profit;
}

std::vector<ProfitSample> profit_curve(const PlatformParams& params, std::span<const double> alphas,
                                       const CommissionPolicy& base, SolveMethod method) {
    validate_inputs(params, base);
    check_grid(alphas);
    return curve_unchecked(params, alphas, base, method);
}

std::optional<double> closed_form_alpha(const PlatformParams& params, const CommissionPolicy& base) {
    if (params.population.size() != 1) return std::nullopt;
    const auto& dev = params.population.front();
    const bool quadratic = dev.cost.effective_exponent() == 2.0;
    if (dev.tech.family != RevenueFamily::LinearEffort || !quadratic || dev.tech.usage_per_revenue ||
        dev.ad_yield != 0.0 || dev.reservation_profit != 0.0 || base.activity_threshold != 0.0)
        return std::nullopt;
    // Pi = (A/k)(1 - alpha)(alpha A - c)  =>  alpha* = (1 + c/A)/2
    return std::clamp(0.5 * (1.0 + params.marginal_cost / dev.tech.scale), 0.0, 1.0);
}

EquilibriumReport optimize_alpha(const PlatformParams& params, const CommissionPolicy& base,
                                 const OptimizerOptions& options) {
    validate_inputs(params, base);
    if (!(options.grid_step > 0.0 && options.grid_step <= 1.0))
        throw DomainError(kModule, fmt::format("grid step must lie in (0, 1] (got {})", options.grid_step));
    if (!(options.tolerance > 0.0)) throw DomainError(kModule, "refinement tolerance must be positive");

    const auto n = static_cast<std::size_t>(std::llround(1.0 / options.grid_step)) + 1;
    std::vector<double> alphas(n);
    for (std::size_t i = 0; i < n; ++i) alphas[i] = static_cast<double>(i) / static_cast<double>(n - 1);

    EquilibriumReport report;
    report.grid_size = n;
    report.samples = curve_unchecked(params, alphas, base, options.method);

    auto sample = [&](double a) { return sample_at(params, base, a, options.method); };

    // Locate every participation break between neighbouring grid points. The
    // break itself keeps the higher count, so the left side of each bracket is
    // a candidate optimum that a grid cannot hit.
    std::vector<ProfitSample> candidates = report.samples;
    std::vector<std::pair<double, double>> breaks;  // {last alpha with old N, first with new N}
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t target = report.samples[i].entrants;
        double lo = alphas[i - 1];
        std::size_t count = report.samples[i - 1].entrants;
        while (count != target) {
            const std::size_t current = count;
            auto [a, b] = search::bisect_boundary([&](double x) { return sample(x).entrants == current; }, lo,
                                                  alphas[i]);
            breaks.emplace_back(a, b);
            candidates.push_back(sample(a));
            const auto after = sample(b);
            lo = b;
            count = after.entrants;
            if (b >= alphas[i]) break;
        }
    }
    for (const auto& br : breaks) report.participation_breaks.push_back(br.first);

    std::sort(candidates.begin(), candidates.end(),
              [](const ProfitSample& x, const ProfitSample& y) { return x.alpha < y.alpha; });
    auto tie_tolerance = [](double v) { return 1e-12 * std::max(1.0, std::abs(v)); };
    ProfitSample best = candidates.front();
    for (const auto& c : candidates)
        if (c.profit > best.profit + tie_tolerance(best.profit)) best = c;

    // Refine inside the constant-participation segment that holds the best candidate.
    double seg_lo = 0.0, seg_hi = 1.0;
    for (const auto& [last_old, first_new] : breaks) {
        if (last_old < best.alpha) seg_lo = std::max(seg_lo, first_new);
        if (last_old >= best.alpha) seg_hi = std::min(seg_hi, last_old);
    }
    const double lo = std::max(best.alpha - options.grid_step, seg_lo);
    const double hi = std::min(best.alpha + options.grid_step, seg_hi);
    if (hi > lo) {
        auto refined = search::ternary_maximize([&](double a) { return sample(a).profit; }, lo, hi,
                                                options.tolerance);
        report.refinement_iterations = refined.iterations;
        const auto r = sample(refined.x);
        const double tol = tie_tolerance(best.profit);
        if (r.profit > best.profit + tol || (std::abs(r.profit - best.profit) <= tol && r.alpha < best.alpha))
            best = r;
    }

    const auto final_eval = evaluate_unchecked(params, base.with_rate(best.alpha), options.method);
    report.alpha = best.alpha;
    report.profit = final_eval.profit;
    report.entrants = final_eval.entrants;
    report.per_developer = final_eval.developers;
    report.degenerate = !(report.profit > 0.0);
    report.analytic_alpha = closed_form_alpha(params, base);
    return report;
}

MarginalDecomposition marginal_decomposition(const PlatformParams& params, double alpha, double h,
                                             const CommissionPolicy& base, SolveMethod method) {
    validate_inputs(params, base);
    if (!(h > 0.0)) throw DomainError(kModule, fmt::format("step h must be positive (got {})", h));
    if (!(alpha > 0.0 && alpha < 1.0 && alpha - h >= 0.0 && alpha + h <= 1.0))
        throw DomainError(kModule, fmt::format("alpha {} with step {} reaches the boundary of [0,1]", alpha, h));

    MarginalDecomposition out;
    out.smoothed = params.reservation_distribution.has_value();

    struct Point {
        double count;
        double profit;
    };
    auto at = [&](double a) -> Point {
        const auto ev = evaluate_unchecked(params, base.with_rate(a), method);
        if (!out.smoothed) return {static_cast<double>(ev.entrants), ev.profit};
        // Expected entry given each developer's profit and the reservation CDF.
        Point p{0.0, 0.0};
        for (const auto& d : ev.developers) {
            const double weight = params.reservation_distribution->cdf(d.response.net_profit);
            p.count += weight;
            p.profit += weight * (d.response.commission - params.marginal_cost * d.response.usage);
        }
        return p;
    };
    auto margin = [](const Point& p) { return p.count > 0.0 ? p.profit / p.count : 0.0; };

    const Point mid = at(alpha), up = at(alpha + h), down = at(alpha - h);
    out.participation_term = (up.count - down.count) / (2.0 * h) * margin(mid);
    out.intensive_term = mid.count * (margin(up) - margin(down)) / (2.0 * h);
    return out;
}

}  // namespace revshare
