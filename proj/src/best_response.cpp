#include "revshare/best_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "revshare/error.hpp"
#include "revshare/search.hpp"

namespace revshare {

namespace {

constexpr const char* kModule = "best-response";
constexpr double kMaxBracket = 1e12;

// s * x with 0 * inf treated as 0 (zero retained share kills an unbounded marginal).
double scaled(double s, double x) { return s == 0.0 ? 0.0 : s * x; }

double bracket_upper(const DeveloperProfile& dev, const EffortObjective& obj) {
    double hi = 1.0;
    while (objective_marginal(dev, obj, hi) >= 0.0) {
        hi *= 2.0;
        if (hi > kMaxBracket)
            throw DomainError(kModule, fmt::format("payoff of '{}' is unbounded in effort", dev.id));
    }
    return hi;
}

// Numeric maximizer; see maximize_effort.
EffortSolution numeric_maximum(const DeveloperProfile& dev, const EffortObjective& obj) {
    const double upper = 2.0 * bracket_upper(dev, obj);
    auto value = [&](double e) { return objective_value(dev, obj, e); };
    auto marginal = [&](double e) { return objective_marginal(dev, obj, e); };

    auto golden = search::golden_section_maximize(value, 0.0, upper, 1e-12 * upper);
    int iterations = golden.iterations;
    double x = golden.x;

    // Polish: the marginal changes sign at most once (+ to -), so bisect it.
    const double m = marginal(x);
    double lo = x, hi = x;
    if (m > 0.0) {
        double step = 1e-9 * std::max(1.0, x);
        hi = std::min(upper, x + step);
        while (marginal(hi) > 0.0 && hi < upper) {
            lo = hi;
            step *= 2.0;
            hi = std::min(upper, hi + step);
            ++iterations;
        }
    } else if (m < 0.0) {
        double step = 1e-9 * std::max(1.0, x);
        lo = std::max(0.0, x - step);
        while (marginal(lo) <= 0.0 && lo > 0.0) {
            hi = lo;
            step *= 2.0;
            lo = std::max(0.0, lo - step);
            ++iterations;
        }
    }
    if (lo < hi && marginal(lo) > 0.0 && marginal(hi) <= 0.0) {
        auto [a, b] = search::bisect_boundary([&](double e) { return marginal(e) > 0.0; }, lo, hi);
        x = value(b) > value(a) ? b : a;
        iterations += 64;
    } else if (lo < hi && marginal(lo) <= 0.0) {
        x = lo;  // reached zero effort with non-positive marginal
    }
    if (!std::isfinite(x)) throw ConvergenceError(kModule, "effort search diverged", marginal(golden.x));
    if (value(0.0) >= value(x)) x = 0.0;
    return {x, SolutionMethod::Numeric, iterations};
}

EffortSolution closed_form_maximum(const DeveloperProfile& dev, const EffortObjective& obj) {
    const auto& tech = dev.tech;
    double coefficient = 0.0;  // C in  C e^beta - phi(e)
    double beta = tech.family == RevenueFamily::PowerEffort ? tech.elasticity : 1.0;
    if (tech.usage_per_revenue) {
        coefficient = (obj.revenue_share + obj.per_request * *tech.usage_per_revenue) * tech.scale;
    } else if (tech.family == RevenueFamily::LinearEffort) {
        coefficient = obj.revenue_share * tech.scale + obj.per_request;
    } else {
        coefficient = obj.revenue_share * tech.scale;
    }
    if (coefficient <= 0.0) return {0.0, SolutionMethod::Analytic, 0};
    // FOC: C beta e^(beta-1) = k e^(m-1)  =>  e = (C beta / k)^(1/(m-beta))
    const double m = dev.cost.effective_exponent();
    const double base = coefficient * beta / dev.cost.scale;
    const double power = m - beta;
    const double e = power == 1.0 ? base : std::pow(base, 1.0 / power);
    return {e, SolutionMethod::Analytic, 0};
}

BestResponse assemble(const DeveloperProfile& dev, const CommissionPolicy& policy, double effort,
                      SolutionMethod method, int iterations) {
    BestResponse br;
    br.effort = effort;
    br.method = method;
    br.iterations = iterations;
    if (dev.tech.family == RevenueFamily::LinearDemand) br.price = solve_price(dev.tech, effort).price;
    br.gross_revenue = attainable_revenue(dev.tech, effort);
    br.usage = attainable_usage(dev.tech, effort);
    br.ad_revenue = dev.ad_yield * br.usage;
    br.charged = br.usage >= policy.activity_threshold;
    const bool pooled = policy.pools_ad_revenue();
    double rate = 0.0;
    if (br.charged) {
        const double base = br.gross_revenue + (pooled ? br.ad_revenue : 0.0);
        br.commission = policy.commission(base) + (pooled ? 0.0 : *policy.ad_share * br.ad_revenue);
        rate = policy.marginal_rate(base);
    }
    br.net_profit = br.gross_revenue + br.ad_revenue - br.commission - effort_cost(dev.cost, effort);

    const double ad_rate = !br.charged ? 0.0 : pooled ? rate : *policy.ad_share;
    const EffortObjective active{1.0 - rate, dev.ad_yield * (1.0 - ad_rate), 0.0};
    br.foc_residual = objective_marginal(dev, active, effort);
    return br;
}

void check_rate(double rate) {
    if (!(rate >= 0.0 && rate <= 1.0))
        throw DomainError(kModule, fmt::format("commission rate out of [0,1] ({})", rate));
}

}  // namespace

PriceChoice solve_price(const RevenueTechnology& tech, double effort) {
    if (tech.family != RevenueFamily::LinearDemand)
        throw DomainError(kModule, "price is only a choice variable for LinearDemand technologies");
    if (!(tech.demand_slope > 0.0)) throw DomainError(kModule, "demand slope d must be positive");
    if (!(effort >= 0.0)) throw DomainError(kModule, fmt::format("effort must be non-negative (got {})", effort));
    const double intercept = tech.demand_base + tech.demand_quality * effort;
    if (intercept <= 0.0) return {std::nullopt, 0.0, true};
    return {intercept / (2.0 * tech.demand_slope), intercept * intercept / (4.0 * tech.demand_slope), false};
}

double attainable_revenue(const RevenueTechnology& tech, double effort) {
    if (tech.family == RevenueFamily::LinearDemand) return solve_price(tech, effort).revenue;
    return revenue(tech, effort);
}

double marginal_attainable_revenue(const RevenueTechnology& tech, double effort) {
    switch (tech.family) {
        case RevenueFamily::LinearEffort:
            return tech.scale;
        case RevenueFamily::PowerEffort:
            if (tech.elasticity == 1.0) return tech.scale;
            if (effort == 0.0) return std::numeric_limits<double>::infinity();
            return tech.scale * tech.elasticity * std::pow(effort, tech.elasticity - 1.0);
        case RevenueFamily::LinearDemand:
            return tech.demand_quality * (tech.demand_base + tech.demand_quality * effort) / (2.0 * tech.demand_slope);
    }
    return 0.0;
}

double attainable_usage(const RevenueTechnology& tech, double effort) {
    if (tech.usage_per_revenue) return *tech.usage_per_revenue * attainable_revenue(tech, effort);
    if (tech.family == RevenueFamily::LinearDemand) return attainable_revenue(tech, effort);
    return effort;
}

double marginal_attainable_usage(const RevenueTechnology& tech, double effort) {
    if (tech.usage_per_revenue) return scaled(*tech.usage_per_revenue, marginal_attainable_revenue(tech, effort));
    if (tech.family == RevenueFamily::LinearDemand) return marginal_attainable_revenue(tech, effort);
    return 1.0;
}

double objective_value(const DeveloperProfile& dev, const EffortObjective& obj, double effort) {
    return obj.revenue_share * attainable_revenue(dev.tech, effort) +
           obj.per_request * attainable_usage(dev.tech, effort) - effort_cost(dev.cost, effort) - obj.fixed;
}

double objective_marginal(const DeveloperProfile& dev, const EffortObjective& obj, double effort) {
    const double mr = scaled(obj.revenue_share, marginal_attainable_revenue(dev.tech, effort));
    const double mq = scaled(obj.per_request, marginal_attainable_usage(dev.tech, effort));
    return mr + mq - marginal_effort_cost(dev.cost, effort);
}

bool has_closed_form(const DeveloperProfile& dev, const EffortObjective& obj) {
    switch (dev.tech.family) {
        case RevenueFamily::LinearDemand:
            return false;
        case RevenueFamily::LinearEffort:
            return true;
        case RevenueFamily::PowerEffort:
            return dev.tech.usage_per_revenue.has_value() || obj.per_request == 0.0;
    }
    return false;
}

EffortSolution maximize_effort(const DeveloperProfile& dev, const EffortObjective& obj, SolveMethod method) {
    const bool closed = has_closed_form(dev, obj);
    if (method == SolveMethod::Analytic && !closed)
        throw DomainError(kModule, fmt::format("no closed-form best response for '{}'", dev.id));
    if (method == SolveMethod::Numeric || !closed) return numeric_maximum(dev, obj);
    return closed_form_maximum(dev, obj);
}

double developer_profit(const DeveloperProfile& dev, const CommissionPolicy& policy, double effort) {
    const double r = attainable_revenue(dev.tech, effort);
    const double q = attainable_usage(dev.tech, effort);
    const double ad = dev.ad_yield * q;
    double commission = 0.0;
    if (q >= policy.activity_threshold) {
        commission = policy.pools_ad_revenue() ? policy.commission(r + ad)
                                               : policy.commission(r) + *policy.ad_share * ad;
    }
    return r + ad - commission - effort_cost(dev.cost, effort);
}

BestResponse best_response(const DeveloperProfile& dev, const CommissionPolicy& policy, SolveMethod method) {
    dev.validate();
    if (auto d = policy.diagnostics(); !d.empty()) throw DomainError(kModule, d.front());

    const bool pooled = policy.pools_ad_revenue();
    auto piece = [&](double rate) {
        const double ad_rate = pooled ? rate : *policy.ad_share;
        return EffortObjective{1.0 - rate, dev.ad_yield * (1.0 - ad_rate), 0.0};
    };

    if (policy.is_flat() && policy.activity_threshold == 0.0) {
        const auto sol = maximize_effort(dev, piece(policy.flat_rate()), method);
        return assemble(dev, policy, sol.effort, sol.method, sol.iterations);
    }

    // Piecewise policy: every smooth piece is an EffortObjective; the optimum is
    // a piece optimum or a piece boundary.
    const auto undistorted = maximize_effort(dev, EffortObjective{1.0, dev.ad_yield, 0.0}, method);
    const double upper = 2.0 * undistorted.effort + 1.0;
    int iterations = undistorted.iterations;

    std::vector<double> candidates{0.0, undistorted.effort};
    for (const auto& band : policy.bands) {
        const auto sol = maximize_effort(dev, piece(band.rate), method);
        candidates.push_back(sol.effort);
        iterations += sol.iterations;
    }
    auto add_crossing = [&](auto&& level, double target) {
        if (!(level(0.0) < target) || level(upper) < target) return;
        auto [lo, hi] = search::bisect_boundary([&](double e) { return level(e) < target; }, 0.0, upper);
        candidates.push_back(lo);
        candidates.push_back(hi);
    };
    auto commissionable = [&](double e) {
        return attainable_revenue(dev.tech, e) + (pooled ? dev.ad_yield * attainable_usage(dev.tech, e) : 0.0);
    };
    for (std::size_t j = 1; j < policy.bands.size(); ++j) add_crossing(commissionable, policy.bands[j].threshold);
    if (policy.activity_threshold > 0.0)
        add_crossing([&](double e) { return attainable_usage(dev.tech, e); }, policy.activity_threshold);

    std::sort(candidates.begin(), candidates.end());
    double best = candidates.front();
    double best_value = developer_profit(dev, policy, best);
    for (double e : candidates) {
        const double v = developer_profit(dev, policy, e);
        if (v > best_value) {
            best = e;
            best_value = v;
        }
    }
    return assemble(dev, policy, best, SolutionMethod::Numeric, iterations);
}

BestResponse solve_effort(const DeveloperProfile& dev, double rate, SolveMethod method) {
    check_rate(rate);
    return best_response(dev, CommissionPolicy::flat(rate), method);
}

FocResidual foc_residual(const DeveloperProfile& dev, double rate, double effort) {
    if (!(effort >= 0.0)) throw DomainError(kModule, fmt::format("effort must be non-negative (got {})", effort));
    const double ad = dev.ad_yield * (1.0 - rate);
    const EffortObjective obj{1.0 - rate, ad, 0.0};

    FocResidual out;
    const double mr = scaled(1.0 - rate, marginal_attainable_revenue(dev.tech, effort)) +
                      scaled(ad, marginal_attainable_usage(dev.tech, effort));
    const double mc = marginal_effort_cost(dev.cost, effort);
    out.value = mr - mc;

    const double h = std::max(1e-6, 1e-6 * effort);
    auto f = [&](double e) { return objective_value(dev, obj, e); };
    // Second-order one-sided difference when the central stencil would leave e >= 0.
    out.finite_difference = effort >= h ? (f(effort + h) - f(effort - h)) / (2.0 * h)
                                        : (-3.0 * f(effort) + 4.0 * f(effort + h) - f(effort + 2.0 * h)) / (2.0 * h);

    if (!std::isfinite(out.value)) {
        out.unbounded_marginal = true;
        out.value = std::copysign(std::numeric_limits<double>::max(), out.value);
        out.agrees = true;
        return out;
    }
    const double scale = std::max({1.0, std::abs(mr), std::abs(mc)});
    out.agrees = std::abs(out.value - out.finite_difference) <= 1e-5 * scale;
    return out;
}

}  // namespace revshare
