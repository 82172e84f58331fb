#pragma once

// Developer's inner problem: choose effort (and price, for LinearDemand) to
// maximize retained revenue minus effort cost, given a commission policy.

#include <optional>

#include "revshare/model.hpp"

namespace revshare {

enum class SolveMethod { Auto, Analytic, Numeric };
enum class SolutionMethod { Analytic, Numeric };

struct PriceChoice {
    std::optional<double> price;  // empty when there is no demand at any price
    double revenue = 0.0;
    bool zero_demand = false;
};

/// Revenue-maximizing price for a LinearDemand technology at fixed effort:
/// p* = (a + b e) / (2d), revenue (a + b e)^2 / (4d).
PriceChoice solve_price(const RevenueTechnology& tech, double effort);

/// Revenue and usage with the price (if any) already chosen optimally, and
/// their analytic derivatives in effort.
double attainable_revenue(const RevenueTechnology& tech, double effort);
double marginal_attainable_revenue(const RevenueTechnology& tech, double effort);
double attainable_usage(const RevenueTechnology& tech, double effort);
double marginal_attainable_usage(const RevenueTechnology& tech, double effort);

/// Developer payoff of the form  s R(e) + w q(e) - phi(e) - fixed.
/// Every fee structure the library models reduces to this on each of its
/// smooth pieces.
struct EffortObjective {
    double revenue_share = 1.0;  // s
    double per_request = 0.0;    // w
    double fixed = 0.0;
};

double objective_value(const DeveloperProfile& dev, const EffortObjective& obj, double effort);
double objective_marginal(const DeveloperProfile& dev, const EffortObjective& obj, double effort);

struct EffortSolution {
    double effort = 0.0;
    SolutionMethod method = SolutionMethod::Analytic;
    int iterations = 0;
};

/// True when `maximize_effort` has a closed form for this profile/objective.
bool has_closed_form(const DeveloperProfile& dev, const EffortObjective& obj);

/// Maximizes an EffortObjective over effort >= 0. The numeric path brackets
/// the optimum by doubling until marginal profit turns negative, doubles that
/// bound, runs golden-section search and then bisects the marginal to full
/// precision. A zero-effort tie is resolved to zero.
EffortSolution maximize_effort(const DeveloperProfile& dev, const EffortObjective& obj,
                               SolveMethod method = SolveMethod::Auto);

struct BestResponse {
    double effort = 0.0;
    std::optional<double> price;
    double gross_revenue = 0.0;
    double usage = 0.0;
    double ad_revenue = 0.0;
    double commission = 0.0;  // everything the platform takes, ad share included
    double net_profit = 0.0;
    double foc_residual = 0.0;
    SolutionMethod method = SolutionMethod::Analytic;
    int iterations = 0;
    bool charged = true;  // false when usage stayed under the activity threshold
};

/// Best response to a flat commission `rate` in [0, 1].
BestResponse solve_effort(const DeveloperProfile& dev, double rate, SolveMethod method = SolveMethod::Auto);

/// Best response to an arbitrary policy (degressive bands, ad share, activity
/// threshold). Piecewise policies are solved by maximizing each smooth piece
/// and evaluating the true payoff at every piece optimum and breakpoint.
BestResponse best_response(const DeveloperProfile& dev, const CommissionPolicy& policy,
                           SolveMethod method = SolveMethod::Auto);

/// Developer payoff of an arbitrary effort under `policy`.
double developer_profit(const DeveloperProfile& dev, const CommissionPolicy& policy, double effort);

struct FocResidual {
    double value = 0.0;              // analytic (1-alpha) R'(e) - phi'(e)
    double finite_difference = 0.0;  // central difference of the payoff
    bool unbounded_marginal = false;
    bool agrees = true;  // analytic and finite-difference within 1e-5 relative
};

/// Stationarity residual of the flat-commission problem at `effort`.
/// Unbounded marginal revenue (e^(beta-1) at e = 0) is reported as
/// +/-DBL_MAX with `unbounded_marginal` set.
FocResidual foc_residual(const DeveloperProfile& dev, double rate, double effort);

}  // namespace revshare
