#pragma once

// Core types of the platform/developer game: revenue technologies, effort
// costs, developer profiles, platform parameters, commission policies and the
// business models the comparator evaluates. No solver logic lives here.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "revshare/random.hpp"

namespace revshare {

enum class RevenueFamily { LinearEffort, PowerEffort, LinearDemand };

/// How a developer turns effort (and, for LinearDemand, price) into revenue
/// and API usage.
///
///   LinearEffort   R = A e
///   PowerEffort    R = A e^beta, 0 < beta <= 1
///   LinearDemand   R = p max(0, a + b e - d p)
///
/// Usage is q = kappa R when `usage_per_revenue` is set, otherwise q = e for
/// the effort families and q = R for LinearDemand.
struct RevenueTechnology {
    RevenueFamily family = RevenueFamily::LinearEffort;
    double scale = 1.0;       // A
    double elasticity = 1.0;  // beta
    double demand_base = 0.0;
    double demand_quality = 0.0;
    double demand_slope = 1.0;
    std::optional<double> usage_per_revenue;

    static RevenueTechnology linear(double scale);
    static RevenueTechnology power(double scale, double elasticity);
    static RevenueTechnology linear_demand(double base, double quality, double slope,
                                           std::optional<double> usage_per_revenue = std::nullopt);

    std::vector<std::string> diagnostics() const;
    void validate() const;

    bool operator==(const RevenueTechnology&) const = default;
};

enum class CostFamily { Quadratic, PowerConvex };

/// phi(e) = k e^2 / 2 (Quadratic) or k e^m / m (PowerConvex, m >= 2).
struct EffortCost {
    CostFamily family = CostFamily::Quadratic;
    double scale = 1.0;
    double exponent = 2.0;

    static EffortCost quadratic(double k);
    static EffortCost power(double k, double exponent);

    /// 2 for Quadratic regardless of the stored exponent.
    double effective_exponent() const { return family == CostFamily::Quadratic ? 2.0 : exponent; }

    std::vector<std::string> diagnostics() const;
    void validate() const;

    bool operator==(const EffortCost&) const = default;
};

struct DeveloperProfile {
    std::string id;
    RevenueTechnology tech;
    EffortCost cost;
    double reservation_profit = 0.0;  // pi_0; +inf means "never enters"
    double ad_yield = 0.0;            // advertising revenue per request

    std::vector<std::string> diagnostics() const;
    void validate() const;

    bool operator==(const DeveloperProfile&) const = default;
};

/// Platform-side parameters: per-request serving cost and the developer
/// population. Ids must be unique; aggregates are always summed in id order.
struct PlatformParams {
    double marginal_cost = 0.0;
    std::vector<DeveloperProfile> population;
    /// Set when the population's reservation profits were drawn from a known
    /// distribution; enables the smoothed participation derivative.
    std::optional<Distribution> reservation_distribution;

    std::vector<std::string> diagnostics() const;
    void validate() const;

    /// True when c is at or above every developer's best revenue per request,
    /// so no developer can be served at a profit.
    bool degenerate() const;

    /// Indices of `population` in ascending id order.
    std::vector<std::size_t> id_order() const;
};

struct RateBand {
    double threshold = 0.0;  // gross revenue at which this marginal rate starts
    double rate = 0.0;

    bool operator==(const RateBand&) const = default;
};

enum class CommissionKind { Flat, Degressive };

/// Commission schedule. A flat policy is a single band starting at zero; a
/// degressive (or progressive) policy applies each band's marginal rate to the
/// revenue falling inside it.
struct CommissionPolicy {
    CommissionKind kind = CommissionKind::Flat;
    std::vector<RateBand> bands{RateBand{0.0, 0.0}};
    std::optional<double> ad_share;
    /// Developers whose usage does not exceed this many requests pay no commission.
    double activity_threshold = 0.0;

    static CommissionPolicy flat(double rate);
    static CommissionPolicy degressive(std::vector<RateBand> bands);

    bool is_flat() const { return kind == CommissionKind::Flat; }
    double flat_rate() const { return bands.front().rate; }

    /// Same ad share and threshold, flat schedule at `rate`.
    CommissionPolicy with_rate(double rate) const;

    double commission(double gross) const;
    double marginal_rate(double gross) const;
    double min_rate() const;
    double max_rate() const;
    /// Without an explicit ad share, advertising revenue is pooled with the
    /// other gross revenue and charged under the same schedule.
    bool pools_ad_revenue() const { return !ad_share.has_value(); }

    std::vector<std::string> diagnostics() const;
    void validate() const;

    bool operator==(const CommissionPolicy&) const = default;
};

enum class ModelTag { Rsi, PayPerToken, Freemium, Subscription, Marketplace, Hybrid };

const char* to_string(ModelTag tag);

struct RsiTerms {
    CommissionPolicy policy;
    bool operator==(const RsiTerms&) const = default;
};
struct PayPerTokenTerms {
    double token_price = 0.0;
    bool operator==(const PayPerTokenTerms&) const = default;
};
struct FreemiumTerms {
    double free_quota = 0.0;  // requests
    double overage_price = 0.0;
    bool operator==(const FreemiumTerms&) const = default;
};
struct SubscriptionTerms {
    double fee = 0.0;
    bool operator==(const SubscriptionTerms&) const = default;
};
struct MarketplaceTerms {
    double commission = 0.0;
    double token_price = 0.0;
    bool operator==(const MarketplaceTerms&) const = default;
};

struct BusinessModel;

struct HybridTerms {
    std::vector<BusinessModel> choices;
    bool operator==(const HybridTerms&) const;
};

struct BusinessModel {
    std::variant<RsiTerms, PayPerTokenTerms, FreemiumTerms, SubscriptionTerms, MarketplaceTerms, HybridTerms> terms;

    static BusinessModel rsi(CommissionPolicy policy) { return {RsiTerms{std::move(policy)}}; }
    static BusinessModel pay_per_token(double price) { return {PayPerTokenTerms{price}}; }
    static BusinessModel freemium(double quota, double price) { return {FreemiumTerms{quota, price}}; }
    static BusinessModel subscription(double fee) { return {SubscriptionTerms{fee}}; }
    static BusinessModel marketplace(double commission, double price) { return {MarketplaceTerms{commission, price}}; }
    static BusinessModel hybrid(std::vector<BusinessModel> choices) { return {HybridTerms{std::move(choices)}}; }

    ModelTag tag() const { return static_cast<ModelTag>(terms.index()); }
    std::string describe() const;

    std::vector<std::string> diagnostics() const;
    void validate() const;

    bool operator==(const BusinessModel&) const = default;
};

/// R(e, p). `price` is required for LinearDemand and ignored otherwise.
double revenue(const RevenueTechnology& tech, double effort, std::optional<double> price = std::nullopt);

/// q(e, p), see RevenueTechnology.
double usage(const RevenueTechnology& tech, double effort, std::optional<double> price = std::nullopt);

double effort_cost(const EffortCost& cost, double effort);
double marginal_effort_cost(const EffortCost& cost, double effort);

/// Largest revenue a request can earn for this technology (dR/dq at its
/// supremum); +inf for PowerEffort with beta < 1.
double max_revenue_per_request(const RevenueTechnology& tech);

}  // namespace revshare
