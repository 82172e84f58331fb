#include "revshare/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "revshare/error.hpp"

namespace revshare {

namespace {

constexpr const char* kModule = "core-model";

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void require_effort(double effort) {
    if (!(effort >= 0.0) || !std::isfinite(effort))
        throw DomainError(kModule, fmt::format("effort must be finite and non-negative (got {})", effort));
}

void throw_first(const std::vector<std::string>& diagnostics) {
    if (!diagnostics.empty()) throw DomainError(kModule, diagnostics.front());
}

}  // namespace

// --- RevenueTechnology ------------------------------------------------------

RevenueTechnology RevenueTechnology::linear(double scale) {
    RevenueTechnology t;
    t.family = RevenueFamily::LinearEffort;
    t.scale = scale;
    return t;
}

RevenueTechnology RevenueTechnology::power(double scale, double elasticity) {
    RevenueTechnology t;
    t.family = RevenueFamily::PowerEffort;
    t.scale = scale;
    t.elasticity = elasticity;
    return t;
}

RevenueTechnology RevenueTechnology::linear_demand(double base, double quality, double slope,
                                                   std::optional<double> usage_per_revenue) {
    RevenueTechnology t;
    t.family = RevenueFamily::LinearDemand;
    t.demand_base = base;
    t.demand_quality = quality;
    t.demand_slope = slope;
    t.usage_per_revenue = usage_per_revenue;
    return t;
}

std::vector<std::string> RevenueTechnology::diagnostics() const {
    std::vector<std::string> out;
    switch (family) {
        case RevenueFamily::LinearEffort:
        case RevenueFamily::PowerEffort:
            if (!(std::isfinite(scale) && scale > 0.0))
                out.push_back(fmt::format("revenue scale A must be positive (got {})", scale));
            if (family == RevenueFamily::PowerEffort && !(elasticity > 0.0 && elasticity <= 1.0))
                out.push_back(fmt::format("elasticity beta must lie in (0, 1] (got {})", elasticity));
            break;
        case RevenueFamily::LinearDemand:
            if (!finite_nonneg(demand_base))
                out.push_back(fmt::format("demand base a must be non-negative (got {})", demand_base));
            if (!finite_nonneg(demand_quality))
                out.push_back(fmt::format("demand quality b must be non-negative (got {})", demand_quality));
            if (!(std::isfinite(demand_slope) && demand_slope > 0.0))
                out.push_back(fmt::format("demand slope d must be positive (got {})", demand_slope));
            break;
    }
    if (usage_per_revenue && !finite_nonneg(*usage_per_revenue))
        out.push_back(fmt::format("usage per revenue must be non-negative (got {})", *usage_per_revenue));
    return out;
}

void RevenueTechnology::validate() const { throw_first(diagnostics()); }

// --- EffortCost ---------------------------------------------------------------

EffortCost EffortCost::quadratic(double k) { return {CostFamily::Quadratic, k, 2.0}; }

EffortCost EffortCost::power(double k, double exponent) { return {CostFamily::PowerConvex, k, exponent}; }

std::vector<std::string> EffortCost::diagnostics() const {
    std::vector<std::string> out;
    if (!(std::isfinite(scale) && scale > 0.0))
        out.push_back(fmt::format("effort cost scale k must be positive (got {})", scale));
    if (family == CostFamily::PowerConvex && !(std::isfinite(exponent) && exponent >= 2.0))
        out.push_back(fmt::format("effort cost exponent m must be >= 2 (got {})", exponent));
    return out;
}

void EffortCost::validate() const { throw_first(diagnostics()); }

// --- DeveloperProfile ------------------------------------------------------

std::vector<std::string> DeveloperProfile::diagnostics() const {
    std::vector<std::string> out;
    for (auto& d : tech.diagnostics()) out.push_back(id + ": " + d);
    for (auto& d : cost.diagnostics()) out.push_back(id + ": " + d);
    if (std::isnan(reservation_profit) || reservation_profit < 0.0)
        out.push_back(fmt::format("{}: reservation profit must be non-negative (got {})", id, reservation_profit));
    if (!finite_nonneg(ad_yield))
        out.push_back(fmt::format("{}: ad yield must be non-negative (got {})", id, ad_yield));
    return out;
}

void DeveloperProfile::validate() const { throw_first(diagnostics()); }

// --- PlatformParams ----------------------------------------------------------

std::vector<std::string> PlatformParams::diagnostics() const {
    std::vector<std::string> out;
    if (!finite_nonneg(marginal_cost))
        out.push_back(fmt::format("marginal cost c must be non-negative (got {})", marginal_cost));
    std::set<std::string> seen;
    for (const auto& dev : population) {
        for (auto& d : dev.diagnostics()) out.push_back(std::move(d));
        if (!seen.insert(dev.id).second) out.push_back(fmt::format("duplicate developer id '{}'", dev.id));
    }
    if (reservation_distribution)
        for (auto& d : reservation_distribution->diagnostics()) out.push_back("reservation distribution: " + d);
    return out;
}

void PlatformParams::validate() const { throw_first(diagnostics()); }

bool PlatformParams::degenerate() const {
    return std::none_of(population.begin(), population.end(), [&](const DeveloperProfile& dev) {
        return marginal_cost < max_revenue_per_request(dev.tech) + dev.ad_yield;
    });
}

std::vector<std::size_t> PlatformParams::id_order() const {
    std::vector<std::size_t> order(population.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return population[a].id < population[b].id; });
    return order;
}

// --- CommissionPolicy ----------------------------------------------------------

CommissionPolicy CommissionPolicy::flat(double rate) {
    CommissionPolicy p;
    p.kind = CommissionKind::Flat;
    p.bands = {RateBand{0.0, rate}};
    return p;
}

CommissionPolicy CommissionPolicy::degressive(std::vector<RateBand> bands) {
    CommissionPolicy p;
    p.kind = CommissionKind::Degressive;
    p.bands = std::move(bands);
    return p;
}

CommissionPolicy CommissionPolicy::with_rate(double rate) const {
    CommissionPolicy p = *this;
    p.kind = CommissionKind::Flat;
    p.bands = {RateBand{0.0, rate}};
    return p;
}

double CommissionPolicy::commission(double gross) const {
    if (gross <= 0.0) return 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < bands.size(); ++j) {
        const double lo = bands[j].threshold;
        if (gross <= lo) break;
        const double hi = j + 1 < bands.size() ? bands[j + 1].threshold : gross;
        total += bands[j].rate * (std::min(gross, hi) - lo);
    }
    return total;
}

double CommissionPolicy::marginal_rate(double gross) const {
    double rate = bands.front().rate;
    for (const auto& band : bands)
        if (gross >= band.threshold) rate = band.rate;
    return rate;
}

double CommissionPolicy::min_rate() const {
    double r = bands.front().rate;
    for (const auto& b : bands) r = std::min(r, b.rate);
    return ad_share ? std::min(r, *ad_share) : r;
}

double CommissionPolicy::max_rate() const {
    double r = bands.front().rate;
    for (const auto& b : bands) r = std::max(r, b.rate);
    return ad_share ? std::max(r, *ad_share) : r;
}

std::vector<std::string> CommissionPolicy::diagnostics() const {
    std::vector<std::string> out;
    auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
    if (bands.empty()) {
        out.push_back("commission schedule has no bands");
        return out;
    }
    if (kind == CommissionKind::Flat && bands.size() != 1) out.push_back("flat commission must have exactly one rate");
    if (bands.front().threshold != 0.0)
        out.push_back(fmt::format("first breakpoint must start at revenue 0 (got {})", bands.front().threshold));
    for (std::size_t j = 0; j < bands.size(); ++j) {
        if (!rate_ok(bands[j].rate)) out.push_back(fmt::format("rate out of [0,1] ({})", bands[j].rate));
        if (!std::isfinite(bands[j].threshold))
            out.push_back(fmt::format("breakpoint threshold must be finite (got {})", bands[j].threshold));
        if (j > 0 && !(bands[j].threshold > bands[j - 1].threshold))
            out.push_back(fmt::format("breakpoints not strictly increasing: ({}:{}) followed by ({}:{})",
                                      bands[j - 1].threshold, bands[j - 1].rate, bands[j].threshold, bands[j].rate));
    }
    if (ad_share && !rate_ok(*ad_share)) out.push_back(fmt::format("ad share rate out of [0,1] ({})", *ad_share));
    if (!finite_nonneg(activity_threshold))
        out.push_back(fmt::format("activity threshold must be non-negative (got {})", activity_threshold));
    return out;
}

void CommissionPolicy::validate() const { throw_first(diagnostics()); }

// --- BusinessModel ----------------------------------------------------------

const char* to_string(ModelTag tag) {
    switch (tag) {
        case ModelTag::Rsi: return "RSI";
        case ModelTag::PayPerToken: return "PayPerToken";
        case ModelTag::Freemium: return "Freemium";
        case ModelTag::Subscription: return "Subscription";
        case ModelTag::Marketplace: return "Marketplace";
        case ModelTag::Hybrid: return "Hybrid";
    }
    return "?";
}

bool HybridTerms::operator==(const HybridTerms& other) const { return choices == other.choices; }

std::string BusinessModel::describe() const {
    struct Visitor {
        std::string operator()(const RsiTerms& t) const {
            std::string s = "RSI(";
            for (std::size_t j = 0; j < t.policy.bands.size(); ++j)
                s += fmt::format("{}{}:{}", j ? "," : "", t.policy.bands[j].threshold, t.policy.bands[j].rate);
            if (t.policy.ad_share) s += fmt::format(";ad={}", *t.policy.ad_share);
            if (t.policy.activity_threshold > 0.0) s += fmt::format(";threshold={}", t.policy.activity_threshold);
            return s + ")";
        }
        std::string operator()(const PayPerTokenTerms& t) const { return fmt::format("PayPerToken({})", t.token_price); }
        std::string operator()(const FreemiumTerms& t) const {
            return fmt::format("Freemium({},{})", t.free_quota, t.overage_price);
        }
        std::string operator()(const SubscriptionTerms& t) const { return fmt::format("Subscription({})", t.fee); }
        std::string operator()(const MarketplaceTerms& t) const {
            return fmt::format("Marketplace({},{})", t.commission, t.token_price);
        }
        std::string operator()(const HybridTerms& t) const {
            std::string s = "Hybrid(";
            for (std::size_t j = 0; j < t.choices.size(); ++j) s += (j ? "|" : "") + t.choices[j].describe();
            return s + ")";
        }
    };
    return std::visit(Visitor{}, terms);
}

std::vector<std::string> BusinessModel::diagnostics() const {
    std::vector<std::string> out;
    auto price = [&](const char* what, double v) {
        if (!finite_nonneg(v)) out.push_back(fmt::format("{} must be non-negative (got {})", what, v));
    };
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, RsiTerms>) {
                for (auto& d : t.policy.diagnostics()) out.push_back(std::move(d));
            } else if constexpr (std::is_same_v<T, PayPerTokenTerms>) {
                price("token price", t.token_price);
            } else if constexpr (std::is_same_v<T, FreemiumTerms>) {
                price("free quota", t.free_quota);
                price("overage price", t.overage_price);
            } else if constexpr (std::is_same_v<T, SubscriptionTerms>) {
                price("subscription fee", t.fee);
            } else if constexpr (std::is_same_v<T, MarketplaceTerms>) {
                if (!(t.commission >= 0.0 && t.commission <= 1.0))
                    out.push_back(fmt::format("marketplace commission rate out of [0,1] ({})", t.commission));
                price("token price", t.token_price);
            } else {
                if (t.choices.empty()) out.push_back("hybrid choice set is empty");
                for (const auto& c : t.choices)
                    for (auto& d : c.diagnostics()) out.push_back(std::move(d));
            }
        },
        terms);
    return out;
}

void BusinessModel::validate() const { throw_first(diagnostics()); }

// --- Primitive functions ---------------------------------------------------

double revenue(const RevenueTechnology& tech, double effort, std::optional<double> price) {
    require_effort(effort);
    switch (tech.family) {
        case RevenueFamily::LinearEffort:
            return tech.scale * effort;
        case RevenueFamily::PowerEffort:
            return tech.scale * std::pow(effort, tech.elasticity);
        case RevenueFamily::LinearDemand: {
            if (!price) throw DomainError(kModule, "LinearDemand revenue requires a price");
            if (!(*price > 0.0) || !std::isfinite(*price))
                throw DomainError(kModule, fmt::format("price must be positive (got {})", *price));
            const double demand = tech.demand_base + tech.demand_quality * effort - tech.demand_slope * *price;
            return *price * std::max(0.0, demand);
        }
    }
    return 0.0;
}

double usage(const RevenueTechnology& tech, double effort, std::optional<double> price) {
    const double r = revenue(tech, effort, price);
    if (tech.usage_per_revenue) return *tech.usage_per_revenue * r;
    return tech.family == RevenueFamily::LinearDemand ? r : effort;
}

double effort_cost(const EffortCost& cost, double effort) {
    require_effort(effort);
    if (cost.family == CostFamily::Quadratic) return 0.5 * cost.scale * effort * effort;
    return cost.scale * std::pow(effort, cost.exponent) / cost.exponent;
}

double marginal_effort_cost(const EffortCost& cost, double effort) {
    require_effort(effort);
    if (cost.family == CostFamily::Quadratic) return cost.scale * effort;
    return cost.scale * std::pow(effort, cost.exponent - 1.0);
}

double max_revenue_per_request(const RevenueTechnology& tech) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (tech.usage_per_revenue) return *tech.usage_per_revenue > 0.0 ? 1.0 / *tech.usage_per_revenue : inf;
    switch (tech.family) {
        case RevenueFamily::LinearEffort:
            return tech.scale;
        case RevenueFamily::PowerEffort:
            return tech.elasticity < 1.0 ? inf : tech.scale;
        case RevenueFamily::LinearDemand:
            return 1.0;
    }
    return 0.0;
}

}  // namespace revshare
