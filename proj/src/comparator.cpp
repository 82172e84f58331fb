#include "revshare/comparator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "revshare/best_response.hpp"
#include "revshare/error.hpp"
#include "revshare/search.hpp"

namespace revshare {

namespace {

constexpr const char* kModule = "model-comparator";

bool ties(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

struct Plan {
    double effort = 0.0;
    double developer_profit = 0.0;
    double platform_income = 0.0;  // everything the developer pays the platform
    double upfront_cost = 0.0;
    double foc = 0.0;
};

// Smooth-objective plan: developer payoff s R + w q - phi - fixed.
Plan smooth_plan(const DeveloperProfile& dev, const EffortObjective& obj) {
    Plan p;
    p.effort = maximize_effort(dev, obj).effort;
    p.developer_profit = objective_value(dev, obj, p.effort);
    p.foc = objective_marginal(dev, obj, p.effort);
    return p;
}

Plan freemium_plan(const DeveloperProfile& dev, const FreemiumTerms& t) {
    const EffortObjective free_piece{1.0, dev.ad_yield, 0.0};
    const EffortObjective paid_piece{1.0, dev.ad_yield - t.overage_price, 0.0};
    auto overage = [&](double e) { return std::max(0.0, attainable_usage(dev.tech, e) - t.free_quota); };
    auto payoff = [&](double e) { return objective_value(dev, free_piece, e) - t.overage_price * overage(e); };

    const double e_free = maximize_effort(dev, free_piece).effort;
    std::vector<double> candidates{0.0, e_free, maximize_effort(dev, paid_piece).effort};
    const double upper = 2.0 * e_free + 1.0;
    auto within_quota = [&](double e) { return attainable_usage(dev.tech, e) <= t.free_quota; };
    if (within_quota(0.0) && !within_quota(upper)) {
        auto [lo, hi] = search::bisect_boundary(within_quota, 0.0, upper);
        candidates.push_back(lo);
        candidates.push_back(hi);
    }
    std::sort(candidates.begin(), candidates.end());

    Plan p;
    p.effort = candidates.front();
    p.developer_profit = payoff(p.effort);
    for (double e : candidates) {
        if (const double v = payoff(e); v > p.developer_profit) {
            p.effort = e;
            p.developer_profit = v;
        }
    }
    p.upfront_cost = t.overage_price * overage(p.effort);
    p.platform_income = p.upfront_cost;
    p.foc = objective_marginal(dev, overage(p.effort) > 0.0 ? paid_piece : free_piece, p.effort);
    return p;
}

ModelOutcome finish(const DeveloperProfile& dev, const BusinessModel& model, const Plan& plan, double platform_cost,
                    double capital) {
    ModelOutcome out;
    out.tag = model.tag();
    out.label = model.describe();
    out.effort = plan.effort;
    out.gross_revenue = attainable_revenue(dev.tech, plan.effort);
    out.usage = attainable_usage(dev.tech, plan.effort);
    out.developer_profit = plan.developer_profit;
    out.upfront_cost = plan.upfront_cost;
    out.foc_residual = plan.foc;
    out.participates = plan.developer_profit >= dev.reservation_profit;
    out.capital_feasible = plan.upfront_cost <= capital + 1e-12 * std::max(1.0, plan.upfront_cost);
    out.entered = out.participates && out.capital_feasible;
    out.platform_profit = out.entered ? plan.platform_income - platform_cost * out.usage : 0.0;
    return out;
}

// Index of the preferred row among entered rows; ties keep the earlier row.
template <typename Key>
std::optional<std::size_t> preferred(const std::vector<ModelOutcome>& rows, Key key) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].entered) continue;
        if (!best || (key(rows[i]) > key(rows[*best]) && !ties(key(rows[i]), key(rows[*best])))) best = i;
    }
    return best;
}

}  // namespace

ModelOutcome evaluate_model(const DeveloperProfile& dev, const BusinessModel& model, double platform_cost,
                            double capital) {
    dev.validate();
    if (auto d = model.diagnostics(); !d.empty()) throw DomainError(kModule, d.front());
    if (!(platform_cost >= 0.0)) throw DomainError(kModule, "platform cost must be non-negative");

    const double rho = dev.ad_yield;
    struct Visitor {
        const DeveloperProfile& dev;
        double rho;

        Plan operator()(const RsiTerms& t) const {
            const auto br = best_response(dev, t.policy);
            return {br.effort, br.net_profit, br.commission, 0.0, br.foc_residual};
        }
        Plan operator()(const PayPerTokenTerms& t) const {
            Plan p = smooth_plan(dev, {1.0, rho - t.token_price, 0.0});
            p.upfront_cost = t.token_price * attainable_usage(dev.tech, p.effort);
            p.platform_income = p.upfront_cost;
            return p;
        }
        Plan operator()(const FreemiumTerms& t) const { return freemium_plan(dev, t); }
        Plan operator()(const SubscriptionTerms& t) const {
            Plan p = smooth_plan(dev, {1.0, rho, t.fee});
            p.upfront_cost = t.fee;
            p.platform_income = t.fee;
            return p;
        }
        Plan operator()(const MarketplaceTerms& t) const {
            Plan p = smooth_plan(dev, {1.0 - t.commission, rho - t.token_price, 0.0});
            p.upfront_cost = t.token_price * attainable_usage(dev.tech, p.effort);
            p.platform_income = p.upfront_cost + t.commission * attainable_revenue(dev.tech, p.effort);
            return p;
        }
        Plan operator()(const HybridTerms&) const { return {}; }
    };

    if (const auto* hybrid = std::get_if<HybridTerms>(&model.terms)) {
        std::vector<ModelOutcome> members;
        for (const auto& choice : hybrid->choices)
            members.push_back(evaluate_model(dev, choice, platform_cost, capital));
        std::vector<std::size_t> order(members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return members[a].tag < members[b].tag; });
        std::vector<ModelOutcome> ranked;
        for (std::size_t i : order) ranked.push_back(members[i]);
        auto pick = preferred(ranked, [](const ModelOutcome& o) { return o.developer_profit; });
        if (!pick) {
            // Nobody enters: report the member that would pay the developer most.
            pick = 0;
            for (std::size_t i = 1; i < ranked.size(); ++i)
                if (ranked[i].developer_profit > ranked[*pick].developer_profit) pick = i;
        }
        ModelOutcome out = ranked[*pick];
        out.chosen = out.chosen ? out.chosen : std::optional<ModelTag>(out.tag);
        out.tag = ModelTag::Hybrid;
        out.label = model.describe();
        return out;
    }
    return finish(dev, model, std::visit(Visitor{dev, rho}, model.terms), platform_cost, capital);
}

ComparisonTable compare_models(const DeveloperProfile& dev, std::span<const BusinessModel> models,
                               double platform_cost, double capital) {
    ComparisonTable table;
    for (const auto& m : models) table.rows.push_back(evaluate_model(dev, m, platform_cost, capital));
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const ModelOutcome& a, const ModelOutcome& b) {
        if (a.tag != b.tag) return a.tag < b.tag;
        return a.label < b.label;
    });
    if (auto i = preferred(table.rows, [](const ModelOutcome& o) { return o.developer_profit; }))
        table.preferred_by_developer = table.rows[*i].tag;
    if (auto i = preferred(table.rows, [](const ModelOutcome& o) { return o.platform_profit; }))
        table.preferred_by_platform = table.rows[*i].tag;
    return table;
}

std::optional<double> capital_frontier(const DeveloperProfile& dev, const CommissionPolicy& rsi, double token_price,
                                       std::span<const double> capital_grid, double platform_cost) {
    for (std::size_t j = 1; j < capital_grid.size(); ++j)
        if (capital_grid[j] < capital_grid[j - 1])
            throw DomainError(kModule, fmt::format("capital grid not sorted at index {}", j));
    const BusinessModel models[] = {BusinessModel::rsi(rsi), BusinessModel::pay_per_token(token_price)};
    for (double capital : capital_grid) {
        const auto table = compare_models(dev, models, platform_cost, capital);
        if (table.preferred_by_developer && *table.preferred_by_developer != ModelTag::Rsi) return capital;
    }
    return std::nullopt;
}

}  // namespace revshare
