#include <doctest.h>

#include <cmath>
#include <random>

#include "revshare/error.hpp"
#include "revshare/model.hpp"
#include "revshare/random.hpp"

using namespace revshare;

namespace {

bool contains(const std::vector<std::string>& diags, const std::string& needle) {
    for (const auto& d : diags)
        if (d.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("revenue of each family") {
    CHECK(revenue(RevenueTechnology::linear(1.0), 0.4) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(revenue(RevenueTechnology::power(2.0, 0.5), 0.25) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(revenue(RevenueTechnology::linear_demand(10, 2, 1), 1.0, 6.0) == doctest::Approx(36.0));

    SUBCASE("zero effort with zero base earns nothing") {
        CHECK(revenue(RevenueTechnology::linear(3.0), 0.0) == 0.0);
        CHECK(revenue(RevenueTechnology::power(3.0, 0.4), 0.0) == 0.0);
        CHECK(revenue(RevenueTechnology::linear_demand(0.0, 2.0, 1.0), 0.0, 1.5) == 0.0);
    }
    SUBCASE("demand never goes negative") {
        CHECK(revenue(RevenueTechnology::linear_demand(1.0, 0.0, 1.0), 0.0, 5.0) == 0.0);
    }
    SUBCASE("power revenue matches a tabulated grid") {
        const auto tech = RevenueTechnology::power(2.0, 0.5);
        for (int i = 0; i <= 100; ++i) {
            const double e = 0.01 * i;
            CHECK(revenue(tech, e) == doctest::Approx(2.0 * std::sqrt(e)).epsilon(1e-14));
        }
    }
}

TEST_CASE("revenue rejects bad inputs") {
    CHECK_THROWS_AS(revenue(RevenueTechnology::linear(1.0), -0.1), DomainError);
    CHECK_THROWS_AS(revenue(RevenueTechnology::linear_demand(1, 1, 1), 1.0), DomainError);
    CHECK_THROWS_AS(usage(RevenueTechnology::linear_demand(1, 1, 1), 1.0), DomainError);
}

TEST_CASE("usage rule") {
    CHECK(usage(RevenueTechnology::linear(1.0), 0.4) == doctest::Approx(0.4));
    CHECK(usage(RevenueTechnology::power(2.0, 0.5), 0.0) == 0.0);
    CHECK(usage(RevenueTechnology::linear_demand(10, 2, 1, 3.0), 1.0, 6.0) == doctest::Approx(108.0));
    auto with_kappa = RevenueTechnology::linear(2.0);
    with_kappa.usage_per_revenue = 0.5;
    CHECK(usage(with_kappa, 3.0) == doctest::Approx(3.0));
}

TEST_CASE("effort cost") {
    CHECK(effort_cost(EffortCost::quadratic(1.0), 0.4) == doctest::Approx(0.08));
    CHECK(effort_cost(EffortCost::quadratic(1.0), 0.0) == 0.0);
    CHECK(effort_cost(EffortCost::power(2.0, 3.0), 0.0) == 0.0);
    CHECK(effort_cost(EffortCost::power(2.0, 3.0), 1.5) == doctest::Approx(2.25));
    CHECK_THROWS_AS(effort_cost(EffortCost::quadratic(1.0), -1.0), DomainError);

    SUBCASE("power cost equals the integral of its marginal cost") {
        const auto cost = EffortCost::power(2.0, 3.0);
        const int n = 200000;
        const double h = 1.5 / n;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += marginal_effort_cost(cost, (i + 0.5) * h) * h;
        CHECK(sum == doctest::Approx(2.25).epsilon(1e-9));
    }
}

TEST_CASE("shape properties on sampled points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 3.0), lam(0.01, 0.99);
    const RevenueTechnology techs[] = {RevenueTechnology::linear(1.3), RevenueTechnology::power(0.7, 0.35),
                                       RevenueTechnology::power(2.0, 1.0),
                                       RevenueTechnology::linear_demand(2.0, 0.5, 1.2, 0.8)};
    const EffortCost costs[] = {EffortCost::quadratic(0.7), EffortCost::power(1.5, 2.5), EffortCost::power(0.3, 4.0)};
    for (int trial = 0; trial < 2000; ++trial) {
        double e1 = u(rng), e2 = u(rng);
        if (e1 > e2) std::swap(e1, e2);
        const double l = lam(rng);
        const double mid = l * e1 + (1 - l) * e2;
        for (const auto& t : techs) {
            const std::optional<double> price =
                t.family == RevenueFamily::LinearDemand ? std::optional(1.1) : std::nullopt;
            CHECK(revenue(t, e1, price) <= revenue(t, e2, price));
            CHECK(usage(t, e1, price) <= usage(t, e2, price));
            if (t.family == RevenueFamily::PowerEffort)
                CHECK(revenue(t, mid) >= l * revenue(t, e1) + (1 - l) * revenue(t, e2) - 1e-9);
        }
        for (const auto& c : costs) {
            CHECK(effort_cost(c, mid) <= l * effort_cost(c, e1) + (1 - l) * effort_cost(c, e2) + 1e-9);
            if (e2 > e1) CHECK(effort_cost(c, e1) < effort_cost(c, e2));
        }
    }
}

TEST_CASE("technology and cost diagnostics") {
    CHECK(contains(RevenueTechnology::power(1.0, 1.2).diagnostics(), "elasticity"));
    CHECK(contains(RevenueTechnology::linear(0.0).diagnostics(), "scale"));
    CHECK(contains(RevenueTechnology::linear_demand(1, 1, 0).diagnostics(), "slope"));
    CHECK(contains(EffortCost::power(1.0, 1.5).diagnostics(), "exponent"));
    CHECK(RevenueTechnology::power(1.0, 0.5).diagnostics().empty());
    CHECK_THROWS_AS(RevenueTechnology::power(1.0, 1.2).validate(), DomainError);

    DeveloperProfile d;
    d.id = "a";
    d.reservation_profit = -1.0;
    CHECK_FALSE(d.diagnostics().empty());
    d.reservation_profit = std::nan("");
    CHECK_FALSE(d.diagnostics().empty());
    d.reservation_profit = 0.2;
    CHECK(d.diagnostics().empty());
}

TEST_CASE("degenerate market is flagged, not rejected") {
    PlatformParams p;
    DeveloperProfile d;
    d.id = "x";
    p.population = {d};
    p.marginal_cost = 0.5;
    CHECK_FALSE(p.degenerate());
    p.marginal_cost = 1.0;
    CHECK(p.degenerate());
    CHECK(p.diagnostics().empty());

    p.population.push_back(d);
    CHECK(contains(p.diagnostics(), "duplicate"));
}

TEST_CASE("commission policy") {
    SUBCASE("flat") {
        const auto p = CommissionPolicy::flat(0.3);
        CHECK(p.commission(100.0) == doctest::Approx(30.0));
        CHECK(p.diagnostics().empty());
        CHECK(contains(CommissionPolicy::flat(1.3).diagnostics(), "rate out of [0,1]"));
    }
    SUBCASE("degressive bands apply marginally") {
        const auto p = CommissionPolicy::degressive({{0, 0.3}, {1000, 0.2}, {5000, 0.1}});
        CHECK(p.commission(500) == doctest::Approx(150));
        CHECK(p.commission(2000) == doctest::Approx(300 + 200));
        CHECK(p.commission(6000) == doctest::Approx(300 + 800 + 100));
        CHECK(p.marginal_rate(999) == 0.3);
        CHECK(p.marginal_rate(1000) == 0.2);
        CHECK(p.min_rate() == 0.1);
        CHECK(p.max_rate() == 0.3);
    }
    SUBCASE("degressive commission is continuous and non-decreasing") {
        const auto p = CommissionPolicy::degressive({{0, 0.3}, {10, 0.2}, {20, 0.05}, {35, 0.4}});
        double prev = 0.0;
        for (int i = 0; i <= 50000; ++i) {
            const double g = i * 1e-3;
            const double c = p.commission(g);
            CHECK(c >= prev);
            CHECK(c - prev <= 0.4 * 1e-3 + 1e-12);
            prev = c;
        }
    }
    SUBCASE("breakpoint diagnostics name the offending pair") {
        const auto p = CommissionPolicy::degressive({{0, 0.3}, {1000, 0.2}, {500, 0.1}});
        CHECK(contains(p.diagnostics(), "breakpoints not strictly increasing: (1000:0.2) followed by (500:0.1)"));
        CHECK(contains(CommissionPolicy::degressive({{10, 0.3}}).diagnostics(), "start at revenue 0"));
        CHECK(contains(CommissionPolicy::degressive({}).diagnostics(), "no bands"));
    }
    SUBCASE("ad share enters the rate range") {
        auto p = CommissionPolicy::flat(0.3);
        p.ad_share = 0.1;
        CHECK(p.min_rate() == 0.1);
        CHECK_FALSE(p.pools_ad_revenue());
        p.ad_share = 1.5;
        CHECK(contains(p.diagnostics(), "ad share"));
    }
}

TEST_CASE("business model validation and description") {
    CHECK(BusinessModel::pay_per_token(0.2).diagnostics().empty());
    CHECK_FALSE(BusinessModel::pay_per_token(-0.2).diagnostics().empty());
    CHECK_FALSE(BusinessModel::subscription(-1).diagnostics().empty());
    CHECK_FALSE(BusinessModel::freemium(-1, 0.1).diagnostics().empty());
    CHECK_FALSE(BusinessModel::marketplace(1.2, 0.1).diagnostics().empty());
    CHECK(contains(BusinessModel::hybrid({}).diagnostics(), "hybrid choice set is empty"));
    CHECK(BusinessModel::hybrid({BusinessModel::pay_per_token(0.1)}).tag() == ModelTag::Hybrid);
    CHECK(BusinessModel::rsi(CommissionPolicy::flat(0.25)).describe() == "RSI(0:0.25)");
    CHECK(std::string(to_string(ModelTag::PayPerToken)) == "PayPerToken");
}

TEST_CASE("distributions") {
    const auto u = Distribution::uniform(0.5, 1.5);
    CHECK(u.to_string() == "uniform(0.5, 1.5)");
    CHECK(Distribution::parse(u.to_string()) == u);
    const auto ln = Distribution::lognormal(-1.25, 0.3);
    CHECK(Distribution::parse(ln.to_string()) == ln);
    CHECK(u.cdf(1.0) == doctest::Approx(0.5));
    CHECK(ln.cdf(std::exp(-1.25)) == doctest::Approx(0.5));
    CHECK(u.mean() == doctest::Approx(1.0));
    CHECK_FALSE(Distribution::uniform(2, 1).diagnostics().empty());
    CHECK_FALSE(Distribution::lognormal(0, -1).diagnostics().empty());
    CHECK_THROWS(Distribution::parse("gamma(1, 2)"));
    CHECK_THROWS(Distribution::parse("uniform(1)"));

    RandomStream a(42, 1, 3), b(42, 1, 3), c(42, 1, 4);
    for (int i = 0; i < 100; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
    CHECK(a.uniform() != c.uniform());
}
