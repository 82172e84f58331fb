#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "revshare/best_response.hpp"
#include "revshare/error.hpp"

using namespace revshare;

namespace {

DeveloperProfile make(RevenueTechnology tech, EffortCost cost = EffortCost::quadratic(1.0)) {
    DeveloperProfile d;
    d.id = "dev";
    d.tech = tech;
    d.cost = cost;
    return d;
}

}  // namespace

TEST_CASE("canonical best response") {
    const auto d = make(RevenueTechnology::linear(1.0));
    const auto br = solve_effort(d, 0.6);
    CHECK(br.effort == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(br.gross_revenue == doctest::Approx(0.4));
    CHECK(br.usage == doctest::Approx(0.4));
    CHECK(br.net_profit == doctest::Approx(0.08));
    CHECK(br.commission == doctest::Approx(0.24));
    CHECK(br.method == SolutionMethod::Analytic);
    CHECK(std::abs(br.foc_residual) <= 1e-12);
}

TEST_CASE("full commission leaves nothing to work for") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto d = oracle::random_profile(rng, "p" + std::to_string(i));
        const auto br = solve_effort(d, 1.0);
        CHECK(br.effort == 0.0);
        CHECK(br.net_profit == 0.0);
    }
}

TEST_CASE("k = 2, alpha = 0.25 against the brute-force grid") {
    const auto d = make(RevenueTechnology::linear(1.0), EffortCost::quadratic(2.0));
    const auto br = solve_effort(d, 0.25);
    CHECK(br.effort == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(oracle::brute_force_effort(d, 0.25, 10.0) == doctest::Approx(0.375).epsilon(1e-6));
}

TEST_CASE("power effort closed form") {
    const auto d = make(RevenueTechnology::power(1.5, 0.6), EffortCost::quadratic(0.8));
    for (double a : {0.0, 0.2, 0.5, 0.9}) {
        const auto br = solve_effort(d, a);
        CHECK(br.method == SolutionMethod::Analytic);
        CHECK(br.effort == doctest::Approx(oracle::textbook_effort(d, a)).epsilon(1e-12));
    }
}

TEST_CASE("rate out of range is rejected") {
    const auto d = make(RevenueTechnology::linear(1.0));
    CHECK_THROWS_AS(solve_effort(d, -0.1), DomainError);
    CHECK_THROWS_AS(solve_effort(d, 1.1), DomainError);
    CHECK_THROWS_AS(solve_effort(d, std::nan("")), DomainError);
}

TEST_CASE("revenue-maximizing price") {
    auto grid_price = [](const RevenueTechnology& t, double e) {
        return oracle::grid_argmax([&](double p) { return revenue(t, e, p); }, 1e-5, 20.0, 1e-5);
    };
    const auto flat = RevenueTechnology::linear_demand(10, 0, 1);
    for (double e : {0.0, 1.0, 7.0}) {
        const auto pc = solve_price(flat, e);
        REQUIRE(pc.price);
        CHECK(*pc.price == doctest::Approx(5.0));
        CHECK(pc.revenue == doctest::Approx(25.0));
        CHECK(grid_price(flat, e) == doctest::Approx(5.0).epsilon(1e-5));
    }
    const auto t = RevenueTechnology::linear_demand(10, 2, 1);
    const auto pc = solve_price(t, 1.0);
    CHECK(*pc.price == doctest::Approx(6.0));
    CHECK(pc.revenue == doctest::Approx(36.0));
    CHECK(grid_price(t, 1.0) == doctest::Approx(6.0).epsilon(1e-5));

    const auto none = solve_price(RevenueTechnology::linear_demand(0, 0, 1), 3.0);
    CHECK(none.zero_demand);
    CHECK_FALSE(none.price);
    CHECK(none.revenue == 0.0);

    CHECK_THROWS_AS(solve_price(RevenueTechnology::linear(1.0), 1.0), DomainError);
}

TEST_CASE("first-order residual") {
    const auto d = make(RevenueTechnology::linear(1.0));
    CHECK(std::abs(foc_residual(d, 0.6, 0.4).value) <= 1e-15);
    const auto r = foc_residual(d, 0.5, 0.3);
    CHECK(r.value == doctest::Approx(0.2));
    CHECK(r.finite_difference == doctest::Approx(0.2).epsilon(1e-8));
    CHECK(r.agrees);

    const auto p = make(RevenueTechnology::power(1.0, 0.5));
    const auto u = foc_residual(p, 0.0, 0.0);
    CHECK(u.unbounded_marginal);
    CHECK(u.value == DBL_MAX);

    SUBCASE("analytic and finite-difference derivatives agree") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ue(0.0, 2.0), ua(0.0, 1.0);
        for (int i = 0; i < 300; ++i) {
            const auto dev = oracle::random_profile(rng, "f" + std::to_string(i));
            const auto res = foc_residual(dev, ua(rng), ue(rng));
            if (!res.unbounded_marginal) CHECK(res.agrees);
        }
    }
}

TEST_CASE("profit identity and FOC at the optimum") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto d = oracle::random_profile(rng, "p" + std::to_string(i));
        for (double a : {0.0, 0.15, 0.4, 0.75, 0.95}) {
            const auto br = solve_effort(d, a);
            const double expected = (1 - a) * br.gross_revenue - effort_cost(d.cost, br.effort);
            CHECK(br.net_profit == doctest::Approx(expected).epsilon(1e-9));
            if (br.effort > 0) CHECK(std::abs(br.foc_residual) <= 1e-8);
        }
    }
}

TEST_CASE("effort falls as the commission rises") {
    std::mt19937_64 rng(17);
    int checked = 0;
    for (int i = 0; i < 120; ++i) {
        const auto d = oracle::random_profile(rng, "m" + std::to_string(i));
        double prev = INFINITY;
        for (int j = 0; j < 10; ++j) {
            const double a = j / 10.0;
            const double e = solve_effort(d, a).effort;
            CHECK(e <= prev);
            if (prev > 0 && prev != INFINITY) CHECK(e < prev);
            prev = e;
            ++checked;
        }
    }
    CHECK(checked == 1200);
}

TEST_CASE("analytic and numeric paths agree") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 150; ++i) {
        const auto d = oracle::random_profile(rng, "a" + std::to_string(i));
        if (d.tech.family == RevenueFamily::LinearDemand) continue;
        for (double a : {0.0, 0.3, 0.6, 0.9}) {
            const auto an = solve_effort(d, a, SolveMethod::Analytic);
            const auto nu = solve_effort(d, a, SolveMethod::Numeric);
            CHECK(an.method == SolutionMethod::Analytic);
            CHECK(nu.method == SolutionMethod::Numeric);
            CHECK(std::abs(an.effort - nu.effort) <= 1e-6);
        }
    }
    CHECK_THROWS_AS(solve_effort(make(RevenueTechnology::linear_demand(1, 0.5, 1)), 0.2, SolveMethod::Analytic),
                    DomainError);
}

TEST_CASE("numeric effort matches a 1e-6 grid for every family") {
    std::mt19937_64 rng(29);
    int per_family[3] = {0, 0, 0};
    while (per_family[0] < 3 || per_family[1] < 3 || per_family[2] < 3) {
        const auto d = oracle::random_profile(rng, "o");
        auto& n = per_family[static_cast<int>(d.tech.family)];
        if (n >= 3) continue;
        ++n;
        const double a = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
        const auto br = solve_effort(d, a, SolveMethod::Numeric);
        const double hi = 2.0 * br.effort + 0.5;
        CHECK(std::abs(br.effort - oracle::brute_force_effort(d, a, hi)) <= 1e-5);
    }
}

TEST_CASE("developer profit is non-increasing and convex in the rate") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
        const auto d = oracle::random_profile(rng, "v" + std::to_string(i));
        std::vector<double> pi;
        for (int j = 0; j <= 40; ++j) pi.push_back(solve_effort(d, j / 40.0).net_profit);
        for (std::size_t j = 1; j < pi.size(); ++j) CHECK(pi[j] <= pi[j - 1] + 1e-12);
        for (std::size_t j = 1; j + 1 < pi.size(); ++j) CHECK(pi[j] <= 0.5 * (pi[j - 1] + pi[j + 1]) + 1e-9);
    }
}

TEST_CASE("linear demand best response") {
    const auto d = make(RevenueTechnology::linear_demand(2.0, 0.5, 1.0));
    const auto br = solve_effort(d, 0.3);
    CHECK(br.method == SolutionMethod::Numeric);
    REQUIRE(br.price);
    CHECK(*br.price == doctest::Approx((2.0 + 0.5 * br.effort) / 2.0));
    // (1-a) b (a0 + b e)/(2d) = k e  =>  e = (1-a) b a0 / (2d k - (1-a) b^2)
    const double expect = 0.7 * 0.5 * 2.0 / (2.0 - 0.7 * 0.25);
    CHECK(br.effort == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("unbounded developer problem is reported") {
    // b^2/(2d) > k: revenue grows faster than quadratic cost.
    const auto d = make(RevenueTechnology::linear_demand(1.0, 3.0, 1.0));
    CHECK_THROWS_AS(solve_effort(d, 0.0), DomainError);
}

TEST_CASE("degressive policy best response") {
    const auto d = make(RevenueTechnology::linear(1.0));
    auto payoff_grid = [&](const CommissionPolicy& p) {
        return oracle::grid_argmax([&](double e) { return developer_profit(d, p, e); }, 0.0, 3.0, 1e-6);
    };
    SUBCASE("optimum inside a band") {
        const auto p = CommissionPolicy::degressive({{0, 0.3}, {0.5, 0.1}});
        const auto br = best_response(d, p);
        CHECK(br.effort == doctest::Approx(0.9));
        CHECK(br.effort == doctest::Approx(payoff_grid(p)).epsilon(1e-6));
    }
    SUBCASE("optimum at the kink of a progressive schedule") {
        const auto p = CommissionPolicy::degressive({{0, 0.2}, {0.6, 0.6}});
        const auto br = best_response(d, p);
        CHECK(br.effort == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(br.effort == doctest::Approx(payoff_grid(p)).epsilon(1e-6));
        CHECK(br.commission == doctest::Approx(0.12));
    }
    SUBCASE("random schedules agree with the grid") {
        std::mt19937_64 rng(37);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 6; ++i) {
            const double t1 = 0.1 + 0.5 * u(rng), t2 = t1 + 0.1 + 0.5 * u(rng);
            const auto p = CommissionPolicy::degressive({{0, 0.6 * u(rng)}, {t1, 0.6 * u(rng)}, {t2, 0.6 * u(rng)}});
            const auto br = best_response(d, p);
            const double e_grid = payoff_grid(p);
            CHECK(developer_profit(d, p, br.effort) >= developer_profit(d, p, e_grid) - 1e-12);
        }
    }
}

TEST_CASE("activity threshold") {
    const auto d = make(RevenueTechnology::linear(1.0));
    auto p = CommissionPolicy::flat(0.5);
    p.activity_threshold = 0.9;
    // Just under 0.9 requests the developer keeps 0.9 - 0.405; being charged at 0.9 or more leaves at most 0.045.
    const auto br = best_response(d, p);
    CHECK_FALSE(br.charged);
    CHECK(br.effort < 0.9);
    CHECK(br.effort == doctest::Approx(0.9).epsilon(1e-9));
    CHECK(br.commission == 0.0);

    p.activity_threshold = 2.0;
    const auto free = best_response(d, p);
    CHECK(free.effort == doctest::Approx(1.0));
    CHECK_FALSE(free.charged);

    p.activity_threshold = 0.1;
    const auto charged = best_response(d, p);
    CHECK(charged.charged);
    CHECK(charged.effort == doctest::Approx(0.5));
}

TEST_CASE("ad revenue shared at its own rate") {
    auto d = make(RevenueTechnology::linear(1.0));
    d.ad_yield = 0.5;
    auto p = CommissionPolicy::flat(0.3);
    const auto pooled = best_response(d, p);
    CHECK(pooled.effort == doctest::Approx(0.7 * 1.5));
    p.ad_share = 0.1;
    const auto split = best_response(d, p);
    CHECK(split.effort == doctest::Approx(0.7 + 0.9 * 0.5));
    CHECK(split.commission == doctest::Approx(0.3 * split.gross_revenue + 0.1 * split.ad_revenue));
}
