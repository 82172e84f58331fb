#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "revshare/error.hpp"
#include "revshare/participation.hpp"

using namespace revshare;

namespace {

DeveloperProfile canonical(const std::string& id, double reservation) {
    DeveloperProfile d;
    d.id = id;
    d.reservation_profit = reservation;
    return d;
}

}  // namespace

TEST_CASE("single canonical developer enters at 0.6") {
    const std::vector<DeveloperProfile> pop{canonical("a", 0.0)};
    const auto r = participate(pop, 0.6);
    CHECK(r.count == 1);
    REQUIRE(r.entry_profits.size() == 1);
    CHECK(r.entry_profits[0] == doctest::Approx(0.08));
}

TEST_CASE("indifferent developers enter") {
    const std::vector<DeveloperProfile> pop{canonical("a", 0.01), canonical("b", 0.08), canonical("c", 0.2)};
    const auto r = participate(pop, 0.6);
    CHECK(r.count == 2);
    CHECK(r.entrants == std::vector<std::string>{"a", "b"});
}

TEST_CASE("nobody enters at full commission with positive reservation") {
    const std::vector<DeveloperProfile> pop{canonical("a", 0.01), canonical("b", 1e-9)};
    CHECK(participate(pop, 1.0).count == 0);
}

TEST_CASE("entrants are reported in id order") {
    const std::vector<DeveloperProfile> pop{canonical("zeta", 0), canonical("alpha", 0), canonical("mid", 0)};
    CHECK(participate(pop, 0.2).entrants == std::vector<std::string>{"alpha", "mid", "zeta"});
}

TEST_CASE("empty population") {
    const std::vector<DeveloperProfile> pop;
    CHECK(participate(pop, 0.3).count == 0);
    const std::vector<double> grid{0.0, 0.5, 1.0};
    for (const auto& p : participation_curve(pop, grid)) CHECK(p.count == 0);
}

TEST_CASE("participation curve") {
    SUBCASE("single developer with zero reservation stays in") {
        const std::vector<DeveloperProfile> pop{canonical("a", 0.0)};
        std::vector<double> grid;
        for (int i = 0; i < 100; ++i) grid.push_back(i / 100.0);
        for (const auto& p : participation_curve(pop, grid)) CHECK(p.count == 1);
    }
    SUBCASE("uniform reservation profits, counted against the closed form") {
        std::mt19937_64 rng(99);
        std::uniform_real_distribution<double> u(0.0, 0.1);
        std::vector<DeveloperProfile> pop;
        for (int i = 0; i < 100; ++i) pop.push_back(canonical("d" + std::to_string(100 + i), u(rng)));
        const std::vector<double> grid{0.0, 0.6};
        const auto curve = participation_curve(pop, grid);
        auto count = [&](double limit) {
            return static_cast<std::size_t>(
                std::count_if(pop.begin(), pop.end(), [&](const auto& d) { return d.reservation_profit <= limit; }));
        };
        CHECK(curve[0].count == count(0.5));
        CHECK(curve[1].count == count(0.08));
    }
    SUBCASE("unsorted grid is rejected") {
        const std::vector<DeveloperProfile> pop{canonical("a", 0.0)};
        const std::vector<double> grid{0.5, 0.2};
        CHECK_THROWS_AS(participation_curve(pop, grid), DomainError);
        const std::vector<double> bad{0.2, 1.5};
        CHECK_THROWS_AS(participation_curve(pop, bad), DomainError);
    }
}

TEST_CASE("N is non-increasing on random populations") {
    std::mt19937_64 rng(1234);
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i) grid.push_back(i / 50.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<DeveloperProfile> pop;
        for (int i = 0; i < 30; ++i) {
            auto d = oracle::random_profile(rng, "r" + std::to_string(i));
            d.reservation_profit *= 10.0;
            pop.push_back(d);
        }
        const auto curve = participation_curve(pop, grid);
        for (std::size_t j = 1; j < curve.size(); ++j) CHECK(curve[j].count <= curve[j - 1].count);
        CHECK(participation_curve(pop, grid) == curve);
    }
}

TEST_CASE("entry decisions match the closed-form profit") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        DeveloperProfile d;
        d.id = "x";
        const double a = 0.5 + u(rng), k = 0.5 + u(rng), alpha = u(rng);
        d.tech = RevenueTechnology::linear(a);
        d.cost = EffortCost::quadratic(k);
        const double pi = a * a * (1 - alpha) * (1 - alpha) / (2 * k);
        const auto br = solve_effort(d, alpha);
        CHECK(std::abs(br.net_profit - pi) <= 1e-12);
        d.reservation_profit = pi * (0.5 + u(rng));
        CHECK(enters(d, solve_effort(d, alpha)) == (pi >= d.reservation_profit));
    }
}
