#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "revshare/error.hpp"
#include "revshare/settlement.hpp"

using namespace revshare;

namespace {

std::vector<Transaction> repeat(std::size_t n, Cents amount, TransactionKind kind, const std::string& period = "p1") {
    return std::vector<Transaction>(n, Transaction{"app", amount, kind, period, true});
}

}  // namespace

TEST_CASE("worked scenarios settle exactly") {
    const auto s1 = settle(repeat(1000, 2000, TransactionKind::SubscriptionCharge), CommissionPolicy::flat(0.25));
    CHECK(s1.gross_total == 2'000'000);
    CHECK(s1.platform_commission == 500'000);
    CHECK(s1.developer_payout == 1'500'000);
    CHECK(format_cents(s1.developer_payout) == "15000.00");
    CHECK(s1.subtotal(TransactionKind::SubscriptionCharge) == 2'000'000);
    CHECK(s1.effective_rate == 0.25);

    const auto s2 = settle(repeat(10000, 50, TransactionKind::Sale), CommissionPolicy::flat(0.25));
    CHECK(s2.platform_commission == 125'000);
    CHECK(s2.developer_payout == 375'000);
}

TEST_CASE("zero rate pays everything out") {
    auto txs = repeat(7, 333, TransactionKind::Sale);
    txs.push_back({"app", 91, TransactionKind::AdImpressionRevenue, "p1"});
    const auto s = settle(txs, CommissionPolicy::flat(0.0));
    CHECK(s.platform_commission == 0);
    CHECK(s.developer_payout == s.gross_total);
}

TEST_CASE("half-up rounding on the period total") {
    const auto s = settle(repeat(1, 9999, TransactionKind::Sale), CommissionPolicy::flat(0.30));
    CHECK(s.platform_commission == 3000);
    CHECK(s.developer_payout == 6999);
    CHECK(oracle::decimal_commission(9999, "0.30") == 3000);

    // Rounding once on the total differs from rounding each transaction.
    const auto many = settle(repeat(10, 5, TransactionKind::Sale), CommissionPolicy::flat(0.25));
    CHECK(many.platform_commission == 13);  // 12.5 rounds up once; per-transaction would give 10
    CHECK(apply_rate(5, rate_in_ppb(0.5)) == 3);
    CHECK(apply_rate(3, rate_in_ppb(0.5)) == 2);
}

TEST_CASE("freemium settlement") {
    auto txs = repeat(100, 1000, TransactionKind::Sale);
    std::vector<bool> premium(100, true);
    for (int i = 0; i < 40; ++i) {
        txs.push_back({"app", 0, TransactionKind::Sale, "p1"});
        premium.push_back(false);
    }
    const auto s = settle_freemium(txs, CommissionPolicy::flat(0.25), premium);
    CHECK(s.platform_commission == 25'000);
    CHECK(s.free_tier_count == 40);

    SUBCASE("no premium transactions") {
        const auto z = settle_freemium(txs, CommissionPolicy::flat(0.25), std::vector<bool>(txs.size(), false));
        CHECK(z.platform_commission == 0);
        CHECK(z.developer_payout == z.gross_total);
    }
    SUBCASE("mixed: two premium, five free") {
        std::vector<Transaction> m = repeat(2, 1000, TransactionKind::Sale);
        for (int i = 0; i < 5; ++i) m.push_back({"app", 0, TransactionKind::Sale, "p1", false});
        const auto r = settle_ledger(m, CommissionPolicy::flat(0.3), true);
        REQUIRE(r.size() == 1);
        CHECK(r[0].platform_commission == 600);
        CHECK(r[0].developer_payout == 1400);
        CHECK(r[0].free_tier_count == 5);
    }
    SUBCASE("flag count must match") {
        CHECK_THROWS_AS(settle_freemium(txs, CommissionPolicy::flat(0.25), std::vector<bool>(3, true)), DomainError);
    }
}

TEST_CASE("degressive bands and ad share") {
    const auto policy = CommissionPolicy::degressive({{0, 0.30}, {1000.00, 0.20}});
    const auto s = settle(repeat(1, 150000, TransactionKind::Sale), policy);
    CHECK(s.platform_commission == 30000 + 10000);

    auto with_ads = CommissionPolicy::flat(0.3);
    with_ads.ad_share = 0.1;
    std::vector<Transaction> txs{{"app", 1000, TransactionKind::Sale, "p"},
                                 {"app", 1000, TransactionKind::AdImpressionRevenue, "p"}};
    const auto a = settle(txs, with_ads);
    CHECK(a.platform_commission == 300 + 100);
    CHECK(a.subtotal(TransactionKind::AdImpressionRevenue) == 1000);
    const auto pooled = settle(txs, CommissionPolicy::flat(0.3));
    CHECK(pooled.platform_commission == 600);

    CHECK_THROWS_AS(period_commission(100, CommissionPolicy::degressive({{0, 0.3}, {10.005, 0.2}})), DomainError);
}

TEST_CASE("input errors") {
    std::vector<Transaction> mixed{{"a", 100, TransactionKind::Sale, "p"}, {"b", 100, TransactionKind::Sale, "p"}};
    CHECK_THROWS_AS(settle(mixed, CommissionPolicy::flat(0.2)), DomainError);
    CHECK_THROWS_AS(settle(repeat(1, 100, TransactionKind::Sale), CommissionPolicy::flat(1.2)), DomainError);
    CHECK_THROWS_AS(settle(repeat(1, -5, TransactionKind::Sale), CommissionPolicy::flat(0.2)), DomainError);
    CHECK_THROWS_AS(rate_in_ppb(0.1234567891), DomainError);
}

TEST_CASE("randomized ledgers: conservation, oracle, rate bounds, monotonicity") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<Cents> amount(0, 250'000);
    std::uniform_int_distribution<int> count(0, 40), kind(0, 2);
    const char* rates[] = {"0", "0.2", "0.25", "0.3", "0.125", "0.333333333", "1"};
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Transaction> txs;
        const int n = count(rng);
        for (int i = 0; i < n; ++i)
            txs.push_back({"app", amount(rng), static_cast<TransactionKind>(kind(rng)), "p"});
        const std::string rate = rates[trial % 7];
        const auto policy = CommissionPolicy::flat(std::stod(rate));
        const auto s = settle(txs, policy);
        CHECK(s.platform_commission + s.developer_payout == s.gross_total);
        CHECK(s.platform_commission == oracle::decimal_commission(s.gross_total, rate));
        if (s.gross_total > 0) {
            const double slack = 0.5 / static_cast<double>(s.gross_total);
            CHECK(s.effective_rate >= policy.min_rate() - slack);
            CHECK(s.effective_rate <= policy.max_rate() + slack);
        }
        auto more = txs;
        more.push_back({"app", amount(rng), TransactionKind::Sale, "p"});
        CHECK(settle(more, policy).platform_commission >= s.platform_commission);
    }
    const auto degressive = CommissionPolicy::degressive({{0, 0.3}, {500.00, 0.2}, {2000.00, 0.1}});
    Cents prev = 0;
    for (Cents g = 0; g <= 400'000; g += 37) {
        const Cents c = period_commission(g, degressive);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("splitting periods") {
    const auto flat = CommissionPolicy::flat(0.25);
    SUBCASE("flat: exact when every period divides evenly") {
        auto a = repeat(3, 400, TransactionKind::Sale, "jan");
        auto b = repeat(5, 800, TransactionKind::Sale, "feb");
        auto both = a;
        both.insert(both.end(), b.begin(), b.end());
        CHECK(settle(both, flat).platform_commission ==
              settle(a, flat).platform_commission + settle(b, flat).platform_commission);
        CHECK(settle(both, flat).period == "jan+feb");
    }
    SUBCASE("flat: within one cent when periods leave remainders") {
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<Cents> amount(1, 10'000);
        for (int i = 0; i < 200; ++i) {
            auto a = repeat(1, amount(rng), TransactionKind::Sale, "jan");
            auto b = repeat(1, amount(rng), TransactionKind::Sale, "feb");
            auto both = a;
            both.push_back(b[0]);
            const Cents joint = settle(both, CommissionPolicy::flat(0.3)).platform_commission;
            const Cents split = settle(a, CommissionPolicy::flat(0.3)).platform_commission +
                                settle(b, CommissionPolicy::flat(0.3)).platform_commission;
            CHECK(std::abs(joint - split) <= 1);
        }
    }
    SUBCASE("degressive bands reset per period") {
        const auto deg = CommissionPolicy::degressive({{0, 0.3}, {100.00, 0.1}});
        auto a = repeat(1, 10'000, TransactionKind::Sale, "jan");
        auto b = repeat(1, 10'000, TransactionKind::Sale, "feb");
        std::vector<Transaction> ledger{a[0], b[0]};
        const auto per_period = settle_ledger(ledger, deg);
        REQUIRE(per_period.size() == 2);
        CHECK(per_period[0].platform_commission + per_period[1].platform_commission == 6000);
        CHECK(settle(ledger, deg).platform_commission == 3000 + 1000);
    }
}

TEST_CASE("ledger text") {
    const std::string text =
        "app_id,period,kind,amount_cents\n"
        "# comment\n"
        "photo,2024-01,sale,1999\n"
        "photo,2024-01,subscription,500\n"
        "\n"
        "chat,2024-01,AdImpressionRevenue,70\n";
    std::istringstream in(text);
    const auto ledger = parse_ledger(in, "ledger.csv");
    REQUIRE(ledger.size() == 3);
    CHECK(ledger[1].kind == TransactionKind::SubscriptionCharge);
    CHECK(ledger[2].kind == TransactionKind::AdImpressionRevenue);

    const auto stmts = settle_ledger(ledger, CommissionPolicy::flat(0.2));
    REQUIRE(stmts.size() == 2);
    CHECK(stmts[0].app_id == "photo");
    CHECK(stmts[0].gross_total == 2499);
    CHECK(stmts[0].platform_commission == 500);

    std::istringstream again(format_ledger(ledger));
    CHECK(parse_ledger(again) == ledger);

    SUBCASE("errors carry line and column") {
        std::istringstream bad("app_id,period,kind,amount_cents\nphoto,2024-01,sale,12.5\n");
        try {
            parse_ledger(bad, "bad.csv");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(e.column() == 20);
            CHECK(std::string(e.what()).rfind("bad.csv:2:20:", 0) == 0);
        }
        std::istringstream kind("app_id,period,kind,amount_cents\nphoto,2024-01,refund,100\n");
        CHECK_THROWS_AS(parse_ledger(kind), ParseError);
        std::istringstream header("app,period\n");
        CHECK_THROWS_AS(parse_ledger(header), ParseError);
    }
}

TEST_CASE("statement wire format round-trips") {
    std::vector<Transaction> txs{{"app", 12345, TransactionKind::Sale, "q1"},
                                 {"app", 999, TransactionKind::SubscriptionCharge, "q1"},
                                 {"app", 77, TransactionKind::AdImpressionRevenue, "q1"}};
    auto policy = CommissionPolicy::flat(0.3);
    policy.ad_share = 0.15;
    const auto s = settle(txs, policy);
    const auto j = to_json(s);
    CHECK(j.at("platform_commission").get<Cents>() == s.platform_commission);
    CHECK(statement_from_json(nlohmann::json::parse(j.dump())) == s);

    auto broken = j;
    broken["developer_payout"] = s.developer_payout + 1;
    CHECK_THROWS(statement_from_json(broken));

    CHECK(statement_csv_header().find("platform_commission") != std::string::npos);
    CHECK(to_csv_row(s).rfind("app,q1,13421,", 0) == 0);
    CHECK(format_cents(-5) == "-0.05");
    CHECK(format_cents(150000000) == "1500000.00");
}
