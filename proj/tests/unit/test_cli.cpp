#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "revshare/cli/config.hpp"
#include "revshare/cli/run.hpp"
#include "revshare/error.hpp"

using namespace revshare;
using namespace revshare::cli;
namespace fs = std::filesystem;

namespace {

const std::string kCanonical = R"(command = solve
format = json
timestamp = false

[platform]
cost = 0.2

[developer canonical]
family = linear
scale = 1
cost_scale = 1
)";

bool contains(const std::vector<std::string>& v, const std::string& needle) {
    for (const auto& s : v)
        if (s.find(needle) != std::string::npos) return true;
    return false;
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("revshare_test_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("canonical config parses and validates clean") {
    const auto c = parse_config(kCanonical);
    CHECK(c.command == Command::Solve);
    CHECK(c.cost == 0.2);
    REQUIRE(c.developers.size() == 1);
    CHECK(c.developers[0].id == "canonical");
    CHECK(validate(c).empty());
}

TEST_CASE("dump and parse round-trip") {
    auto c = parse_config(kCanonical);
    c.policy = CommissionPolicy::degressive({{0, 0.3}, {1000.00, 0.2}});
    c.policy->ad_share = 0.15;
    c.compare.token_price = 0.05;
    c.compare.freemium = FreemiumTerms{2.0, 0.1};
    c.compare.hybrid = {ModelTag::Rsi, ModelTag::PayPerToken};
    c.grid.alphas = std::vector<double>{0.1, 0.25, 0.7};
    c.developers[0].reservation_profit = 12.34;
    c.seed = 99;
    PopulationSpec pop;
    pop.size = 10;
    pop.mix = {0.25, 0.5, 0.25};
    pop.reservation = Distribution::lognormal(-3, 0.5);
    ExperimentConfig p = c;
    p.developers.clear();
    p.population = pop;
    for (const auto& cfg : {c, p}) {
        const auto text = dump_config(cfg);
        const auto back = parse_config(text);
        CHECK(back == cfg);
        CHECK(dump_config(back) == text);
    }
}

TEST_CASE("validation collects every problem") {
    SUBCASE("rate out of range") {
        auto c = parse_config(kCanonical + "[policy]\nrate = 1.3\n");
        const auto d = validate(c);
        CHECK(contains(d, "rate out of [0,1] (1.3)"));
    }
    SUBCASE("several at once") {
        auto c = parse_config("[platform]\ncost = -1\n[grid]\nalphas = \n");
        const auto d = validate(c);
        CHECK(contains(d, "no command given"));
        CHECK(contains(d, "cost must be finite and non-negative"));
        CHECK(d.size() >= 2);
    }
    SUBCASE("breakpoints must ascend") {
        auto c = parse_config(kCanonical + "[policy]\nbreakpoints = 0:0.3, 500.00:0.2, 100.00:0.1\n");
        CHECK(c.policy->kind == CommissionKind::Degressive);
        CHECK_FALSE(validate(c).empty());
    }
    SUBCASE("empty grid") {
        auto c = parse_config("command = sweep\n[developer a]\n[grid]\nalpha_min = 0.5\nalpha_max = 0.4\n");
        CHECK(contains(validate(c), "empty alpha grid"));
        CHECK_THROWS_AS(execute(c), ConfigError);
        std::ostringstream out, err;
        CHECK(run(c, out, err) == 2);
        CHECK(err.str().find("\"invalid-config\"") != std::string::npos);
        CHECK(out.str().empty());
    }
    SUBCASE("missing ledger") {
        auto c = parse_config("command = settle\n[policy]\nrate = 0.3\n[ledger]\npath = /nonexistent/ledger.csv\n");
        CHECK(contains(validate(c), "file not found"));
    }
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse_config("command = solve\n[platform]\n  cost = abc\n", "x.ini");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(parse_config("[unknown]\n"), ParseError);
    CHECK_THROWS_AS(parse_config("no equals sign\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[policy]\nbreakpoints = 0:0.3, 10.005:0.2\n"), ParseError);
    CHECK_THROWS_AS(parse_config("[developer]\n"), ParseError);
    CHECK_THROWS_AS(parse_config("format = xml\n"), ParseError);
}

TEST_CASE("solve and settle reports") {
    const auto solve = execute(parse_config(kCanonical));
    CHECK(solve.summary == "alpha*=0.600000 profit=0.160000 N=1");
    const auto j = nlohmann::json::parse(solve.body);
    CHECK(j.at("alpha").get<double>() == doctest::Approx(0.6).epsilon(1e-9));
    CHECK_FALSE(j.contains("generated_at"));

    auto c = parse_config("command = scenario\ntimestamp = false\n[scenario]\nid = 1\n");
    const auto s = execute(c);
    CHECK(s.summary.find("payout=15000.00") != std::string::npos);
    c.scenario.id = 3;
    CHECK(execute(c).summary.find("payout=750.00") != std::string::npos);
}

TEST_CASE("reports are byte-identical without a timestamp") {
    auto c = parse_config(kCanonical);
    c.command = Command::Sweep;
    c.format = OutputFormat::Csv;
    c.grid.step = 0.01;
    CHECK(execute(c).body == execute(c).body);
    c.timestamp = true;
    CHECK(execute(c).body.rfind("# generated_at=", 0) == 0);
}

TEST_CASE("output destinations") {
    auto c = parse_config(kCanonical);
    CHECK_FALSE(resolve_output(c, nullptr));
    CHECK(*resolve_output(c, "/tmp/out") == fs::path("/tmp/out/solve.json"));
    c.output = "r.csv";
    CHECK(*resolve_output(c, "/tmp/out") == fs::path("/tmp/out/r.csv"));
    CHECK(*resolve_output(c, nullptr) == fs::path("r.csv"));
    c.output = "/abs/r.csv";
    CHECK(*resolve_output(c, "/tmp/out") == fs::path("/abs/r.csv"));
}

TEST_CASE("run writes atomically and reports on stdout") {
    const auto dir = scratch("run");
    auto c = parse_config(kCanonical);
    std::ostringstream out, err;
    CHECK(run(c, out, err, dir.c_str()) == 0);
    CHECK(out.str() == "alpha*=0.600000 profit=0.160000 N=1\n");
    const auto written = slurp(dir / "solve.json");
    CHECK(nlohmann::json::parse(written).at("entrants") == 1);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    CHECK(files == 1);

    std::ostringstream o2, e2;
    CHECK(run(c, o2, e2) == 0);
    CHECK(o2.str() == execute(c).body);
    CHECK(e2.str() == "alpha*=0.600000 profit=0.160000 N=1\n");

    c.output = "missing/dir/solve.json";
    std::ostringstream o3, e3;
    CHECK(run(c, o3, e3, dir.c_str()) == 4);
    CHECK(nlohmann::json::parse(e3.str()).at("error").at("kind") == "output");
    fs::remove_all(dir);
}

TEST_CASE("error records") {
    const auto p = error_record(ParseError("f.ini", 3, 7, "bad"));
    CHECK(p.at("error").at("kind") == "parse");
    CHECK(p.at("error").at("line") == 3);
    CHECK(p.at("error").at("column") == 7);
    CHECK(exit_code_for(ParseError("f.ini", 3, 7, "bad")) == 2);
    const DomainError d("settlement", "negative amount");
    CHECK(error_record(d).at("error").at("kind") == "domain");
    CHECK(exit_code_for(d) == 3);
    const ConfigError ce({"a", "b"});
    CHECK(error_record(ce).at("error").at("diagnostics").size() == 2);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("checked-in configs validate") {
    for (const char* name : {"solve.ini", "sweep.ini", "compare.ini", "scenario.ini", "settle.ini", "pool.ini"}) {
        CAPTURE(name);
        const auto c = load_config(fs::path(REVSHARE_CONFIG_DIR) / name);
        CHECK(validate(c).empty());
        CHECK_NOTHROW(execute(c));
    }
    CHECK_FALSE(validate(load_config(fs::path(REVSHARE_CONFIG_DIR) / "empty_grid.ini")).empty());
}
