#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "revshare/cli/config.hpp"
#include "revshare/cli/run.hpp"

using namespace revshare;
using namespace revshare::cli;

namespace {

struct Flags {
    std::string command;
    std::string config;
    bool canonical = false;
    std::optional<double> cost;
    std::optional<double> rate;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<std::string> format;
    std::optional<double> alpha_step;
    std::optional<std::string> ledger;
    std::optional<int> scenario;
    bool dump_config = false;
    bool no_timestamp = false;
};

ExperimentConfig build_config(const Flags& f) {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (!f.command.empty() && f.command != "validate") cfg.command = parse_command(f.command);
    if (f.canonical) {
        cfg.developers = {canonical_developer()};
        cfg.population.reset();
    }
    if (f.cost) cfg.cost = *f.cost;
    if (f.rate) cfg.policy = cfg.policy.value_or(CommissionPolicy{}).with_rate(*f.rate);
    if (f.seed) cfg.seed = *f.seed;
    if (f.output) cfg.output = *f.output;
    if (f.format) cfg.format = *f.format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    if (f.alpha_step) {
        cfg.solver.grid_step = *f.alpha_step;
        cfg.grid.step = *f.alpha_step;
    }
    if (f.ledger) {
        if (!cfg.ledger) cfg.ledger = LedgerSpec{};
        cfg.ledger->path = *f.ledger;
    }
    if (f.scenario) cfg.scenario.id = *f.scenario;
    if (f.no_timestamp) cfg.timestamp = false;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Commission solver, business-model comparator and revenue-split settlement"};
    app.name("revshare");
    Flags f;
    app.add_option("command", f.command, "solve | sweep | compare | scenario | settle | pool | validate")
        ->check(CLI::IsMember({"solve", "sweep", "compare", "scenario", "settle", "pool", "validate"}));
    app.add_option("-c,--config", f.config, "Experiment config file")->check(CLI::ExistingFile);
    app.add_flag("--canonical", f.canonical, "Use the single canonical developer (R = e, phi = e^2/2)");
    app.add_option("--cost", f.cost, "Platform marginal cost per request");
    app.add_option("--rate", f.rate, "Flat commission rate");
    app.add_option("--seed", f.seed, "Master random seed");
    app.add_option("-o,--output", f.output, "Report path (relative to $" + std::string(kOutputDirEnv) + " if set)");
    app.add_option("--format", f.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--alpha-step", f.alpha_step, "Commission grid step for solve and sweep");
    app.add_option("--ledger", f.ledger, "Ledger file for settle");
    app.add_option("--scenario", f.scenario, "Worked revenue-split scenario (1, 2 or 3)");
    app.add_flag("--dump-config", f.dump_config, "Print the effective config and exit");
    app.add_flag("--no-timestamp", f.no_timestamp, "Omit the generated_at header so reruns are byte-identical");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        nlohmann::json rec = {{"error", {{"kind", "usage"}, {"message", e.what()}}}};
        std::cerr << rec.dump() << '\n';
        return 2;
    }

    try {
        const ExperimentConfig cfg = build_config(f);
        if (f.dump_config) {
            std::cout << dump_config(cfg);
            return 0;
        }
        if (f.command == "validate") {
            const auto diags = validate(cfg);
            for (const auto& d : diags) std::cout << d << '\n';
            if (diags.empty()) std::cout << "ok\n";
            return diags.empty() ? 0 : 2;
        }
        return run(cfg, std::cout, std::cerr, std::getenv(kOutputDirEnv));
    } catch (const std::exception& e) {
        std::cerr << error_record(e).dump() << '\n';
        return exit_code_for(e);
    }
}
