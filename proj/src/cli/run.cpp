#include "revshare/cli/run.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>

#include <unistd.h>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "revshare/comparator.hpp"
#include "revshare/ecosystem.hpp"
#include "revshare/error.hpp"
#include "revshare/platform.hpp"
#include "revshare/settlement.hpp"

namespace revshare::cli {

namespace {

using nlohmann::json;

std::string csv_number(double v) { return fmt::format("{}", v); }
const char* csv_bool(bool b) { return b ? "true" : "false"; }

json optional_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

std::string timestamp_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

struct Rendered {
    json document;     // json format
    std::string csv;   // csv format, header included
    std::string summary;
};

json developer_json(const DeveloperOutcome& d) {
    const auto& r = d.response;
    return {{"id", d.id},
            {"entered", d.entered},
            {"platform_margin", d.platform_margin},
            {"effort", r.effort},
            {"price", optional_number(r.price)},
            {"gross_revenue", r.gross_revenue},
            {"usage", r.usage},
            {"ad_revenue", r.ad_revenue},
            {"commission", r.commission},
            {"net_profit", r.net_profit},
            {"foc_residual", r.foc_residual},
            {"method", r.method == SolutionMethod::Analytic ? "analytic" : "numeric"},
            {"charged", r.charged}};
}

Rendered solve(const ExperimentConfig& cfg) {
    const auto params = cfg.platform();
    const auto report = optimize_alpha(params, cfg.policy.value_or(CommissionPolicy{}),
                                       OptimizerOptions{cfg.solver.grid_step, cfg.solver.tolerance, cfg.solver.method});
    Rendered out;
    json devs = json::array();
    for (const auto& d : report.per_developer) devs.push_back(developer_json(d));
    json samples = json::array();
    for (const auto& s : report.samples)
        samples.push_back({{"alpha", s.alpha}, {"profit", s.profit}, {"entrants", s.entrants}});
    out.document = {{"alpha", report.alpha},
                    {"profit", report.profit},
                    {"entrants", report.entrants},
                    {"per_developer", devs},
                    {"grid_size", report.grid_size},
                    {"refinement_iterations", report.refinement_iterations},
                    {"samples", samples},
                    {"participation_breaks", report.participation_breaks},
                    {"analytic_alpha", optional_number(report.analytic_alpha)},
                    {"degenerate", report.degenerate}};

    out.csv = "alpha,id,entered,effort,gross_revenue,usage,commission,net_profit,platform_margin\n";
    for (const auto& d : report.per_developer)
        out.csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", csv_number(report.alpha), d.id, csv_bool(d.entered),
                               csv_number(d.response.effort), csv_number(d.response.gross_revenue),
                               csv_number(d.response.usage), csv_number(d.response.commission),
                               csv_number(d.response.net_profit), csv_number(d.platform_margin));
    out.summary = fmt::format("alpha*={:.6f} profit={:.6f} N={}", report.alpha, report.profit, report.entrants);
    if (report.degenerate) out.summary += " (degenerate: no rate yields positive profit)";
    return out;
}

Rendered sweep(const ExperimentConfig& cfg) {
    const auto grid = cfg.grid.values();
    const auto result =
        revshare::sweep(cfg.platform(), grid, cfg.policy.value_or(CommissionPolicy{}), cfg.seed, cfg.solver.method);
    Rendered out;
    json points = json::array();
    for (const auto& p : result.points)
        points.push_back({{"alpha", p.alpha},
                          {"profit", p.profit},
                          {"entrants", p.entrants},
                          {"mean_developer_profit", p.mean_developer_profit},
                          {"developer_surplus", p.developer_surplus}});
    out.document = {{"seed", result.seed}, {"argmax_alpha", result.argmax_alpha}, {"points", points}};
    out.csv = result.to_csv();
    const SweepPoint* best = nullptr;
    for (const auto& p : result.points)
        if (p.alpha == result.argmax_alpha) {
            best = &p;
            break;
        }
    out.summary = fmt::format("argmax alpha={:.6f} profit={:.6f} N={} points={}", result.argmax_alpha,
                              best ? best->profit : 0.0, best ? best->entrants : 0, result.points.size());
    return out;
}

Rendered compare(const ExperimentConfig& cfg) {
    const auto params = cfg.platform();
    const auto models = cfg.compare.models(cfg.policy.value_or(CommissionPolicy{}));
    const double capital = cfg.compare.capital.value_or(std::numeric_limits<double>::infinity());
    Rendered out;
    out.csv =
        "developer,tag,chosen,label,effort,gross_revenue,usage,developer_profit,platform_profit,upfront_cost,"
        "participates,capital_feasible,entered\n";
    json devs = json::array();
    std::map<std::string, int> by_dev, by_platform;
    for (std::size_t idx : params.id_order()) {
        const auto& dev = params.population[idx];
        const auto table = compare_models(dev, models, params.marginal_cost, capital);
        json rows = json::array();
        for (const auto& r : table.rows) {
            const char* chosen = r.chosen ? to_string(*r.chosen) : "";
            rows.push_back({{"tag", to_string(r.tag)},
                            {"chosen", r.chosen ? json(chosen) : json(nullptr)},
                            {"label", r.label},
                            {"effort", r.effort},
                            {"gross_revenue", r.gross_revenue},
                            {"usage", r.usage},
                            {"developer_profit", r.developer_profit},
                            {"platform_profit", r.platform_profit},
                            {"upfront_cost", r.upfront_cost},
                            {"foc_residual", r.foc_residual},
                            {"participates", r.participates},
                            {"capital_feasible", r.capital_feasible},
                            {"entered", r.entered}});
            // Labels can contain commas; quote them.
            out.csv += fmt::format("{},{},{},\"{}\",{},{},{},{},{},{},{},{},{}\n", dev.id, to_string(r.tag), chosen,
                                   r.label, csv_number(r.effort), csv_number(r.gross_revenue), csv_number(r.usage),
                                   csv_number(r.developer_profit), csv_number(r.platform_profit),
                                   csv_number(r.upfront_cost), csv_bool(r.participates), csv_bool(r.capital_feasible),
                                   csv_bool(r.entered));
        }
        auto tag_json = [](std::optional<ModelTag> t) { return t ? json(to_string(*t)) : json(nullptr); };
        json entry = {{"id", dev.id},
                      {"rows", rows},
                      {"preferred_by_developer", tag_json(table.preferred_by_developer)},
                      {"preferred_by_platform", tag_json(table.preferred_by_platform)}};
        if (!cfg.compare.capital_grid.empty()) {
            const auto frontier = capital_frontier(dev, cfg.policy.value_or(CommissionPolicy{}),
                                                   *cfg.compare.token_price, cfg.compare.capital_grid,
                                                   params.marginal_cost);
            entry["capital_frontier"] = optional_number(frontier);
        }
        devs.push_back(std::move(entry));
        ++by_dev[table.preferred_by_developer ? to_string(*table.preferred_by_developer) : "none"];
        ++by_platform[table.preferred_by_platform ? to_string(*table.preferred_by_platform) : "none"];
    }
    out.document = {{"developers", devs}};
    auto tally = [](const std::map<std::string, int>& m) {
        std::string s;
        for (const auto& [k, v] : m) s += fmt::format("{}{}={}", s.empty() ? "" : " ", k, v);
        return s;
    };
    out.summary = fmt::format("developers={} developer prefers: {}; platform prefers: {}", params.population.size(),
                              tally(by_dev), tally(by_platform));
    return out;
}

Rendered statements(const std::vector<SettlementStatement>& stmts) {
    Rendered out;
    json arr = json::array();
    out.csv = statement_csv_header() + "\n";
    Cents gross = 0, commission = 0, payout = 0;
    for (const auto& s : stmts) {
        arr.push_back(to_json(s));
        out.csv += to_csv_row(s) + "\n";
        gross += s.gross_total;
        commission += s.platform_commission;
        payout += s.developer_payout;
    }
    out.document = {{"statements", arr}};
    out.summary = fmt::format("statements={} gross={} commission={} payout={}", stmts.size(), format_cents(gross),
                              format_cents(commission), format_cents(payout));
    return out;
}

Rendered settle(const ExperimentConfig& cfg) {
    std::ifstream in(cfg.ledger->path);
    if (!in) throw OutputError(fmt::format("cannot read ledger '{}'", cfg.ledger->path));
    const auto ledger = parse_ledger(in, cfg.ledger->path);
    return statements(settle_ledger(ledger, *cfg.policy, cfg.ledger->freemium));
}

Rendered scenario(const ExperimentConfig& cfg) {
    struct Defaults {
        std::int64_t count;
        Cents amount;
        TransactionKind kind;
    };
    static const Defaults defaults[] = {{1000, 2000, TransactionKind::SubscriptionCharge},
                                        {10000, 50, TransactionKind::Sale},
                                        {100, 1000, TransactionKind::Sale}};
    const auto& s = cfg.scenario;
    const auto& d = defaults[s.id - 1];
    const std::int64_t count = s.count.value_or(d.count);
    const Cents amount = s.amount ? static_cast<Cents>(std::llround(*s.amount * 100.0)) : d.amount;
    const auto policy = cfg.policy.value_or(CommissionPolicy::flat(0.25));

    std::vector<Transaction> ledger;
    const std::string app = fmt::format("scenario-{}", s.id);
    for (std::int64_t i = 0; i < count; ++i) ledger.push_back({app, amount, d.kind, "period-1", true});
    if (s.id == 3) {
        for (std::int64_t i = 0; i < s.free_users; ++i) ledger.push_back({app, 0, d.kind, "period-1", false});
        return statements(settle_ledger(ledger, policy, true));
    }
    return statements(settle_ledger(ledger, policy, false));
}

Rendered pool(const ExperimentConfig& cfg) {
    const auto params = cfg.platform();
    CommissionPolicy policy;
    if (cfg.policy) {
        policy = *cfg.policy;
    } else {
        const auto eq = optimize_alpha(params, {}, {cfg.solver.grid_step, cfg.solver.tolerance, cfg.solver.method});
        policy = CommissionPolicy::flat(eq.alpha);
    }
    const auto r = risk_pooling_report(params, policy, cfg.pool.success_probability, cfg.pool.draws, cfg.seed);
    const std::optional<double> rate = policy.is_flat() ? std::optional(policy.flat_rate()) : std::nullopt;
    Rendered out;
    out.document = {{"alpha", optional_number(rate)},
                    {"success_probability", cfg.pool.success_probability},
                    {"draws", r.draws},
                    {"entrants", r.entrants},
                    {"deterministic_profit", r.deterministic_profit},
                    {"expected_profit", r.expected_profit},
                    {"mean", r.mean},
                    {"stddev", r.stddev},
                    {"p05", r.p05},
                    {"coefficient_of_variation", r.coefficient_of_variation},
                    {"seed", cfg.seed}};
    out.csv = "alpha,success_probability,draws,entrants,deterministic_profit,expected_profit,mean,stddev,p05,"
              "coefficient_of_variation\n";
    out.csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", rate ? csv_number(*rate) : "",
                           csv_number(cfg.pool.success_probability), r.draws, r.entrants,
                           csv_number(r.deterministic_profit), csv_number(r.expected_profit), csv_number(r.mean),
                           csv_number(r.stddev), csv_number(r.p05), csv_number(r.coefficient_of_variation));
    out.summary = fmt::format("mean={:.6f} p05={:.6f} cv={:.6f} N={} draws={}", r.mean, r.p05,
                              r.coefficient_of_variation, r.entrants, r.draws);
    return out;
}

}  // namespace

Report execute(const ExperimentConfig& config) {
    if (auto diags = validate(config); !diags.empty()) throw ConfigError(std::move(diags));
    Rendered r;
    switch (*config.command) {
        case Command::Solve: r = solve(config); break;
        case Command::Sweep: r = sweep(config); break;
        case Command::Compare: r = compare(config); break;
        case Command::Scenario: r = scenario(config); break;
        case Command::Settle: r = settle(config); break;
        case Command::Pool: r = pool(config); break;
    }
    Report report;
    report.summary = std::move(r.summary);
    if (config.format == OutputFormat::Csv) {
        if (config.timestamp) report.body = fmt::format("# generated_at={}\n", timestamp_now());
        report.body += r.csv;
    } else {
        if (config.timestamp) r.document["generated_at"] = timestamp_now();
        report.body = r.document.dump(2) + "\n";
    }
    return report;
}

std::optional<std::filesystem::path> resolve_output(const ExperimentConfig& config, const char* output_dir) {
    const bool have_dir = output_dir && *output_dir;
    if (config.output) {
        std::filesystem::path p(*config.output);
        if (have_dir && p.is_relative()) p = std::filesystem::path(output_dir) / p;
        return p;
    }
    if (have_dir && config.command)
        return std::filesystem::path(output_dir) /
               fmt::format("{}.{}", to_string(*config.command), to_string(config.format));
    return std::nullopt;
}

void write_atomically(const std::filesystem::path& path, const std::string& contents) {
    const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    if (!std::filesystem::is_directory(dir))
        throw OutputError(fmt::format("output directory '{}' does not exist", dir.string()));
    const auto tmp = dir / fmt::format(".{}.tmp-{}", path.filename().string(), ::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw OutputError(fmt::format("cannot write '{}'", path.string()));
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw OutputError(fmt::format("failed writing '{}'", path.string()));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw OutputError(fmt::format("cannot move report into '{}'", path.string()));
    }
}

json error_record(const std::exception& e) {
    json err = {{"message", e.what()}};
    if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
        err["kind"] = "invalid-config";
        err["diagnostics"] = c->diagnostics();
    } else if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
        err["kind"] = "parse";
        err["source"] = p->source();
        err["line"] = p->line();
        err["column"] = p->column();
        err["message"] = p->message();
    } else if (const auto* d = dynamic_cast<const DomainError*>(&e)) {
        err["kind"] = "domain";
        err["module"] = d->module();
    } else if (const auto* v = dynamic_cast<const ConvergenceError*>(&e)) {
        err["kind"] = "convergence";
        err["module"] = v->module();
        err["residual"] = v->residual();
    } else if (dynamic_cast<const OutputError*>(&e)) {
        err["kind"] = "output";
    } else {
        err["kind"] = "internal";
    }
    return {{"error", err}};
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const DomainError*>(&e) || dynamic_cast<const ConvergenceError*>(&e)) return 3;
    if (dynamic_cast<const OutputError*>(&e)) return 4;
    return 1;
}

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err, const char* output_dir) {
    try {
        const auto report = execute(config);
        if (const auto path = resolve_output(config, output_dir)) {
            write_atomically(*path, report.body);
            out << report.summary << '\n';
        } else {
            out << report.body;
            err << report.summary << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        err << error_record(e).dump() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace revshare::cli
