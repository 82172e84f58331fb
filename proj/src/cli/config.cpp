#include "revshare/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "revshare/error.hpp"
#include "revshare/settlement.hpp"
#include "text.hpp"

namespace revshare::cli {

namespace {

using detail::trim;

const char* family_name(RevenueFamily f) {
    switch (f) {
        case RevenueFamily::LinearEffort: return "linear";
        case RevenueFamily::PowerEffort: return "power";
        case RevenueFamily::LinearDemand: return "demand";
    }
    return "?";
}

const char* model_key(ModelTag tag) {
    switch (tag) {
        case ModelTag::Rsi: return "rsi";
        case ModelTag::PayPerToken: return "pay_per_token";
        case ModelTag::Freemium: return "freemium";
        case ModelTag::Subscription: return "subscription";
        case ModelTag::Marketplace: return "marketplace";
        case ModelTag::Hybrid: return "hybrid";
    }
    return "?";
}

std::string number(double v) { return fmt::format("{}", v); }

std::string currency(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return format_cents(static_cast<Cents>(std::llround(v * 100.0)));
}

// One `key = value` line being interpreted; errors point at the value.
struct Field {
    std::string_view key;
    std::string_view value;
    const std::string& source;
    std::size_t line;
    std::size_t column;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source, line, column, msg); }

    double num() const {
        auto v = detail::parse_double(value);
        if (!v) fail(fmt::format("'{}' expects a number, got '{}'", key, value));
        return *v;
    }
    double money() const { return money_of(value); }
    double money_of(std::string_view text) const {
        const auto t = trim(text);
        if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
        auto cents = detail::parse_cents(t);
        if (!cents) {
            if (detail::parse_double(t))
                fail(fmt::format("'{}' is currency and must be a whole number of cents, got '{}'", key, t));
            fail(fmt::format("'{}' expects a currency amount, got '{}'", key, t));
        }
        return static_cast<double>(*cents) / 100.0;
    }
    std::int64_t integer() const {
        auto v = detail::parse_int(value);
        if (!v) fail(fmt::format("'{}' expects an integer, got '{}'", key, value));
        return *v;
    }
    std::uint64_t unsigned_integer() const {
        const auto t = trim(value);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
            fail(fmt::format("'{}' expects a non-negative integer, got '{}'", key, value));
        return v;
    }
    bool boolean() const {
        const auto t = trim(value);
        if (t == "true" || t == "yes" || t == "1") return true;
        if (t == "false" || t == "no" || t == "0") return false;
        fail(fmt::format("'{}' expects true or false, got '{}'", key, value));
    }
    Distribution distribution() const {
        try {
            return Distribution::parse(value);
        } catch (const std::invalid_argument& e) {
            fail(fmt::format("'{}': {}", key, e.what()));
        }
    }
    std::vector<double> numbers() const {
        std::vector<double> out;
        if (trim(value).empty()) return out;
        for (auto part : detail::split(value, ',')) {
            auto v = detail::parse_double(part);
            if (!v) fail(fmt::format("'{}' expects a comma-separated list of numbers, got '{}'", key, trim(part)));
            out.push_back(*v);
        }
        return out;
    }
    // "a:b" pairs separated by commas.
    std::vector<std::pair<std::string_view, std::string_view>> pairs() const {
        std::vector<std::pair<std::string_view, std::string_view>> out;
        if (trim(value).empty()) return out;
        for (auto part : detail::split(value, ',')) {
            auto kv = detail::split(part, ':');
            if (kv.size() != 2) fail(fmt::format("'{}' expects entries of the form a:b, got '{}'", key, trim(part)));
            out.emplace_back(trim(kv[0]), trim(kv[1]));
        }
        return out;
    }
    double number_of(std::string_view text) const {
        auto v = detail::parse_double(text);
        if (!v) fail(fmt::format("'{}' expects a number, got '{}'", key, text));
        return *v;
    }
};

std::optional<ModelTag> parse_model_key(std::string_view s) {
    for (auto tag : {ModelTag::Rsi, ModelTag::PayPerToken, ModelTag::Freemium, ModelTag::Subscription,
                     ModelTag::Marketplace})
        if (s == model_key(tag)) return tag;
    return std::nullopt;
}

class Parser {
public:
    Parser(ExperimentConfig& cfg, const std::string& source) : cfg_(cfg), source_(source) {}

    void line(std::string_view raw, std::size_t lineno) {
        std::string_view text = raw;
        if (auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
        const auto body = trim(text);
        if (body.empty()) return;
        const std::size_t indent = static_cast<std::size_t>(body.data() - raw.data());

        if (body.front() == '[') {
            if (body.back() != ']') throw ParseError(source_, lineno, indent + 1, "unterminated section header");
            start_section(trim(body.substr(1, body.size() - 2)), lineno, indent + 2);
            return;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(source_, lineno, indent + 1, "expected 'key = value'");
        const auto key = trim(body.substr(0, eq));
        const auto rest = body.substr(eq + 1);
        const auto value = trim(rest);
        const std::size_t value_col =
            value.empty() ? indent + eq + 2 : static_cast<std::size_t>(value.data() - raw.data()) + 1;
        if (key.empty()) throw ParseError(source_, lineno, indent + 1, "missing key before '='");
        Field f{key, value, source_, lineno, value_col};
        if (!assign(f)) {
            const std::size_t key_col = static_cast<std::size_t>(key.data() - raw.data()) + 1;
            throw ParseError(source_, lineno, key_col,
                             section_.empty() ? fmt::format("unknown top-level key '{}'", key)
                                              : fmt::format("unknown key '{}' in [{}]", key, section_));
        }
    }

private:
    ExperimentConfig& cfg_;
    const std::string& source_;
    std::string section_;
    bool policy_kind_given_ = false;

    void start_section(std::string_view header, std::size_t lineno, std::size_t column) {
        const auto space = header.find_first_of(" \t");
        const auto name = header.substr(0, space);
        const auto arg = space == std::string_view::npos ? std::string_view{} : trim(header.substr(space));
        static const char* plain[] = {"platform", "policy", "solver", "population", "grid",
                                      "compare",  "ledger", "scenario", "pool"};
        if (name == "developer") {
            if (arg.empty()) throw ParseError(source_, lineno, column, "[developer] needs an id: [developer <id>]");
            DeveloperProfile dev;
            dev.id = std::string(arg);
            cfg_.developers.push_back(std::move(dev));
        } else if (std::find(std::begin(plain), std::end(plain), name) != std::end(plain)) {
            if (!arg.empty())
                throw ParseError(source_, lineno, column, fmt::format("section [{}] takes no argument", name));
            if (name == "policy" && !cfg_.policy) {
                cfg_.policy = CommissionPolicy{};
                policy_kind_given_ = false;
            }
            if (name == "population" && !cfg_.population) cfg_.population = PopulationSpec{};
            if (name == "ledger" && !cfg_.ledger) cfg_.ledger = LedgerSpec{};
        } else {
            throw ParseError(source_, lineno, column, fmt::format("unknown section [{}]", header));
        }
        section_ = std::string(name);
    }

    bool assign(const Field& f) {
        if (section_.empty()) return top_level(f);
        if (section_ == "platform") {
            if (f.key != "cost") return false;
            cfg_.cost = f.num();
            return true;
        }
        if (section_ == "policy") return policy(f);
        if (section_ == "solver") return solver(f);
        if (section_ == "developer") return developer(f, cfg_.developers.back());
        if (section_ == "population") return population(f, *cfg_.population);
        if (section_ == "grid") return grid(f);
        if (section_ == "compare") return compare(f);
        if (section_ == "ledger") {
            if (f.key == "path") cfg_.ledger->path = std::string(f.value);
            else if (f.key == "freemium") cfg_.ledger->freemium = f.boolean();
            else return false;
            return true;
        }
        if (section_ == "scenario") {
            if (f.key == "id") cfg_.scenario.id = static_cast<int>(f.integer());
            else if (f.key == "count") cfg_.scenario.count = f.integer();
            else if (f.key == "amount") cfg_.scenario.amount = f.money();
            else if (f.key == "free_users") cfg_.scenario.free_users = f.integer();
            else return false;
            return true;
        }
        if (section_ == "pool") {
            if (f.key == "success_probability") cfg_.pool.success_probability = f.num();
            else if (f.key == "draws") cfg_.pool.draws = f.unsigned_integer();
            else return false;
            return true;
        }
        return false;
    }

    bool top_level(const Field& f) {
        if (f.key == "command") {
            auto c = parse_command(f.value);
            if (!c) f.fail(fmt::format("unknown command '{}'", f.value));
            cfg_.command = c;
        } else if (f.key == "format") {
            if (f.value == "csv") cfg_.format = OutputFormat::Csv;
            else if (f.value == "json") cfg_.format = OutputFormat::Json;
            else f.fail(fmt::format("format must be csv or json, got '{}'", f.value));
        } else if (f.key == "output") {
            cfg_.output = std::string(f.value);
        } else if (f.key == "seed") {
            cfg_.seed = f.unsigned_integer();
        } else if (f.key == "timestamp") {
            cfg_.timestamp = f.boolean();
        } else {
            return false;
        }
        return true;
    }

    bool policy(const Field& f) {
        auto& p = *cfg_.policy;
        if (f.key == "kind") {
            if (f.value == "flat") p.kind = CommissionKind::Flat;
            else if (f.value == "degressive") p.kind = CommissionKind::Degressive;
            else f.fail(fmt::format("policy kind must be flat or degressive, got '{}'", f.value));
            policy_kind_given_ = true;
        } else if (f.key == "rate") {
            p.bands = {RateBand{0.0, f.num()}};
        } else if (f.key == "breakpoints") {
            p.bands.clear();
            for (auto [t, r] : f.pairs()) p.bands.push_back({f.money_of(t), f.number_of(r)});
            if (!policy_kind_given_) p.kind = CommissionKind::Degressive;
        } else if (f.key == "ad_share") {
            p.ad_share = f.num();
        } else if (f.key == "activity_threshold") {
            p.activity_threshold = f.num();
        } else {
            return false;
        }
        return true;
    }

    bool solver(const Field& f) {
        if (f.key == "method") {
            if (f.value == "auto") cfg_.solver.method = SolveMethod::Auto;
            else if (f.value == "analytic") cfg_.solver.method = SolveMethod::Analytic;
            else if (f.value == "numeric") cfg_.solver.method = SolveMethod::Numeric;
            else f.fail(fmt::format("method must be auto, analytic or numeric, got '{}'", f.value));
        } else if (f.key == "grid_step") {
            cfg_.solver.grid_step = f.num();
        } else if (f.key == "tolerance") {
            cfg_.solver.tolerance = f.num();
        } else {
            return false;
        }
        return true;
    }

    static bool developer(const Field& f, DeveloperProfile& d) {
        if (f.key == "family") {
            if (f.value == "linear") d.tech.family = RevenueFamily::LinearEffort;
            else if (f.value == "power") d.tech.family = RevenueFamily::PowerEffort;
            else if (f.value == "demand") d.tech.family = RevenueFamily::LinearDemand;
            else f.fail(fmt::format("family must be linear, power or demand, got '{}'", f.value));
        } else if (f.key == "scale") {
            d.tech.scale = f.num();
        } else if (f.key == "elasticity") {
            d.tech.elasticity = f.num();
        } else if (f.key == "demand_base") {
            d.tech.demand_base = f.num();
        } else if (f.key == "demand_quality") {
            d.tech.demand_quality = f.num();
        } else if (f.key == "demand_slope") {
            d.tech.demand_slope = f.num();
        } else if (f.key == "usage_per_revenue") {
            d.tech.usage_per_revenue = f.num();
        } else if (f.key == "cost") {
            if (f.value == "quadratic") d.cost.family = CostFamily::Quadratic;
            else if (f.value == "power") d.cost.family = CostFamily::PowerConvex;
            else f.fail(fmt::format("cost must be quadratic or power, got '{}'", f.value));
        } else if (f.key == "cost_scale") {
            d.cost.scale = f.num();
        } else if (f.key == "cost_exponent") {
            d.cost.exponent = f.num();
        } else if (f.key == "reservation") {
            d.reservation_profit = f.money();
        } else if (f.key == "ad_yield") {
            d.ad_yield = f.num();
        } else {
            return false;
        }
        return true;
    }

    static bool population(const Field& f, PopulationSpec& p) {
        static const std::map<std::string_view, Distribution PopulationSpec::*> dists{
            {"scale", &PopulationSpec::scale},
            {"elasticity", &PopulationSpec::elasticity},
            {"cost_scale", &PopulationSpec::cost_scale},
            {"reservation", &PopulationSpec::reservation},
            {"demand_base", &PopulationSpec::demand_base},
            {"demand_quality", &PopulationSpec::demand_quality},
            {"demand_slope", &PopulationSpec::demand_slope},
        };
        if (auto it = dists.find(f.key); it != dists.end()) {
            p.*(it->second) = f.distribution();
        } else if (f.key == "size") {
            p.size = f.unsigned_integer();
        } else if (f.key == "cost_exponent") {
            p.cost_exponent = f.num();
        } else if (f.key == "mix") {
            FamilyMix mix{0.0, 0.0, 0.0};
            for (auto [name, share] : f.pairs()) {
                const double v = f.number_of(share);
                if (name == "linear") mix.linear_effort = v;
                else if (name == "power") mix.power_effort = v;
                else if (name == "demand") mix.linear_demand = v;
                else f.fail(fmt::format("unknown family '{}' in mix (linear, power, demand)", name));
            }
            p.mix = mix;
        } else {
            return false;
        }
        return true;
    }

    bool grid(const Field& f) {
        if (f.key == "alpha_min") cfg_.grid.alpha_min = f.num();
        else if (f.key == "alpha_max") cfg_.grid.alpha_max = f.num();
        else if (f.key == "step") cfg_.grid.step = f.num();
        else if (f.key == "alphas") cfg_.grid.alphas = f.numbers();
        else return false;
        return true;
    }

    bool compare(const Field& f) {
        auto& c = cfg_.compare;
        if (f.key == "rsi") {
            c.rsi = f.boolean();
        } else if (f.key == "token_price") {
            c.token_price = f.num();
        } else if (f.key == "subscription_fee") {
            c.subscription_fee = f.money();
        } else if (f.key == "freemium" || f.key == "marketplace") {
            auto p = f.pairs();
            if (p.size() != 1)
                f.fail(fmt::format("'{}' expects {}", f.key,
                                   f.key == "freemium" ? "quota:overage_price" : "commission:token_price"));
            const double a = f.number_of(p[0].first), b = f.number_of(p[0].second);
            if (f.key == "freemium") c.freemium = FreemiumTerms{a, b};
            else c.marketplace = MarketplaceTerms{a, b};
        } else if (f.key == "hybrid") {
            c.hybrid.clear();
            for (auto part : detail::split(f.value, ',')) {
                auto tag = parse_model_key(trim(part));
                if (!tag) f.fail(fmt::format("unknown model '{}' in hybrid", trim(part)));
                c.hybrid.push_back(*tag);
            }
        } else if (f.key == "capital") {
            c.capital = f.money();
        } else if (f.key == "capital_grid") {
            c.capital_grid.clear();
            if (!trim(f.value).empty())
                for (auto part : detail::split(f.value, ',')) c.capital_grid.push_back(f.money_of(part));
        } else {
            return false;
        }
        return true;
    }
};

}  // namespace

const char* to_string(Command c) {
    switch (c) {
        case Command::Solve: return "solve";
        case Command::Sweep: return "sweep";
        case Command::Compare: return "compare";
        case Command::Scenario: return "scenario";
        case Command::Settle: return "settle";
        case Command::Pool: return "pool";
    }
    return "?";
}

const char* to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

const char* to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::Auto: return "auto";
        case SolveMethod::Analytic: return "analytic";
        case SolveMethod::Numeric: return "numeric";
    }
    return "?";
}

std::optional<Command> parse_command(std::string_view text) {
    for (auto c : {Command::Solve, Command::Sweep, Command::Compare, Command::Scenario, Command::Settle, Command::Pool})
        if (text == to_string(c)) return c;
    return std::nullopt;
}

std::vector<double> GridSpec::values() const {
    if (alphas) return *alphas;
    return make_grid(alpha_min, alpha_max, step);
}

std::vector<BusinessModel> CompareSpec::models(const CommissionPolicy& policy) const {
    std::vector<BusinessModel> out;
    auto member = [&](ModelTag tag) -> std::optional<BusinessModel> {
        switch (tag) {
            case ModelTag::Rsi: return BusinessModel::rsi(policy);
            case ModelTag::PayPerToken:
                if (token_price) return BusinessModel::pay_per_token(*token_price);
                break;
            case ModelTag::Freemium:
                if (freemium) return BusinessModel{*freemium};
                break;
            case ModelTag::Subscription:
                if (subscription_fee) return BusinessModel::subscription(*subscription_fee);
                break;
            case ModelTag::Marketplace:
                if (marketplace) return BusinessModel{*marketplace};
                break;
            case ModelTag::Hybrid: break;
        }
        return std::nullopt;
    };
    if (rsi) out.push_back(*member(ModelTag::Rsi));
    for (auto tag : {ModelTag::PayPerToken, ModelTag::Freemium, ModelTag::Subscription, ModelTag::Marketplace})
        if (auto m = member(tag)) out.push_back(*m);
    if (!hybrid.empty()) {
        std::vector<BusinessModel> choices;
        for (auto tag : hybrid)
            if (auto m = member(tag)) choices.push_back(*m);
        out.push_back(BusinessModel::hybrid(std::move(choices)));
    }
    return out;
}

PlatformParams ExperimentConfig::platform() const {
    if (population) {
        PopulationSpec spec = *population;
        spec.seed = seed;
        return make_platform(spec, cost);
    }
    PlatformParams params;
    params.marginal_cost = cost;
    params.population = developers;
    return params;
}

DeveloperProfile canonical_developer() {
    DeveloperProfile d;
    d.id = "canonical";
    d.tech = RevenueTechnology::linear(1.0);
    d.cost = EffortCost::quadratic(1.0);
    return d;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    Parser parser(cfg, source);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) parser.line(raw, ++lineno);
    return cfg;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
    std::istringstream in{std::string(text)};
    return parse_config(in, source);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, 0, "cannot open config file");
    auto cfg = parse_config(in, path.string());
    // Ledger paths are relative to the config file.
    if (cfg.ledger && !cfg.ledger->path.empty() && std::filesystem::path(cfg.ledger->path).is_relative())
        cfg.ledger->path = (path.parent_path() / cfg.ledger->path).lexically_normal().string();
    return cfg;
}

std::string dump_config(const ExperimentConfig& c) {
    std::string out;
    auto kv = [&](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };

    if (c.command) kv("command", to_string(*c.command));
    kv("format", to_string(c.format));
    if (c.output) kv("output", *c.output);
    kv("seed", std::to_string(c.seed));
    kv("timestamp", c.timestamp ? "true" : "false");

    out += "\n[platform]\n";
    kv("cost", number(c.cost));

    if (c.policy) {
        const auto& p = *c.policy;
        out += "\n[policy]\n";
        kv("kind", p.is_flat() ? "flat" : "degressive");
        if (p.is_flat() && p.bands.size() == 1 && p.bands.front().threshold == 0.0) {
            kv("rate", number(p.bands.front().rate));
        } else {
            std::string bp;
            for (std::size_t j = 0; j < p.bands.size(); ++j)
                bp += fmt::format("{}{}:{}", j ? ", " : "", currency(p.bands[j].threshold), number(p.bands[j].rate));
            kv("breakpoints", bp);
        }
        if (p.ad_share) kv("ad_share", number(*p.ad_share));
        kv("activity_threshold", number(p.activity_threshold));
    }

    out += "\n[solver]\n";
    kv("method", to_string(c.solver.method));
    kv("grid_step", number(c.solver.grid_step));
    kv("tolerance", number(c.solver.tolerance));

    for (const auto& d : c.developers) {
        out += fmt::format("\n[developer {}]\n", d.id);
        kv("family", family_name(d.tech.family));
        kv("scale", number(d.tech.scale));
        kv("elasticity", number(d.tech.elasticity));
        kv("demand_base", number(d.tech.demand_base));
        kv("demand_quality", number(d.tech.demand_quality));
        kv("demand_slope", number(d.tech.demand_slope));
        if (d.tech.usage_per_revenue) kv("usage_per_revenue", number(*d.tech.usage_per_revenue));
        kv("cost", d.cost.family == CostFamily::Quadratic ? "quadratic" : "power");
        kv("cost_scale", number(d.cost.scale));
        kv("cost_exponent", number(d.cost.exponent));
        kv("reservation", currency(d.reservation_profit));
        kv("ad_yield", number(d.ad_yield));
    }

    if (c.population) {
        const auto& p = *c.population;
        out += "\n[population]\n";
        kv("size", std::to_string(p.size));
        kv("scale", p.scale.to_string());
        kv("elasticity", p.elasticity.to_string());
        kv("cost_scale", p.cost_scale.to_string());
        kv("reservation", p.reservation.to_string());
        kv("demand_base", p.demand_base.to_string());
        kv("demand_quality", p.demand_quality.to_string());
        kv("demand_slope", p.demand_slope.to_string());
        kv("cost_exponent", number(p.cost_exponent));
        kv("mix", fmt::format("linear:{}, power:{}, demand:{}", number(p.mix.linear_effort),
                              number(p.mix.power_effort), number(p.mix.linear_demand)));
    }

    out += "\n[grid]\n";
    kv("alpha_min", number(c.grid.alpha_min));
    kv("alpha_max", number(c.grid.alpha_max));
    kv("step", number(c.grid.step));
    if (c.grid.alphas) {
        std::string list;
        for (std::size_t j = 0; j < c.grid.alphas->size(); ++j) list += (j ? ", " : "") + number((*c.grid.alphas)[j]);
        kv("alphas", list);
    }

    const auto& cmp = c.compare;
    out += "\n[compare]\n";
    kv("rsi", cmp.rsi ? "true" : "false");
    if (cmp.token_price) kv("token_price", number(*cmp.token_price));
    if (cmp.subscription_fee) kv("subscription_fee", currency(*cmp.subscription_fee));
    if (cmp.freemium)
        kv("freemium", fmt::format("{}:{}", number(cmp.freemium->free_quota), number(cmp.freemium->overage_price)));
    if (cmp.marketplace)
        kv("marketplace",
           fmt::format("{}:{}", number(cmp.marketplace->commission), number(cmp.marketplace->token_price)));
    if (!cmp.hybrid.empty()) {
        std::string list;
        for (std::size_t j = 0; j < cmp.hybrid.size(); ++j) list += std::string(j ? ", " : "") + model_key(cmp.hybrid[j]);
        kv("hybrid", list);
    }
    if (cmp.capital) kv("capital", currency(*cmp.capital));
    if (!cmp.capital_grid.empty()) {
        std::string list;
        for (std::size_t j = 0; j < cmp.capital_grid.size(); ++j) list += (j ? ", " : "") + currency(cmp.capital_grid[j]);
        kv("capital_grid", list);
    }

    if (c.ledger) {
        out += "\n[ledger]\n";
        kv("path", c.ledger->path);
        kv("freemium", c.ledger->freemium ? "true" : "false");
    }

    out += "\n[scenario]\n";
    kv("id", std::to_string(c.scenario.id));
    if (c.scenario.count) kv("count", std::to_string(*c.scenario.count));
    if (c.scenario.amount) kv("amount", currency(*c.scenario.amount));
    kv("free_users", std::to_string(c.scenario.free_users));

    out += "\n[pool]\n";
    kv("success_probability", number(c.pool.success_probability));
    kv("draws", std::to_string(c.pool.draws));
    return out;
}

std::vector<std::string> validate(const ExperimentConfig& c) {
    std::vector<std::string> out;
    auto add_all = [&](const std::string& prefix, const std::vector<std::string>& diags) {
        for (const auto& d : diags) out.push_back(prefix + d);
    };

    if (!c.command) out.push_back("no command given (solve, sweep, compare, scenario, settle, pool)");
    if (!(std::isfinite(c.cost) && c.cost >= 0.0))
        out.push_back(fmt::format("[platform] cost must be finite and non-negative (got {})", c.cost));
    if (c.policy) add_all("[policy] ", c.policy->diagnostics());
    if (!(c.solver.grid_step > 0.0 && c.solver.grid_step <= 1.0))
        out.push_back(fmt::format("[solver] grid_step must be in (0, 1] (got {})", c.solver.grid_step));
    if (!(c.solver.tolerance > 0.0))
        out.push_back(fmt::format("[solver] tolerance must be positive (got {})", c.solver.tolerance));

    for (const auto& d : c.developers) add_all(fmt::format("[developer {}] ", d.id), d.diagnostics());
    {
        std::vector<std::string> ids;
        for (const auto& d : c.developers) ids.push_back(d.id);
        std::sort(ids.begin(), ids.end());
        for (std::size_t j = 1; j < ids.size(); ++j)
            if (ids[j] == ids[j - 1]) out.push_back(fmt::format("duplicate developer id '{}'", ids[j]));
    }
    if (c.population) add_all("[population] ", c.population->diagnostics());
    if (c.population && !c.developers.empty())
        out.push_back("give either [developer] sections or a [population], not both");

    if (!c.command) return out;
    const Command cmd = *c.command;
    const bool needs_developers =
        cmd == Command::Solve || cmd == Command::Sweep || cmd == Command::Compare || cmd == Command::Pool;
    if (needs_developers && c.developers.empty() && !c.population)
        out.push_back(fmt::format("{} needs developers: add [developer <id>] sections, a [population] or --canonical",
                                  to_string(cmd)));

    if (cmd == Command::Sweep) {
        const auto& g = c.grid;
        if (g.alphas) {
            if (g.alphas->empty()) out.push_back("[grid] empty alpha grid");
            for (std::size_t j = 0; j < g.alphas->size(); ++j) {
                const double a = (*g.alphas)[j];
                if (!(a >= 0.0 && a <= 1.0)) out.push_back(fmt::format("[grid] rate out of [0,1] ({})", a));
                if (j > 0 && a < (*g.alphas)[j - 1])
                    out.push_back(fmt::format("[grid] alphas not sorted: {} followed by {}", (*g.alphas)[j - 1], a));
            }
        } else {
            if (!(g.step > 0.0) || !(g.alpha_min <= g.alpha_max))
                out.push_back(fmt::format("[grid] empty alpha grid (alpha_min {}, alpha_max {}, step {})", g.alpha_min,
                                          g.alpha_max, g.step));
            for (double a : {g.alpha_min, g.alpha_max})
                if (!(a >= 0.0 && a <= 1.0)) out.push_back(fmt::format("[grid] rate out of [0,1] ({})", a));
        }
    }

    if (cmd == Command::Compare) {
        const auto& cmp = c.compare;
        if (cmp.rsi && !c.policy) out.push_back("compare needs a [policy] (or --rate) for the RSI row");
        const auto models = cmp.models(c.policy.value_or(CommissionPolicy{}));
        if (models.empty()) out.push_back("[compare] no business models selected");
        for (const auto& m : models)
            if (m.tag() != ModelTag::Rsi) add_all("[compare] ", m.diagnostics());
        for (auto tag : cmp.hybrid) {
            const bool defined = (tag == ModelTag::Rsi && c.policy) || (tag == ModelTag::PayPerToken && cmp.token_price) ||
                                 (tag == ModelTag::Freemium && cmp.freemium) ||
                                 (tag == ModelTag::Subscription && cmp.subscription_fee) ||
                                 (tag == ModelTag::Marketplace && cmp.marketplace);
            if (!defined) out.push_back(fmt::format("[compare] hybrid member '{}' is not configured", model_key(tag)));
        }
        if (cmp.capital && !(*cmp.capital >= 0.0))
            out.push_back(fmt::format("[compare] capital must be non-negative (got {})", *cmp.capital));
        for (std::size_t j = 0; j < cmp.capital_grid.size(); ++j)
            if (!(cmp.capital_grid[j] >= 0.0) || (j > 0 && cmp.capital_grid[j] < cmp.capital_grid[j - 1]))
                out.push_back("[compare] capital_grid must be non-negative and ascending");
        if (!cmp.capital_grid.empty() && !cmp.token_price)
            out.push_back("[compare] capital_grid needs token_price for the pay-per-token side");
    }

    if (cmd == Command::Settle) {
        if (!c.policy) out.push_back("settle needs a [policy] (or --rate)");
        if (!c.ledger || c.ledger->path.empty()) {
            out.push_back("settle needs a ledger: [ledger] path or --ledger");
        } else if (!std::filesystem::is_regular_file(c.ledger->path)) {
            out.push_back(fmt::format("[ledger] file not found: {}", c.ledger->path));
        }
    }

    if (cmd == Command::Scenario) {
        const auto& s = c.scenario;
        if (s.id < 1 || s.id > 3) out.push_back(fmt::format("[scenario] id must be 1, 2 or 3 (got {})", s.id));
        if (s.count && *s.count < 0) out.push_back("[scenario] count must be non-negative");
        if (s.amount && !(*s.amount >= 0.0 && std::isfinite(*s.amount)))
            out.push_back("[scenario] amount must be a finite non-negative amount");
        if (s.free_users < 0) out.push_back("[scenario] free_users must be non-negative");
    }

    if (cmd == Command::Pool) {
        const double s = c.pool.success_probability;
        if (!(s >= 0.0 && s <= 1.0)) out.push_back(fmt::format("[pool] success_probability out of [0,1] ({})", s));
        if (c.pool.draws < 1) out.push_back("[pool] draws must be at least 1");
    }
    return out;
}

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error(diagnostics.empty() ? std::string("invalid config")
                                             : fmt::format("invalid config: {}", diagnostics.front())),
      diagnostics_(std::move(diagnostics)) {}

}  // namespace revshare::cli
