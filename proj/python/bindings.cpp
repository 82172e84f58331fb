#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <sstream>

#include "revshare/best_response.hpp"
#include "revshare/comparator.hpp"
#include "revshare/ecosystem.hpp"
#include "revshare/error.hpp"
#include "revshare/participation.hpp"
#include "revshare/platform.hpp"
#include "revshare/settlement.hpp"

namespace py = pybind11;
using namespace revshare;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Commission-setting game between an AI platform and app developers";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

    py::enum_<RevenueFamily>(m, "RevenueFamily")
        .value("LinearEffort", RevenueFamily::LinearEffort)
        .value("PowerEffort", RevenueFamily::PowerEffort)
        .value("LinearDemand", RevenueFamily::LinearDemand);
    py::enum_<CostFamily>(m, "CostFamily")
        .value("Quadratic", CostFamily::Quadratic)
        .value("PowerConvex", CostFamily::PowerConvex);
    py::enum_<CommissionKind>(m, "CommissionKind")
        .value("Flat", CommissionKind::Flat)
        .value("Degressive", CommissionKind::Degressive);
    py::enum_<SolveMethod>(m, "SolveMethod")
        .value("Auto", SolveMethod::Auto)
        .value("Analytic", SolveMethod::Analytic)
        .value("Numeric", SolveMethod::Numeric);
    py::enum_<SolutionMethod>(m, "SolutionMethod")
        .value("Analytic", SolutionMethod::Analytic)
        .value("Numeric", SolutionMethod::Numeric);
    py::enum_<ModelTag>(m, "ModelTag")
        .value("Rsi", ModelTag::Rsi)
        .value("PayPerToken", ModelTag::PayPerToken)
        .value("Freemium", ModelTag::Freemium)
        .value("Subscription", ModelTag::Subscription)
        .value("Marketplace", ModelTag::Marketplace)
        .value("Hybrid", ModelTag::Hybrid);
    py::enum_<TransactionKind>(m, "TransactionKind")
        .value("Sale", TransactionKind::Sale)
        .value("SubscriptionCharge", TransactionKind::SubscriptionCharge)
        .value("AdImpressionRevenue", TransactionKind::AdImpressionRevenue);

    py::class_<Distribution>(m, "Distribution")
        .def_static("uniform", &Distribution::uniform)
        .def_static("lognormal", &Distribution::lognormal)
        .def_static("parse", &Distribution::parse)
        .def("cdf", &Distribution::cdf)
        .def("mean", &Distribution::mean)
        .def("__repr__", &Distribution::to_string);

    py::class_<RevenueTechnology>(m, "RevenueTechnology")
        .def(py::init<>())
        .def_static("linear", &RevenueTechnology::linear, py::arg("scale"))
        .def_static("power", &RevenueTechnology::power, py::arg("scale"), py::arg("elasticity"))
        .def_static("linear_demand", &RevenueTechnology::linear_demand, py::arg("base"), py::arg("quality"),
                    py::arg("slope"), py::arg("usage_per_revenue") = py::none())
        .def_readwrite("family", &RevenueTechnology::family)
        .def_readwrite("scale", &RevenueTechnology::scale)
        .def_readwrite("elasticity", &RevenueTechnology::elasticity)
        .def_readwrite("demand_base", &RevenueTechnology::demand_base)
        .def_readwrite("demand_quality", &RevenueTechnology::demand_quality)
        .def_readwrite("demand_slope", &RevenueTechnology::demand_slope)
        .def_readwrite("usage_per_revenue", &RevenueTechnology::usage_per_revenue)
        .def("diagnostics", &RevenueTechnology::diagnostics)
        .def(py::self == py::self);

    py::class_<EffortCost>(m, "EffortCost")
        .def(py::init<>())
        .def_static("quadratic", &EffortCost::quadratic, py::arg("k"))
        .def_static("power", &EffortCost::power, py::arg("k"), py::arg("exponent"))
        .def_readwrite("family", &EffortCost::family)
        .def_readwrite("scale", &EffortCost::scale)
        .def_readwrite("exponent", &EffortCost::exponent)
        .def("diagnostics", &EffortCost::diagnostics)
        .def(py::self == py::self);

    py::class_<DeveloperProfile>(m, "DeveloperProfile")
        .def(py::init([](std::string id, RevenueTechnology tech, EffortCost cost, double reservation, double ad_yield) {
                 return DeveloperProfile{std::move(id), tech, cost, reservation, ad_yield};
             }),
             py::arg("id") = "dev", py::arg("tech") = RevenueTechnology{}, py::arg("cost") = EffortCost{},
             py::arg("reservation_profit") = 0.0, py::arg("ad_yield") = 0.0)
        .def_readwrite("id", &DeveloperProfile::id)
        .def_readwrite("tech", &DeveloperProfile::tech)
        .def_readwrite("cost", &DeveloperProfile::cost)
        .def_readwrite("reservation_profit", &DeveloperProfile::reservation_profit)
        .def_readwrite("ad_yield", &DeveloperProfile::ad_yield)
        .def("diagnostics", &DeveloperProfile::diagnostics)
        .def(py::self == py::self)
        .def("__repr__", [](const DeveloperProfile& d) { return "DeveloperProfile('" + d.id + "')"; });

    py::class_<PlatformParams>(m, "PlatformParams")
        .def(py::init([](double c, std::vector<DeveloperProfile> pop) { return PlatformParams{c, std::move(pop), {}}; }),
             py::arg("marginal_cost") = 0.0, py::arg("population") = std::vector<DeveloperProfile>{})
        .def_readwrite("marginal_cost", &PlatformParams::marginal_cost)
        .def_readwrite("population", &PlatformParams::population)
        .def_readwrite("reservation_distribution", &PlatformParams::reservation_distribution)
        .def("diagnostics", &PlatformParams::diagnostics)
        .def("degenerate", &PlatformParams::degenerate);

    py::class_<RateBand>(m, "RateBand")
        .def(py::init<double, double>(), py::arg("threshold"), py::arg("rate"))
        .def_readwrite("threshold", &RateBand::threshold)
        .def_readwrite("rate", &RateBand::rate);

    py::class_<CommissionPolicy>(m, "CommissionPolicy")
        .def(py::init<>())
        .def_static("flat", &CommissionPolicy::flat, py::arg("rate"))
        .def_static(
            "degressive",
            [](const std::vector<std::pair<double, double>>& bands) {
                std::vector<RateBand> out;
                for (auto [t, r] : bands) out.push_back({t, r});
                return CommissionPolicy::degressive(std::move(out));
            },
            py::arg("bands"))
        .def_readwrite("kind", &CommissionPolicy::kind)
        .def_readwrite("bands", &CommissionPolicy::bands)
        .def_readwrite("ad_share", &CommissionPolicy::ad_share)
        .def_readwrite("activity_threshold", &CommissionPolicy::activity_threshold)
        .def("with_rate", &CommissionPolicy::with_rate)
        .def("commission", &CommissionPolicy::commission)
        .def("marginal_rate", &CommissionPolicy::marginal_rate)
        .def("diagnostics", &CommissionPolicy::diagnostics)
        .def(py::self == py::self);

    py::class_<BusinessModel>(m, "BusinessModel")
        .def_static("rsi", &BusinessModel::rsi, py::arg("policy"))
        .def_static("pay_per_token", &BusinessModel::pay_per_token, py::arg("token_price"))
        .def_static("freemium", &BusinessModel::freemium, py::arg("free_quota"), py::arg("overage_price"))
        .def_static("subscription", &BusinessModel::subscription, py::arg("fee"))
        .def_static("marketplace", &BusinessModel::marketplace, py::arg("commission"), py::arg("token_price"))
        .def_static("hybrid", &BusinessModel::hybrid, py::arg("choices"))
        .def_property_readonly("tag", &BusinessModel::tag)
        .def("describe", &BusinessModel::describe)
        .def("__repr__", &BusinessModel::describe);

    m.def("revenue", &revenue, py::arg("tech"), py::arg("effort"), py::arg("price") = py::none());
    m.def("usage", &usage, py::arg("tech"), py::arg("effort"), py::arg("price") = py::none());
    m.def("effort_cost", &effort_cost, py::arg("cost"), py::arg("effort"));

    py::class_<BestResponse>(m, "BestResponse")
        .def_readonly("effort", &BestResponse::effort)
        .def_readonly("price", &BestResponse::price)
        .def_readonly("gross_revenue", &BestResponse::gross_revenue)
        .def_readonly("usage", &BestResponse::usage)
        .def_readonly("ad_revenue", &BestResponse::ad_revenue)
        .def_readonly("commission", &BestResponse::commission)
        .def_readonly("net_profit", &BestResponse::net_profit)
        .def_readonly("foc_residual", &BestResponse::foc_residual)
        .def_readonly("method", &BestResponse::method)
        .def_readonly("charged", &BestResponse::charged);

    m.def("solve_effort", &solve_effort, py::arg("developer"), py::arg("rate"), py::arg("method") = SolveMethod::Auto);
    m.def("best_response", &best_response, py::arg("developer"), py::arg("policy"),
          py::arg("method") = SolveMethod::Auto);

    py::class_<ParticipationResult>(m, "ParticipationResult")
        .def_readonly("entrants", &ParticipationResult::entrants)
        .def_readonly("count", &ParticipationResult::count)
        .def_readonly("entry_profits", &ParticipationResult::entry_profits);
    m.def(
        "participate",
        [](const std::vector<DeveloperProfile>& pop, double rate) { return participate(pop, rate); },
        py::arg("population"), py::arg("rate"));

    py::class_<DeveloperOutcome>(m, "DeveloperOutcome")
        .def_readonly("id", &DeveloperOutcome::id)
        .def_readonly("response", &DeveloperOutcome::response)
        .def_readonly("entered", &DeveloperOutcome::entered)
        .def_readonly("platform_margin", &DeveloperOutcome::platform_margin);
    py::class_<ProfitSample>(m, "ProfitSample")
        .def_readonly("alpha", &ProfitSample::alpha)
        .def_readonly("profit", &ProfitSample::profit)
        .def_readonly("entrants", &ProfitSample::entrants);
    py::class_<OptimizerOptions>(m, "OptimizerOptions")
        .def(py::init<>())
        .def_readwrite("grid_step", &OptimizerOptions::grid_step)
        .def_readwrite("tolerance", &OptimizerOptions::tolerance)
        .def_readwrite("method", &OptimizerOptions::method);
    py::class_<EquilibriumReport>(m, "EquilibriumReport")
        .def_readonly("alpha", &EquilibriumReport::alpha)
        .def_readonly("profit", &EquilibriumReport::profit)
        .def_readonly("entrants", &EquilibriumReport::entrants)
        .def_readonly("per_developer", &EquilibriumReport::per_developer)
        .def_readonly("grid_size", &EquilibriumReport::grid_size)
        .def_readonly("samples", &EquilibriumReport::samples)
        .def_readonly("participation_breaks", &EquilibriumReport::participation_breaks)
        .def_readonly("analytic_alpha", &EquilibriumReport::analytic_alpha)
        .def_readonly("degenerate", &EquilibriumReport::degenerate);

    m.def(
        "platform_profit",
        [](const PlatformParams& p, double rate) { return platform_profit(p, CommissionPolicy::flat(rate)); },
        py::arg("params"), py::arg("rate"));
    m.def("optimize_alpha", &optimize_alpha, py::arg("params"), py::arg("base") = CommissionPolicy{},
          py::arg("options") = OptimizerOptions{});
    m.def(
        "profit_curve",
        [](const PlatformParams& p, const std::vector<double>& alphas) { return profit_curve(p, alphas); },
        py::arg("params"), py::arg("alphas"));

    py::class_<ModelOutcome>(m, "ModelOutcome")
        .def_readonly("tag", &ModelOutcome::tag)
        .def_readonly("chosen", &ModelOutcome::chosen)
        .def_readonly("label", &ModelOutcome::label)
        .def_readonly("effort", &ModelOutcome::effort)
        .def_readonly("gross_revenue", &ModelOutcome::gross_revenue)
        .def_readonly("usage", &ModelOutcome::usage)
        .def_readonly("developer_profit", &ModelOutcome::developer_profit)
        .def_readonly("platform_profit", &ModelOutcome::platform_profit)
        .def_readonly("upfront_cost", &ModelOutcome::upfront_cost)
        .def_readonly("entered", &ModelOutcome::entered);
    py::class_<ComparisonTable>(m, "ComparisonTable")
        .def_readonly("rows", &ComparisonTable::rows)
        .def_readonly("preferred_by_developer", &ComparisonTable::preferred_by_developer)
        .def_readonly("preferred_by_platform", &ComparisonTable::preferred_by_platform);
    const double inf = std::numeric_limits<double>::infinity();
    m.def("evaluate_model", &evaluate_model, py::arg("developer"), py::arg("model"), py::arg("platform_cost"),
          py::arg("capital") = inf);
    m.def(
        "compare_models",
        [](const DeveloperProfile& d, const std::vector<BusinessModel>& models, double c, double capital) {
            return compare_models(d, models, c, capital);
        },
        py::arg("developer"), py::arg("models"), py::arg("platform_cost"), py::arg("capital") = inf);

    py::class_<Transaction>(m, "Transaction")
        .def(py::init([](std::string app, Cents gross, TransactionKind kind, std::string period, bool premium) {
                 return Transaction{std::move(app), gross, kind, std::move(period), premium};
             }),
             py::arg("app_id"), py::arg("gross"), py::arg("kind") = TransactionKind::Sale, py::arg("period") = "p1",
             py::arg("premium") = true)
        .def_readwrite("app_id", &Transaction::app_id)
        .def_readwrite("gross", &Transaction::gross)
        .def_readwrite("kind", &Transaction::kind)
        .def_readwrite("period", &Transaction::period)
        .def_readwrite("premium", &Transaction::premium);
    py::class_<SettlementStatement>(m, "SettlementStatement")
        .def_readonly("app_id", &SettlementStatement::app_id)
        .def_readonly("period", &SettlementStatement::period)
        .def_readonly("gross_total", &SettlementStatement::gross_total)
        .def_readonly("platform_commission", &SettlementStatement::platform_commission)
        .def_readonly("developer_payout", &SettlementStatement::developer_payout)
        .def_readonly("effective_rate", &SettlementStatement::effective_rate)
        .def_readonly("free_tier_count", &SettlementStatement::free_tier_count)
        .def("subtotal", &SettlementStatement::subtotal)
        .def("to_json", [](const SettlementStatement& s) { return to_json(s).dump(); });
    m.def(
        "settle", [](const std::vector<Transaction>& txs, const CommissionPolicy& p) { return settle(txs, p); },
        py::arg("transactions"), py::arg("policy"));
    m.def(
        "settle_ledger",
        [](const std::vector<Transaction>& txs, const CommissionPolicy& p, bool freemium) {
            return settle_ledger(txs, p, freemium);
        },
        py::arg("ledger"), py::arg("policy"), py::arg("freemium") = false);
    m.def(
        "parse_ledger",
        [](const std::string& text) {
            std::istringstream in(text);
            return parse_ledger(in);
        },
        py::arg("text"));
    m.def("format_cents", &format_cents, py::arg("cents"));

    py::class_<FamilyMix>(m, "FamilyMix")
        .def(py::init([](double l, double p, double d) { return FamilyMix{l, p, d}; }), py::arg("linear_effort") = 1.0,
             py::arg("power_effort") = 0.0, py::arg("linear_demand") = 0.0);
    py::class_<PopulationSpec>(m, "PopulationSpec")
        .def(py::init<>())
        .def_readwrite("size", &PopulationSpec::size)
        .def_readwrite("seed", &PopulationSpec::seed)
        .def_readwrite("scale", &PopulationSpec::scale)
        .def_readwrite("elasticity", &PopulationSpec::elasticity)
        .def_readwrite("cost_scale", &PopulationSpec::cost_scale)
        .def_readwrite("reservation", &PopulationSpec::reservation)
        .def_readwrite("demand_base", &PopulationSpec::demand_base)
        .def_readwrite("demand_quality", &PopulationSpec::demand_quality)
        .def_readwrite("demand_slope", &PopulationSpec::demand_slope)
        .def_readwrite("cost_exponent", &PopulationSpec::cost_exponent)
        .def_readwrite("mix", &PopulationSpec::mix);
    m.def(
        "generate_population", [](const PopulationSpec& s) { return generate_population(s).profiles; },
        py::arg("spec"));
    m.def("make_grid", &make_grid, py::arg("lo"), py::arg("hi"), py::arg("step"));

    py::class_<SweepPoint>(m, "SweepPoint")
        .def_readonly("alpha", &SweepPoint::alpha)
        .def_readonly("profit", &SweepPoint::profit)
        .def_readonly("entrants", &SweepPoint::entrants)
        .def_readonly("mean_developer_profit", &SweepPoint::mean_developer_profit)
        .def_readonly("developer_surplus", &SweepPoint::developer_surplus);
    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("points", &SweepResult::points)
        .def_readonly("argmax_alpha", &SweepResult::argmax_alpha)
        .def_readonly("seed", &SweepResult::seed)
        .def("to_csv", &SweepResult::to_csv);
    m.def(
        "sweep",
        [](const PopulationSpec& spec, const std::vector<double>& alphas, double c) { return sweep(spec, alphas, c); },
        py::arg("spec"), py::arg("alphas"), py::arg("marginal_cost"));
    m.def(
        "sweep_params",
        [](const PlatformParams& p, const std::vector<double>& alphas) { return sweep(p, alphas); }, py::arg("params"),
        py::arg("alphas"));

    py::class_<RiskPoolingReport>(m, "RiskPoolingReport")
        .def_readonly("deterministic_profit", &RiskPoolingReport::deterministic_profit)
        .def_readonly("expected_profit", &RiskPoolingReport::expected_profit)
        .def_readonly("mean", &RiskPoolingReport::mean)
        .def_readonly("stddev", &RiskPoolingReport::stddev)
        .def_readonly("p05", &RiskPoolingReport::p05)
        .def_readonly("coefficient_of_variation", &RiskPoolingReport::coefficient_of_variation)
        .def_readonly("entrants", &RiskPoolingReport::entrants)
        .def_readonly("draws", &RiskPoolingReport::draws);
    m.def("risk_pooling_report", &risk_pooling_report, py::arg("params"), py::arg("policy"),
          py::arg("success_probability"), py::arg("draws"), py::arg("seed"));
}
