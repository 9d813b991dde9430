// Python bindings over the C++ core. Structured results cross the boundary
// as JSON strings; the jumpgop package decodes them into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jumpgop/deflator.hpp"
#include "jumpgop/errors.hpp"
#include "jumpgop/gop.hpp"
#include "jumpgop/market.hpp"
#include "jumpgop/mc.hpp"
#include "jumpgop/scenario.hpp"
#include "jumpgop/simulate.hpp"

namespace py = pybind11;
using namespace jumpgop;

namespace {

MarketSpec market_from_text(const std::string& text) { return MarketSpec::from_json_text(text); }

Strategy make_strategy(const std::vector<std::vector<double>>& pi, double initial_wealth) {
    Strategy s;
    s.pi = pi;
    s.initial_wealth = initial_wealth;
    return s;
}

}  // namespace

PYBIND11_MODULE(_jumpgop, m) {
    m.doc() = "jump-diffusion growth-optimal portfolio and deflator lab";

    py::register_exception<ParseError>(m, "JumpgopParseError");
    py::register_exception<ModelError>(m, "JumpgopModelError");

    py::class_<MarketSpec>(m, "MarketSpec")
        .def_static("from_json", &market_from_text, py::arg("text"))
        .def_static("from_file", &MarketSpec::from_file, py::arg("path"))
        .def_property_readonly("d", [](const MarketSpec& s) { return s.d; })
        .def_property_readonly("m", [](const MarketSpec& s) { return s.m; })
        .def_property_readonly("horizon", [](const MarketSpec& s) { return s.horizon; })
        .def("to_json", [](const MarketSpec& s) { return s.to_json().dump(); });

    m.def("validate_market",
          [](const MarketSpec& s) { return validate_market(s).to_json().dump(); });
    m.def("market_price_of_risk", &market_price_of_risk, py::arg("spec"), py::arg("piece") = 0);
    m.def("classify_regime",
          [](const MarketSpec& s) { return classify_regime(s).to_json().dump(); });

    m.def("growth_rate",
          [](const std::vector<double>& c, const std::vector<double>& theta,
             const std::vector<double>& lambda, double r, int m_wiener) {
              const auto g = growth_rate(c, theta, lambda, r, m_wiener);
              return py::make_tuple(g.g, g.base, g.diffusive, g.jump);
          },
          py::arg("c"), py::arg("theta"), py::arg("lambda"), py::arg("r"), py::arg("m"));
    m.def("optimal_volatilities",
          [](const std::vector<double>& theta, const std::vector<double>& lambda, int m_wiener) {
              return optimal_volatilities(theta, lambda, m_wiener);
          },
          py::arg("theta"), py::arg("lambda"), py::arg("m"));
    m.def("optimal_growth_rate",
          [](const std::vector<double>& theta, const std::vector<double>& lambda, double r,
             int m_wiener) { return optimal_growth_rate(theta, lambda, r, m_wiener); },
          py::arg("theta"), py::arg("lambda"), py::arg("r"), py::arg("m"));
    m.def("constrained_optimal_volatilities",
          [](const std::vector<double>& theta, double lambda, double psi_cap) {
              const auto result = constrained_optimal_volatilities(theta, lambda, psi_cap);
              return py::make_tuple(result.c, to_string(result.regime));
          },
          py::arg("theta"), py::arg("lambda"), py::arg("psi_cap"));
    m.def("solve_gop", [](const MarketSpec& s) { return solve_gop(s).to_json().dump(); });

    m.def("solve_deflator",
          [](const MarketSpec& s) { return solve_unique_deflator(s).to_json().dump(); });
    m.def("analytic_deflator_expectation", [](const MarketSpec& s) {
        const auto e = analytic_deflator_expectation(s);
        return py::make_tuple(e.value, to_string(e.regime), e.integrated_drift);
    });

    m.def("test_martingale",
          [](const MarketSpec& s, uint64_t n_paths, uint64_t seed, int threads, bool antithetic) {
              McConfig config;
              config.threads = threads;
              config.antithetic = antithetic;
              return estimate_terminal_expectation(s, TerminalFunctional::Deflator,
                                                   Strategy::gop(), n_paths, seed, config)
                  .to_json()
                  .dump();
          },
          py::arg("spec"), py::arg("n_paths"), py::arg("seed"), py::arg("threads") = 1,
          py::arg("antithetic") = false);
    m.def("estimate_terminal_expectation",
          [](const MarketSpec& s, const std::string& functional,
             const std::vector<std::vector<double>>& pi, double initial_wealth,
             uint64_t n_paths, uint64_t seed, int threads, bool antithetic) {
              McConfig config;
              config.threads = threads;
              config.antithetic = antithetic;
              TerminalFunctional which;
              if (functional == "deflator") which = TerminalFunctional::Deflator;
              else if (functional == "benchmarked") which = TerminalFunctional::Benchmarked;
              else if (functional == "deflator_times_portfolio")
                  which = TerminalFunctional::DeflatorTimesPortfolio;
              else
                  throw std::invalid_argument("functional must be deflator, benchmarked or "
                                              "deflator_times_portfolio");
              const Strategy strategy =
                  pi.empty() ? Strategy::gop(initial_wealth) : make_strategy(pi, initial_wealth);
              return estimate_terminal_expectation(s, which, strategy, n_paths, seed, config)
                  .to_json()
                  .dump();
          },
          py::arg("spec"), py::arg("functional"), py::arg("pi"), py::arg("initial_wealth"),
          py::arg("n_paths"), py::arg("seed"), py::arg("threads") = 1,
          py::arg("antithetic") = false);
    m.def("log_wealth_comparison",
          [](const MarketSpec& s, const std::vector<std::vector<double>>& pi,
             double initial_wealth, uint64_t n_paths, uint64_t seed, int threads) {
              McConfig config;
              config.threads = threads;
              const Strategy strategy =
                  pi.empty() ? Strategy::gop(initial_wealth) : make_strategy(pi, initial_wealth);
              return log_wealth_comparison(s, strategy, n_paths, seed, config).to_json().dump();
          },
          py::arg("spec"), py::arg("pi"), py::arg("initial_wealth"), py::arg("n_paths"),
          py::arg("seed"), py::arg("threads") = 1);
    m.def("supermartingale_sweep",
          [](const MarketSpec& s, const std::vector<std::vector<double>>& pi,
             double initial_wealth, const std::vector<double>& checkpoints, uint64_t n_paths,
             uint64_t seed, int threads) {
              McConfig config;
              config.threads = threads;
              const Strategy strategy =
                  pi.empty() ? Strategy::gop(initial_wealth) : make_strategy(pi, initial_wealth);
              return supermartingale_sweep(s, strategy, checkpoints, n_paths, seed, config)
                  .to_json()
                  .dump();
          },
          py::arg("spec"), py::arg("pi"), py::arg("initial_wealth"), py::arg("checkpoints"),
          py::arg("n_paths"), py::arg("seed"), py::arg("threads") = 1);
    m.def("growth_dominance_test",
          [](const MarketSpec& s, uint64_t n_strategies, uint64_t seed) {
              return growth_dominance_test(s, n_strategies, seed).to_json().dump();
          },
          py::arg("spec"), py::arg("n_strategies"), py::arg("seed"));

    m.def("run_scenario",
          [](const std::string& scenario_json, int threads) {
              const auto result = run_scenario(Scenario::from_json_text(scenario_json), threads);
              return py::make_tuple(result.report.dump(2), result.exit_code);
          },
          py::arg("scenario_json"), py::arg("threads") = 1);
    m.def("load_scenario_report",
          [](const std::string& name_or_path, int threads) {
              const auto result = run_scenario(load_scenario(name_or_path), threads);
              return py::make_tuple(result.report.dump(2), result.exit_code);
          },
          py::arg("name_or_path"), py::arg("threads") = 1);
    m.def("builtin_scenarios", [] {
        std::vector<std::string> names;
        for (const auto& [name, text] : builtin_scenarios()) names.push_back(name);
        return names;
    });
}
