#include "jumpgop/scenario.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jumpgop/deflator.hpp"
#include "jumpgop/errors.hpp"
#include "jumpgop/gop.hpp"

namespace jumpgop {

namespace {

const char* kElmmRegime = R"json({
  "name": "elmm-regime",
  "kind": "martingale-test",
  "n_paths": 100000,
  "seed": 12345,
  "market": {
    "d": 2, "m": 1, "horizon": 1.0,
    "pieces": [
      {"t_start": 0.0, "r": 0.02,
       "a": [0.08, 0.30],
       "b": [[0.2, 0.0], [0.1, 0.5]],
       "lambda": [1.0]}
    ]
  }
})json";

const char* kNonexistentGop = R"json({
  "name": "nonexistent-gop",
  "kind": "validate",
  "market": {
    "d": 2, "m": 1, "horizon": 1.0,
    "pieces": [
      {"t_start": 0.0, "r": 0.02,
       "a": [0.08, 0.65],
       "b": [[0.2, 0.0], [0.1, 0.5]],
       "lambda": [1.0]}
    ]
  }
})json";

const char* kConstrainedStrict = R"json({
  "name": "constrained-strict",
  "kind": "martingale-test",
  "n_paths": 100000,
  "seed": 12345,
  "market": {
    "d": 2, "m": 1, "horizon": 1.0,
    "constraint_cap": 1.0,
    "pieces": [
      {"t_start": 0.0, "r": 0.02,
       "a": [0.08, 0.80],
       "b": [[0.2, 0.0], [0.1, 0.5]],
       "lambda": [1.0]}
    ]
  }
})json";

Strategy strategy_from_json(const nlohmann::json& doc) {
    Strategy strategy;
    if (auto it = doc.find("initial_wealth"); it != doc.end())
        strategy.initial_wealth = it->get<double>();
    if (auto it = doc.find("pi"); it != doc.end()) {
        if (!it->is_array()) throw ParseError("strategy.pi must be an array");
        if (!it->empty() && it->front().is_array()) {
            strategy.pi = it->get<std::vector<std::vector<double>>>();
        } else {
            strategy.pi = {it->get<std::vector<double>>()};
        }
    }
    return strategy;
}

nlohmann::json strategy_to_json(const Strategy& strategy) {
    nlohmann::json doc;
    doc["initial_wealth"] = strategy.initial_wealth;
    if (!strategy.is_gop()) doc["pi"] = strategy.pi;
    else doc["gop"] = true;
    return doc;
}

std::vector<double> default_checkpoints(double horizon) {
    return {0.25 * horizon, 0.5 * horizon, 0.75 * horizon, horizon};
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_paths_csv(const MarketSpec& spec, const Scenario& scenario, std::ostream& out) {
    out << "path_id,t,event_type";
    for (int j = 1; j <= spec.d; ++j) out << ",S" << j;
    out << ",Sbar_gop,Zhat\n";
    const double grid = scenario.grid_step > 0.0 ? scenario.grid_step : spec.horizon / 256.0;
    PathConfig config;
    config.grid_step = grid;
    config.antithetic = scenario.antithetic;
    for (uint64_t p = 0; p < scenario.n_paths; ++p) {
        const SimulatedPath path = sample_path(spec, scenario.seed, p, config);
        const auto assets = simulate_assets(spec, path);
        const auto gop_path = simulate_gop(spec, path);
        for (size_t e = 0; e < path.events.size(); ++e) {
            const auto& event = path.events[e];
            out << p << ',' << format_double(event.t) << ',';
            if (event.kind == EventKind::Jump)
                out << "jump:" << event.jump_process + 1;
            else
                out << "grid";
            for (int j = 0; j < spec.d; ++j) out << ',' << format_double(assets[j].points[e].value);
            const double gop_value = gop_path.points[e].value;
            out << ',' << format_double(gop_value) << ',' << format_double(1.0 / gop_value)
                << '\n';
        }
    }
}

Verdict expected_verdict(const MarketSpec& spec) {
    const auto regime = classify_regime(spec);
    if (regime.any(JumpRegimeTag::GopNonexistent))
        throw NoGopError(0, 0);
    if (regime.any(JumpRegimeTag::ConstrainedStrictSupermartingale))
        return Verdict::StrictSupermartingale;
    return Verdict::ConsistentWithMartingale;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Validate: return "validate";
        case ExperimentKind::Gop: return "gop";
        case ExperimentKind::Simulate: return "simulate";
        case ExperimentKind::MartingaleTest: return "martingale-test";
        case ExperimentKind::SupermartingaleSweep: return "sweep";
        case ExperimentKind::Dominance: return "dominance";
        case ExperimentKind::SolveDeflator: return "solve-deflator";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "validate") return ExperimentKind::Validate;
    if (name == "gop") return ExperimentKind::Gop;
    if (name == "simulate") return ExperimentKind::Simulate;
    if (name == "martingale-test" || name == "test-martingale")
        return ExperimentKind::MartingaleTest;
    if (name == "sweep" || name == "supermartingale-sweep")
        return ExperimentKind::SupermartingaleSweep;
    if (name == "dominance") return ExperimentKind::Dominance;
    if (name == "solve-deflator") return ExperimentKind::SolveDeflator;
    throw ParseError("unknown experiment kind: " + name);
}

Scenario Scenario::from_json(const nlohmann::json& doc) {
    Scenario scenario;
    if (doc.contains("market")) {
        scenario.market = MarketSpec::from_json(doc.at("market"));
    } else {
        // A bare market document is a valid scenario with defaults.
        scenario.market = MarketSpec::from_json(doc);
        return scenario;
    }
    if (doc.contains("kind"))
        scenario.kind = experiment_kind_from_string(doc.at("kind").get<std::string>());
    if (doc.contains("n_paths")) scenario.n_paths = doc.at("n_paths").get<uint64_t>();
    if (doc.contains("seed")) scenario.seed = doc.at("seed").get<uint64_t>();
    if (doc.contains("antithetic")) scenario.antithetic = doc.at("antithetic").get<bool>();
    if (doc.contains("checkpoints"))
        scenario.checkpoints = doc.at("checkpoints").get<std::vector<double>>();
    if (doc.contains("strategy")) scenario.strategy = strategy_from_json(doc.at("strategy"));
    if (doc.contains("n_strategies"))
        scenario.n_strategies = doc.at("n_strategies").get<uint64_t>();
    if (doc.contains("grid_step")) scenario.grid_step = doc.at("grid_step").get<double>();
    if (doc.contains("out")) scenario.out_path = doc.at("out").get<std::string>();
    if (doc.contains("dump_paths")) scenario.dump_path = doc.at("dump_paths").get<std::string>();
    if (scenario.n_paths < 1) throw ParseError("n_paths must be >= 1");
    return scenario;
}

Scenario Scenario::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario JSON parse error: ") + e.what());
    }
    return from_json(doc);
}

const std::map<std::string, std::string>& builtin_scenarios() {
    static const std::map<std::string, std::string> builtins = {
        {"elmm-regime", kElmmRegime},
        {"nonexistent-gop", kNonexistentGop},
        {"constrained-strict", kConstrainedStrict},
    };
    return builtins;
}

Scenario load_scenario(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    if (fs::exists(name_or_path)) {
        std::ifstream in(name_or_path);
        if (!in) throw ParseError("cannot open scenario file: " + name_or_path);
        std::stringstream buf;
        buf << in.rdbuf();
        return Scenario::from_json_text(buf.str());
    }
    std::string name = name_or_path;
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json")
        name = name.substr(0, name.size() - 5);
    const auto& builtins = builtin_scenarios();
    if (auto it = builtins.find(name); it != builtins.end())
        return Scenario::from_json_text(it->second);
    throw ParseError("no such file or builtin scenario: " + name_or_path);
}

RunResult run_scenario(const Scenario& scenario, int threads) {
    const MarketSpec& spec = scenario.market;
    McConfig mc_config;
    mc_config.threads = threads;
    mc_config.antithetic = scenario.antithetic;

    RunResult result;
    nlohmann::json& report = result.report;
    report["command"] = to_string(scenario.kind);
    report["market"] = spec.to_json();

    switch (scenario.kind) {
        case ExperimentKind::Validate: {
            const auto validation = validate_market(spec);
            report["validation"] = validation.to_json();
            // Classification is part of the diagnosis whenever theta exists.
            if (validation.valid()) report["regime"] = classify_regime(spec).to_json();
            result.exit_code = validation.valid() ? 0 : 1;
            break;
        }
        case ExperimentKind::Gop: {
            try {
                report["gop"] = solve_gop(spec).to_json();
                result.exit_code = 0;
            } catch (const NoGopError& e) {
                report["gop"] = nullptr;
                report["regime"] = "nonexistent";
                report["detail"] = e.what();
                result.exit_code = 0;
            }
            break;
        }
        case ExperimentKind::Simulate: {
            const double grid =
                scenario.grid_step > 0.0 ? scenario.grid_step : spec.horizon / 256.0;
            if (!scenario.dump_path.empty() && scenario.n_paths > 100000)
                throw std::invalid_argument("per-path CSV dump supports at most 1e5 paths");
            report["n_paths"] = scenario.n_paths;
            report["seed"] = scenario.seed;
            report["grid_step"] = grid;
            // Summary statistics over terminal values.
            const CompiledPortfolio gop(spec, gop_volatilities(spec), true, 1.0);
            std::vector<double> zhat(scenario.n_paths);
            PathConfig config;
            config.grid_step = grid;
            config.antithetic = scenario.antithetic;
            for (uint64_t p = 0; p < scenario.n_paths; ++p) {
                const SimulatedPath path = sample_path(spec, scenario.seed, p, config);
                zhat[p] = 1.0 / gop.terminal_value(path);
            }
            report["zhat_terminal_mean"] =
                pairwise_sum(zhat) / static_cast<double>(scenario.n_paths);
            if (!scenario.dump_path.empty()) {
                std::ofstream out(scenario.dump_path);
                if (!out) throw ParseError("cannot open dump file: " + scenario.dump_path);
                Scenario dump_scenario = scenario;
                dump_scenario.grid_step = grid;
                dump_paths_csv(spec, dump_scenario, out);
                report["dump_paths"] = scenario.dump_path;
            }
            result.exit_code = 0;
            break;
        }
        case ExperimentKind::MartingaleTest: {
            const auto mc = estimate_terminal_expectation(
                spec, TerminalFunctional::Deflator, Strategy::gop(), scenario.n_paths,
                scenario.seed, mc_config);
            const Verdict expected = expected_verdict(spec);
            report["mc"] = mc.to_json();
            report["regime_expectation"] = to_string(expected);
            const bool agrees = mc.verdict == expected;
            report["agrees"] = agrees;
            result.exit_code = agrees ? 0 : 1;
            result.mc = mc;
            break;
        }
        case ExperimentKind::SupermartingaleSweep: {
            const auto checkpoints = scenario.checkpoints.empty()
                                         ? default_checkpoints(spec.horizon)
                                         : scenario.checkpoints;
            const Strategy strategy =
                scenario.strategy ? *scenario.strategy : Strategy::gop();
            const auto sweep = supermartingale_sweep(spec, strategy, checkpoints,
                                                     scenario.n_paths, scenario.seed, mc_config);
            report["strategy"] = strategy_to_json(strategy);
            report["sweep"] = sweep.to_json();
            result.exit_code = sweep.nonincreasing ? 0 : 1;
            break;
        }
        case ExperimentKind::Dominance: {
            const auto dominance =
                growth_dominance_test(spec, scenario.n_strategies, scenario.seed);
            report["dominance"] = dominance.to_json();
            result.exit_code = dominance.violations == 0 ? 0 : 1;
            break;
        }
        case ExperimentKind::SolveDeflator: {
            report["deflator"] = solve_unique_deflator(spec).to_json();
            try {
                const auto analytic = analytic_deflator_expectation(spec);
                report["analytic_expectation"] = {
                    {"value", analytic.value},
                    {"regime", to_string(analytic.regime)},
                    {"integrated_drift", analytic.integrated_drift}};
            } catch (const NoGopError&) {
                report["analytic_expectation"] = nullptr;
            }
            result.exit_code = 0;
            break;
        }
    }

    if (!scenario.out_path.empty()) {
        std::ofstream out(scenario.out_path);
        if (!out) throw ParseError("cannot open output file: " + scenario.out_path);
        out << report.dump(2) << '\n';
    }
    return result;
}

}  // namespace jumpgop
