#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumpgop/market.hpp"
#include "jumpgop/mc.hpp"
#include "jumpgop/simulate.hpp"

namespace jumpgop {

enum class ExperimentKind {
    Validate,
    Gop,
    Simulate,
    MartingaleTest,
    SupermartingaleSweep,
    Dominance,
    SolveDeflator
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Everything one run needs. Thread count is deliberately not part of a
// scenario: reports must be byte-identical for any worker count.
struct Scenario {
    MarketSpec market;
    ExperimentKind kind = ExperimentKind::Validate;
    uint64_t n_paths = 10000;
    uint64_t seed = 12345;
    bool antithetic = false;
    std::vector<double> checkpoints;         // sweep; defaults to quarters of the horizon
    std::optional<Strategy> strategy;        // sweep/simulate; absent means the GOP
    uint64_t n_strategies = 1000;            // dominance
    double grid_step = 0.0;                  // simulate; defaults to horizon / 256
    std::string out_path;                    // optional report file
    std::string dump_path;                   // optional per-path CSV (simulate)

    static Scenario from_json(const nlohmann::json& doc);
    static Scenario from_json_text(const std::string& text);
};

struct RunResult {
    nlohmann::json report;
    // 0 = success, 1 = verdict-style failure (e.g. the martingale test
    // disagrees with the regime classification), 2 = input error (raised as
    // exceptions; the CLI maps them).
    int exit_code = 0;
    // Set by Monte Carlo experiment kinds, for CSV matrix assembly.
    std::optional<McReport> mc;
};

RunResult run_scenario(const Scenario& scenario, int threads = 1);

// Canonical scenarios for the three regimes: an ELMM candidate, a market
// with no GOP at all (classification only), and the capped market whose
// deflator is a strict supermartingale.
const std::map<std::string, std::string>& builtin_scenarios();

// Loads `name_or_path` as a file if it exists, otherwise as a builtin
// scenario name (with or without the .json suffix). A plain market spec
// document is promoted to a Scenario with defaults.
Scenario load_scenario(const std::string& name_or_path);

}  // namespace jumpgop
