// Command-line front end: loads a market or scenario JSON (or one of the
// builtin scenarios), dispatches to the library, prints the JSON report to
// stdout and optionally to --out. Exit status: 0 success, 1 verdict-style
// failure, 2 input error.
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jumpgop/errors.hpp"
#include "jumpgop/scenario.hpp"

namespace {

struct CommonOptions {
    std::string input;
    std::string out;
    uint64_t paths = 0;
    uint64_t seed = 0;
    bool seed_set = false;
    bool paths_set = false;
    int threads = 1;
    bool antithetic = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("input", opts.input,
                    "market/scenario JSON file or builtin scenario name")
        ->required();
    cmd->add_option("--out", opts.out, "write the JSON report to this file");
    cmd->add_option("--paths", opts.paths, "number of Monte Carlo paths")
        ->check(CLI::PositiveNumber)
        ->each([&opts](const std::string&) { opts.paths_set = true; });
    cmd->add_option("--seed", opts.seed, "master seed")
        ->each([&opts](const std::string&) { opts.seed_set = true; });
    cmd->add_option("--threads", opts.threads, "worker threads (never affects results)")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--antithetic", opts.antithetic, "antithetic Brownian increments");
}

int run(jumpgop::ExperimentKind kind, const CommonOptions& opts,
        const std::function<void(jumpgop::Scenario&)>& tweak) {
    jumpgop::Scenario scenario = jumpgop::load_scenario(opts.input);
    scenario.kind = kind;
    if (opts.paths_set) scenario.n_paths = opts.paths;
    if (opts.seed_set) scenario.seed = opts.seed;
    if (opts.antithetic) scenario.antithetic = true;
    if (!opts.out.empty()) scenario.out_path = opts.out;
    if (tweak) tweak(scenario);
    const auto result = jumpgop::run_scenario(scenario, opts.threads);
    std::cout << result.report.dump(2) << std::endl;
    return result.exit_code;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::string token;
    std::stringstream ss(text);
    while (std::getline(ss, token, ',')) out.push_back(std::stod(token));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jump-diffusion growth-optimal portfolio and deflator lab"};
    app.require_subcommand(1);

    CommonOptions validate_opts, gop_opts, sim_opts, mart_opts, sweep_opts, dom_opts, defl_opts;

    auto* validate = app.add_subcommand("validate", "check model assumptions and classify the regime");
    add_common(validate, validate_opts);

    auto* gop = app.add_subcommand("gop", "optimal volatilities, fractions and growth rate per piece");
    add_common(gop, gop_opts);

    auto* simulate = app.add_subcommand("simulate", "exact paths; optional per-path CSV dump");
    add_common(simulate, sim_opts);
    std::string dump_file;
    double grid_step = 0.0;
    simulate->add_option("--dump-paths", dump_file, "write per-path CSV to this file");
    simulate->add_option("--grid-step", grid_step, "uniform grid step (default horizon/256)");

    auto* martingale = app.add_subcommand("test-martingale",
                                          "Monte Carlo test of E[Z_T] against the regime");
    std::vector<std::string> extra_scenarios;
    std::string csv_file;
    add_common(martingale, mart_opts);
    martingale->add_option("more", extra_scenarios, "additional scenarios for the CSV matrix");
    martingale->add_option("--csv", csv_file, "write a scenario-by-statistic CSV matrix");

    auto* sweep = app.add_subcommand("sweep", "benchmarked-portfolio supermartingale sweep");
    add_common(sweep, sweep_opts);
    std::string checkpoints_text;
    std::string pi_text;
    sweep->add_option("--checkpoints", checkpoints_text, "comma-separated times");
    sweep->add_option("--pi", pi_text, "comma-separated risky fractions (default: the GOP)");

    auto* dominance = app.add_subcommand("dominance", "growth-rate dominance of the GOP");
    add_common(dominance, dom_opts);
    uint64_t n_strategies = 0;
    dominance->add_option("--strategies", n_strategies, "number of sampled strategies");

    auto* deflator = app.add_subcommand("solve-deflator",
                                        "Girsanov pair from the uniqueness linear system");
    add_common(deflator, defl_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed())
            return run(jumpgop::ExperimentKind::Validate, validate_opts, nullptr);
        if (gop->parsed())
            return run(jumpgop::ExperimentKind::Gop, gop_opts, nullptr);
        if (simulate->parsed())
            return run(jumpgop::ExperimentKind::Simulate, sim_opts,
                       [&](jumpgop::Scenario& s) {
                           if (!dump_file.empty()) s.dump_path = dump_file;
                           if (grid_step > 0.0) s.grid_step = grid_step;
                       });
        if (martingale->parsed()) {
            std::vector<std::string> inputs{mart_opts.input};
            inputs.insert(inputs.end(), extra_scenarios.begin(), extra_scenarios.end());
            std::vector<std::pair<std::string, jumpgop::McReport>> rows;
            int worst = 0;
            for (const auto& input : inputs) {
                jumpgop::Scenario scenario = jumpgop::load_scenario(input);
                scenario.kind = jumpgop::ExperimentKind::MartingaleTest;
                if (mart_opts.paths_set) scenario.n_paths = mart_opts.paths;
                if (mart_opts.seed_set) scenario.seed = mart_opts.seed;
                if (mart_opts.antithetic) scenario.antithetic = true;
                if (!mart_opts.out.empty() && inputs.size() == 1)
                    scenario.out_path = mart_opts.out;
                const auto result = jumpgop::run_scenario(scenario, mart_opts.threads);
                std::cout << result.report.dump(2) << std::endl;
                worst = std::max(worst, result.exit_code);
                if (result.mc) rows.emplace_back(input, *result.mc);
            }
            if (!csv_file.empty()) {
                std::ofstream csv(csv_file);
                if (!csv) throw jumpgop::ParseError("cannot open CSV file: " + csv_file);
                csv << jumpgop::mc_reports_csv(rows);
            }
            return worst;
        }
        if (sweep->parsed())
            return run(jumpgop::ExperimentKind::SupermartingaleSweep, sweep_opts,
                       [&](jumpgop::Scenario& s) {
                           if (!checkpoints_text.empty())
                               s.checkpoints = parse_csv_doubles(checkpoints_text);
                           if (!pi_text.empty()) {
                               jumpgop::Strategy strategy;
                               strategy.pi = {parse_csv_doubles(pi_text)};
                               s.strategy = strategy;
                           }
                       });
        if (dominance->parsed())
            return run(jumpgop::ExperimentKind::Dominance, dom_opts,
                       [&](jumpgop::Scenario& s) {
                           if (n_strategies > 0) s.n_strategies = n_strategies;
                       });
        if (deflator->parsed())
            return run(jumpgop::ExperimentKind::SolveDeflator, defl_opts, nullptr);
    } catch (const jumpgop::ParseError& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << std::endl;
        return 2;
    } catch (const jumpgop::ModelError& e) {
        std::cerr << "model error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 2;
}
