#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumpgop/market.hpp"
#include "jumpgop/simulate.hpp"

namespace jumpgop {

inline constexpr double kCi99HalfWidthZ = 2.576;  // two-sided 99% interval
inline constexpr double kTestZ = 3.0;             // verdict threshold

enum class Verdict { ConsistentWithMartingale, StrictSupermartingale, Inconclusive };

std::string to_string(Verdict v);

struct McConfig {
    int threads = 1;
    bool antithetic = false;  // pairs Brownian-flipped paths; jump counts untouched
};

struct McReport {
    double mean = 0.0;
    double se = 0.0;
    double ci_low = 0.0;   // mean -/+ 2.576 se
    double ci_high = 0.0;
    uint64_t n_paths = 0;
    uint64_t seed = 0;
    bool antithetic = false;
    double baseline = 1.0;  // martingale level the verdict is tested against
    std::optional<double> reference;  // analytic expectation when available
    Verdict verdict = Verdict::ConsistentWithMartingale;
    bool high_variance = false;

    nlohmann::json to_json() const;
};

enum class TerminalFunctional {
    Deflator,                  // Z_T = 1 / discounted GOP
    Benchmarked,               // S^delta_T / S^gop_T, one division per path
    DeflatorTimesPortfolio     // Z_T * discounted S^delta_T, two simulations multiplied
};

// Monte Carlo mean of the chosen terminal functional with a 99% CI and the
// supermartingale verdict. Deterministic in (spec, seed, n_paths,
// antithetic) and independent of the thread count. Near-boundary regimes
// (sqrt(lambda) - theta < 0.05 sqrt(lambda)) demand n_paths >= 1e6.
McReport estimate_terminal_expectation(const MarketSpec& spec, TerminalFunctional functional,
                                       const Strategy& strategy, uint64_t n_paths, uint64_t seed,
                                       const McConfig& config = {});

struct CheckpointStat {
    double t = 0.0;
    double mean = 0.0;
    double se = 0.0;
};

struct SweepReport {
    std::vector<CheckpointStat> checkpoints;
    // Paired per-path differences between consecutive checkpoints
    // (common random numbers), used for the monotonicity check.
    std::vector<double> step_diff_mean;
    std::vector<double> step_diff_se;
    bool nonincreasing = true;  // every diff mean <= kTestZ * its SE
    uint64_t n_paths = 0;
    uint64_t seed = 0;

    nlohmann::json to_json() const;
};

// E[benchmarked portfolio] across checkpoints; the supermartingale property
// says the means must not increase beyond noise.
SweepReport supermartingale_sweep(const MarketSpec& spec, const Strategy& strategy,
                                  const std::vector<double>& checkpoints, uint64_t n_paths,
                                  uint64_t seed, const McConfig& config = {});

struct DominanceReport {
    uint64_t n_strategies = 0;
    uint64_t comparisons = 0;  // strategies x pieces
    uint64_t violations = 0;   // growth rate above g* by more than the slack
    double max_excess = 0.0;   // largest g^delta - g* observed (<= slack when clean)
    double slack = 1e-12;

    nlohmann::json to_json() const;
};

// Samples admissible fraction vectors uniformly (rejection from a box) and
// checks the growth rate never beats the GOP's. Deterministic in seed; the
// growth comparison itself is deterministic per piece.
DominanceReport growth_dominance_test(const MarketSpec& spec, uint64_t n_strategies,
                                      uint64_t seed);

// E[log S^delta_T - log S^gop_T] with common random numbers; must be <= 0
// within noise. Baseline 0.
McReport log_wealth_comparison(const MarketSpec& spec, const Strategy& strategy,
                               uint64_t n_paths, uint64_t seed, const McConfig& config = {});

// Deterministic pairwise (binary-tree) summation; reduction order is fixed
// regardless of how many workers produced the values.
double pairwise_sum(std::span<const double> values);

// Scenario-by-statistic CSV matrix, one row per labelled report.
std::string mc_reports_csv(const std::vector<std::pair<std::string, McReport>>& rows);

}  // namespace jumpgop
