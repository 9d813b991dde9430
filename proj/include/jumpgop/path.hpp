#pragma once

#include <cstdint>
#include <vector>

#include "jumpgop/market.hpp"
#include "jumpgop/rng.hpp"

namespace jumpgop {

enum class EventKind { Origin, Grid, Breakpoint, Checkpoint, Jump, Terminal };

// One node of the merged timeline. `dw` holds the Brownian increments over
// (previous event, t], one per Wiener component, so the exact exponential
// formulas can be evaluated at every node including jump times.
struct PathEvent {
    double t = 0.0;
    EventKind kind = EventKind::Grid;
    int jump_process = -1;  // 0-based, only for EventKind::Jump
    std::vector<double> dw;
};

struct PathConfig {
    double grid_step = 0.0;            // 0 disables the uniform grid
    std::vector<double> extra_times;   // checkpoints etc., must lie in (0, T]
    bool antithetic = false;           // pair paths (2i, 2i+1) share jumps, flip dW
};

struct SimulatedPath {
    uint64_t seed = 0;
    uint64_t index = 0;
    double grid_step = 0.0;
    bool antithetic_flip = false;
    int tie_shifts = 0;  // simultaneous-jump doubles nudged apart
    std::vector<std::vector<double>> jump_times;  // per jump process, sorted
    std::vector<PathEvent> events;                // sorted, first is Origin at t = 0
};

// Piecewise-constant intensity schedule for one counting process.
struct IntensitySchedule {
    std::vector<double> t_start;  // first entry 0
    std::vector<double> value;    // same length, each > 0
};

// Exact inhomogeneous-Poisson jump times on (0, T] by inversion of the
// integrated intensity.
std::vector<double> sample_jump_times(const IntensitySchedule& intensity, double T,
                                      rng::Stream& stream);

// Full driver realization for one path index: jump times for every process
// (independent streams), merged event timeline, Brownian increments per
// timeline interval. Deterministic in (spec, seed, index, config).
SimulatedPath sample_path(const MarketSpec& spec, uint64_t seed, uint64_t index,
                          const PathConfig& config);

// Resolves exact double collisions between jump times of different
// processes by nudging the later process's time up one ulp. Returns the
// number of nudges. Exposed for direct testing; sample_path applies it.
int resolve_jump_ties(std::vector<std::vector<double>>& jump_times);

}  // namespace jumpgop
