#include "jumpgop/path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace jumpgop {

namespace {

// Substream layout per path: 0 is Brownian, 1 + k is jump process k.
constexpr uint32_t kBrownianSubstream = 0;

struct TaggedTime {
    double t;
    EventKind kind;
    int jump_process;
};

// Jump beats any deterministic node at the same double; breakpoint beats
// grid so coefficient switches stay visible in dumps.
int kind_priority(EventKind k) {
    switch (k) {
        case EventKind::Jump: return 4;
        case EventKind::Breakpoint: return 3;
        case EventKind::Terminal: return 2;
        case EventKind::Checkpoint: return 1;
        default: return 0;
    }
}

}  // namespace

std::vector<double> sample_jump_times(const IntensitySchedule& intensity, double T,
                                      rng::Stream& stream) {
    if (intensity.t_start.empty() || intensity.t_start.front() != 0.0)
        throw std::invalid_argument("intensity schedule must start at t = 0");
    std::vector<double> times;
    const size_t n_pieces = intensity.t_start.size();
    size_t piece = 0;
    double t = 0.0;       // current time
    double hazard = 0.0;  // integrated intensity up to t
    double target = stream.exponential();
    while (true) {
        const double piece_end = piece + 1 < n_pieces ? intensity.t_start[piece + 1] : T;
        const double lam = intensity.value[piece];
        const double hazard_at_end = hazard + lam * (piece_end - t);
        if (hazard_at_end >= target) {
            t += (target - hazard) / lam;
            hazard = target;
            if (t > T) break;
            times.push_back(t);
            target += stream.exponential();
        } else {
            t = piece_end;
            hazard = hazard_at_end;
            if (piece + 1 >= n_pieces) break;
            ++piece;
        }
    }
    return times;
}

int resolve_jump_ties(std::vector<std::vector<double>>& jump_times) {
    int shifts = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t p = 0; p < jump_times.size(); ++p) {
            auto& times = jump_times[p];
            for (size_t i = 1; i < times.size(); ++i) {
                if (times[i] <= times[i - 1]) {
                    times[i] = std::nextafter(times[i - 1], std::numeric_limits<double>::infinity());
                    ++shifts;
                    changed = true;
                }
            }
            if (p == 0) continue;
            for (double& t : times) {
                for (size_t q = 0; q < p; ++q) {
                    if (std::binary_search(jump_times[q].begin(), jump_times[q].end(), t)) {
                        t = std::nextafter(t, std::numeric_limits<double>::infinity());
                        ++shifts;
                        changed = true;
                    }
                }
            }
            std::sort(times.begin(), times.end());
        }
    }
    return shifts;
}

SimulatedPath sample_path(const MarketSpec& spec, uint64_t seed, uint64_t index,
                          const PathConfig& config) {
    SimulatedPath path;
    path.seed = seed;
    path.index = index;
    path.grid_step = config.grid_step;

    // Antithetic pairs share the jump realization and the Brownian stream;
    // the odd member negates every increment.
    uint64_t sequence = index;
    if (config.antithetic) {
        sequence = index / 2;
        path.antithetic_flip = (index % 2) == 1;
    }

    const double T = spec.horizon;
    const int n_jump = spec.num_jumps();
    path.jump_times.resize(n_jump);
    for (int k = 0; k < n_jump; ++k) {
        IntensitySchedule sched;
        for (const auto& p : spec.pieces) {
            sched.t_start.push_back(p.t_start);
            sched.value.push_back(p.lambda[k]);
        }
        rng::Stream stream(seed, sequence, 1 + static_cast<uint32_t>(k));
        path.jump_times[k] = sample_jump_times(sched, T, stream);
    }
    path.tie_shifts = resolve_jump_ties(path.jump_times);
    // A nudge can in principle push a time at T past the horizon; drop it.
    for (auto& times : path.jump_times)
        while (!times.empty() && times.back() > T) times.pop_back();

    std::vector<TaggedTime> tagged;
    tagged.push_back({0.0, EventKind::Origin, -1});
    tagged.push_back({T, EventKind::Terminal, -1});
    for (int i = 1; i < spec.num_pieces(); ++i)
        tagged.push_back({spec.pieces[i].t_start, EventKind::Breakpoint, -1});
    if (config.grid_step > 0.0) {
        for (long long i = 1;; ++i) {
            const double t = static_cast<double>(i) * config.grid_step;
            if (t >= T * (1.0 - 1e-12)) break;
            tagged.push_back({t, EventKind::Grid, -1});
        }
    }
    for (double t : config.extra_times) {
        if (!(t > 0.0) || t > T)
            throw std::invalid_argument("extra time outside (0, horizon]");
        tagged.push_back({t, EventKind::Checkpoint, -1});
    }
    for (int k = 0; k < n_jump; ++k)
        for (double t : path.jump_times[k]) tagged.push_back({t, EventKind::Jump, k});

    std::sort(tagged.begin(), tagged.end(), [](const TaggedTime& a, const TaggedTime& b) {
        if (a.t != b.t) return a.t < b.t;
        return kind_priority(a.kind) > kind_priority(b.kind);
    });

    // Collapse duplicate times; the higher-priority tag wins.
    std::vector<TaggedTime> merged;
    for (const auto& e : tagged) {
        if (!merged.empty() && merged.back().t == e.t) continue;
        merged.push_back(e);
    }

    rng::Stream brownian(seed, sequence, kBrownianSubstream);
    const double sign = path.antithetic_flip ? -1.0 : 1.0;
    path.events.reserve(merged.size());
    double prev_t = 0.0;
    for (const auto& e : merged) {
        PathEvent event;
        event.t = e.t;
        event.kind = e.kind;
        event.jump_process = e.jump_process;
        if (e.kind != EventKind::Origin) {
            const double dt = e.t - prev_t;
            const double scale = std::sqrt(dt);
            event.dw.resize(spec.m);
            for (int k = 0; k < spec.m; ++k) event.dw[k] = sign * scale * brownian.normal();
            prev_t = e.t;
        }
        path.events.push_back(std::move(event));
    }
    return path;
}

}  // namespace jumpgop
