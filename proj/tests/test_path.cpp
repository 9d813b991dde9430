#include <doctest.h>

#include <cmath>
#include <numeric>

#include "jumpgop/path.hpp"

using namespace jumpgop;

namespace {

MarketSpec jump_market(std::vector<double> lambda_by_piece, std::vector<double> t_starts,
                       double horizon) {
    MarketSpec spec;
    spec.d = 1;
    spec.m = 0;
    spec.horizon = horizon;
    for (size_t i = 0; i < lambda_by_piece.size(); ++i) {
        MarketPiece piece;
        piece.t_start = t_starts[i];
        piece.r = 0.0;
        piece.a = {0.0};
        piece.b = {{0.5}};
        piece.lambda = {lambda_by_piece[i]};
        spec.pieces.push_back(piece);
    }
    return spec;
}

MarketSpec diffusion_market() {
    MarketSpec spec;
    spec.d = 1;
    spec.m = 1;
    spec.horizon = 1.0;
    MarketPiece piece;
    piece.t_start = 0.0;
    piece.r = 0.0;
    piece.a = {0.05};
    piece.b = {{0.2}};
    spec.pieces.push_back(piece);
    return spec;
}

}  // namespace

TEST_CASE("Poisson count matches the integrated intensity") {
    IntensitySchedule sched{{0.0}, {2.0}};
    const int n = 100000;
    long long total = 0;
    for (int i = 0; i < n; ++i) {
        rng::Stream stream(4242, i, 1);
        total += static_cast<long long>(sample_jump_times(sched, 1.0, stream).size());
    }
    const double mean = double(total) / n;
    CHECK(std::fabs(mean - 2.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("two-piece intensity integrates to the right mean") {
    // lambda = 1 on [0, 0.5), 3 on [0.5, 1]: E[N_1] = 2.
    IntensitySchedule sched{{0.0, 0.5}, {1.0, 3.0}};
    const int n = 100000;
    long long total = 0;
    long long first_half = 0;
    for (int i = 0; i < n; ++i) {
        rng::Stream stream(7, i, 1);
        const auto times = sample_jump_times(sched, 1.0, stream);
        total += static_cast<long long>(times.size());
        for (double t : times) first_half += t < 0.5;
    }
    CHECK(std::fabs(double(total) / n - 2.0) < 3.0 * std::sqrt(2.0 / n));
    CHECK(std::fabs(double(first_half) / n - 0.5) < 3.0 * std::sqrt(0.5 / n));
}

TEST_CASE("rare jumps follow the Poisson law (chi-square on 0 vs >=1)") {
    IntensitySchedule sched{{0.0}, {0.001}};
    const int n = 100000;
    int with_jump = 0;
    for (int i = 0; i < n; ++i) {
        rng::Stream stream(99, i, 1);
        with_jump += !sample_jump_times(sched, 1.0, stream).empty();
    }
    const double p1 = 1.0 - std::exp(-0.001);  // P(N >= 1)
    const double expected1 = n * p1;
    const double expected0 = n - expected1;
    const double observed0 = n - with_jump;
    const double chi2 = (observed0 - expected0) * (observed0 - expected0) / expected0 +
                        (with_jump - expected1) * (with_jump - expected1) / expected1;
    CHECK(chi2 < 6.63);  // chi-square(1) critical value at 1%
}

TEST_CASE("jump times are strictly increasing and inside (0, T]") {
    auto spec = jump_market({2.0, 4.0}, {0.0, 0.6}, 2.0);
    for (uint64_t p = 0; p < 500; ++p) {
        const auto path = sample_path(spec, 31337, p, {});
        const auto& times = path.jump_times[0];
        for (size_t i = 0; i < times.size(); ++i) {
            CHECK(times[i] > 0.0);
            CHECK(times[i] <= 2.0);
            if (i > 0) CHECK(times[i] > times[i - 1]);
        }
    }
}

TEST_CASE("identical seed and index reproduce the path bit for bit") {
    auto spec = jump_market({2.0}, {0.0}, 1.0);
    spec.d = 2;
    spec.m = 1;
    spec.pieces[0].a = {0.05, 0.02};
    spec.pieces[0].b = {{0.2, 0.0}, {0.0, 0.5}};
    PathConfig config;
    config.grid_step = 0.01;
    const auto p1 = sample_path(spec, 555, 17, config);
    const auto p2 = sample_path(spec, 555, 17, config);
    REQUIRE(p1.events.size() == p2.events.size());
    for (size_t i = 0; i < p1.events.size(); ++i) {
        CHECK(p1.events[i].t == p2.events[i].t);
        CHECK(p1.events[i].dw == p2.events[i].dw);
    }
    CHECK(p1.jump_times == p2.jump_times);
}

TEST_CASE("Brownian increments have variance dt") {
    auto spec = diffusion_market();
    PathConfig config;
    config.grid_step = 0.05;
    double sumsq = 0.0;
    long long count = 0;
    for (uint64_t p = 0; p < 2000; ++p) {
        const auto path = sample_path(spec, 777, p, config);
        for (const auto& event : path.events) {
            if (event.kind != EventKind::Grid && event.kind != EventKind::Terminal) continue;
            sumsq += event.dw[0] * event.dw[0];
            ++count;
        }
    }
    const double var = sumsq / count / 0.05;  // normalized by dt
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("grids that do not divide the horizon still cover it") {
    auto spec = jump_market({1.0}, {0.0}, 1.0);
    PathConfig config;
    config.grid_step = 0.3;
    const auto path = sample_path(spec, 12, 0, config);
    std::vector<double> grid;
    for (const auto& e : path.events)
        if (e.kind == EventKind::Grid) grid.push_back(e.t);
    CHECK(grid == std::vector<double>{0.3, 0.6, 0.8999999999999999});
    CHECK(path.events.back().t == 1.0);
    // Exact dividers do not duplicate the terminal node.
    config.grid_step = 0.25;
    const auto exact = sample_path(spec, 12, 0, config);
    int at_terminal = 0;
    for (const auto& e : exact.events) at_terminal += e.t >= 0.75 + 0.125;
    CHECK(at_terminal == 1);
}

TEST_CASE("timeline is sorted, tagged and spans [0, T]") {
    auto spec = jump_market({5.0}, {0.0}, 1.0);
    PathConfig config;
    config.grid_step = 0.125;
    config.extra_times = {0.33, 1.0};
    const auto path = sample_path(spec, 1, 5, config);
    REQUIRE(!path.events.empty());
    CHECK(path.events.front().kind == EventKind::Origin);
    CHECK(path.events.front().t == 0.0);
    CHECK(path.events.back().t == 1.0);
    int jumps_seen = 0;
    bool checkpoint_seen = false;
    for (size_t i = 1; i < path.events.size(); ++i) {
        CHECK(path.events[i].t > path.events[i - 1].t);
        jumps_seen += path.events[i].kind == EventKind::Jump;
        checkpoint_seen |= path.events[i].t == 0.33;
    }
    CHECK(jumps_seen == static_cast<int>(path.jump_times[0].size()));
    CHECK(checkpoint_seen);
}

TEST_CASE("antithetic partner shares jumps and negates increments") {
    auto spec = diffusion_market();
    PathConfig config;
    config.grid_step = 0.1;
    config.antithetic = true;
    const auto even = sample_path(spec, 2222, 6, config);
    const auto odd = sample_path(spec, 2222, 7, config);
    CHECK(even.jump_times == odd.jump_times);
    REQUIRE(even.events.size() == odd.events.size());
    for (size_t i = 0; i < even.events.size(); ++i) {
        if (even.events[i].kind == EventKind::Origin) continue;
        for (int k = 0; k < spec.m; ++k)
            CHECK(even.events[i].dw[k] == -odd.events[i].dw[k]);
    }
    CHECK(!even.antithetic_flip);
    CHECK(odd.antithetic_flip);
}

TEST_CASE("exact double ties across processes are nudged apart") {
    std::vector<std::vector<double>> times{{0.25, 0.5}, {0.5, 0.75}, {0.5}};
    const int shifts = resolve_jump_ties(times);
    CHECK(shifts >= 2);
    std::vector<double> all;
    for (const auto& process : times)
        for (double t : process) all.push_back(t);
    std::sort(all.begin(), all.end());
    for (size_t i = 1; i < all.size(); ++i) CHECK(all[i] > all[i - 1]);
    // The first process is left untouched.
    CHECK(times[0] == std::vector<double>{0.25, 0.5});
}

TEST_CASE("within-process duplicates are also separated") {
    std::vector<std::vector<double>> times{{0.5, 0.5, 0.5}};
    const int shifts = resolve_jump_ties(times);
    CHECK(shifts == 2);
    CHECK(times[0][0] < times[0][1]);
    CHECK(times[0][1] < times[0][2]);
}
