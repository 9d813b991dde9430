#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "jumpgop/deflator.hpp"
#include "jumpgop/errors.hpp"
#include "jumpgop/mc.hpp"

using namespace jumpgop;

namespace {

MarketSpec from_theta(int d, int m, double r, const std::vector<double>& theta,
                      const std::vector<std::vector<double>>& b, std::vector<double> lambda) {
    MarketSpec spec;
    spec.d = d;
    spec.m = m;
    spec.horizon = 1.0;
    MarketPiece piece;
    piece.t_start = 0.0;
    piece.r = r;
    piece.b = b;
    piece.lambda = std::move(lambda);
    piece.a.assign(d, r);
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) piece.a[j] += b[j][k] * theta[k];
    spec.pieces.push_back(std::move(piece));
    return spec;
}

MarketSpec elmm_market() {
    return from_theta(2, 1, 0.02, {0.3, 0.5}, {{0.2, 0.0}, {0.1, 0.5}}, {1.0});
}

MarketSpec constrained_market(double cap) {
    auto spec = from_theta(2, 1, 0.02, {0.3, 1.5}, {{0.2, 0.0}, {0.1, 0.5}}, {1.0});
    spec.constraint_cap = cap;
    return spec;
}

}  // namespace

TEST_CASE("pairwise sum matches plain summation") {
    std::vector<double> values(10001);
    for (size_t i = 0; i < values.size(); ++i) values[i] = std::sin(0.1 * double(i));
    double plain = 0.0;
    for (double v : values) plain += v;
    CHECK(pairwise_sum(values) == doctest::Approx(plain).epsilon(1e-13));
    CHECK(pairwise_sum(values) == pairwise_sum(values));
}

TEST_CASE("zero market price of risk: deflator is identically 1") {
    auto spec = from_theta(2, 1, 0.05, {0.0, 0.0}, {{0.2, 0.0}, {0.1, 0.5}}, {1.0});
    const auto report = estimate_terminal_expectation(spec, TerminalFunctional::Deflator,
                                                      Strategy::gop(), 2000, 7);
    CHECK(report.mean == 1.0);
    CHECK(report.se == 0.0);
    CHECK(report.verdict == Verdict::ConsistentWithMartingale);
}

TEST_CASE("unconstrained regime is consistent with a martingale") {
    const auto report = estimate_terminal_expectation(elmm_market(),
                                                      TerminalFunctional::Deflator,
                                                      Strategy::gop(), 20000, 11);
    REQUIRE(report.reference.has_value());
    CHECK(*report.reference == 1.0);
    CHECK(std::fabs(report.mean - 1.0) <= kTestZ * report.se);
    CHECK(report.verdict == Verdict::ConsistentWithMartingale);
    CHECK(report.ci_high - report.mean == doctest::Approx(2.576 * report.se));
}

TEST_CASE("binding cap produces a strict supermartingale verdict") {
    const auto report = estimate_terminal_expectation(constrained_market(1.0),
                                                      TerminalFunctional::Deflator,
                                                      Strategy::gop(), 20000, 13);
    REQUIRE(report.reference.has_value());
    CHECK(*report.reference == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(std::fabs(report.mean - std::exp(-1.0)) <= kTestZ * report.se);
    CHECK(report.mean + kTestZ * report.se < 1.0);
    CHECK(report.verdict == Verdict::StrictSupermartingale);
}

TEST_CASE("a barely binding cap is inconclusive at small n") {
    // E[Z_T] just below 1: the 3-sigma band straddles the baseline while the
    // analytic reference says strictly less.
    const auto spec = constrained_market(0.01);
    const auto report = estimate_terminal_expectation(spec, TerminalFunctional::Deflator,
                                                      Strategy::gop(), 400, 19);
    REQUIRE(report.reference.has_value());
    CHECK(*report.reference < 1.0);
    if (std::fabs(report.mean - 1.0) <= kTestZ * report.se)
        CHECK(report.verdict == Verdict::Inconclusive);
}

TEST_CASE("benchmarked functional and the deflator product route agree") {
    Strategy strategy;
    strategy.pi = {{0.5, 0.3}};
    strategy.initial_wealth = 2.0;
    const auto direct = estimate_terminal_expectation(elmm_market(),
                                                      TerminalFunctional::Benchmarked, strategy,
                                                      5000, 23);
    const auto product = estimate_terminal_expectation(
        elmm_market(), TerminalFunctional::DeflatorTimesPortfolio, strategy, 5000, 23);
    CHECK(direct.mean == doctest::Approx(product.mean).epsilon(1e-12));
    CHECK(direct.baseline == 2.0);
    REQUIRE(direct.reference.has_value());
    CHECK(*direct.reference == 2.0);
    CHECK(std::fabs(direct.mean - 2.0) <= kTestZ * direct.se);
}

TEST_CASE("quadrupling the paths halves the standard error") {
    const auto small = estimate_terminal_expectation(elmm_market(),
                                                     TerminalFunctional::Deflator,
                                                     Strategy::gop(), 10000, 29);
    const auto large = estimate_terminal_expectation(elmm_market(),
                                                     TerminalFunctional::Deflator,
                                                     Strategy::gop(), 40000, 29);
    const double shrink = small.se / large.se;
    CHECK(shrink > 1.6);
    CHECK(shrink < 2.4);
}

TEST_CASE("thread count never changes the report") {
    McConfig serial;
    serial.threads = 1;
    McConfig parallel;
    parallel.threads = 8;
    const auto a = estimate_terminal_expectation(elmm_market(), TerminalFunctional::Deflator,
                                                 Strategy::gop(), 30000, 31, serial);
    const auto b = estimate_terminal_expectation(elmm_market(), TerminalFunctional::Deflator,
                                                 Strategy::gop(), 30000, 31, parallel);
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("antithetic pairing reduces the SE when diffusion dominates") {
    // Pure diffusion: the deflator is monotone in W_T, so flipped pairs are
    // negatively correlated. (With heavy jump variance the shared jump
    // stream can dominate and pairing buys nothing; only the Brownian part
    // is antithetic by design.)
    const auto spec = from_theta(1, 1, 0.02, {0.5}, {{0.3}}, {});
    McConfig plain;
    McConfig antithetic;
    antithetic.antithetic = true;
    const auto base = estimate_terminal_expectation(spec, TerminalFunctional::Deflator,
                                                    Strategy::gop(), 20000, 37, plain);
    const auto paired = estimate_terminal_expectation(spec, TerminalFunctional::Deflator,
                                                      Strategy::gop(), 20000, 37, antithetic);
    CHECK(paired.antithetic);
    CHECK(paired.se < 0.8 * base.se);
    CHECK(std::fabs(paired.mean - 1.0) <= kTestZ * paired.se);
    CHECK_THROWS_AS(estimate_terminal_expectation(spec, TerminalFunctional::Deflator,
                                                  Strategy::gop(), 1001, 37, antithetic),
                    std::invalid_argument);
}

TEST_CASE("near-boundary regimes demand a million paths") {
    const auto spec = from_theta(2, 1, 0.0, {0.1, 0.97}, {{0.2, 0.0}, {0.1, 0.5}}, {1.0});
    CHECK_THROWS_AS(estimate_terminal_expectation(spec, TerminalFunctional::Deflator,
                                                  Strategy::gop(), 10000, 1),
                    HighVarianceError);
}

TEST_CASE("gop-nonexistent regimes refuse estimation") {
    const auto spec = from_theta(2, 1, 0.0, {0.1, 1.3}, {{0.2, 0.0}, {0.1, 0.5}}, {1.0});
    CHECK_THROWS_AS(estimate_terminal_expectation(spec, TerminalFunctional::Deflator,
                                                  Strategy::gop(), 1000, 1),
                    NoGopError);
}

TEST_CASE("sweep: the GOP benchmarked against itself is exactly constant") {
    const auto sweep = supermartingale_sweep(elmm_market(), Strategy::gop(2.0),
                                             {0.25, 0.5, 0.75, 1.0}, 4000, 41);
    for (const auto& c : sweep.checkpoints) {
        CHECK(c.mean == 2.0);
        CHECK(c.se == 0.0);
    }
    CHECK(sweep.nonincreasing);
}

TEST_CASE("sweep: discounted cash is benchmarked into a martingale (ELMM regime)") {
    Strategy cash;
    cash.pi = {{0.0, 0.0}};
    const auto sweep = supermartingale_sweep(elmm_market(), cash, {0.25, 0.5, 0.75, 1.0},
                                             20000, 43);
    CHECK(sweep.nonincreasing);
    for (const auto& c : sweep.checkpoints)
        CHECK(std::fabs(c.mean - 1.0) <= kTestZ * c.se + 1e-12);
}

TEST_CASE("sweep: binding cap makes benchmarked cash strictly decreasing") {
    Strategy cash;
    cash.pi = {{0.0, 0.0}};
    const auto sweep = supermartingale_sweep(constrained_market(1.0), cash,
                                             {0.25, 0.5, 0.75, 1.0}, 20000, 47);
    CHECK(sweep.nonincreasing);
    // E[s Z_t] = exp(-D t) with D = 1: successive ratios e^{-1/4}.
    for (size_t j = 0; j + 1 < sweep.checkpoints.size(); ++j) {
        CHECK(sweep.step_diff_mean[j] < 0.0);
        CHECK(-sweep.step_diff_mean[j] > kTestZ * sweep.step_diff_se[j]);
    }
    for (size_t j = 0; j < sweep.checkpoints.size(); ++j) {
        const double expected = std::exp(-0.25 * double(j + 1));
        CHECK(std::fabs(sweep.checkpoints[j].mean - expected) <=
              kTestZ * sweep.checkpoints[j].se + 1e-12);
    }
}

TEST_CASE("sweep is deterministic across thread counts") {
    Strategy mixed;
    mixed.pi = {{0.4, 0.2}};
    McConfig serial;
    McConfig parallel;
    parallel.threads = 6;
    const auto a = supermartingale_sweep(elmm_market(), mixed, {0.5, 1.0}, 8000, 53, serial);
    const auto b = supermartingale_sweep(elmm_market(), mixed, {0.5, 1.0}, 8000, 53, parallel);
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("growth dominance: no sampled strategy beats the GOP") {
    const auto report = growth_dominance_test(elmm_market(), 1000, 59);
    CHECK(report.violations == 0);
    CHECK(report.max_excess <= 1e-12);
    CHECK(report.comparisons == 1000);
}

TEST_CASE("growth dominance holds under the cap as well") {
    const auto report = growth_dominance_test(constrained_market(1.0), 1000, 61);
    CHECK(report.violations == 0);
    CHECK(report.max_excess <= 1e-12);
}

TEST_CASE("log-wealth comparison: the GOP against itself is exactly zero") {
    const auto report = log_wealth_comparison(elmm_market(), Strategy::gop(), 2000, 67);
    CHECK(report.mean == 0.0);
    CHECK(report.se == 0.0);
}

TEST_CASE("log-wealth gap of cash matches the optimal growth rate") {
    // r = 0, theta = (0, 0.5), lambda = 1: E[log gap] = -(log 2 - 0.5).
    auto spec = from_theta(2, 1, 0.0, {0.0, 0.5}, {{0.2, 0.0}, {0.1, 0.5}}, {1.0});
    Strategy cash;
    cash.pi = {{0.0, 0.0}};
    const auto report = log_wealth_comparison(spec, cash, 100000, 71);
    const double expected = -(std::log(2.0) - 0.5);
    CHECK(std::fabs(report.mean - expected) <= kTestZ * report.se);
    CHECK(report.mean + kTestZ * report.se < 0.0);
}

TEST_CASE("CSV matrix carries one row per scenario with the full statistics") {
    const auto a = estimate_terminal_expectation(elmm_market(), TerminalFunctional::Deflator,
                                                 Strategy::gop(), 2000, 3);
    const auto b = estimate_terminal_expectation(constrained_market(1.0),
                                                 TerminalFunctional::Deflator,
                                                 Strategy::gop(), 2000, 3);
    const auto csv = mc_reports_csv({{"plain", a}, {"capped", b}});
    CHECK(csv.find("scenario,mean,se,ci99_low,ci99_high,n_paths,seed,antithetic,baseline,"
                   "reference,verdict,high_variance\n") == 0);
    CHECK(csv.find("plain,") != std::string::npos);
    CHECK(csv.find("capped,") != std::string::npos);
    CHECK(csv.find("STRICT_SUPERMARTINGALE") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    // Rows are reproducible bit for bit.
    CHECK(csv == mc_reports_csv({{"plain", a}, {"capped", b}}));
}

TEST_CASE("log-wealth comparison never favors an admissible strategy") {
    Strategy tilt;
    tilt.pi = {{0.8, 0.5}};
    const auto report = log_wealth_comparison(elmm_market(), tilt, 20000, 73);
    CHECK(report.mean <= kTestZ * report.se);
}
