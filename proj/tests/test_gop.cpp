#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "jumpgop/errors.hpp"
#include "jumpgop/gop.hpp"

using namespace jumpgop;

namespace {

// Test-side golden-section maximizer, kept independent of the closed forms
// it checks.
double golden_max(const std::function<double(double)>& f, double lo, double hi) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > 1e-12 * std::max(1.0, std::fabs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Jump summand of the growth rate for one component.
double jump_objective(double c, double theta, double lambda) {
    const double root = std::sqrt(lambda);
    return c * (theta - root) + lambda * std::log1p(c / root);
}

}  // namespace

TEST_CASE("all-cash portfolio grows at the short rate") {
    const auto g = growth_rate({0.0, 0.0}, {0.3, 0.5}, {1.0}, 0.04, 1);
    CHECK(g.g == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(g.diffusive == 0.0);
    CHECK(g.jump == 0.0);
}

TEST_CASE("diffusive growth rate at c = theta") {
    const auto g = growth_rate({0.2}, {0.2}, {}, 0.0, 1);
    CHECK(g.g == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("single-jump growth rate against direct evaluation") {
    const auto g = growth_rate({1.0}, {0.5}, {1.0}, 0.0, 0);
    CHECK(g.g == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));
    CHECK(g.base == 0.0);
    CHECK(g.jump == doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));
}

TEST_CASE("growth decomposition sums to the total") {
    const auto g = growth_rate({0.25, 0.8}, {0.3, 0.6}, {2.0}, 0.05, 1);
    CHECK(std::fabs(g.base + g.diffusive + g.jump - g.g) < 1e-12);
}

TEST_CASE("volatility at the admissibility boundary is rejected") {
    CHECK_THROWS_AS(growth_rate({-1.0}, {0.5}, {1.0}, 0.0, 0), InadmissibleVolatilityError);
    CHECK_THROWS_AS(growth_rate({-1.5}, {0.5}, {1.0}, 0.0, 0), InadmissibleVolatilityError);
}

TEST_CASE("optimal volatilities match the closed form") {
    const auto c = optimal_volatilities({0.2, 0.5}, {1.0}, 1);
    CHECK(c[0] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("zero market price of risk keeps everything in cash") {
    const auto c = optimal_volatilities({0.0, 0.0}, {1.0}, 1);
    CHECK(c[0] == 0.0);
    CHECK(c[1] == 0.0);
}

TEST_CASE("no GOP when the jump price of risk reaches sqrt(lambda)") {
    CHECK_THROWS_AS(optimal_volatilities({0.2, 1.2}, {1.0}, 1), NoGopError);
    try {
        optimal_volatilities({0.2, 1.2}, {1.0}, 1);
    } catch (const NoGopError& e) {
        CHECK(e.component == 2);
    }
    CHECK_THROWS_AS(optimal_volatilities({0.2, 1.0}, {1.0}, 1), NoGopError);
}

TEST_CASE("gop fractions: identity and scaled identity") {
    const auto identity = linalg::SquareMatrix::identity(2);
    auto pi = gop_fractions({0.2, 1.0}, identity);
    CHECK(pi[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(pi[1] == doctest::Approx(1.0).epsilon(1e-14));

    linalg::SquareMatrix twice(2);
    twice(0, 0) = twice(1, 1) = 2.0;
    pi = gop_fractions({0.2, 1.0}, twice);
    CHECK(pi[0] == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(pi[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("gop fractions satisfy pi^T b = c^T on a generic matrix") {
    const auto b = linalg::SquareMatrix::from_rows({{0.2, 0.5}, {0.1, -0.3}});
    const std::vector<double> c{0.2, 1.0};
    const auto pi = gop_fractions(c, b);
    for (int k = 0; k < 2; ++k) {
        double sum = 0.0;
        for (int j = 0; j < 2; ++j) sum += pi[j] * b(j, k);
        CHECK(std::fabs(sum - c[k]) < 1e-10);
    }
}

TEST_CASE("optimal growth rate closed form") {
    CHECK(optimal_growth_rate({0.0, 0.0}, {1.0}, 0.07, 1) == doctest::Approx(0.07));
    CHECK(optimal_growth_rate({0.0, 0.5}, {1.0}, 0.0, 1) ==
          doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));
    CHECK(optimal_growth_rate({0.2}, {}, 0.03, 1) == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("optimal growth rate equals the growth rate at the optimum") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double lambda = 0.25 + 4.0 * u(gen);
        const double root = std::sqrt(lambda);
        const std::vector<double> theta{-0.5 + u(gen), root * (u(gen) * 1.8 - 0.9)};
        const std::vector<double> lam{lambda};
        const double r = 0.05 * u(gen);
        const auto c = optimal_volatilities(theta, lam, 1);
        const double direct = growth_rate(c, theta, lam, r, 1).g;
        const double closed = optimal_growth_rate(theta, lam, r, 1);
        CHECK(std::fabs(direct - closed) < 1e-12);
    }
}

TEST_CASE("golden-section argmax agrees with the closed form") {
    std::mt19937_64 gen(2718);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double lambda = 0.2 + 5.0 * u(gen);
        const double root = std::sqrt(lambda);
        const double theta = root * (u(gen) * 1.9 - 0.95);  // strictly below the boundary
        const double closed = theta / (1.0 - theta / root);
        const double lo = -root * (1.0 - 1e-9);
        const double hi = std::max(10.0 * root, 10.0 * std::fabs(closed));
        const double argmax =
            golden_max([&](double c) { return jump_objective(c, theta, lambda); }, lo, hi);
        CHECK(std::fabs(argmax - closed) < 1e-6);
    }
}

TEST_CASE("jump summand derivative changes sign exactly once") {
    const double theta = 0.6, lambda = 1.3;
    const double root = std::sqrt(lambda);
    const auto derivative = [&](double c) { return (theta - root) + lambda / (root + c); };
    int sign_changes = 0;
    double prev = derivative(-root * (1.0 - 1e-6));
    for (int i = 1; i <= 10000; ++i) {
        const double c = -root * (1.0 - 1e-6) + i * (10.0 * root) / 10000.0;
        const double cur = derivative(c);
        if ((prev > 0.0) != (cur > 0.0)) ++sign_changes;
        prev = cur;
    }
    CHECK(sign_changes == 1);
}

TEST_CASE("growth dominance over sampled admissible volatilities") {
    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::vector<double> theta{0.3, 0.5};
    const std::vector<double> lam{1.0};
    const double g_star = optimal_growth_rate(theta, lam, 0.02, 1);
    for (int trial = 0; trial < 5000; ++trial) {
        const std::vector<double> c{-2.0 + 4.0 * u(gen), -0.999 + 10.0 * u(gen)};
        const double g = growth_rate(c, theta, lam, 0.02, 1).g;
        CHECK(g <= g_star + 1e-12);
    }
}

TEST_CASE("large intensities drive the optimal jump volatility to theta") {
    const double theta = 0.3;
    double prev_gap = 1e9;
    for (double lambda : {1e2, 1e4, 1e6}) {
        const auto c = optimal_volatilities({theta}, {lambda}, 0);
        const double gap = std::fabs(c[0] - theta);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3);
}

TEST_CASE("constrained optimum: cap binds when no interior optimum exists") {
    const auto result = constrained_optimal_volatilities({0.3, 1.5}, 1.0, 1.0);
    CHECK(result.regime == ConstraintRegime::Constrained);
    CHECK(result.c[0] == doctest::Approx(0.3));
    CHECK(result.c[1] == doctest::Approx(1.0));
}

TEST_CASE("constrained optimum: generous cap leaves the unconstrained solution") {
    const auto result = constrained_optimal_volatilities({0.3, 0.2}, 1.0, 10.0);
    CHECK(result.regime == ConstraintRegime::Unconstrained);
    CHECK(result.c[0] == doctest::Approx(0.3));
    CHECK(result.c[1] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("constrained optimum: binding threshold above the cap") {
    // threshold 0.6/(1-0.6) = 1.5 exceeds the cap 1.0
    const auto result = constrained_optimal_volatilities({0.0, 0.6}, 1.0, 1.0);
    CHECK(result.regime == ConstraintRegime::Constrained);
    CHECK(result.c[0] == 0.0);
    CHECK(result.c[1] == doctest::Approx(1.0));
}

TEST_CASE("constrained optimum maximizes the capped objective") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const double lambda = 0.5 + 2.0 * u(gen);
        const double root = std::sqrt(lambda);
        const double theta2 = root * (0.2 + 1.4 * u(gen));  // may exceed the boundary
        const double cap = 0.2 + 2.0 * u(gen);
        const auto result = constrained_optimal_volatilities({0.1, theta2}, lambda, cap);
        const double best = jump_objective(result.c[1], theta2, lambda);
        // capped grid search
        double grid_best = -1e300;
        for (int i = 0; i <= 20000; ++i) {
            const double c = -root * (1.0 - 1e-9) + (cap + root) * i / 20000.0;
            if (c > cap) break;
            grid_best = std::max(grid_best, jump_objective(c, theta2, lambda));
        }
        CHECK(best >= grid_best - 1e-8);
    }
}

TEST_CASE("solve_gop assembles pieces and respects the cap") {
    MarketSpec spec;
    spec.d = 2;
    spec.m = 1;
    spec.horizon = 1.0;
    MarketPiece piece;
    piece.t_start = 0.0;
    piece.r = 0.02;
    piece.b = {{0.2, 0.0}, {0.1, 0.5}};
    piece.lambda = {1.0};
    piece.a = {0.02 + 0.2 * 0.3, 0.02 + 0.1 * 0.3 + 0.5 * 1.5};  // theta = (0.3, 1.5)
    spec.pieces.push_back(piece);

    CHECK_THROWS_AS(solve_gop(spec), NoGopError);

    spec.constraint_cap = 1.0;
    const auto solution = solve_gop(spec);
    REQUIRE(solution.pieces.size() == 1);
    CHECK(solution.pieces[0].regime == ConstraintRegime::Constrained);
    CHECK(solution.pieces[0].c_star[1] == doctest::Approx(1.0));
    CHECK(solution.constrained_anywhere());
    // pi^T b = c^T
    const auto& pi = solution.pieces[0].pi_star;
    for (int k = 0; k < 2; ++k) {
        double sum = 0.0;
        for (int j = 0; j < 2; ++j) sum += pi[j] * piece.b[j][k];
        CHECK(std::fabs(sum - solution.pieces[0].c_star[k]) < 1e-10);
    }
}
