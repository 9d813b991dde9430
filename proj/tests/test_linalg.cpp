#include <doctest.h>

#include <cmath>
#include <random>

#include "jumpgop/errors.hpp"
#include "jumpgop/linalg.hpp"

using namespace jumpgop;
using namespace jumpgop::linalg;

TEST_CASE("LU solve reproduces hand-solved systems") {
    auto a = SquareMatrix::from_rows({{0.2, 0.0}, {0.0, 0.5}});
    const auto x = LuFactorization(a).solve({0.04, 0.05});
    CHECK(x[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("LU detects singular matrices") {
    auto singular = SquareMatrix::from_rows({{0.2, 0.4}, {0.1, 0.2}});
    CHECK(LuFactorization(singular).singular());
    CHECK(std::isinf(condition_number(singular)));
}

TEST_CASE("identity has condition number 1") {
    CHECK(condition_number(SquareMatrix::identity(3)) == doctest::Approx(1.0));
}

TEST_CASE("solve_checked refuses ill-conditioned systems") {
    auto nearly = SquareMatrix::from_rows({{1.0, 1.0}, {1.0, 1.0 + 1e-15}});
    CHECK_THROWS_AS(solve_checked(nearly, {1.0, 1.0}, 1e12, 0), IllConditionedError);
}

TEST_CASE("random well-conditioned solves have small residuals") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(gen() % 4);
        SquareMatrix a(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = u(gen);
            a(i, i) += 2.0;  // diagonally dominant, stays well-conditioned
        }
        std::vector<double> rhs(n);
        for (auto& v : rhs) v = u(gen);
        const auto x = LuFactorization(a).solve(rhs);
        const auto back = a.apply(x);
        for (int i = 0; i < n; ++i) CHECK(std::fabs(back[i] - rhs[i]) < 1e-12);
    }
}

TEST_CASE("transposed solve matches pi^T b = c^T") {
    auto a = SquareMatrix::from_rows({{0.2, 0.5}, {0.1, -0.3}});
    const std::vector<double> c{0.2, 1.0};
    const auto pi = solve_transposed_checked(a, c, 1e12, 0);
    for (int k = 0; k < 2; ++k) {
        double sum = 0.0;
        for (int j = 0; j < 2; ++j) sum += pi[j] * a(j, k);
        CHECK(std::fabs(sum - c[k]) < 1e-12);
    }
}
