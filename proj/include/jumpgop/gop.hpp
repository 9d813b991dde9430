#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "jumpgop/market.hpp"

namespace jumpgop {

// Growth rate of a portfolio expressed through its generalized volatilities
// c^k = sum_j pi^j b^{j,k}, split into the contributions that add up to it:
//   g = r + sum_diff [c theta - c^2/2]
//         + sum_jump [c (theta - sqrt(lambda)) + lambda log(1 + c/sqrt(lambda))]
struct GrowthRateResult {
    double g = 0.0;
    double base = 0.0;       // r
    double diffusive = 0.0;  // Wiener columns
    double jump = 0.0;       // jump columns
};

GrowthRateResult growth_rate(const std::vector<double>& c, const std::vector<double>& theta,
                             const std::vector<double>& lambda, double r, int m);

// Closed-form optimizer of the growth rate: c* = theta on Wiener columns,
// theta / (1 - theta / sqrt(lambda)) on jump columns. Throws NoGopError when
// some jump component has theta >= sqrt(lambda).
std::vector<double> optimal_volatilities(const std::vector<double>& theta,
                                         const std::vector<double>& lambda, int m,
                                         int piece = 0);

// Fractions of wealth in the risky accounts: pi solves pi^T b = c^T.
std::vector<double> gop_fractions(const std::vector<double>& c_star,
                                  const linalg::SquareMatrix& b, int piece = 0);

// g* = r + 1/2 sum theta^2
//        + sum lambda (log(1 + theta/(sqrt(lambda) - theta)) - theta/sqrt(lambda))
double optimal_growth_rate(const std::vector<double>& theta, const std::vector<double>& lambda,
                           double r, int m, int piece = 0);

enum class ConstraintRegime { Unconstrained, Constrained };

std::string to_string(ConstraintRegime regime);

struct ConstrainedVolatilities {
    std::vector<double> c;  // length 2: (theta^1, min(cap, unconstrained optimum))
    ConstraintRegime regime = ConstraintRegime::Unconstrained;
};

// d = 2, m = 1 market with the jump volatility capped at psi_cap. The cap
// binds when theta^2 >= sqrt(lambda), or when the unconstrained optimum
// theta^2 / (1 - theta^2/sqrt(lambda)) exceeds the cap.
ConstrainedVolatilities constrained_optimal_volatilities(const std::vector<double>& theta,
                                                         double lambda, double psi_cap);

struct GopPiece {
    int piece = 0;
    std::vector<double> theta;
    std::vector<double> c_star;
    std::vector<double> pi_star;
    double g_star = 0.0;
    ConstraintRegime regime = ConstraintRegime::Unconstrained;
};

struct GopSolution {
    std::vector<GopPiece> pieces;
    bool constrained_anywhere() const;
    nlohmann::json to_json() const;
};

// Per-piece GOP for the whole market; dispatches to the constrained variant
// when a cap is present. Throws NoGopError in the uncapped theta >= sqrt(lambda)
// regime.
GopSolution solve_gop(const MarketSpec& spec);

}  // namespace jumpgop
