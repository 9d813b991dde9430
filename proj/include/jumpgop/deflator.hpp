#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "jumpgop/market.hpp"
#include "jumpgop/simulate.hpp"

namespace jumpgop {

// Girsanov pair for one piece: phi loads the Wiener components, psi_rn is
// the jump multiplier of the Radon-Nikodym family (distinct from the
// portfolio cap). Equivalence of the candidate measure needs psi_rn > 0.
struct DeflatorPiece {
    int piece = 0;
    std::vector<double> phi;     // length m
    std::vector<double> psi_rn;  // length d - m
    double residual = 0.0;       // inf-norm residual of the drift-cancellation system
    bool equivalent = true;             // all psi_rn > 0
    bool absolutely_continuous_only = false;  // some psi_rn == 0
};

struct DeflatorSolution {
    std::vector<DeflatorPiece> pieces;
    nlohmann::json to_json() const;
};

// Solves the drift-cancellation linear system
//   sum_{k<=m} b^{j,k} phi^k + sum_{k>m} b^{j,k} psi^{k-m} sqrt(lambda)
//     = -sum_k b^{j,k} theta^k + sum_{k>m} b^{j,k} sqrt(lambda)
// with a generic LU solve. The unique solution is phi = -theta,
// psi_rn = 1 - theta/sqrt(lambda); tests cross-check the two routes.
DeflatorPiece solve_unique_deflator(const MarketSpec& spec, int piece);
DeflatorSolution solve_unique_deflator(const MarketSpec& spec);

// Exact density path L_t for an arbitrary Girsanov family (one pair per
// piece): continuous exponential factor in phi plus the product of psi_rn
// over jumps with the (1 - psi) lambda compensator.
ValuePath radon_nikodym_path(const DeflatorSolution& solution, const SimulatedPath& path,
                             const MarketSpec& spec);

enum class DeflatorRegime { UnconstrainedMartingale, ConstrainedSupermartingale };

std::string to_string(DeflatorRegime regime);

struct AnalyticExpectation {
    double value = 1.0;             // E[Z_T]
    DeflatorRegime regime = DeflatorRegime::UnconstrainedMartingale;
    double integrated_drift = 0.0;  // integral of D(t); value = exp(-integral)
};

// E[Z_T] for the active regime: exactly 1 when the uncapped optimum is
// admissible everywhere, exp(-int D) with
//   D = psi (theta^2 - sqrt(lambda)) + psi lambda / (sqrt(lambda) + psi)
// on pieces where the cap binds. Throws NoGopError in the uncapped
// theta >= sqrt(lambda) regime.
AnalyticExpectation analytic_deflator_expectation(const MarketSpec& spec);

// Drift rate of the deflator on one piece (0 when the cap is slack).
double deflator_drift_rate(const MarketSpec& spec, int piece);

}  // namespace jumpgop
