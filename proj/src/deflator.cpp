#include "jumpgop/deflator.hpp"

#include <cmath>

#include "jumpgop/errors.hpp"
#include "jumpgop/gop.hpp"

namespace jumpgop {

DeflatorPiece solve_unique_deflator(const MarketSpec& spec, int piece) {
    const auto& p = spec.pieces[piece];
    const auto theta = market_price_of_risk(spec, piece);
    const int d = spec.d;
    const int m = spec.m;

    // Unknowns x = (phi_1..phi_m, psi_1..psi_{d-m}); scale the jump columns
    // by sqrt(lambda) and build the right-hand side row by row.
    linalg::SquareMatrix system(d);
    std::vector<double> rhs(d, 0.0);
    for (int j = 0; j < d; ++j) {
        for (int k = 0; k < m; ++k) system(j, k) = p.b[j][k];
        for (int k = m; k < d; ++k)
            system(j, k) = p.b[j][k] * std::sqrt(p.lambda[k - m]);
        double r = 0.0;
        for (int k = 0; k < d; ++k) r -= p.b[j][k] * theta[k];
        for (int k = m; k < d; ++k) r += p.b[j][k] * std::sqrt(p.lambda[k - m]);
        rhs[j] = r;
    }
    const auto x = linalg::solve_checked(system, rhs, kConditionLimit, piece);

    DeflatorPiece out;
    out.piece = piece;
    out.phi.assign(x.begin(), x.begin() + m);
    out.psi_rn.assign(x.begin() + m, x.end());
    const auto applied = system.apply(x);
    for (int j = 0; j < d; ++j)
        out.residual = std::max(out.residual, std::fabs(applied[j] - rhs[j]));
    for (double psi : out.psi_rn) {
        if (psi <= 0.0) out.equivalent = false;
        if (psi == 0.0) out.absolutely_continuous_only = true;
    }
    return out;
}

DeflatorSolution solve_unique_deflator(const MarketSpec& spec) {
    DeflatorSolution solution;
    for (int i = 0; i < spec.num_pieces(); ++i)
        solution.pieces.push_back(solve_unique_deflator(spec, i));
    return solution;
}

nlohmann::json DeflatorSolution::to_json() const {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : pieces) {
        nlohmann::json jp;
        jp["piece"] = p.piece;
        jp["phi"] = p.phi;
        jp["psi_rn"] = p.psi_rn;
        jp["residual"] = p.residual;
        jp["equivalent"] = p.equivalent;
        jp["absolutely_continuous_only"] = p.absolutely_continuous_only;
        doc.push_back(std::move(jp));
    }
    return doc;
}

ValuePath radon_nikodym_path(const DeflatorSolution& solution, const SimulatedPath& path,
                             const MarketSpec& spec) {
    ValuePath out;
    out.discounted = true;
    out.points.reserve(path.events.size());
    double log_part = 0.0;
    double jump_part = 1.0;
    double prev_t = 0.0;
    for (const auto& event : path.events) {
        ValuePoint point;
        point.t = event.t;
        point.kind = event.kind;
        point.jump_process = event.jump_process;
        if (event.kind == EventKind::Origin) {
            point.left = point.value = 1.0;
            out.points.push_back(point);
            continue;
        }
        const int piece = spec.piece_index(prev_t);
        const auto& sol = solution.pieces[piece];
        const auto& mp = spec.pieces[piece];
        const double dt = event.t - prev_t;
        double drift = 0.0;
        double diffusion = 0.0;
        for (int k = 0; k < spec.m; ++k) {
            drift -= 0.5 * sol.phi[k] * sol.phi[k];
            diffusion += sol.phi[k] * event.dw[k];
        }
        for (int k = 0; k < spec.num_jumps(); ++k)
            drift += (1.0 - sol.psi_rn[k]) * mp.lambda[k];
        log_part += drift * dt + diffusion;
        point.left = std::exp(log_part) * jump_part;
        if (event.kind == EventKind::Jump) {
            jump_part *= sol.psi_rn[event.jump_process];
            if (sol.psi_rn[event.jump_process] == 0.0) out.absorbed = true;
            point.value = std::exp(log_part) * jump_part;
        } else {
            point.value = point.left;
        }
        out.points.push_back(point);
        prev_t = event.t;
    }
    return out;
}

std::string to_string(DeflatorRegime regime) {
    return regime == DeflatorRegime::ConstrainedSupermartingale
               ? "CONSTRAINED_SUPERMARTINGALE"
               : "UNCONSTRAINED_MARTINGALE";
}

double deflator_drift_rate(const MarketSpec& spec, int piece) {
    if (!spec.constraint_cap) {
        // Martingale regime (or no GOP at all, which the caller rules out).
        return 0.0;
    }
    const auto theta = market_price_of_risk(spec, piece);
    const auto capped =
        constrained_optimal_volatilities(theta, spec.pieces[piece].lambda[0], *spec.constraint_cap);
    if (capped.regime == ConstraintRegime::Unconstrained) return 0.0;
    const double psi = *spec.constraint_cap;
    const double lam = spec.pieces[piece].lambda[0];
    const double root = std::sqrt(lam);
    return psi * (theta[1] - root) + psi * lam / (root + psi);
}

AnalyticExpectation analytic_deflator_expectation(const MarketSpec& spec) {
    AnalyticExpectation out;
    if (!spec.constraint_cap) {
        // Without a cap the GOP must exist outright.
        for (int i = 0; i < spec.num_pieces(); ++i) {
            const auto theta = market_price_of_risk(spec, i);
            for (int k = spec.m; k < spec.d; ++k)
                if (!(theta[k] < std::sqrt(spec.pieces[i].lambda[k - spec.m])))
                    throw NoGopError(k + 1, i);
        }
        out.value = 1.0;
        out.regime = DeflatorRegime::UnconstrainedMartingale;
        return out;
    }
    if (!(spec.d == 2 && spec.m == 1))
        throw UnsupportedConstraintError("constraint_cap is only defined for d = 2, m = 1");
    double integral = 0.0;
    bool binding_anywhere = false;
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const double rate = deflator_drift_rate(spec, i);
        if (rate != 0.0) binding_anywhere = true;
        integral += rate * (spec.piece_end(i) - spec.pieces[i].t_start);
    }
    out.integrated_drift = integral;
    out.value = std::exp(-integral);
    out.regime = binding_anywhere ? DeflatorRegime::ConstrainedSupermartingale
                                  : DeflatorRegime::UnconstrainedMartingale;
    return out;
}

}  // namespace jumpgop
