#include "jumpgop/gop.hpp"

#include <cmath>

#include "jumpgop/errors.hpp"

namespace jumpgop {

GrowthRateResult growth_rate(const std::vector<double>& c, const std::vector<double>& theta,
                             const std::vector<double>& lambda, double r, int m) {
    const int d = static_cast<int>(c.size());
    GrowthRateResult out;
    out.base = r;
    for (int k = 0; k < m; ++k) out.diffusive += c[k] * theta[k] - 0.5 * c[k] * c[k];
    for (int k = m; k < d; ++k) {
        const double lam = lambda[k - m];
        const double root = std::sqrt(lam);
        if (!(c[k] > -root))
            throw InadmissibleVolatilityError(
                "jump volatility c[" + std::to_string(k + 1) + "]=" + std::to_string(c[k]) +
                " must exceed -sqrt(lambda)=" + std::to_string(-root));
        out.jump += c[k] * (theta[k] - root) + lam * std::log1p(c[k] / root);
    }
    out.g = out.base + out.diffusive + out.jump;
    return out;
}

std::vector<double> optimal_volatilities(const std::vector<double>& theta,
                                         const std::vector<double>& lambda, int m, int piece) {
    const int d = static_cast<int>(theta.size());
    std::vector<double> c(d);
    for (int k = 0; k < m; ++k) c[k] = theta[k];
    for (int k = m; k < d; ++k) {
        const double root = std::sqrt(lambda[k - m]);
        if (!(theta[k] < root)) throw NoGopError(k + 1, piece);
        c[k] = theta[k] / (1.0 - theta[k] / root);
    }
    return c;
}

std::vector<double> gop_fractions(const std::vector<double>& c_star,
                                  const linalg::SquareMatrix& b, int piece) {
    return linalg::solve_transposed_checked(b, c_star, kConditionLimit, piece);
}

double optimal_growth_rate(const std::vector<double>& theta, const std::vector<double>& lambda,
                           double r, int m, int piece) {
    const int d = static_cast<int>(theta.size());
    double g = r;
    for (int k = 0; k < m; ++k) g += 0.5 * theta[k] * theta[k];
    for (int k = m; k < d; ++k) {
        const double lam = lambda[k - m];
        const double root = std::sqrt(lam);
        if (!(theta[k] < root)) throw NoGopError(k + 1, piece);
        g += lam * (std::log1p(theta[k] / (root - theta[k])) - theta[k] / root);
    }
    return g;
}

std::string to_string(ConstraintRegime regime) {
    return regime == ConstraintRegime::Constrained ? "constrained" : "unconstrained";
}

ConstrainedVolatilities constrained_optimal_volatilities(const std::vector<double>& theta,
                                                         double lambda, double psi_cap) {
    if (theta.size() != 2)
        throw UnsupportedConstraintError("constrained optimum requires d = 2, m = 1");
    if (!(psi_cap > 0.0))
        throw UnsupportedConstraintError("constraint cap must be > 0");
    const double root = std::sqrt(lambda);
    ConstrainedVolatilities out;
    out.c = {theta[0], 0.0};
    if (theta[1] >= root) {
        out.c[1] = psi_cap;
        out.regime = ConstraintRegime::Constrained;
        return out;
    }
    const double unconstrained = theta[1] / (1.0 - theta[1] / root);
    if (psi_cap < unconstrained) {
        out.c[1] = psi_cap;
        out.regime = ConstraintRegime::Constrained;
    } else {
        out.c[1] = unconstrained;
        out.regime = ConstraintRegime::Unconstrained;
    }
    return out;
}

bool GopSolution::constrained_anywhere() const {
    for (const auto& p : pieces)
        if (p.regime == ConstraintRegime::Constrained) return true;
    return false;
}

nlohmann::json GopSolution::to_json() const {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& p : pieces) {
        nlohmann::json jp;
        jp["piece"] = p.piece;
        jp["theta"] = p.theta;
        jp["c_star"] = p.c_star;
        jp["pi_star"] = p.pi_star;
        jp["g_star"] = p.g_star;
        jp["regime"] = to_string(p.regime);
        doc.push_back(std::move(jp));
    }
    return doc;
}

GopSolution solve_gop(const MarketSpec& spec) {
    if (spec.constraint_cap && !(spec.d == 2 && spec.m == 1))
        throw UnsupportedConstraintError(
            "constraint_cap is only defined for d = 2, m = 1 markets");
    GopSolution solution;
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto& piece = spec.pieces[i];
        GopPiece gp;
        gp.piece = i;
        gp.theta = market_price_of_risk(spec, i);
        if (spec.constraint_cap) {
            auto constrained =
                constrained_optimal_volatilities(gp.theta, piece.lambda[0], *spec.constraint_cap);
            gp.c_star = constrained.c;
            gp.regime = constrained.regime;
        } else {
            gp.c_star = optimal_volatilities(gp.theta, piece.lambda, spec.m, i);
            gp.regime = ConstraintRegime::Unconstrained;
        }
        gp.pi_star = gop_fractions(gp.c_star, spec.volatility_matrix(i), i);
        gp.g_star = growth_rate(gp.c_star, gp.theta, piece.lambda, piece.r, spec.m).g;
        solution.pieces.push_back(std::move(gp));
    }
    return solution;
}

}  // namespace jumpgop
