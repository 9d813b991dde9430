#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumpgop/linalg.hpp"

namespace jumpgop {

// Condition-number ceiling for treating the volatility matrix as invertible.
inline constexpr double kConditionLimit = 1e12;

// Coefficients on one time piece [t_start, t_end). Generalized volatility
// rows are assets, columns 1..m load Wiener noise, columns m+1..d load the
// normalized jump martingales; both carry 1/sqrt(year) units.
struct MarketPiece {
    double t_start = 0.0;
    double r = 0.0;                         // short rate, 1/year
    std::vector<double> a;                  // appreciation rates, length d
    std::vector<std::vector<double>> b;     // d x d generalized volatility
    std::vector<double> lambda;             // jump intensities, length d - m
};

// Full market description: d risk sources, m of them Wiener, horizon in
// years, piecewise-constant coefficients, optional jump-volatility cap
// (the convex-constraint regime; only defined for d = 2, m = 1).
struct MarketSpec {
    int d = 0;
    int m = 0;
    double horizon = 0.0;
    std::vector<MarketPiece> pieces;
    std::optional<double> constraint_cap;

    int num_jumps() const { return d - m; }
    int num_pieces() const { return static_cast<int>(pieces.size()); }

    // Piece containing t, with pieces half-open on the right and the final
    // piece closed at the horizon.
    int piece_index(double t) const;
    double piece_end(int piece) const;

    linalg::SquareMatrix volatility_matrix(int piece) const;

    static MarketSpec from_json(const nlohmann::json& doc);
    static MarketSpec from_json_text(const std::string& text);
    static MarketSpec from_file(const std::string& path);
    nlohmann::json to_json() const;
};

// Structural well-formedness (dimensions, ordering). Throws ParseError on
// the first defect; semantic model assumptions are validate_market's job.
void check_structure(const MarketSpec& spec);

struct Violation {
    int piece = -1;
    std::string kind;     // "assumption1" | "assumption2" | "lambda" | "constraint_cap"
    std::vector<int> indices;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
    nlohmann::json to_json() const;
};

// Checks Assumption 1 (jump loadings bounded below by -sqrt(lambda)),
// Assumption 2 (invertible volatility, condition number below the limit),
// strict positivity of intensities, and cap applicability. Violations are
// data, not exceptions.
ValidationReport validate_market(const MarketSpec& spec);

// theta = b^{-1} (a - r 1) on one piece.
std::vector<double> market_price_of_risk(const MarketSpec& spec, int piece);

enum class JumpRegimeTag {
    ElmmCandidate,                    // theta < sqrt(lambda): deflator is a martingale candidate
    GopNonexistent,                   // theta >= sqrt(lambda), no cap: growth rate unbounded
    ConstrainedStrictSupermartingale  // cap present and binding
};

std::string to_string(JumpRegimeTag tag);

struct RegimeEntry {
    int piece = 0;
    int jump_component = 0;  // 0-based index into lambda (paper's k - m)
    double theta = 0.0;
    double sqrt_lambda = 0.0;
    JumpRegimeTag tag = JumpRegimeTag::ElmmCandidate;
    bool cap_binding = false;
    double binding_threshold = 0.0;  // theta / (1 - theta / sqrt(lambda)) when finite
};

struct RegimeReport {
    std::vector<RegimeEntry> entries;

    bool any(JumpRegimeTag tag) const;
    bool all(JumpRegimeTag tag) const;
    nlohmann::json to_json() const;
};

// Per (piece, jump component) no-arbitrage regime. Throws
// UnsupportedConstraintError when a cap is set with (d, m) != (2, 1).
RegimeReport classify_regime(const MarketSpec& spec);

}  // namespace jumpgop
