#include "jumpgop/market.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "jumpgop/errors.hpp"

namespace jumpgop {

namespace {

std::string piece_label(int piece) { return "pieces[" + std::to_string(piece) + "]"; }

const nlohmann::json& require_key(const nlohmann::json& doc, const char* key,
                                  const std::string& where) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw ParseError("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

double as_number(const nlohmann::json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError("expected a number at " + where);
    return v.get<double>();
}

std::vector<double> as_vector(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError("expected an array at " + where);
    std::vector<double> out;
    out.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out.push_back(as_number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace

int MarketSpec::piece_index(double t) const {
    const int n = num_pieces();
    for (int i = n - 1; i >= 0; --i)
        if (t >= pieces[i].t_start) return i;
    return 0;
}

double MarketSpec::piece_end(int piece) const {
    return piece + 1 < num_pieces() ? pieces[piece + 1].t_start : horizon;
}

linalg::SquareMatrix MarketSpec::volatility_matrix(int piece) const {
    return linalg::SquareMatrix::from_rows(pieces[piece].b);
}

MarketSpec MarketSpec::from_json(const nlohmann::json& doc) {
    MarketSpec spec;
    spec.d = static_cast<int>(as_number(require_key(doc, "d", "market"), "d"));
    spec.m = static_cast<int>(as_number(require_key(doc, "m", "market"), "m"));
    spec.horizon = as_number(require_key(doc, "horizon", "market"), "horizon");
    const auto& pieces = require_key(doc, "pieces", "market");
    if (!pieces.is_array() || pieces.empty())
        throw ParseError("'pieces' must be a non-empty array");
    for (size_t i = 0; i < pieces.size(); ++i) {
        const auto& p = pieces[i];
        const std::string where = piece_label(static_cast<int>(i));
        MarketPiece piece;
        piece.t_start = as_number(require_key(p, "t_start", where), where + ".t_start");
        piece.r = as_number(require_key(p, "r", where), where + ".r");
        piece.a = as_vector(require_key(p, "a", where), where + ".a");
        const auto& b = require_key(p, "b", where);
        if (!b.is_array()) throw ParseError("expected an array at " + where + ".b");
        for (size_t j = 0; j < b.size(); ++j)
            piece.b.push_back(as_vector(b[j], where + ".b[" + std::to_string(j) + "]"));
        piece.lambda = as_vector(require_key(p, "lambda", where), where + ".lambda");
        spec.pieces.push_back(std::move(piece));
    }
    if (auto it = doc.find("constraint_cap"); it != doc.end() && !it->is_null())
        spec.constraint_cap = as_number(*it, "constraint_cap");
    check_structure(spec);
    return spec;
}

MarketSpec MarketSpec::from_json_text(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("market JSON parse error: ") + e.what());
    }
    return from_json(doc);
}

MarketSpec MarketSpec::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open market file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

nlohmann::json MarketSpec::to_json() const {
    nlohmann::json doc;
    doc["d"] = d;
    doc["m"] = m;
    doc["horizon"] = horizon;
    doc["pieces"] = nlohmann::json::array();
    for (const auto& p : pieces) {
        nlohmann::json jp;
        jp["t_start"] = p.t_start;
        jp["r"] = p.r;
        jp["a"] = p.a;
        jp["b"] = p.b;
        jp["lambda"] = p.lambda;
        doc["pieces"].push_back(std::move(jp));
    }
    if (constraint_cap) doc["constraint_cap"] = *constraint_cap;
    return doc;
}

void check_structure(const MarketSpec& spec) {
    if (spec.d < 1) throw ParseError("d must be >= 1");
    if (spec.m < 0 || spec.m > spec.d) throw ParseError("m must lie in [0, d]");
    if (!(spec.horizon > 0.0)) throw ParseError("horizon must be > 0");
    if (spec.pieces.empty()) throw ParseError("at least one piece required");
    if (spec.pieces.front().t_start != 0.0) throw ParseError("pieces[0].t_start must be 0");
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto& p = spec.pieces[i];
        const std::string where = piece_label(i);
        if (i > 0 && !(p.t_start > spec.pieces[i - 1].t_start))
            throw ParseError(where + ".t_start must be strictly increasing");
        if (!(p.t_start < spec.horizon))
            throw ParseError(where + ".t_start must be below the horizon");
        if (static_cast<int>(p.a.size()) != spec.d)
            throw ParseError(where + ".a must have length d");
        if (static_cast<int>(p.b.size()) != spec.d)
            throw ParseError(where + ".b must be d x d");
        for (const auto& row : p.b)
            if (static_cast<int>(row.size()) != spec.d)
                throw ParseError(where + ".b must be d x d");
        if (static_cast<int>(p.lambda.size()) != spec.d - spec.m)
            throw ParseError(where + ".lambda must have length d - m");
    }
    if (spec.constraint_cap && !(*spec.constraint_cap > 0.0))
        throw ParseError("constraint_cap must be > 0");
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json doc;
    doc["valid"] = valid();
    doc["violations"] = nlohmann::json::array();
    for (const auto& v : violations) {
        nlohmann::json jv;
        jv["piece"] = v.piece;
        jv["kind"] = v.kind;
        jv["indices"] = v.indices;
        jv["message"] = v.message;
        doc["violations"].push_back(std::move(jv));
    }
    return doc;
}

ValidationReport validate_market(const MarketSpec& spec) {
    check_structure(spec);
    ValidationReport report;
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto& p = spec.pieces[i];
        for (int k = 0; k < spec.num_jumps(); ++k) {
            if (!(p.lambda[k] > 0.0)) {
                report.violations.push_back(
                    {i, "lambda", {k},
                     "intensity lambda[" + std::to_string(k) + "] must be strictly positive"});
            }
        }
        for (int j = 0; j < spec.d; ++j) {
            for (int k = spec.m; k < spec.d; ++k) {
                const double lam = p.lambda[k - spec.m];
                if (!(lam > 0.0)) continue;
                const double floor = -std::sqrt(lam);
                if (p.b[j][k] < floor) {
                    std::ostringstream msg;
                    msg << "b[" << j + 1 << "][" << k + 1 << "]=" << p.b[j][k]
                        << " below -sqrt(lambda)=" << floor;
                    report.violations.push_back({i, "assumption1", {j, k}, msg.str()});
                }
            }
        }
        const double cond = linalg::condition_number(spec.volatility_matrix(i));
        if (!(cond <= kConditionLimit)) {
            std::ostringstream msg;
            msg << "volatility matrix not invertible (condition number " << cond << ")";
            report.violations.push_back({i, "assumption2", {}, msg.str()});
        }
    }
    if (spec.constraint_cap && !(spec.d == 2 && spec.m == 1)) {
        report.violations.push_back(
            {-1, "constraint_cap", {},
             "constraint_cap is only defined for d = 2, m = 1"});
    }
    return report;
}

std::vector<double> market_price_of_risk(const MarketSpec& spec, int piece) {
    const auto& p = spec.pieces[piece];
    std::vector<double> excess(spec.d);
    for (int j = 0; j < spec.d; ++j) excess[j] = p.a[j] - p.r;
    return linalg::solve_checked(spec.volatility_matrix(piece), excess, kConditionLimit, piece);
}

std::string to_string(JumpRegimeTag tag) {
    switch (tag) {
        case JumpRegimeTag::ElmmCandidate: return "ELMM_CANDIDATE";
        case JumpRegimeTag::GopNonexistent: return "GOP_NONEXISTENT";
        case JumpRegimeTag::ConstrainedStrictSupermartingale:
            return "CONSTRAINED_STRICT_SUPERMARTINGALE";
    }
    return "UNKNOWN";
}

bool RegimeReport::any(JumpRegimeTag tag) const {
    for (const auto& e : entries)
        if (e.tag == tag) return true;
    return false;
}

bool RegimeReport::all(JumpRegimeTag tag) const {
    for (const auto& e : entries)
        if (e.tag != tag) return false;
    return true;
}

nlohmann::json RegimeReport::to_json() const {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je;
        je["piece"] = e.piece;
        je["jump_component"] = e.jump_component + 1;
        je["theta"] = e.theta;
        je["sqrt_lambda"] = e.sqrt_lambda;
        je["tag"] = to_string(e.tag);
        je["cap_binding"] = e.cap_binding;
        if (e.cap_binding || e.binding_threshold != 0.0)
            je["binding_threshold"] = e.binding_threshold;
        doc.push_back(std::move(je));
    }
    return doc;
}

RegimeReport classify_regime(const MarketSpec& spec) {
    check_structure(spec);
    if (spec.constraint_cap && !(spec.d == 2 && spec.m == 1))
        throw UnsupportedConstraintError(
            "constraint_cap is only defined for d = 2, m = 1 markets");
    RegimeReport report;
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto theta = market_price_of_risk(spec, i);
        for (int k = spec.m; k < spec.d; ++k) {
            RegimeEntry entry;
            entry.piece = i;
            entry.jump_component = k - spec.m;
            entry.theta = theta[k];
            entry.sqrt_lambda = std::sqrt(spec.pieces[i].lambda[k - spec.m]);
            if (spec.constraint_cap) {
                const double cap = *spec.constraint_cap;
                if (entry.theta >= entry.sqrt_lambda) {
                    // No interior optimum: the cap always restrains the investor.
                    entry.cap_binding = true;
                } else {
                    entry.binding_threshold =
                        entry.theta / (1.0 - entry.theta / entry.sqrt_lambda);
                    entry.cap_binding = cap < entry.binding_threshold;
                }
                entry.tag = entry.cap_binding
                                ? JumpRegimeTag::ConstrainedStrictSupermartingale
                                : JumpRegimeTag::ElmmCandidate;
            } else {
                entry.tag = entry.theta < entry.sqrt_lambda ? JumpRegimeTag::ElmmCandidate
                                                            : JumpRegimeTag::GopNonexistent;
            }
            report.entries.push_back(entry);
        }
    }
    return report;
}

}  // namespace jumpgop
