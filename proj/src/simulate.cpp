#include "jumpgop/simulate.hpp"

#include <cmath>
#include <stdexcept>

#include "jumpgop/errors.hpp"

namespace jumpgop {

namespace {

std::vector<std::vector<double>> broadcast_rows(const MarketSpec& spec,
                                                const std::vector<std::vector<double>>& rows) {
    if (rows.size() == static_cast<size_t>(spec.num_pieces())) return rows;
    if (rows.size() == 1)
        return std::vector<std::vector<double>>(spec.num_pieces(), rows[0]);
    throw InadmissibleStrategyError("strategy must supply one fraction row, or one per piece");
}

}  // namespace

CompiledPortfolio::CompiledPortfolio(const MarketSpec& spec, std::vector<PieceDynamics> dynamics,
                                     bool discounted, double initial_wealth)
    : spec_(&spec), dynamics_(std::move(dynamics)), discounted_(discounted),
      initial_(initial_wealth) {}

CompiledPortfolio::CompiledPortfolio(const MarketSpec& spec,
                                     const std::vector<std::vector<double>>& volatilities,
                                     bool discounted, double initial_wealth)
    : spec_(&spec), discounted_(discounted), initial_(initial_wealth) {
    dynamics_.resize(spec.num_pieces());
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto& piece = spec.pieces[i];
        const auto theta = market_price_of_risk(spec, i);
        const auto& c = volatilities[i];
        PieceDynamics dyn;
        dyn.drift = discounted ? 0.0 : piece.r;
        for (int k = 0; k < spec.d; ++k) dyn.drift += c[k] * theta[k];
        for (int k = 0; k < spec.m; ++k) {
            dyn.ito += 0.5 * c[k] * c[k];
            dyn.c_diff.push_back(c[k]);
        }
        for (int k = spec.m; k < spec.d; ++k) {
            const double root = std::sqrt(piece.lambda[k - spec.m]);
            dyn.drift -= c[k] * root;
            dyn.jump_factor.push_back(1.0 + c[k] / root);
        }
        dynamics_[i] = std::move(dyn);
    }
}

CompiledPortfolio CompiledPortfolio::for_asset(const MarketSpec& spec, int asset) {
    std::vector<PieceDynamics> dynamics(spec.num_pieces());
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto& piece = spec.pieces[i];
        PieceDynamics dyn;
        dyn.drift = piece.a[asset];
        for (int k = 0; k < spec.m; ++k) {
            dyn.ito += 0.5 * piece.b[asset][k] * piece.b[asset][k];
            dyn.c_diff.push_back(piece.b[asset][k]);
        }
        for (int k = spec.m; k < spec.d; ++k) {
            const double root = std::sqrt(piece.lambda[k - spec.m]);
            dyn.drift -= piece.b[asset][k] * root;
            dyn.jump_factor.push_back(1.0 + piece.b[asset][k] / root);
        }
        dynamics[i] = std::move(dyn);
    }
    return CompiledPortfolio(spec, std::move(dynamics), /*discounted=*/false, 1.0);
}

// Walks the timeline accumulating the exact exponent; jump factors are kept
// as a separate product so an exact zero factor absorbs the path instead of
// feeding -inf into the exponent.
ValuePath CompiledPortfolio::evaluate(const SimulatedPath& path) const {
    ValuePath out;
    out.discounted = discounted_;
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
            point.left = point.value = initial_;
            out.points.push_back(point);
            continue;
        }
        // Coefficients over (prev_t, t] belong to the piece containing prev_t.
        const auto& d = dynamics_[spec_->piece_index(prev_t)];
        const double dt = event.t - prev_t;
        double diffusion = 0.0;
        for (size_t k = 0; k < d.c_diff.size(); ++k) diffusion += d.c_diff[k] * event.dw[k];
        log_part += (d.drift - d.ito) * dt + diffusion;
        point.left = initial_ * std::exp(log_part) * jump_part;
        if (event.kind == EventKind::Jump) {
            const double factor = d.jump_factor[event.jump_process];
            jump_part *= factor;
            if (factor == 0.0) out.absorbed = true;
            point.value = initial_ * std::exp(log_part) * jump_part;
        } else {
            point.value = point.left;
        }
        out.points.push_back(point);
        prev_t = event.t;
    }
    return out;
}

double CompiledPortfolio::terminal_value(const SimulatedPath& path) const {
    double log_part = 0.0;
    double jump_part = 1.0;
    double prev_t = 0.0;
    for (const auto& event : path.events) {
        if (event.kind == EventKind::Origin) continue;
        const auto& d = dynamics_[spec_->piece_index(prev_t)];
        const double dt = event.t - prev_t;
        double diffusion = 0.0;
        for (size_t k = 0; k < d.c_diff.size(); ++k) diffusion += d.c_diff[k] * event.dw[k];
        log_part += (d.drift - d.ito) * dt + diffusion;
        if (event.kind == EventKind::Jump) jump_part *= d.jump_factor[event.jump_process];
        prev_t = event.t;
    }
    return initial_ * std::exp(log_part) * jump_part;
}

std::vector<double> values_at(const ValuePath& path, const std::vector<double>& times) {
    std::vector<double> out;
    out.reserve(times.size());
    size_t i = 0;
    for (double t : times) {
        while (i < path.points.size() && path.points[i].t < t) ++i;
        if (i >= path.points.size() || path.points[i].t != t)
            throw std::invalid_argument("requested time is not a timeline event");
        out.push_back(path.points[i].value);
    }
    return out;
}

std::vector<std::vector<double>> strategy_volatilities(const MarketSpec& spec,
                                                       const Strategy& strategy) {
    if (strategy.is_gop()) return gop_volatilities(spec);
    if (!(strategy.initial_wealth > 0.0))
        throw InadmissibleStrategyError("initial wealth must be > 0");
    const auto rows = broadcast_rows(spec, strategy.pi);
    std::vector<std::vector<double>> vols(spec.num_pieces());
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto& piece = spec.pieces[i];
        const auto& pi = rows[i];
        if (static_cast<int>(pi.size()) != spec.d)
            throw InadmissibleStrategyError("fraction vector must have length d");
        std::vector<double> c(spec.d, 0.0);
        for (int k = 0; k < spec.d; ++k)
            for (int j = 0; j < spec.d; ++j) c[k] += pi[j] * piece.b[j][k];
        for (int k = spec.m; k < spec.d; ++k) {
            const double root = std::sqrt(piece.lambda[k - spec.m]);
            if (!(c[k] > -root + kAdmissibilityMargin))
                throw InadmissibleStrategyError(
                    "strategy jump volatility " + std::to_string(c[k]) + " on piece " +
                    std::to_string(i) + " violates the positivity bound -sqrt(lambda)=" +
                    std::to_string(-root));
            if (spec.constraint_cap && c[k] > *spec.constraint_cap)
                throw InadmissibleStrategyError(
                    "strategy jump volatility " + std::to_string(c[k]) + " on piece " +
                    std::to_string(i) + " exceeds the cap " +
                    std::to_string(*spec.constraint_cap));
        }
        vols[i] = std::move(c);
    }
    return vols;
}

std::vector<std::vector<double>> gop_volatilities(const MarketSpec& spec) {
    const auto solution = solve_gop(spec);
    std::vector<std::vector<double>> vols;
    vols.reserve(solution.pieces.size());
    for (const auto& p : solution.pieces) vols.push_back(p.c_star);
    return vols;
}

std::vector<ValuePath> simulate_assets(const MarketSpec& spec, const SimulatedPath& path) {
    std::vector<ValuePath> out;
    out.reserve(spec.d);
    for (int j = 0; j < spec.d; ++j)
        out.push_back(CompiledPortfolio::for_asset(spec, j).evaluate(path));
    return out;
}

ValuePath simulate_portfolio(const MarketSpec& spec, const Strategy& strategy,
                             const SimulatedPath& path, bool discounted) {
    CompiledPortfolio compiled(spec, strategy_volatilities(spec, strategy), discounted,
                               strategy.initial_wealth);
    return compiled.evaluate(path);
}

ValuePath simulate_gop(const MarketSpec& spec, const SimulatedPath& path) {
    CompiledPortfolio compiled(spec, gop_volatilities(spec), /*discounted=*/true, 1.0);
    return compiled.evaluate(path);
}

ValuePath simulate_deflator(const MarketSpec& spec, const SimulatedPath& path) {
    ValuePath gop = simulate_gop(spec, path);
    ValuePath out;
    out.discounted = true;
    out.absorbed = gop.absorbed;
    out.points.reserve(gop.points.size());
    for (const auto& p : gop.points) {
        ValuePoint q = p;
        q.left = 1.0 / p.left;
        q.value = 1.0 / p.value;
        out.points.push_back(q);
    }
    return out;
}

ValuePath simulate_log_euler(const MarketSpec& spec, const Strategy& strategy,
                             const SimulatedPath& path, double step, bool discounted) {
    if (!(path.grid_step > 0.0))
        throw std::invalid_argument("discretization requires a path with a uniform grid");
    const auto ratio = static_cast<long long>(std::llround(step / path.grid_step));
    if (ratio < 1 || std::fabs(ratio * path.grid_step - step) > 1e-9 * step)
        throw std::invalid_argument("step must be an integer multiple of the path grid step");

    CompiledPortfolio compiled(spec, strategy_volatilities(spec, strategy), discounted,
                               strategy.initial_wealth);

    ValuePath out;
    out.discounted = discounted;
    double value = strategy.initial_wealth;
    out.points.push_back({0.0, EventKind::Origin, -1, value, value});

    // Accumulate Brownian increments until the next scheme node; each flush
    // applies one step: the log-value drift integrates exactly (so the
    // scheme is exact for pure-drift and pure-jump dynamics) and the
    // stochastic exponential of the diffusion is replaced by its truncated
    // Taylor factor, leaving a first-order log error. Jumps and breakpoints
    // always split the step, so a flush never spans a coefficient change or
    // a jump factor.
    double acc_dt = 0.0;
    std::vector<double> acc_dw(spec.m, 0.0);
    auto flush = [&](const CompiledPortfolio::PieceDynamics& d) {
        if (acc_dt > 0.0) {
            double x = 0.0;
            for (int k = 0; k < spec.m; ++k) x += d.c_diff[k] * acc_dw[k];
            const double noise = 1.0 + x + 0.5 * x * x + x * x * x / 6.0;
            const double factor = std::exp((d.drift - d.ito) * acc_dt) * noise;
            if (!(factor > 0.0))
                throw ModelError("discretization produced a nonpositive value; reduce the step");
            value *= factor;
        }
        acc_dt = 0.0;
        std::fill(acc_dw.begin(), acc_dw.end(), 0.0);
    };

    double prev_t = 0.0;
    for (const auto& event : path.events) {
        if (event.kind == EventKind::Origin) continue;
        const auto& d = compiled.piece_dynamics(spec.piece_index(prev_t));
        acc_dt += event.t - prev_t;
        for (int k = 0; k < spec.m; ++k) acc_dw[k] += event.dw[k];
        prev_t = event.t;

        bool is_node = event.kind == EventKind::Breakpoint || event.kind == EventKind::Terminal;
        if (event.kind == EventKind::Grid || event.kind == EventKind::Checkpoint) {
            const auto grid_index = static_cast<long long>(std::llround(event.t / path.grid_step));
            is_node = std::fabs(grid_index * path.grid_step - event.t) <= 1e-12 &&
                      grid_index % ratio == 0;
        }
        if (event.kind == EventKind::Jump) {
            flush(d);
            const double left = value;
            value *= d.jump_factor[event.jump_process];
            out.points.push_back({event.t, event.kind, event.jump_process, left, value});
        } else if (is_node) {
            flush(d);
            out.points.push_back({event.t, event.kind, -1, value, value});
        }
    }
    return out;
}

double max_abs_log_error(const ValuePath& approx, const ValuePath& exact) {
    double worst = 0.0;
    size_t i = 0;
    for (const auto& p : approx.points) {
        while (i < exact.points.size() && exact.points[i].t < p.t) ++i;
        if (i >= exact.points.size() || exact.points[i].t != p.t)
            throw std::invalid_argument("approximation point missing from the exact path");
        const double err = std::fabs(std::log(p.value) - std::log(exact.points[i].value));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace jumpgop
