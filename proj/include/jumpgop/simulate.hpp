#pragma once

#include <vector>

#include "jumpgop/gop.hpp"
#include "jumpgop/market.hpp"
#include "jumpgop/path.hpp"

namespace jumpgop {

// Margin enforcing the strict admissibility inequality c > -sqrt(lambda).
inline constexpr double kAdmissibilityMargin = 1e-12;

// Piecewise-constant fractions of wealth in the risky accounts (cash is the
// remainder). One row per market piece, or a single row applied everywhere.
// An empty `pi` means "hold the GOP" and is simulated from the closed-form
// optimal volatilities directly.
struct Strategy {
    std::vector<std::vector<double>> pi;
    double initial_wealth = 1.0;

    static Strategy gop(double initial_wealth = 1.0) { return Strategy{{}, initial_wealth}; }
    bool is_gop() const { return pi.empty(); }
};

struct ValuePoint {
    double t = 0.0;
    EventKind kind = EventKind::Origin;
    int jump_process = -1;
    double left = 1.0;   // left limit (pre-jump value at jump times)
    double value = 1.0;  // cadlag value
};

struct ValuePath {
    bool discounted = false;
    bool absorbed = false;  // hit zero at a boundary jump (b = -sqrt(lambda))
    std::vector<ValuePoint> points;

    double terminal() const { return points.back().value; }
};

// Values at the given times; the times must be timeline events of the path
// the ValuePath was built from.
std::vector<double> values_at(const ValuePath& path, const std::vector<double>& times);

// Per-piece portfolio volatilities c^k = sum_j pi^j b^{j,k} with the
// admissibility (and cap, if configured) checks applied. Throws
// InadmissibleStrategyError.
std::vector<std::vector<double>> strategy_volatilities(const MarketSpec& spec,
                                                       const Strategy& strategy);

// Closed-form GOP volatilities per piece: c* unconstrained, or the capped
// variant when the spec carries a constraint_cap.
std::vector<std::vector<double>> gop_volatilities(const MarketSpec& spec);

// One portfolio's dynamics precompiled per piece (market prices of risk,
// drift constants, jump factors) so repeated path evaluation does no linear
// algebra. The Monte Carlo harness builds these once per run.
class CompiledPortfolio {
  public:
    // Portfolio with the given per-piece volatilities c.
    CompiledPortfolio(const MarketSpec& spec, const std::vector<std::vector<double>>& volatilities,
                      bool discounted, double initial_wealth);
    // Primary security account j (uses the appreciation rate directly).
    static CompiledPortfolio for_asset(const MarketSpec& spec, int asset);

    ValuePath evaluate(const SimulatedPath& path) const;
    double terminal_value(const SimulatedPath& path) const;

    struct PieceDynamics {
        double drift = 0.0;               // log-drift before the Ito correction
        double ito = 0.0;                 // 1/2 sum of squared Wiener-column volatilities
        std::vector<double> c_diff;       // Wiener-column volatilities
        std::vector<double> jump_factor;  // 1 + c / sqrt(lambda) per jump process
    };
    const PieceDynamics& piece_dynamics(int piece) const { return dynamics_[piece]; }
    double initial_wealth() const { return initial_; }

  private:
    CompiledPortfolio(const MarketSpec& spec, std::vector<PieceDynamics> dynamics,
                      bool discounted, double initial_wealth);

    const MarketSpec* spec_;
    std::vector<PieceDynamics> dynamics_;
    bool discounted_;
    double initial_;
};

// Exact evaluation of the exponential-product closed forms on the path's
// event timeline.
std::vector<ValuePath> simulate_assets(const MarketSpec& spec, const SimulatedPath& path);
ValuePath simulate_portfolio(const MarketSpec& spec, const Strategy& strategy,
                             const SimulatedPath& path, bool discounted);
ValuePath simulate_gop(const MarketSpec& spec, const SimulatedPath& path);  // discounted
ValuePath simulate_deflator(const MarketSpec& spec, const SimulatedPath& path);

// First-order discretization of the portfolio value SDE on a uniform grid
// of width `step` (jumps and breakpoints split the containing step and jump
// factors are applied exactly at the sampled jump times). Serves as the
// independent convergence check against the exact product formulas; `step`
// must be an integer multiple of the path's grid step.
ValuePath simulate_log_euler(const MarketSpec& spec, const Strategy& strategy,
                             const SimulatedPath& path, double step, bool discounted);

// Largest |log approx - log exact| over the approximation's points. The
// exact path must contain every time the approximation reports.
double max_abs_log_error(const ValuePath& approx, const ValuePath& exact);

}  // namespace jumpgop
