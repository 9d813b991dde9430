"""Jump-diffusion growth-optimal portfolio and martingale-deflator lab.

Thin python layer over the C++ core: market specs load from JSON, the main
operations return plain dicts/lists, and whole scenarios run end to end with
the same reports the CLI writes.
"""

import json as _json

from _jumpgop import (  # noqa: F401
    JumpgopModelError,
    JumpgopParseError,
    MarketSpec,
    builtin_scenarios,
    constrained_optimal_volatilities,
    market_price_of_risk,
    optimal_growth_rate,
    optimal_volatilities,
)
import _jumpgop as _core

__all__ = [
    "MarketSpec",
    "JumpgopModelError",
    "JumpgopParseError",
    "builtin_scenarios",
    "market_price_of_risk",
    "optimal_volatilities",
    "optimal_growth_rate",
    "constrained_optimal_volatilities",
    "growth_rate",
    "validate_market",
    "classify_regime",
    "solve_gop",
    "solve_deflator",
    "analytic_deflator_expectation",
    "test_martingale",
    "estimate_terminal_expectation",
    "log_wealth_comparison",
    "supermartingale_sweep",
    "growth_dominance_test",
    "run_scenario",
    "run_builtin",
]


def growth_rate(c, theta, lam, r, m):
    g, base, diffusive, jump = _core.growth_rate(c, theta, lam, r, m)
    return {"g": g, "base": base, "diffusive": diffusive, "jump": jump}


def validate_market(spec):
    return _json.loads(_core.validate_market(spec))


def classify_regime(spec):
    return _json.loads(_core.classify_regime(spec))


def solve_gop(spec):
    return _json.loads(_core.solve_gop(spec))


def solve_deflator(spec):
    return _json.loads(_core.solve_deflator(spec))


def analytic_deflator_expectation(spec):
    value, regime, integrated_drift = _core.analytic_deflator_expectation(spec)
    return {"value": value, "regime": regime, "integrated_drift": integrated_drift}


def test_martingale(spec, n_paths, seed, threads=1, antithetic=False):
    return _json.loads(_core.test_martingale(spec, n_paths, seed, threads, antithetic))


def _rows(pi):
    if pi is None:
        return []
    if isinstance(pi[0], (list, tuple)):
        return [list(row) for row in pi]
    return [list(pi)]


def estimate_terminal_expectation(spec, functional, n_paths, seed, pi=None,
                                  initial_wealth=1.0, threads=1, antithetic=False):
    """Mean of a terminal functional: 'deflator', 'benchmarked' or
    'deflator_times_portfolio'. `pi` as in supermartingale_sweep."""
    return _json.loads(
        _core.estimate_terminal_expectation(spec, functional, _rows(pi), initial_wealth,
                                            n_paths, seed, threads, antithetic))


def log_wealth_comparison(spec, n_paths, seed, pi=None, initial_wealth=1.0, threads=1):
    """E[log wealth of the strategy minus log wealth of the GOP]."""
    return _json.loads(
        _core.log_wealth_comparison(spec, _rows(pi), initial_wealth, n_paths, seed, threads))


def supermartingale_sweep(spec, checkpoints, n_paths, seed, pi=None,
                          initial_wealth=1.0, threads=1):
    """Benchmarked-portfolio means across checkpoints.

    `pi` may be None (the GOP), a flat fraction vector, or one row per piece.
    """
    return _json.loads(
        _core.supermartingale_sweep(spec, _rows(pi), initial_wealth, list(checkpoints),
                                    n_paths, seed, threads))


def growth_dominance_test(spec, n_strategies, seed):
    return _json.loads(_core.growth_dominance_test(spec, n_strategies, seed))


def run_scenario(scenario, threads=1):
    """Run a scenario given as a dict or JSON text; returns (report, exit_code)."""
    text = scenario if isinstance(scenario, str) else _json.dumps(scenario)
    report, code = _core.run_scenario(text, threads)
    return _json.loads(report), code


def run_builtin(name, threads=1):
    """Run one of the builtin scenarios by name; returns (report, exit_code)."""
    report, code = _core.load_scenario_report(name, threads)
    return _json.loads(report), code
