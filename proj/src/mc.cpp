#include "jumpgop/mc.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "jumpgop/deflator.hpp"
#include "jumpgop/errors.hpp"
#include "jumpgop/gop.hpp"
#include "jumpgop/rng.hpp"

namespace jumpgop {

namespace {

constexpr uint32_t kStrategySubstream = 17;
constexpr uint64_t kHighVarianceFloor = 1000000;

void run_indexed(uint64_t n, int threads, const std::function<void(uint64_t)>& body) {
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(std::min<uint64_t>(n, 64))));
    if (workers == 1) {
        for (uint64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < workers; ++w) {
        const uint64_t lo = n * w / workers;
        const uint64_t hi = n * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (uint64_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> values) {
    const auto n = static_cast<double>(values.size());
    MeanSe out;
    out.mean = pairwise_sum(values) / n;
    if (values.size() < 2) return out;
    std::vector<double> sq(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - out.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / (n - 1.0);
    out.se = std::sqrt(var / n);
    return out;
}

// With antithetic pairing the independent observations are the pair means.
MeanSe estimator_stats(const std::vector<double>& values, bool antithetic) {
    if (!antithetic) return mean_and_se(values);
    std::vector<double> pair_means(values.size() / 2);
    for (size_t i = 0; i < pair_means.size(); ++i)
        pair_means[i] = 0.5 * (values[2 * i] + values[2 * i + 1]);
    return mean_and_se(pair_means);
}

Verdict classify_verdict(const MeanSe& stats, double baseline,
                         const std::optional<double>& reference) {
    if (stats.mean + kTestZ * stats.se < baseline) return Verdict::StrictSupermartingale;
    if (std::fabs(stats.mean - baseline) <= kTestZ * stats.se) {
        // CI consistent with a martingale; if the analytic value says the
        // mean is strictly below the baseline, the run cannot tell.
        if (reference && *reference < baseline * (1.0 - 1e-12))
            return Verdict::Inconclusive;
        return Verdict::ConsistentWithMartingale;
    }
    return Verdict::Inconclusive;
}

// True when some jump component the GOP actually trades at its closed-form
// optimum sits within 5% of the sqrt(lambda) boundary, where the deflator's
// tails get heavy.
bool near_boundary_regime(const MarketSpec& spec) {
    for (int i = 0; i < spec.num_pieces(); ++i) {
        const auto theta = market_price_of_risk(spec, i);
        for (int k = spec.m; k < spec.d; ++k) {
            const double root = std::sqrt(spec.pieces[i].lambda[k - spec.m]);
            if (spec.constraint_cap) {
                const auto capped = constrained_optimal_volatilities(
                    theta, spec.pieces[i].lambda[0], *spec.constraint_cap);
                if (capped.regime == ConstraintRegime::Constrained) continue;
            }
            if (theta[k] < root && root - theta[k] < 0.05 * root) return true;
        }
    }
    return false;
}

McReport finalize_report(const std::vector<double>& values, uint64_t n_paths, uint64_t seed,
                         const McConfig& config, double baseline,
                         std::optional<double> reference, bool high_variance) {
    const MeanSe stats = estimator_stats(values, config.antithetic);
    McReport report;
    report.mean = stats.mean;
    report.se = stats.se;
    report.ci_low = stats.mean - kCi99HalfWidthZ * stats.se;
    report.ci_high = stats.mean + kCi99HalfWidthZ * stats.se;
    report.n_paths = n_paths;
    report.seed = seed;
    report.antithetic = config.antithetic;
    report.baseline = baseline;
    report.reference = reference;
    report.verdict = classify_verdict(stats, baseline, reference);
    report.high_variance = high_variance;
    return report;
}

void check_path_count(uint64_t n_paths, const McConfig& config, bool high_variance) {
    if (n_paths < 1) throw std::invalid_argument("n_paths must be >= 1");
    if (config.antithetic && n_paths % 2 != 0)
        throw std::invalid_argument("antithetic runs need an even n_paths");
    if (high_variance && n_paths < kHighVarianceFloor)
        throw HighVarianceError(
            "market price of jump risk within 5% of sqrt(lambda): need n_paths >= 1e6");
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 64) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::ConsistentWithMartingale: return "CONSISTENT_WITH_MARTINGALE";
        case Verdict::StrictSupermartingale: return "STRICT_SUPERMARTINGALE";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "UNKNOWN";
}

std::string mc_reports_csv(const std::vector<std::pair<std::string, McReport>>& rows) {
    std::string out =
        "scenario,mean,se,ci99_low,ci99_high,n_paths,seed,antithetic,baseline,"
        "reference,verdict,high_variance\n";
    char buf[256];
    for (const auto& [name, mc] : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%llu,%llu,%d,%.17g,",
                      name.c_str(), mc.mean, mc.se, mc.ci_low, mc.ci_high,
                      static_cast<unsigned long long>(mc.n_paths),
                      static_cast<unsigned long long>(mc.seed), mc.antithetic ? 1 : 0,
                      mc.baseline);
        out += buf;
        if (mc.reference) {
            std::snprintf(buf, sizeof(buf), "%.17g", *mc.reference);
            out += buf;
        }
        out += ',';
        out += to_string(mc.verdict);
        out += mc.high_variance ? ",1\n" : ",0\n";
    }
    return out;
}

nlohmann::json McReport::to_json() const {
    nlohmann::json doc;
    doc["mean"] = mean;
    doc["se"] = se;
    doc["ci99"] = {ci_low, ci_high};
    doc["n_paths"] = n_paths;
    doc["seed"] = seed;
    doc["antithetic"] = antithetic;
    doc["baseline"] = baseline;
    if (reference) doc["reference"] = *reference;
    doc["verdict"] = to_string(verdict);
    doc["high_variance"] = high_variance;
    return doc;
}

McReport estimate_terminal_expectation(const MarketSpec& spec, TerminalFunctional functional,
                                       const Strategy& strategy, uint64_t n_paths, uint64_t seed,
                                       const McConfig& config) {
    const bool high_variance = near_boundary_regime(spec);
    check_path_count(n_paths, config, high_variance);

    const CompiledPortfolio gop(spec, gop_volatilities(spec), /*discounted=*/true, 1.0);
    std::optional<CompiledPortfolio> portfolio;
    if (functional != TerminalFunctional::Deflator)
        portfolio.emplace(spec, strategy_volatilities(spec, strategy), /*discounted=*/true, 1.0);

    double baseline = 1.0;
    std::optional<double> reference;
    if (functional == TerminalFunctional::Deflator) {
        reference = analytic_deflator_expectation(spec).value;
    } else {
        baseline = strategy.initial_wealth;
        // Benchmarked admissible portfolios are true martingales when the
        // uncapped optimum is admissible on every piece.
        const auto analytic = analytic_deflator_expectation(spec);
        if (analytic.regime == DeflatorRegime::UnconstrainedMartingale)
            reference = strategy.initial_wealth;
    }

    PathConfig path_config;
    path_config.antithetic = config.antithetic;
    const double s = strategy.initial_wealth;
    std::vector<double> values(n_paths);
    run_indexed(n_paths, config.threads, [&](uint64_t i) {
        const SimulatedPath path = sample_path(spec, seed, i, path_config);
        switch (functional) {
            case TerminalFunctional::Deflator:
                values[i] = 1.0 / gop.terminal_value(path);
                break;
            case TerminalFunctional::Benchmarked:
                values[i] = s * (portfolio->terminal_value(path) / gop.terminal_value(path));
                break;
            case TerminalFunctional::DeflatorTimesPortfolio:
                values[i] = (1.0 / gop.terminal_value(path)) * (s * portfolio->terminal_value(path));
                break;
        }
    });
    return finalize_report(values, n_paths, seed, config, baseline, reference, high_variance);
}

nlohmann::json SweepReport::to_json() const {
    nlohmann::json doc;
    doc["n_paths"] = n_paths;
    doc["seed"] = seed;
    doc["checkpoints"] = nlohmann::json::array();
    for (const auto& c : checkpoints) {
        nlohmann::json jc;
        jc["t"] = c.t;
        jc["mean"] = c.mean;
        jc["se"] = c.se;
        doc["checkpoints"].push_back(std::move(jc));
    }
    doc["step_diff_mean"] = step_diff_mean;
    doc["step_diff_se"] = step_diff_se;
    doc["nonincreasing"] = nonincreasing;
    return doc;
}

SweepReport supermartingale_sweep(const MarketSpec& spec, const Strategy& strategy,
                                  const std::vector<double>& checkpoints, uint64_t n_paths,
                                  uint64_t seed, const McConfig& config) {
    if (checkpoints.empty()) throw std::invalid_argument("need at least one checkpoint");
    const bool high_variance = near_boundary_regime(spec);
    check_path_count(n_paths, config, high_variance);

    const CompiledPortfolio gop(spec, gop_volatilities(spec), /*discounted=*/true, 1.0);
    const CompiledPortfolio portfolio(spec, strategy_volatilities(spec, strategy),
                                      /*discounted=*/true, 1.0);
    const double s = strategy.initial_wealth;
    const size_t n_checks = checkpoints.size();

    PathConfig path_config;
    path_config.antithetic = config.antithetic;
    path_config.extra_times = checkpoints;

    std::vector<std::vector<double>> values(n_checks, std::vector<double>(n_paths));
    run_indexed(n_paths, config.threads, [&](uint64_t i) {
        const SimulatedPath path = sample_path(spec, seed, i, path_config);
        const auto portfolio_values = values_at(portfolio.evaluate(path), checkpoints);
        const auto gop_values = values_at(gop.evaluate(path), checkpoints);
        for (size_t j = 0; j < n_checks; ++j)
            values[j][i] = s * (portfolio_values[j] / gop_values[j]);
    });

    SweepReport report;
    report.n_paths = n_paths;
    report.seed = seed;
    for (size_t j = 0; j < n_checks; ++j) {
        const MeanSe stats = estimator_stats(values[j], config.antithetic);
        report.checkpoints.push_back({checkpoints[j], stats.mean, stats.se});
    }
    std::vector<double> diffs(n_paths);
    for (size_t j = 0; j + 1 < n_checks; ++j) {
        for (uint64_t i = 0; i < n_paths; ++i) diffs[i] = values[j + 1][i] - values[j][i];
        const MeanSe stats = estimator_stats(diffs, config.antithetic);
        report.step_diff_mean.push_back(stats.mean);
        report.step_diff_se.push_back(stats.se);
        if (!(stats.mean <= kTestZ * stats.se)) report.nonincreasing = false;
    }
    return report;
}

nlohmann::json DominanceReport::to_json() const {
    nlohmann::json doc;
    doc["n_strategies"] = n_strategies;
    doc["comparisons"] = comparisons;
    doc["violations"] = violations;
    doc["max_excess"] = max_excess;
    doc["slack"] = slack;
    return doc;
}

DominanceReport growth_dominance_test(const MarketSpec& spec, uint64_t n_strategies,
                                      uint64_t seed) {
    const auto gop = solve_gop(spec);
    DominanceReport report;
    report.n_strategies = n_strategies;
    report.max_excess = -std::numeric_limits<double>::infinity();

    constexpr double kBox = 3.0;  // fraction box sampled per asset
    for (uint64_t idx = 0; idx < n_strategies; ++idx) {
        rng::Stream stream(seed, idx, kStrategySubstream);
        for (int i = 0; i < spec.num_pieces(); ++i) {
            const auto& piece = spec.pieces[i];
            std::vector<double> c(spec.d);
            bool admissible = false;
            for (int attempt = 0; attempt < 100000 && !admissible; ++attempt) {
                std::vector<double> pi(spec.d);
                for (int j = 0; j < spec.d; ++j) pi[j] = kBox * (2.0 * stream.uniform01() - 1.0);
                for (int k = 0; k < spec.d; ++k) {
                    double sum = 0.0;
                    for (int j = 0; j < spec.d; ++j) sum += pi[j] * piece.b[j][k];
                    c[k] = sum;
                }
                admissible = true;
                for (int k = spec.m; k < spec.d && admissible; ++k) {
                    const double root = std::sqrt(piece.lambda[k - spec.m]);
                    if (!(c[k] > -root + kAdmissibilityMargin)) admissible = false;
                    if (spec.constraint_cap && c[k] > *spec.constraint_cap) admissible = false;
                }
            }
            if (!admissible)
                throw ModelError("could not sample an admissible strategy from the box");
            const double g =
                growth_rate(c, gop.pieces[i].theta, piece.lambda, piece.r, spec.m).g;
            const double excess = g - gop.pieces[i].g_star;
            report.max_excess = std::max(report.max_excess, excess);
            if (excess > report.slack) ++report.violations;
            ++report.comparisons;
        }
    }
    return report;
}

McReport log_wealth_comparison(const MarketSpec& spec, const Strategy& strategy,
                               uint64_t n_paths, uint64_t seed, const McConfig& config) {
    const bool high_variance = near_boundary_regime(spec);
    check_path_count(n_paths, config, high_variance);

    const CompiledPortfolio gop(spec, gop_volatilities(spec), /*discounted=*/true, 1.0);
    const CompiledPortfolio portfolio(spec, strategy_volatilities(spec, strategy),
                                      /*discounted=*/true, 1.0);
    PathConfig path_config;
    path_config.antithetic = config.antithetic;
    std::vector<double> values(n_paths);
    run_indexed(n_paths, config.threads, [&](uint64_t i) {
        const SimulatedPath path = sample_path(spec, seed, i, path_config);
        const double v_strategy = portfolio.terminal_value(path);
        const double v_gop = gop.terminal_value(path);
        values[i] = v_strategy == v_gop ? 0.0 : std::log(v_strategy) - std::log(v_gop);
    });
    return finalize_report(values, n_paths, seed, config, /*baseline=*/0.0,
                           /*reference=*/std::nullopt, high_variance);
}

}  // namespace jumpgop
