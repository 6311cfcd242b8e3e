// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "seirs/analysis.hpp"
#include "seirs/integrator.hpp"
#include "seirs/model.hpp"
#include "seirs/util.hpp"

namespace seirs {

enum class Verdict { ObservedPermanent, ObservedExtinct, ObservedIndeterminate };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::ObservedPermanent: return "observed-permanent";
        case Verdict::ObservedExtinct: return "observed-extinct";
        default: return "observed-indeterminate";
    }
}

/// Functionals recorded per path at every recorded time, in column order.
inline const std::vector<std::string>& ensemble_functional_names() {
    static const std::vector<std::string> names = {
        "total_mass",        "infected_mass",     "perm_inner",
        "inv_moment2",       "min_node",          "clamped_fraction",
        "clamped_mass",      "hyp1_violated",     "hyp2_violated",
        "hyp3_violated",     "hyp2_undefined",    "hyp3_undefined"};
    return names;
}
constexpr int kNumFunctionals = 12;

struct EnsembleOptions {
    int paths = 1;
    uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    double verdict_floor = 1e-3;
    double fit_window_lo = 0.25;  // extinction-fit window as fractions of T
    double fit_window_hi = 0.75;
    double r2_threshold = 0.95;
};

struct EnsembleStats {
    std::vector<double> times;
    std::vector<std::string> names;
    // [functional][path * times + ti]; rows of aborted paths are unset.
    std::vector<std::vector<double>> per_path;
    std::vector<char> completed;  // per path
    // [functional][ti], over completed paths only.
    std::vector<std::vector<double>> mean, std_error, lo95, hi95;
    int paths = 0;
    int completed_paths = 0;
    int aborted_paths = 0;

    double value(int functional, int path, int ti) const {
        return per_path[functional][static_cast<std::size_t>(path) * times.size() + ti];
    }
};

struct HypothesisAggregate {
    std::array<double, 3> violated{};   // space-time fraction where violated
    std::array<double, 3> undefined{};  // space-time fraction undefined
    std::array<double, 3> held{};       // 1 - violated - undefined
};

struct EnsembleResult {
    EnsembleStats stats;
    ThresholdReport predicted;

    FunctionalSeries perm_stat;     // sqrt(mean perm_inner)
    FunctionalSeries perm_running;  // running time average of perm_stat
    double liminf_proxy = 0.0;      // min of perm_running over t >= T/2
    double liminf_proxy_se = 0.0;
    LinearFit running_trend;        // perm_running slope over the last quarter

    RateFit extinction_fit;         // on the mean infected mass

    HypothesisAggregate hypotheses;
    Verdict verdict = Verdict::ObservedIndeterminate;
    bool prediction_mismatch = false;
};

class EnsembleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Simulates `paths` independent realizations (path index = stream index),
/// aggregates the registered functionals, and classifies the observed regime
/// against the threshold prediction. Statistics cover completed paths only;
/// aborted paths are counted and reported.
inline EnsembleResult run_ensemble(const StateV& initial, const CoefficientSet& coeffs,
                                   const NoiseSpec& noise, const SchemeConfig& scheme,
                                   const SpectralBasis& basis,
                                   const EnsembleOptions& options) {
    if (options.paths < 1)
        throw std::invalid_argument("run_ensemble: paths must be >= 1");
    scheme.validate();
    const DomainGrid& grid = basis.grid();

    EnsembleResult result;
    EnsembleStats& stats = result.stats;
    stats.times = recorded_times(scheme);
    stats.names = ensemble_functional_names();
    stats.paths = options.paths;
    const std::size_t R = stats.times.size();
    stats.per_path.assign(kNumFunctionals,
                          std::vector<double>(static_cast<std::size_t>(options.paths) * R,
                                              0.0));
    stats.completed.assign(options.paths, 0);

    parallel_for(options.paths, options.threads, [&](int p) {
        std::size_t ti = 0;
        auto observer = [&](double, const StateV& state, const StepStats& st) {
            const std::size_t slot = static_cast<std::size_t>(p) * R + ti;
            bool hit_zero = false;
            stats.per_path[0][slot] = total_mass(state, grid);
            stats.per_path[1][slot] = infected_mass(state, grid);
            stats.per_path[2][slot] = permanence_inner(state, grid);
            stats.per_path[3][slot] = inverse_moment(state, grid, 2.0, &hit_zero);
            stats.per_path[4][slot] = state.min_all();
            stats.per_path[5][slot] = st.clamped_fraction;
            stats.per_path[6][slot] = st.clamped_mass;
            const HypothesisReport hyp = check_permanence_hypotheses(state, coeffs, grid);
            stats.per_path[7][slot] = hyp.violated_fraction[0];
            stats.per_path[8][slot] = hyp.violated_fraction[1];
            stats.per_path[9][slot] = hyp.violated_fraction[2];
            stats.per_path[10][slot] = hyp.undefined_fraction[1];
            stats.per_path[11][slot] = hyp.undefined_fraction[2];
            ++ti;
        };
        Trajectory traj = simulate_path(initial, coeffs, noise, scheme, basis,
                                        RngStream(options.seed, static_cast<uint32_t>(p)),
                                        observer, {.keep_snapshots = false});
        stats.completed[p] = traj.aborted ? 0 : 1;
    });

    for (int p = 0; p < options.paths; ++p)
        stats.completed[p] ? ++stats.completed_paths : ++stats.aborted_paths;
    if (stats.completed_paths == 0)
        throw EnsembleError("run_ensemble: all paths aborted");

    // Per-time aggregation in fixed path order (thread-count independent).
    stats.mean.assign(kNumFunctionals, std::vector<double>(R, 0.0));
    stats.std_error.assign(kNumFunctionals, std::vector<double>(R, 0.0));
    stats.lo95.assign(kNumFunctionals, std::vector<double>(R, 0.0));
    stats.hi95.assign(kNumFunctionals, std::vector<double>(R, 0.0));
    std::vector<double> column;
    column.reserve(stats.completed_paths);
    for (int f = 0; f < kNumFunctionals; ++f) {
        for (std::size_t ti = 0; ti < R; ++ti) {
            column.clear();
            // Welford's running mean/variance.
            double m = 0.0, m2 = 0.0;
            int k = 0;
            for (int p = 0; p < options.paths; ++p) {
                if (!stats.completed[p]) continue;
                const double v = stats.value(f, p, static_cast<int>(ti));
                column.push_back(v);
                ++k;
                const double d = v - m;
                m += d / k;
                m2 += d * (v - m);
            }
            const int M = stats.completed_paths;
            const double var = M > 1 ? m2 / (M - 1) : 0.0;
            stats.mean[f][ti] = m;
            stats.std_error[f][ti] = std::sqrt(var / M);
            std::sort(column.begin(), column.end());
            const auto quantile = [&](double q) {
                const double pos = q * (M - 1);
                const std::size_t lo = static_cast<std::size_t>(pos);
                const std::size_t hi = std::min<std::size_t>(lo + 1, M - 1);
                const double w = pos - static_cast<double>(lo);
                return (1.0 - w) * column[lo] + w * column[hi];
            };
            stats.lo95[f][ti] = quantile(0.025);
            stats.hi95[f][ti] = quantile(0.975);
        }
    }

    NoiseSpec validated = noise;
    validated.validate();
    result.predicted = compute_thresholds(coeffs, validated, grid);

    // Permanence statistic: sqrt applied after the ensemble mean.
    result.perm_stat.name = "perm_stat";
    result.perm_stat.times = stats.times;
    result.perm_stat.values.resize(R);
    FunctionalSeries perm_se{"perm_stat_se", stats.times, std::vector<double>(R, 0.0)};
    for (std::size_t ti = 0; ti < R; ++ti) {
        const double inner = stats.mean[2][ti];
        result.perm_stat.values[ti] = std::sqrt(std::max(inner, 0.0));
        perm_se.values[ti] = inner > 0.0
                                 ? stats.std_error[2][ti] / (2.0 * std::sqrt(inner))
                                 : 0.0;
    }
    result.perm_running = time_average(result.perm_stat);
    result.perm_running.name = "perm_running_avg";
    // Conservative: sd of a time integral is at most the integral of the sd.
    const FunctionalSeries se_running = time_average(perm_se);

    const double T = stats.times.back();
    result.liminf_proxy = std::numeric_limits<double>::infinity();
    for (std::size_t ti = 0; ti < R; ++ti) {
        if (stats.times[ti] < 0.5 * T - 1e-12) continue;
        if (result.perm_running.values[ti] < result.liminf_proxy) {
            result.liminf_proxy = result.perm_running.values[ti];
            result.liminf_proxy_se = se_running.values[ti];
        }
    }
    if (!std::isfinite(result.liminf_proxy)) {
        result.liminf_proxy = result.perm_running.values.back();
        result.liminf_proxy_se = se_running.values.back();
    }

    {
        std::vector<double> ts, vs;
        for (std::size_t ti = 0; ti < R; ++ti)
            if (stats.times[ti] >= 0.75 * T - 1e-12) {
                ts.push_back(stats.times[ti]);
                vs.push_back(result.perm_running.values[ti]);
            }
        result.running_trend = linear_fit(ts, vs);
    }

    FunctionalSeries mean_infected{"mean_infected_mass", stats.times, stats.mean[1]};
    result.extinction_fit = fit_exponential_rate(
        mean_infected, options.fit_window_lo * T, options.fit_window_hi * T);

    for (int c = 0; c < 3; ++c) {
        double viol = 0.0, undef = 0.0;
        const int fv = 7 + c;
        const int fu = c == 1 ? 10 : (c == 2 ? 11 : -1);
        for (std::size_t ti = 0; ti < R; ++ti) {
            viol += stats.mean[fv][ti];
            if (fu >= 0) undef += stats.mean[fu][ti];
        }
        result.hypotheses.violated[c] = viol / static_cast<double>(R);
        result.hypotheses.undefined[c] = undef / static_cast<double>(R);
        result.hypotheses.held[c] = 1.0 - result.hypotheses.violated[c] -
                                    result.hypotheses.undefined[c];
    }

    const bool permanent =
        result.liminf_proxy >= options.verdict_floor &&
        result.running_trend.slope >= -2.0 * result.running_trend.slope_se;
    const bool extinct =
        result.extinction_fit.points >= 2 &&
        result.extinction_fit.r_squared >= options.r2_threshold &&
        result.extinction_fit.rate >=
            result.predicted.m - 2.0 * result.extinction_fit.rate_se;
    if (permanent)
        result.verdict = Verdict::ObservedPermanent;
    else if (extinct)
        result.verdict = Verdict::ObservedExtinct;
    else
        result.verdict = Verdict::ObservedIndeterminate;

    result.prediction_mismatch =
        (result.predicted.predicted == Regime::Extinction &&
         result.verdict == Verdict::ObservedPermanent) ||
        (result.predicted.predicted == Regime::PermanenceCandidate &&
         result.verdict == Verdict::ObservedExtinct);
    return result;
}

}  // namespace seirs
