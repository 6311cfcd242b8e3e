// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "seirs/integrator.hpp"
#include "seirs/util.hpp"

namespace seirs {

struct ConvergenceLevel {
    double param = 0.0;       // dt or n
    double estimate = 0.0;    // RMS sup error (dt study) or mean ||S - S_n||^2
    double std_error = 0.0;   // Monte Carlo standard error of the estimate
    std::vector<double> per_path;  // squared sup errors, one per path
};

struct ConvergenceTable {
    std::string study;  // "dt" or "truncation"
    std::vector<ConvergenceLevel> levels;  // excludes the reference level
    double reference_param = 0.0;
    double slope = 0.0;      // log-log LSQ slope of estimate vs param
    double slope_se = 0.0;
};

struct ConvergenceProblem {
    StateV initial;
    CoefficientSet coeffs;
    NoiseSpec noise;
    SchemeConfig scheme;  // t_final and clamp policy; dt supplied per level
};

namespace detail {

inline StateV final_state(const ConvergenceProblem& prob, const SpectralBasis& basis,
                          const RngStream& stream, double dt, int substeps,
                          const NoiseSpec& noise) {
    SchemeConfig scheme = prob.scheme;
    scheme.dt = dt;
    scheme.record_every = 1 << 30;  // final state only
    StateV last = prob.initial;
    auto observer = [&](double, const StateV& s, const StepStats&) { last = s; };
    Trajectory traj = simulate_path(prob.initial, prob.coeffs, noise, scheme, basis,
                                    stream, observer,
                                    {.keep_snapshots = false, .substeps = substeps});
    if (traj.aborted)
        throw std::runtime_error("convergence_study: path aborted: " +
                                 traj.abort_message);
    return last;
}

}  // namespace detail

/// Strong dt-refinement study under common random numbers: every level
/// consumes the same Brownian draws through the substep mechanism, and the
/// finest level is the reference. Errors are sup-norms over all four
/// compartments at the final time.
inline ConvergenceTable dt_convergence_study(const ConvergenceProblem& prob,
                                             const SpectralBasis& basis,
                                             std::vector<double> dt_levels, int paths,
                                             uint64_t seed, int threads = 0) {
    if (dt_levels.size() < 2)
        throw std::invalid_argument("dt_convergence_study: need at least 2 levels");
    for (std::size_t l = 1; l < dt_levels.size(); ++l)
        if (!(dt_levels[l] < dt_levels[l - 1]))
            throw std::invalid_argument(
                "dt_convergence_study: dt levels must be strictly decreasing");
    const double dt_fine = dt_levels.back();
    std::vector<int> substeps(dt_levels.size());
    for (std::size_t l = 0; l < dt_levels.size(); ++l) {
        const double ratio = dt_levels[l] / dt_fine;
        substeps[l] = static_cast<int>(std::llround(ratio));
        if (std::abs(ratio - substeps[l]) > 1e-9)
            throw std::invalid_argument(
                "dt_convergence_study: every dt must be an integer multiple of the "
                "finest");
    }

    const std::size_t coarse_count = dt_levels.size() - 1;
    std::vector<std::vector<double>> sq(coarse_count, std::vector<double>(paths));
    parallel_for(paths, threads, [&](int p) {
        RngStream stream(seed, static_cast<uint32_t>(p));
        const StateV ref = detail::final_state(prob, basis, stream, dt_fine, 1,
                                               prob.noise);
        for (std::size_t l = 0; l < coarse_count; ++l) {
            const StateV approx = detail::final_state(prob, basis, stream,
                                                      dt_levels[l], substeps[l],
                                                      prob.noise);
            double sup = 0.0;
            for (int i = 0; i < 4; ++i) {
                const Field& a = approx.component(i);
                const Field& b = ref.component(i);
                for (std::size_t x = 0; x < a.size(); ++x)
                    sup = std::max(sup, std::abs(a[x] - b[x]));
            }
            sq[l][p] = sup * sup;
        }
    });

    ConvergenceTable table;
    table.study = "dt";
    table.reference_param = dt_fine;
    std::vector<double> log_dt, log_rms;
    for (std::size_t l = 0; l < coarse_count; ++l) {
        ConvergenceLevel level;
        level.param = dt_levels[l];
        double mean = 0.0;
        for (double v : sq[l]) mean += v;
        mean /= paths;
        double var = 0.0;
        for (double v : sq[l]) var += (v - mean) * (v - mean);
        var = paths > 1 ? var / (paths - 1) : 0.0;
        const double rms = std::sqrt(mean);
        level.estimate = rms;
        level.std_error = rms > 0.0 ? std::sqrt(var / paths) / (2.0 * rms) : 0.0;
        level.per_path = std::move(sq[l]);
        table.levels.push_back(std::move(level));
        if (rms > 0.0) {
            log_dt.push_back(std::log(dt_levels[l]));
            log_rms.push_back(std::log(rms));
        }
    }
    const LinearFit fit = linear_fit(log_dt, log_rms);
    table.slope = fit.slope;
    table.slope_se = fit.slope_se;
    return table;
}

/// Noise-truncation study: levels share one dt and, through the counter-based
/// stream, the same Brownian draws per mode, so truncating to n just drops
/// the tail modes. The estimate per level is E ||S - S_ref||_sup^2 at the
/// final time against the largest n.
inline ConvergenceTable n_convergence_study(const ConvergenceProblem& prob,
                                            const SpectralBasis& basis,
                                            std::vector<int> n_levels, int paths,
                                            uint64_t seed, int threads = 0) {
    if (n_levels.size() < 2)
        throw std::invalid_argument("n_convergence_study: need at least 2 levels");
    for (std::size_t l = 1; l < n_levels.size(); ++l)
        if (n_levels[l] <= n_levels[l - 1])
            throw std::invalid_argument(
                "n_convergence_study: levels must be strictly increasing");
    const int n_ref = n_levels.back();
    if (n_ref > prob.noise.truncation())
        throw std::invalid_argument(
            "n_convergence_study: reference level exceeds the configured weights");

    const auto truncated = [&](int n) {
        NoiseSpec spec = prob.noise;
        for (auto& w : spec.weights) w.resize(n);
        return spec;
    };

    const std::size_t coarse_count = n_levels.size() - 1;
    std::vector<std::vector<double>> sq(coarse_count, std::vector<double>(paths));
    parallel_for(paths, threads, [&](int p) {
        RngStream stream(seed, static_cast<uint32_t>(p));
        const StateV ref = detail::final_state(prob, basis, stream, prob.scheme.dt,
                                               1, truncated(n_ref));
        for (std::size_t l = 0; l < coarse_count; ++l) {
            const StateV approx = detail::final_state(
                prob, basis, stream, prob.scheme.dt, 1, truncated(n_levels[l]));
            double sup = 0.0;
            for (std::size_t x = 0; x < ref.S.size(); ++x)
                sup = std::max(sup, std::abs(approx.S[x] - ref.S[x]));
            sq[l][p] = sup * sup;
        }
    });

    ConvergenceTable table;
    table.study = "truncation";
    table.reference_param = n_ref;
    std::vector<double> log_n, log_e;
    for (std::size_t l = 0; l < coarse_count; ++l) {
        ConvergenceLevel level;
        level.param = n_levels[l];
        double mean = 0.0;
        for (double v : sq[l]) mean += v;
        mean /= paths;
        double var = 0.0;
        for (double v : sq[l]) var += (v - mean) * (v - mean);
        var = paths > 1 ? var / (paths - 1) : 0.0;
        level.estimate = mean;
        level.std_error = std::sqrt(var / paths);
        level.per_path = std::move(sq[l]);
        table.levels.push_back(std::move(level));
        if (mean > 0.0) {
            log_n.push_back(std::log(static_cast<double>(n_levels[l])));
            log_e.push_back(std::log(mean));
        }
    }
    const LinearFit fit = linear_fit(log_n, log_e);
    table.slope = fit.slope;
    table.slope_se = fit.slope_se;
    return table;
}

}  // namespace seirs
