// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "seirs/config.hpp"
#include "seirs/convergence.hpp"
#include "seirs/csv.hpp"
#include "seirs/ensemble.hpp"
#include "seirs/manifest.hpp"
#include "seirs/picard.hpp"
#include "seirs/util.hpp"

namespace seirs {

/// Exit codes shared by run() and the CLI.
enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kConfigError = 2,
    kDivergence = 3,
    kContractionFailure = 4,
    kAllPathsAborted = 5,
};

struct RunOverrides {
    std::optional<std::string> output_dir;
    std::optional<uint64_t> seed;
    std::optional<RunMode> mode;
    int threads = 0;  // 0 = hardware concurrency
};

struct RunOutcome {
    int exit_code = kOk;
    std::string message;
    std::vector<std::string> files;  // paths written, relative to output_dir
    std::string output_dir;
};

namespace runner_detail {

struct Instance {
    RunConfig cfg;
    DomainGrid grid;
    SpectralBasis basis;
    CoefficientSet coeffs;
    NoiseSpec noise;
    StateV initial;
    SchemeConfig scheme;

    explicit Instance(const RunConfig& c)
        : cfg(c),
          grid(c.dimension, c.points_per_axis),
          basis(grid, c.resolved_basis_modes()),
          noise(c.noise_spec()),
          scheme(c.scheme()) {
        coeffs.Lambda = c.Lambda.sample(grid);
        coeffs.mu1 = c.mu1.sample(grid);
        coeffs.mu2 = c.mu2.sample(grid);
        coeffs.mu3 = c.mu3.sample(grid);
        coeffs.mu4 = c.mu4.sample(grid);
        coeffs.alpha = c.alpha.sample(grid);
        coeffs.beta = c.beta.sample(grid);
        coeffs.gamma = c.gamma.sample(grid);
        coeffs.sigma = c.sigma.sample(grid);
        coeffs.k1 = c.k1;
        coeffs.k2 = c.k2;
        coeffs.k3 = c.k3;
        coeffs.k4 = c.k4;
        initial.S = c.S0.sample(grid);
        initial.E = c.E0.sample(grid);
        initial.I = c.I0.sample(grid);
        initial.R = c.R0.sample(grid);
    }
};

inline std::vector<std::string> trajectory_columns() {
    std::vector<std::string> cols = {"t"};
    for (const char* c : {"S", "E", "I", "R"}) {
        cols.push_back(std::string(c) + "_min");
        cols.push_back(std::string(c) + "_max");
        cols.push_back(std::string(c) + "_mean");
    }
    for (const char* name : {"total_mass", "infected_mass", "perm_inner",
                             "inv_moment2", "clamped_fraction", "clamped_mass"})
        cols.push_back(name);
    return cols;
}

inline int run_simulate(const Instance& inst, const std::string& dir,
                        uint64_t seed, RunOutcome& outcome) {
    CsvWriter csv(dir + "/trajectory.csv", trajectory_columns());
    const DomainGrid& grid = inst.grid;
    auto observer = [&](double t, const StateV& state, const StepStats& st) {
        std::vector<double> row;
        row.reserve(19);
        row.push_back(t);
        for (int i = 0; i < 4; ++i) {
            const Field& f = state.component(i);
            row.push_back(min_value(f));
            row.push_back(max_value(f));
            row.push_back(grid.integrate(f));
        }
        row.push_back(total_mass(state, grid));
        row.push_back(infected_mass(state, grid));
        row.push_back(permanence_inner(state, grid));
        row.push_back(inverse_moment(state, grid, 2.0));
        row.push_back(st.clamped_fraction);
        row.push_back(st.clamped_mass);
        csv.row(row);
    };
    Trajectory traj =
        simulate_path(inst.initial, inst.coeffs, inst.noise, inst.scheme,
                      inst.basis, RngStream(seed, 0), observer,
                      {.keep_snapshots = false});
    csv.close();
    outcome.files.push_back("trajectory.csv");
    if (traj.aborted) {
        outcome.message = "path aborted at t = " + format_double(traj.abort_time) +
                          ": " + traj.abort_message;
        return kDivergence;
    }
    return kOk;
}

inline int run_ensemble_mode(const Instance& inst, const std::string& dir,
                             uint64_t seed, int threads, RunOutcome& outcome) {
    EnsembleOptions opts;
    opts.paths = inst.cfg.paths;
    opts.seed = seed;
    opts.threads = threads;
    EnsembleResult res;
    try {
        res = run_ensemble(inst.initial, inst.coeffs, inst.noise, inst.scheme,
                           inst.basis, opts);
    } catch (const EnsembleError& e) {
        outcome.message = e.what();
        return kAllPathsAborted;
    }

    std::vector<std::string> cols = {"t"};
    for (const std::string& name : res.stats.names)
        for (const char* suffix : {"_mean", "_se", "_lo95", "_hi95"})
            cols.push_back(name + suffix);
    cols.push_back("perm_stat");
    cols.push_back("perm_running_avg");
    CsvWriter csv(dir + "/ensemble_stats.csv", cols);
    for (std::size_t ti = 0; ti < res.stats.times.size(); ++ti) {
        std::vector<double> row;
        row.reserve(cols.size());
        row.push_back(res.stats.times[ti]);
        for (int f = 0; f < kNumFunctionals; ++f) {
            row.push_back(res.stats.mean[f][ti]);
            row.push_back(res.stats.std_error[f][ti]);
            row.push_back(res.stats.lo95[f][ti]);
            row.push_back(res.stats.hi95[f][ti]);
        }
        row.push_back(res.perm_stat.values[ti]);
        row.push_back(res.perm_running.values[ti]);
        csv.row(row);
    }
    csv.close();
    outcome.files.push_back("ensemble_stats.csv");

    KeyValueCsv verdict(dir + "/verdict.csv");
    verdict.add("predicted_regime", std::string(regime_name(res.predicted.predicted)));
    verdict.add("observed_verdict", std::string(verdict_name(res.verdict)));
    verdict.add("prediction_mismatch", res.prediction_mismatch);
    verdict.add("Lambda_star", res.predicted.Lambda_star);
    verdict.add("R_hat", res.predicted.R_hat);
    verdict.add("a_tilde", res.predicted.a_tilde);
    verdict.add("mu3_gamma_alpha_star", res.predicted.mu3_gamma_alpha_star);
    verdict.add("mu2_star", res.predicted.mu2_star);
    verdict.add("m", res.predicted.m);
    verdict.add("alpha_ge_gamma", res.predicted.alpha_ge_gamma);
    verdict.add("liminf_proxy", res.liminf_proxy);
    verdict.add("liminf_proxy_se", res.liminf_proxy_se);
    verdict.add("running_trend_slope", res.running_trend.slope);
    verdict.add("running_trend_slope_se", res.running_trend.slope_se);
    verdict.add("extinction_rate", res.extinction_fit.rate);
    verdict.add("extinction_rate_se", res.extinction_fit.rate_se);
    verdict.add("extinction_r2", res.extinction_fit.r_squared);
    verdict.add("extinction_window_lo", res.extinction_fit.t_lo);
    verdict.add("extinction_window_hi", res.extinction_fit.t_hi);
    for (int c = 0; c < 3; ++c) {
        const std::string tag = "hyp" + std::to_string(c + 1);
        verdict.add(tag + "_held", res.hypotheses.held[c]);
        verdict.add(tag + "_violated", res.hypotheses.violated[c]);
        verdict.add(tag + "_undefined", res.hypotheses.undefined[c]);
    }
    verdict.add("paths", static_cast<long long>(res.stats.paths));
    verdict.add("completed_paths", static_cast<long long>(res.stats.completed_paths));
    verdict.add("aborted_paths", static_cast<long long>(res.stats.aborted_paths));
    verdict.close();
    outcome.files.push_back("verdict.csv");

    if (res.stats.aborted_paths > 0)
        outcome.message = std::to_string(res.stats.aborted_paths) +
                          " path(s) aborted; statistics cover survivors";
    if (res.prediction_mismatch) {
        outcome.message += outcome.message.empty() ? "" : "; ";
        outcome.message += "WARNING: observed verdict contradicts the predicted regime";
        std::cerr << "seirs-spde: verdict mismatch: predicted "
                  << regime_name(res.predicted.predicted) << " but observed "
                  << verdict_name(res.verdict) << "\n";
    }
    return kOk;
}

inline int run_thresholds(const Instance& inst, const std::string& dir,
                          RunOutcome& outcome) {
    const ThresholdReport rep =
        compute_thresholds(inst.coeffs, inst.noise, inst.grid);
    KeyValueCsv csv(dir + "/thresholds.csv");
    csv.add("Lambda_star", rep.Lambda_star);
    csv.add("R_hat", rep.R_hat);
    csv.add("a_tilde", rep.a_tilde);
    csv.add("mu3_gamma_alpha_star", rep.mu3_gamma_alpha_star);
    csv.add("mu2_star", rep.mu2_star);
    csv.add("m", rep.m);
    csv.add("alpha_ge_gamma", rep.alpha_ge_gamma);
    csv.add("predicted_regime", std::string(regime_name(rep.predicted)));
    csv.close();
    outcome.files.push_back("thresholds.csv");
    return kOk;
}

inline int run_convergence(const Instance& inst, const std::string& dir,
                           uint64_t seed, int threads, RunOutcome& outcome) {
    ConvergenceProblem prob;
    prob.initial = inst.initial;
    prob.coeffs = inst.coeffs;
    prob.noise = inst.noise;
    prob.scheme = inst.scheme;

    ConvergenceTable table;
    if (inst.cfg.convergence.study == "dt") {
        if (inst.cfg.convergence.dt_levels.size() < 2)
            throw ConfigError("convergence.dt_levels: need at least 2 levels");
        table = dt_convergence_study(prob, inst.basis, inst.cfg.convergence.dt_levels,
                                     inst.cfg.convergence.paths, seed, threads);
    } else {
        if (inst.cfg.convergence.n_levels.size() < 2)
            throw ConfigError("convergence.n_levels: need at least 2 levels");
        table = n_convergence_study(prob, inst.basis, inst.cfg.convergence.n_levels,
                                    inst.cfg.convergence.paths, seed, threads);
    }

    CsvWriter csv(dir + "/convergence.csv",
                  {"level", "param", "estimate", "std_error"});
    for (std::size_t l = 0; l < table.levels.size(); ++l) {
        const double row[4] = {static_cast<double>(l), table.levels[l].param,
                               table.levels[l].estimate, table.levels[l].std_error};
        csv.row(row);
    }
    csv.close();
    outcome.files.push_back("convergence.csv");

    KeyValueCsv summary(dir + "/convergence_summary.csv");
    summary.add("study", table.study);
    summary.add("reference_param", table.reference_param);
    summary.add("slope", table.slope);
    summary.add("slope_se", table.slope_se);
    summary.add("paths", static_cast<long long>(inst.cfg.convergence.paths));
    summary.close();
    outcome.files.push_back("convergence_summary.csv");
    return kOk;
}

inline int run_picard(const Instance& inst, const std::string& dir, uint64_t seed,
                      RunOutcome& outcome) {
    PicardConfig config{inst.cfg.picard.t0, inst.cfg.picard.substeps,
                        inst.cfg.picard.max_iterations, inst.cfg.picard.tolerance};
    const double dt = config.t0 / config.substeps;
    RngStream stream(seed, 0);
    std::vector<Increments> frozen;
    frozen.reserve(config.substeps);
    for (int j = 0; j < config.substeps; ++j)
        frozen.push_back(sample_increment(inst.noise, inst.basis, dt, stream, j));

    const PicardResult res =
        picard_solve(inst.initial, inst.coeffs, frozen, config, inst.basis);

    CsvWriter csv(dir + "/picard.csv", {"iteration", "diff_sup", "ratio"});
    for (std::size_t m = 0; m < res.diffs.size(); ++m) {
        const double row[3] = {static_cast<double>(m + 1), res.diffs[m],
                               m == 0 ? std::numeric_limits<double>::quiet_NaN()
                                      : res.ratios[m - 1]};
        csv.row(row);
    }
    csv.close();
    outcome.files.push_back("picard.csv");

    KeyValueCsv summary(dir + "/picard_summary.csv");
    summary.add("converged", res.converged);
    summary.add("contraction_failure", res.contraction_failure);
    summary.add("iterations", static_cast<long long>(res.iterations));
    summary.add("t0", config.t0);
    summary.add("substeps", static_cast<long long>(config.substeps));
    summary.add("tolerance", config.tolerance);
    summary.close();
    outcome.files.push_back("picard_summary.csv");

    if (res.contraction_failure) {
        outcome.message = "picard iteration failed to contract; see picard.csv";
        return kContractionFailure;
    }
    return kOk;
}

}  // namespace runner_detail

/// Executes one configured run. Always writes whatever partial outputs exist
/// plus a manifest; the exit code reports divergence, contraction failure, or
/// total ensemble loss.
inline RunOutcome run(const RunConfig& config, const RunOverrides& overrides = {}) {
    using namespace runner_detail;
    RunConfig cfg = config;
    if (overrides.mode) cfg.mode = *overrides.mode;
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;

    RunOutcome outcome;
    outcome.output_dir = cfg.output_dir;
    const auto t_start = std::chrono::steady_clock::now();

    std::filesystem::create_directories(cfg.output_dir);
    Instance inst(cfg);

    int code = kOk;
    switch (cfg.mode) {
        case RunMode::Simulate:
            code = run_simulate(inst, cfg.output_dir, cfg.seed, outcome);
            break;
        case RunMode::Ensemble:
            code = run_ensemble_mode(inst, cfg.output_dir, cfg.seed,
                                     overrides.threads, outcome);
            break;
        case RunMode::Thresholds:
            code = run_thresholds(inst, cfg.output_dir, outcome);
            break;
        case RunMode::Convergence:
            code = run_convergence(inst, cfg.output_dir, cfg.seed,
                                   overrides.threads, outcome);
            break;
        case RunMode::Picard:
            code = run_picard(inst, cfg.output_dir, cfg.seed, outcome);
            break;
    }

    RunManifest manifest;
    manifest.mode = run_mode_name(cfg.mode);
    manifest.seed = cfg.seed;
    manifest.threads = resolve_threads(overrides.threads);
    manifest.config_echo = config_to_json(cfg);
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    for (const std::string& f : outcome.files)
        manifest.output_checksums[f] = fnv1a64_file(cfg.output_dir + "/" + f);
    manifest.write(cfg.output_dir + "/manifest.json");
    outcome.files.push_back("manifest.json");

    outcome.exit_code = code;
    return outcome;
}

}  // namespace seirs
