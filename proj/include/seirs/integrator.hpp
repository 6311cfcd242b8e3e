// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "seirs/model.hpp"
#include "seirs/noise.hpp"
#include "seirs/spectral.hpp"

namespace seirs {

enum class ClampPolicy { Hard, Smooth };

/// The C^2 ramp used by the smooth positivity clamp: 0 below 0, identity
/// above 1, quintic blend in between.
inline double smooth_phi(double xi) {
    if (xi <= 0.0) return 0.0;
    if (xi >= 1.0) return xi;
    return ((3.0 * xi - 8.0) * xi + 6.0) * xi * xi * xi;
}

inline double clamp_value(double u, ClampPolicy policy, double epsilon) {
    if (policy == ClampPolicy::Hard) return u < 0.0 ? 0.0 : u;
    return u >= epsilon ? u : epsilon * smooth_phi(u / epsilon);
}

inline Field clamp(const Field& u, ClampPolicy policy, double epsilon = 1.0) {
    if (policy == ClampPolicy::Smooth && !(epsilon > 0.0))
        throw std::invalid_argument("clamp: smooth policy needs epsilon > 0");
    Field out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j)
        out[j] = clamp_value(u[j], policy, epsilon);
    return out;
}

struct SchemeConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    ClampPolicy clamp_policy = ClampPolicy::Hard;
    double epsilon = 1e-3;  // smooth policy only
    int record_every = 100;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SchemeConfig: dt must be > 0");
        if (t_final < 0.0)
            throw std::invalid_argument("SchemeConfig: t_final must be >= 0");
        if (t_final > 0.0 && dt > t_final + 1e-15)
            throw std::invalid_argument("SchemeConfig: dt must not exceed t_final");
        if (record_every < 1)
            throw std::invalid_argument("SchemeConfig: record_every must be >= 1");
        if (clamp_policy == ClampPolicy::Smooth && !(epsilon > 0.0))
            throw std::invalid_argument("SchemeConfig: smooth clamp needs epsilon > 0");
    }

    long long num_steps() const {
        if (t_final == 0.0) return 0;
        return static_cast<long long>(std::ceil(t_final / dt - 1e-9));
    }
};

inline bool is_record_step(long long step, long long steps, int record_every) {
    return step % record_every == 0 || step == steps;
}

/// The exact times simulate_path will record, initial state included.
inline std::vector<double> recorded_times(const SchemeConfig& scheme) {
    std::vector<double> times{0.0};
    const long long steps = scheme.num_steps();
    for (long long j = 1; j <= steps; ++j)
        if (is_record_step(j, steps, scheme.record_every))
            times.push_back(static_cast<double>(j) * scheme.dt);
    return times;
}

/// Positivity-clamp bookkeeping for a single step.
struct StepStats {
    double clamped_fraction = 0.0;  // fraction of (node, compartment) slots moved
    double clamped_mass = 0.0;      // quadrature mass added by the final clamp
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int component, std::string what)
        : std::runtime_error(std::move(what)), component_(component) {}
    int component() const { return component_; }

private:
    int component_;
};

/// One exponential-Euler step of the mild form, with workspace reuse:
///   V_i+ = clamp( e^{dt A_i} [ clamp(V_i) + G_i(clamp(V)) dt
///                              + clamp(V_i) dW_i ] ).
/// The drift and noise factors are frozen at the left endpoint; the
/// semigroup acts exactly on the resolved modes.
class Stepper {
public:
    Stepper(const CoefficientSet& coeffs, const SpectralBasis& basis,
            const SchemeConfig& scheme)
        : coeffs_(&coeffs), basis_(&basis), scheme_(scheme) {
        scheme.validate();
        coeffs.validate(basis.grid().num_nodes());
        const bool dense = basis.grid().dimension() == 1;
        for (int i = 0; i < 4; ++i) {
            factors_[i] = basis.semigroup_factors(coeffs.diffusivity(i), scheme.dt);
            if (dense) matrices_[i] = basis.semigroup_matrix(factors_[i]);
            work_[i].resize(basis.grid().num_nodes());
        }
    }

    const SchemeConfig& scheme() const { return scheme_; }

    /// Advances `state` in place. Throws DivergenceError on NaN/Inf.
    StepStats step(StateV& state, const Increments& dw) {
        const std::size_t n = basis_->grid().num_nodes();
        const double dt = scheme_.dt;
        const ClampPolicy pol = scheme_.clamp_policy;
        const double eps = scheme_.epsilon;
        const CoefficientSet& c = *coeffs_;

        for (std::size_t j = 0; j < n; ++j) {
            const double s = clamp_value(state.S[j], pol, eps);
            const double e = clamp_value(state.E[j], pol, eps);
            const double i = clamp_value(state.I[j], pol, eps);
            const double r = clamp_value(state.R[j], pol, eps);
            // Branch-free incidence, bit-identical to incidence() on valid
            // inputs: the zero flags hit exactly the s = 0 / i = 0 cases.
            const double den = s + e + i + r;
            const double inc = (c.alpha[j] * s * i / (den > 0.0 ? den : 1.0)) *
                               static_cast<double>(s > 0.0) *
                               static_cast<double>(i > 0.0);
            const double gS = c.Lambda[j] - c.mu1[j] * s - inc + c.beta[j] * r;
            const double gE = -c.mu2[j] * e + inc - c.sigma[j] * e;
            const double gI = -c.mu3[j] * i + c.sigma[j] * e - c.gamma[j] * i;
            const double gR = -c.mu4[j] * r + c.gamma[j] * i - c.beta[j] * r;
            work_[0][j] = s + gS * dt + s * dw[0][j];
            work_[1][j] = e + gE * dt + e * dw[1][j];
            work_[2][j] = i + gI * dt + i * dw[2][j];
            work_[3][j] = r + gR * dt + r * dw[3][j];
        }

        StepStats stats;
        const auto& weights = basis_->grid().node_weights();
        for (int i = 0; i < 4; ++i) {
            if (!matrices_[i].empty())
                basis_->apply_semigroup_matrix_inplace(work_[i], matrices_[i],
                                                       scratch_);
            else
                basis_->apply_semigroup_factors_inplace(work_[i], factors_[i],
                                                        scratch_);
            Field& target = state.component(i);
            long clamped = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const double raw = work_[i][j];
                if (!std::isfinite(raw))
                    throw DivergenceError(
                        i, std::string("divergence in compartment ") +
                               compartment_name(i));
                const double v = clamp_value(raw, pol, eps);
                if (v != raw) {
                    ++clamped;
                    stats.clamped_mass += weights[j] * (v - raw);
                }
                target[j] = v;
            }
            stats.clamped_fraction += static_cast<double>(clamped);
        }
        stats.clamped_fraction /= static_cast<double>(4 * n);
        return stats;
    }

private:
    const CoefficientSet* coeffs_;
    const SpectralBasis* basis_;
    SchemeConfig scheme_;
    std::array<std::vector<double>, 4> factors_;
    std::array<std::vector<double>, 4> matrices_;  // 1D dense fast path
    std::array<Field, 4> work_;
    std::vector<double> scratch_;
};

/// One-shot step (allocating); the stepping loops use Stepper directly.
inline StateV step_exponential_euler(const StateV& state, const CoefficientSet& coeffs,
                                     const Increments& dw, double dt,
                                     const SpectralBasis& basis,
                                     const SchemeConfig& scheme,
                                     StepStats* stats = nullptr) {
    SchemeConfig local = scheme;
    local.dt = dt;
    if (local.t_final < dt) local.t_final = dt;
    if (!state.nonnegative() || !state.finite())
        throw std::invalid_argument("step_exponential_euler: invalid state");
    Stepper stepper(coeffs, basis, local);
    StateV out = state;
    StepStats st = stepper.step(out, dw);
    if (stats) *stats = st;
    return out;
}

/// Per-recorded-time summary carried by a Trajectory.
struct TrajectoryRecord {
    double t = 0.0;
    StepStats stats;                   // of the step landing on t (zeros at t=0)
    std::array<double, 4> min_node{};  // per-compartment spatial min
    std::array<double, 4> max_node{};
    std::array<double, 4> mean{};      // quadrature means
};

struct Trajectory {
    std::vector<double> times;
    std::vector<TrajectoryRecord> records;
    std::vector<StateV> snapshots;  // filled only when keep_snapshots is set

    bool aborted = false;
    double abort_time = 0.0;
    int abort_component = -1;
    std::string abort_message;
};

/// Called at every recorded time with the current state. The integrator owns
/// the state; observers must copy what they need.
using PathObserver =
    std::function<void(double t, const StateV& state, const StepStats& stats)>;

struct SimulateOptions {
    bool keep_snapshots = true;
    int substeps = 1;  // consume Brownian draws of a grid `substeps` times finer
};

/// Simulates one noise realization. Deterministic given (seed, path index):
/// all randomness comes from the counter-based stream.
inline Trajectory simulate_path(const StateV& initial, const CoefficientSet& coeffs,
                                const NoiseSpec& noise, const SchemeConfig& scheme,
                                const SpectralBasis& basis, const RngStream& stream,
                                const PathObserver& observer = nullptr,
                                const SimulateOptions& options = {}) {
    scheme.validate();
    noise.validate();
    const std::size_t n = basis.grid().num_nodes();
    if (initial.nodes() != n)
        throw std::invalid_argument("simulate_path: initial state does not match grid");
    if (!initial.nonnegative() || !initial.finite())
        throw std::invalid_argument("simulate_path: initial state must be nonnegative");

    Trajectory traj;
    StateV state = initial;
    Stepper stepper(coeffs, basis, scheme);
    const long long steps = scheme.num_steps();
    const bool noiseless = noise.truncation() == 0 ||
                           (noise.trace(0) == 0.0 && noise.trace(1) == 0.0 &&
                            noise.trace(2) == 0.0 && noise.trace(3) == 0.0);
    Increments dw;
    if (noiseless)
        for (auto& f : dw) f.assign(n, 0.0);

    const auto record = [&](double t, const StepStats& stats) {
        TrajectoryRecord rec;
        rec.t = t;
        rec.stats = stats;
        for (int i = 0; i < 4; ++i) {
            const Field& f = state.component(i);
            rec.min_node[i] = min_value(f);
            rec.max_node[i] = max_value(f);
            rec.mean[i] = basis.grid().integrate(f);
        }
        traj.times.push_back(t);
        traj.records.push_back(rec);
        if (options.keep_snapshots) traj.snapshots.push_back(state);
        if (observer) observer(t, state, stats);
    };

    record(0.0, StepStats{});
    for (long long step = 0; step < steps; ++step) {
        const double t_next = static_cast<double>(step + 1) * scheme.dt;
        if (!noiseless)
            sample_increment_into(dw, noise, basis, scheme.dt, stream,
                                  static_cast<uint64_t>(step), options.substeps);
        try {
            const StepStats stats = stepper.step(state, dw);
            if (is_record_step(step + 1, steps, scheme.record_every))
                record(t_next, stats);
        } catch (const DivergenceError& err) {
            traj.aborted = true;
            traj.abort_time = t_next;
            traj.abort_component = err.component();
            traj.abort_message = err.what();
            break;
        }
    }
    return traj;
}

}  // namespace seirs
