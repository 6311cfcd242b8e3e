// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "seirs/field.hpp"
#include "seirs/rng.hpp"
#include "seirs/spectral.hpp"

namespace seirs {

/// Truncated Q-Wiener specification: per-component eigenmode variance
/// weights a_{k,i} >= 0 for i = 0..3 (S, E, I, R) and k = 0..n-1. n = 0
/// means deterministic dynamics. The per-component trace a_i = sum_k a_{k,i}
/// is the finite-truncation stand-in for the summability assumption on the
/// full sequence.
struct NoiseSpec {
    std::array<std::vector<double>, 4> weights;

    int truncation() const { return static_cast<int>(weights[0].size()); }

    double trace(int component) const {
        double s = 0.0;
        for (double a : weights[component]) s += a;
        return s;
    }

    /// Pointwise variance rate sum_k a_{k,i} e_k(x)^2 at one node.
    double variance_rate_at(int component, const SpectralBasis& basis,
                            std::size_t node) const {
        double s = 0.0;
        for (int k = 0; k < truncation(); ++k) {
            if (weights[component][k] == 0.0) continue;
            Field e = basis.eigenfunction(k);
            s += weights[component][k] * e[node] * e[node];
        }
        return s;
    }

    void validate() const {
        const std::size_t n = weights[0].size();
        for (const auto& w : weights) {
            if (w.size() != n)
                throw std::invalid_argument(
                    "NoiseSpec: components must share one truncation level");
            for (double a : w)
                if (!(a >= 0.0))
                    throw std::invalid_argument("NoiseSpec: weights must be >= 0");
        }
    }

    static NoiseSpec zero(int n) {
        NoiseSpec s;
        for (auto& w : s.weights) w.assign(n, 0.0);
        return s;
    }

    /// Same weight sequence on all four components.
    static NoiseSpec uniform(std::vector<double> w) {
        NoiseSpec s;
        for (auto& c : s.weights) c = w;
        s.validate();
        return s;
    }

    static std::vector<double> geometric_weights(double a0, double ratio, int n) {
        std::vector<double> w(n);
        double v = a0;
        for (int k = 0; k < n; ++k, v *= ratio) w[k] = v;
        return w;
    }
};

/// Four per-component noise increments over one time step.
using Increments = std::array<Field, 4>;

/// Sample dW_i = sum_k sqrt(a_{k,i}) dB_{k,i} e_k over a step of length dt,
/// starting at step index `step`.
///
/// With substeps > 1 the step is assembled as the sum of `substeps`
/// independent increments of length dt/substeps keyed at fine step indices
/// step*substeps + s. A run at a coarse dt that passes the appropriate
/// substep count therefore consumes exactly the same Brownian draws as a run
/// at the fine dt, which is what the strong-convergence studies rely on. The
/// accumulation order makes the coarse increment bit-identical to the sum of
/// the fine ones.
inline void sample_increment_into(Increments& out, const NoiseSpec& spec,
                                  const SpectralBasis& basis, double dt,
                                  const RngStream& stream, uint64_t step,
                                  int substeps) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_increment: dt must be > 0");
    if (substeps < 1)
        throw std::invalid_argument("sample_increment: substeps must be >= 1");
    if (spec.truncation() > basis.num_modes())
        throw std::invalid_argument(
            "sample_increment: noise truncation exceeds basis modes");

    const double sqrt_dt_fine = std::sqrt(dt / substeps);
    const std::size_t nodes = basis.grid().num_nodes();
    Field substep_buf;  // keeps coarse steps bit-identical to summed fine steps
    for (int i = 0; i < 4; ++i) {
        out[i].assign(nodes, 0.0);
        const auto& w = spec.weights[i];
        for (int s = 0; s < substeps; ++s) {
            const uint64_t fine = step * static_cast<uint64_t>(substeps) + s;
            Field& acc = substeps == 1 ? out[i] : substep_buf;
            if (substeps > 1) acc.assign(nodes, 0.0);
            const int n = spec.truncation();
            for (int k = 0; k < n; k += 2) {
                const bool want0 = w[k] != 0.0;
                const bool want1 = k + 1 < n && w[k + 1] != 0.0;
                if (!want0 && !want1) continue;
                const RngStream::NormalPair z = stream.normal_pair(
                    fine, static_cast<uint32_t>(i), static_cast<uint32_t>(k >> 1));
                if (want0)
                    basis.add_scaled_eigenfunction(
                        acc, k, std::sqrt(w[k]) * sqrt_dt_fine * z.z0);
                if (want1)
                    basis.add_scaled_eigenfunction(
                        acc, k + 1, std::sqrt(w[k + 1]) * sqrt_dt_fine * z.z1);
            }
            if (substeps > 1)
                for (std::size_t j = 0; j < nodes; ++j) out[i][j] += acc[j];
        }
    }
}

inline Increments sample_increment(const NoiseSpec& spec, const SpectralBasis& basis,
                                   double dt, const RngStream& stream,
                                   uint64_t step = 0, int substeps = 1) {
    spec.validate();
    Increments out;
    sample_increment_into(out, spec, basis, dt, stream, step, substeps);
    return out;
}

/// Pointwise product u(x) * dW(x): the multiplicative-noise term on the grid.
inline Field multiplicative_apply(const Field& u, const Field& increment) {
    if (u.size() != increment.size())
        throw std::invalid_argument("multiplicative_apply: grid mismatch");
    Field out(u.size());
    for (std::size_t j = 0; j < u.size(); ++j) out[j] = u[j] * increment[j];
    return out;
}

}  // namespace seirs
