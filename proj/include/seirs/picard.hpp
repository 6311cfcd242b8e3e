// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "seirs/integrator.hpp"
#include "seirs/model.hpp"
#include "seirs/spectral.hpp"

namespace seirs {

struct PicardConfig {
    double t0 = 0.1;        // short horizon on which the mapping contracts
    int substeps = 20;      // time grid points on [0, t0]
    int max_iterations = 50;
    double tolerance = 1e-10;  // sup-norm stopping threshold

    void validate() const {
        if (!(t0 > 0.0)) throw std::invalid_argument("PicardConfig: t0 must be > 0");
        if (substeps < 1)
            throw std::invalid_argument("PicardConfig: substeps must be >= 1");
        if (max_iterations < 1)
            throw std::invalid_argument("PicardConfig: max_iterations must be >= 1");
        if (!(tolerance > 0.0))
            throw std::invalid_argument("PicardConfig: tolerance must be > 0");
    }
};

struct PicardResult {
    std::vector<double> times;      // grid 0, dt, ..., t0
    std::vector<StateV> iterate;    // final fixed-point iterate on that grid
    std::vector<double> diffs;      // d_m = sup-norm of successive differences
    std::vector<double> ratios;     // d_{m+1} / d_m
    bool converged = false;
    bool contraction_failure = false;
    int iterations = 0;
};

/// Fixed-point iteration of the mild-solution mapping on a short horizon:
///   u_{m+1}(t_j) = e^{t_j A} V0
///                + sum_{s<j} e^{(t_j - t_s) A} [ G*(u_m(t_s)) dt
///                                               + (u_m(t_s) v 0) dW_s ],
/// with left-endpoint quadrature on the same grid as the stepper, against the
/// frozen increments. G* composes the drift with the hard clamp; the running
/// convolution uses the exact semigroup recursion C_{j+1} = e^{dt A}(C_j + F_j).
///
/// Non-contraction (ratio >= 1 three times in a row) is reported, not thrown;
/// callers inspect the ratio history.
inline PicardResult picard_solve(const StateV& initial, const CoefficientSet& coeffs,
                                 const std::vector<Increments>& frozen_noise,
                                 const PicardConfig& config,
                                 const SpectralBasis& basis) {
    config.validate();
    const std::size_t n = basis.grid().num_nodes();
    coeffs.validate(n);
    if (initial.nodes() != n)
        throw std::invalid_argument("picard_solve: initial state does not match grid");
    if (!initial.nonnegative() || !initial.finite())
        throw std::invalid_argument("picard_solve: initial state must be nonnegative");
    if (frozen_noise.size() != static_cast<std::size_t>(config.substeps))
        throw std::invalid_argument(
            "picard_solve: need one frozen increment per substep");

    const int K = config.substeps;
    const double dt = config.t0 / K;
    std::array<std::vector<double>, 4> factors;
    for (int i = 0; i < 4; ++i)
        factors[i] = basis.semigroup_factors(coeffs.diffusivity(i), dt);
    std::vector<double> scratch;

    const auto semigroup_step = [&](StateV& v) {
        for (int i = 0; i < 4; ++i)
            basis.apply_semigroup_factors_inplace(v.component(i), factors[i], scratch);
    };

    PicardResult result;
    result.times.resize(K + 1);
    for (int j = 0; j <= K; ++j) result.times[j] = j * dt;

    // e^{t_j A} V0, computed once.
    std::vector<StateV> base(K + 1);
    base[0] = initial;
    for (int j = 1; j <= K; ++j) {
        base[j] = base[j - 1];
        semigroup_step(base[j]);
    }

    std::vector<StateV> u = base;  // first iterate
    std::vector<StateV> next(K + 1);
    int consecutive_expanding = 0;

    for (int m = 0; m < config.max_iterations; ++m) {
        // F_s = G*(u_s) dt + (u_s v 0) dW_s, then the convolution recursion.
        StateV conv = StateV::zero(n);
        next[0] = base[0];
        for (int j = 0; j < K; ++j) {
            const StateV& us = u[j];
            for (std::size_t x = 0; x < n; ++x) {
                const double s = std::max(us.S[x], 0.0);
                const double e = std::max(us.E[x], 0.0);
                const double i = std::max(us.I[x], 0.0);
                const double r = std::max(us.R[x], 0.0);
                const double inc = incidence(s, e, i, r, coeffs.alpha[x]);
                conv.S[x] += (coeffs.Lambda[x] - coeffs.mu1[x] * s - inc +
                              coeffs.beta[x] * r) * dt + s * frozen_noise[j][0][x];
                conv.E[x] += (-coeffs.mu2[x] * e + inc - coeffs.sigma[x] * e) * dt +
                             e * frozen_noise[j][1][x];
                conv.I[x] += (-coeffs.mu3[x] * i + coeffs.sigma[x] * e -
                              coeffs.gamma[x] * i) * dt + i * frozen_noise[j][2][x];
                conv.R[x] += (-coeffs.mu4[x] * r + coeffs.gamma[x] * i -
                              coeffs.beta[x] * r) * dt + r * frozen_noise[j][3][x];
            }
            semigroup_step(conv);
            next[j + 1] = base[j + 1];
            for (int i = 0; i < 4; ++i) {
                Field& f = next[j + 1].component(i);
                const Field& cv = conv.component(i);
                for (std::size_t x = 0; x < n; ++x) f[x] += cv[x];
            }
        }

        double diff = 0.0;
        for (int j = 0; j <= K; ++j)
            for (int i = 0; i < 4; ++i) {
                const Field& a = next[j].component(i);
                const Field& b = u[j].component(i);
                for (std::size_t x = 0; x < n; ++x)
                    diff = std::max(diff, std::abs(a[x] - b[x]));
            }
        u.swap(next);
        result.iterations = m + 1;
        if (!result.diffs.empty() && result.diffs.back() > 0.0) {
            const double ratio = diff / result.diffs.back();
            result.ratios.push_back(ratio);
            consecutive_expanding = ratio >= 1.0 ? consecutive_expanding + 1 : 0;
        }
        result.diffs.push_back(diff);
        if (diff <= config.tolerance) {
            result.converged = true;
            break;
        }
        if (consecutive_expanding >= 3) {
            result.contraction_failure = true;
            break;
        }
    }

    result.iterate = std::move(u);
    return result;
}

}  // namespace seirs
