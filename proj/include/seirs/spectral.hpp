// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "seirs/field.hpp"

namespace seirs {

/// Neumann-Laplacian eigenbasis on the unit interval / square, sampled on a
/// DomainGrid. In 1D the modes are e_0 = 1 and e_k(x) = sqrt(2) cos(k pi x)
/// with eigenvalue (k pi)^2; in 2D tensor products of the axis modes, sorted
/// by eigenvalue. Normalization is chosen so that the modes are exactly
/// orthonormal under the grid's trapezoidal quadrature (the top axis mode
/// k = N-1 alternates sign node-to-node and carries weight 1, not sqrt(2)).
///
/// The semigroup e^{tA} with A = k * Laplacian acts diagonally on the modes.
/// apply_semigroup decays the resolved coefficients and leaves any
/// unresolved residual of the input untouched, so t = 0 is the identity on
/// every grid field, not just those in the span of the basis.
class SpectralBasis {
public:
    SpectralBasis(const DomainGrid& grid, int num_modes) : grid_(grid) {
        const int n = grid.points_per_axis();
        if (num_modes < 1)
            throw std::invalid_argument("SpectralBasis: num_modes must be >= 1");
        const long max_modes = grid.dimension() == 1
                                   ? static_cast<long>(n)
                                   : static_cast<long>(n) * n;
        if (num_modes > max_modes)
            throw std::invalid_argument(
                "SpectralBasis: num_modes exceeds grid resolution (aliasing)");
        num_modes_ = num_modes;

        const double pi2 = std::numbers::pi * std::numbers::pi;
        if (grid.dimension() == 1) {
            build_axis_rows(num_modes_);
            modes_.reserve(num_modes_);
            for (int k = 0; k < num_modes_; ++k)
                modes_.push_back({k, 0, pi2 * k * k});
        } else {
            std::vector<Mode> all;
            all.reserve(static_cast<std::size_t>(n) * n);
            for (int ky = 0; ky < n; ++ky)
                for (int kx = 0; kx < n; ++kx)
                    all.push_back({kx, ky, pi2 * (static_cast<double>(kx) * kx +
                                                  static_cast<double>(ky) * ky)});
            std::sort(all.begin(), all.end(), [](const Mode& a, const Mode& b) {
                return std::tie(a.lambda, a.kx, a.ky) <
                       std::tie(b.lambda, b.kx, b.ky);
            });
            all.resize(num_modes_);
            modes_ = std::move(all);
            int needed = 0;
            for (const Mode& m : modes_) needed = std::max({needed, m.kx + 1, m.ky + 1});
            build_axis_rows(needed);
        }

        sup_bound_ = 0.0;
        for (const Mode& m : modes_) {
            double s = axis_sup(m.kx) * (grid.dimension() == 2 ? axis_sup(m.ky) : 1.0);
            sup_bound_ = std::max(sup_bound_, s);
        }
    }

    const DomainGrid& grid() const { return grid_; }
    int num_modes() const { return num_modes_; }
    double eigenvalue(int k) const { return modes_[k].lambda; }
    int mode_kx(int k) const { return modes_[k].kx; }
    int mode_ky(int k) const { return modes_[k].ky; }
    /// C_0: sup-norm bound over the included eigenfunctions.
    double sup_bound() const { return sup_bound_; }

    Field eigenfunction(int k) const {
        Field e(grid_.num_nodes(), 0.0);
        add_scaled_eigenfunction(e, k, 1.0);
        return e;
    }

    /// u += scale * e_k. Hot path of the noise sampler.
    void add_scaled_eigenfunction(Field& u, int k, double scale) const {
        const int n = grid_.points_per_axis();
        const Mode& m = modes_[k];
        const double* px = axis_row(m.kx);
        if (grid_.dimension() == 1) {
            for (int j = 0; j < n; ++j) u[j] += scale * px[j];
        } else {
            const double* py = axis_row(m.ky);
            for (int iy = 0; iy < n; ++iy) {
                const double f = scale * py[iy];
                double* row = u.data() + static_cast<std::size_t>(iy) * n;
                for (int ix = 0; ix < n; ++ix) row[ix] += f * px[ix];
            }
        }
    }

    /// Quadrature coefficients <u, e_k> for k = 0..num_modes-1.
    void forward(const Field& u, std::vector<double>& coeffs) const {
        grid_.require_match(u, "forward_transform");
        coeffs.assign(num_modes_, 0.0);
        const int n = grid_.points_per_axis();
        if (grid_.dimension() == 1) {
            for (int k = 0; k < num_modes_; ++k) {
                const double* wrow = weighted_axis_row(k);
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += wrow[j] * u[j];
                coeffs[k] = s;
            }
        } else {
            // Contract x first: rowc[kx][iy] = sum_ix w phi_kx(ix) u(iy, ix).
            const int nkx = axis_count_;
            std::vector<double> rowc(static_cast<std::size_t>(nkx) * n, 0.0);
            for (int kx = 0; kx < nkx; ++kx) {
                const double* wrow = weighted_axis_row(kx);
                for (int iy = 0; iy < n; ++iy) {
                    const double* urow = u.data() + static_cast<std::size_t>(iy) * n;
                    double s = 0.0;
                    for (int ix = 0; ix < n; ++ix) s += wrow[ix] * urow[ix];
                    rowc[static_cast<std::size_t>(kx) * n + iy] = s;
                }
            }
            for (int k = 0; k < num_modes_; ++k) {
                const Mode& m = modes_[k];
                const double* wrow = weighted_axis_row(m.ky);
                const double* rc = rowc.data() + static_cast<std::size_t>(m.kx) * n;
                double s = 0.0;
                for (int iy = 0; iy < n; ++iy) s += wrow[iy] * rc[iy];
                coeffs[k] = s;
            }
        }
    }

    std::vector<double> forward(const Field& u) const {
        std::vector<double> c;
        forward(u, c);
        return c;
    }

    /// Synthesis sum_k coeffs[k] e_k.
    Field inverse(const std::vector<double>& coeffs) const {
        if (coeffs.size() != static_cast<std::size_t>(num_modes_))
            throw std::invalid_argument(
                "inverse_transform: coefficient count does not match basis");
        Field u(grid_.num_nodes(), 0.0);
        for (int k = 0; k < num_modes_; ++k)
            if (coeffs[k] != 0.0) add_scaled_eigenfunction(u, k, coeffs[k]);
        return u;
    }

    /// Per-mode decay increments exp(-diffusivity lambda_k t) - 1 for reuse
    /// across many steps of the same length.
    std::vector<double> semigroup_factors(double diffusivity, double t) const {
        if (t < 0.0)
            throw std::invalid_argument("apply_semigroup: negative time");
        if (diffusivity <= 0.0)
            throw std::invalid_argument("apply_semigroup: diffusivity must be > 0");
        std::vector<double> f(num_modes_);
        for (int k = 0; k < num_modes_; ++k)
            f[k] = std::expm1(-diffusivity * modes_[k].lambda * t);
        return f;
    }

    /// u += sum_k factors[k] <u, e_k> e_k, the resolved part of
    /// (e^{tA} - I) u. The unresolved residual of u is kept as is.
    void apply_semigroup_factors_inplace(Field& u, const std::vector<double>& factors,
                                         std::vector<double>& coeff_scratch) const {
        grid_.require_match(u, "apply_semigroup");
        forward(u, coeff_scratch);
        // k = 0 is the conserved mass mode: factor 0, nothing to add.
        for (int k = 1; k < num_modes_; ++k) {
            const double delta = factors[k] * coeff_scratch[k];
            if (delta != 0.0) add_scaled_eigenfunction(u, k, delta);
        }
    }

    /// Dense nodal form of the resolved-decay update: the matrix
    /// M = sum_k factors[k] e_k w e_k^T, so e^{tA} u = u + M u on the grid.
    /// Only worthwhile in 1D, where it fuses analysis and synthesis into one
    /// cache-resident matrix-vector product.
    std::vector<double> semigroup_matrix(const std::vector<double>& factors) const {
        const int n = grid_.points_per_axis();
        std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
        for (int k = 1; k < num_modes_; ++k) {
            if (factors[k] == 0.0) continue;
            const double* phi = axis_row(modes_[k].kx);
            const double* wphi = weighted_axis_row(modes_[k].kx);
            for (int j = 0; j < n; ++j) {
                const double fj = factors[k] * phi[j];
                double* row = m.data() + static_cast<std::size_t>(j) * n;
                for (int l = 0; l < n; ++l) row[l] += fj * wphi[l];
            }
        }
        return m;
    }

    /// In-place e^{t k Laplacian} u: each resolved coefficient is scaled by
    /// exp(-diffusivity * lambda_k * t); the unresolved residual is kept.
    void apply_semigroup_inplace(Field& u, double diffusivity, double t,
                                 std::vector<double>& coeff_scratch) const {
        const std::vector<double> factors = semigroup_factors(diffusivity, t);
        if (t == 0.0) {
            grid_.require_match(u, "apply_semigroup");
            return;
        }
        if (grid_.dimension() == 1) {
            const std::vector<double> m = semigroup_matrix(factors);
            apply_semigroup_matrix_inplace(u, m, coeff_scratch);
        } else {
            apply_semigroup_factors_inplace(u, factors, coeff_scratch);
        }
    }

    /// u += M u for a matrix from semigroup_matrix(). Shared by the stepper
    /// (cached M) and apply_semigroup (fresh M), so the two stay bit-identical.
    void apply_semigroup_matrix_inplace(Field& u, const std::vector<double>& m,
                                        std::vector<double>& scratch) const {
        grid_.require_match(u, "apply_semigroup");
        const int n = grid_.points_per_axis();
        scratch.resize(n);
        for (int j = 0; j < n; ++j) {
            const double* row = m.data() + static_cast<std::size_t>(j) * n;
            double s = 0.0;
            for (int l = 0; l < n; ++l) s += row[l] * u[l];
            scratch[j] = s;
        }
        for (int j = 0; j < n; ++j) u[j] += scratch[j];
    }

    Field apply_semigroup(const Field& u, double diffusivity, double t) const {
        Field out = u;
        std::vector<double> scratch;
        apply_semigroup_inplace(out, diffusivity, t, scratch);
        return out;
    }

private:
    struct Mode {
        int kx, ky;
        double lambda;
    };

    void build_axis_rows(int count) {
        const int n = grid_.points_per_axis();
        axis_count_ = count;
        axis_phi_.assign(static_cast<std::size_t>(count) * n, 0.0);
        axis_wphi_.assign(static_cast<std::size_t>(count) * n, 0.0);
        const auto& w = grid_.axis_weights();
        for (int k = 0; k < count; ++k) {
            const double norm = (k == 0 || k == n - 1) ? 1.0 : std::numbers::sqrt2;
            for (int j = 0; j < n; ++j) {
                const double x = grid_.axis_coord(j);
                const double v = norm * std::cos(k * std::numbers::pi * x);
                axis_phi_[static_cast<std::size_t>(k) * n + j] = v;
                axis_wphi_[static_cast<std::size_t>(k) * n + j] = w[j] * v;
            }
        }
    }

    const double* axis_row(int k) const {
        return axis_phi_.data() + static_cast<std::size_t>(k) * grid_.points_per_axis();
    }
    const double* weighted_axis_row(int k) const {
        return axis_wphi_.data() + static_cast<std::size_t>(k) * grid_.points_per_axis();
    }
    double axis_sup(int k) const {
        const int n = grid_.points_per_axis();
        return (k == 0 || k == n - 1) ? 1.0 : std::numbers::sqrt2;
    }

    DomainGrid grid_;
    int num_modes_ = 0;
    int axis_count_ = 0;
    std::vector<Mode> modes_;
    std::vector<double> axis_phi_;
    std::vector<double> axis_wphi_;
    double sup_bound_ = 0.0;
};

/// Free-function names matching the operation vocabulary used throughout.
inline SpectralBasis build_basis(const DomainGrid& grid, int num_modes) {
    return SpectralBasis(grid, num_modes);
}

inline std::vector<double> forward_transform(const Field& u, const SpectralBasis& basis) {
    return basis.forward(u);
}

inline Field inverse_transform(const std::vector<double>& coeffs,
                               const SpectralBasis& basis) {
    return basis.inverse(coeffs);
}

inline Field apply_semigroup(const Field& u, double diffusivity, double t,
                             const SpectralBasis& basis) {
    return basis.apply_semigroup(u, diffusivity, t);
}

}  // namespace seirs
