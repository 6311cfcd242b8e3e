// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace seirs {

/// A scalar field sampled on the nodes of a DomainGrid, stored flat
/// (row-major in 2D: node = iy * N + ix).
using Field = std::vector<double>;

/// Uniform vertex-centered grid on the unit interval [0,1] or unit square
/// [0,1]^2, so the domain always has measure 1. Spatial integrals use
/// trapezoidal quadrature; the axis weights are cached at construction.
class DomainGrid {
public:
    DomainGrid(int dimension, int points_per_axis)
        : dimension_(dimension), n_(points_per_axis) {
        if (dimension != 1 && dimension != 2)
            throw std::invalid_argument("DomainGrid: dimension must be 1 or 2");
        if (points_per_axis < 2)
            throw std::invalid_argument("DomainGrid: points_per_axis must be >= 2");
        const double h = 1.0 / (n_ - 1);
        axis_weights_.resize(n_, h);
        axis_weights_.front() = 0.5 * h;
        axis_weights_.back() = 0.5 * h;
        if (dimension_ == 1) {
            node_weights_ = axis_weights_;
        } else {
            node_weights_.resize(num_nodes());
            for (int iy = 0; iy < n_; ++iy)
                for (int ix = 0; ix < n_; ++ix)
                    node_weights_[static_cast<std::size_t>(iy) * n_ + ix] =
                        axis_weights_[iy] * axis_weights_[ix];
        }
    }

    static DomainGrid interval(int points_per_axis) { return {1, points_per_axis}; }
    static DomainGrid square(int points_per_axis) { return {2, points_per_axis}; }

    int dimension() const { return dimension_; }
    int points_per_axis() const { return n_; }
    std::size_t num_nodes() const {
        return dimension_ == 1 ? static_cast<std::size_t>(n_)
                               : static_cast<std::size_t>(n_) * n_;
    }
    double spacing() const { return 1.0 / (n_ - 1); }

    /// Coordinate of node index i along one axis.
    double axis_coord(int i) const { return static_cast<double>(i) / (n_ - 1); }

    /// x coordinate of a flat node index.
    double x(std::size_t node) const {
        return axis_coord(static_cast<int>(node % n_));
    }
    /// y coordinate of a flat node index (0 in 1D).
    double y(std::size_t node) const {
        return dimension_ == 1 ? 0.0 : axis_coord(static_cast<int>(node / n_));
    }

    const std::vector<double>& node_weights() const { return node_weights_; }
    const std::vector<double>& axis_weights() const { return axis_weights_; }

    /// Trapezoidal quadrature of a field over the domain.
    double integrate(const Field& u) const {
        require_match(u, "integrate");
        double s = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j) s += node_weights_[j] * u[j];
        return s;
    }

    Field constant(double value) const { return Field(num_nodes(), value); }

    void require_match(const Field& u, const char* where) const {
        if (u.size() != num_nodes())
            throw std::invalid_argument(std::string(where) +
                                        ": field size does not match grid");
    }

    bool operator==(const DomainGrid& other) const {
        return dimension_ == other.dimension_ && n_ == other.n_;
    }

private:
    int dimension_;
    int n_;
    std::vector<double> axis_weights_;
    std::vector<double> node_weights_;
};

inline double sup_norm(const Field& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

inline double min_value(const Field& u) {
    double m = u.empty() ? 0.0 : u.front();
    for (double v : u) m = std::min(m, v);
    return m;
}

inline double max_value(const Field& u) {
    double m = u.empty() ? 0.0 : u.front();
    for (double v : u) m = std::max(m, v);
    return m;
}

inline bool all_finite(const Field& u) {
    for (double v : u)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace seirs
