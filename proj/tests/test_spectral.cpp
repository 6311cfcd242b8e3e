// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "seirs/field.hpp"
#include "seirs/spectral.hpp"

using namespace seirs;

namespace {

// Random field in the span of the basis, reproducible.
Field random_span_field(const SpectralBasis& basis, std::mt19937& gen,
                        int max_mode = -1) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const int kmax = max_mode < 0 ? basis.num_modes() : max_mode;
    std::vector<double> coeffs(basis.num_modes(), 0.0);
    for (int k = 0; k < kmax; ++k) coeffs[k] = normal(gen);
    return basis.inverse(coeffs);
}

double quadrature_inner(const DomainGrid& grid, const Field& a, const Field& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += grid.node_weights()[j] * a[j] * b[j];
    return s;
}

}  // namespace

TEST_CASE("grid basics") {
    DomainGrid grid = DomainGrid::interval(64);
    CHECK(grid.num_nodes() == 64);
    CHECK(grid.spacing() == Catch::Approx(1.0 / 63.0));
    // |L| = 1: the quadrature weights sum to the domain measure.
    CHECK(grid.integrate(grid.constant(1.0)) == Catch::Approx(1.0).epsilon(1e-14));

    DomainGrid sq = DomainGrid::square(17);
    CHECK(sq.num_nodes() == 289);
    CHECK(sq.integrate(sq.constant(1.0)) == Catch::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(DomainGrid(3, 8), std::invalid_argument);
    CHECK_THROWS_AS(DomainGrid(1, 1), std::invalid_argument);
}

TEST_CASE("constant Neumann mode") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 1);
    Field e0 = basis.eigenfunction(0);
    for (double v : e0) CHECK(v == 1.0);
    CHECK(basis.eigenvalue(0) == 0.0);
}

TEST_CASE("discrete orthonormality") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 8);
    Field e3 = basis.eigenfunction(3);
    Field e5 = basis.eigenfunction(5);
    CHECK(std::abs(quadrature_inner(grid, e3, e5)) < 1e-10);
    CHECK(std::abs(quadrature_inner(grid, e3, e3) - 1.0) < 1e-10);

    // Full cross check over all pairs, including the top (alternating) mode.
    SpectralBasis full(grid, 64);
    for (int j = 0; j < 64; j += 7)
        for (int k = 0; k < 64; k += 5) {
            double ip = quadrature_inner(grid, full.eigenfunction(j),
                                         full.eigenfunction(k));
            CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("sup bound C0") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 8);
    // Oracle: direct max over the sampled eigenfunction values.
    double direct = 0.0;
    for (int k = 0; k < 8; ++k) direct = std::max(direct, sup_norm(basis.eigenfunction(k)));
    CHECK(basis.sup_bound() == Catch::Approx(direct).epsilon(1e-14));
    CHECK(basis.sup_bound() == Catch::Approx(std::numbers::sqrt2).epsilon(1e-12));

    SpectralBasis only_constant(grid, 1);
    CHECK(only_constant.sup_bound() == 1.0);

    DomainGrid sq = DomainGrid::square(17);
    SpectralBasis basis2(sq, 16);
    CHECK(basis2.sup_bound() == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("eigenvalues strictly increasing in 1D") {
    DomainGrid grid = DomainGrid::interval(32);
    SpectralBasis basis(grid, 32);
    for (int k = 1; k < basis.num_modes(); ++k) {
        CHECK(basis.eigenvalue(k) > basis.eigenvalue(k - 1));
        const double kpi = k * std::numbers::pi;
        CHECK(basis.eigenvalue(k) == Catch::Approx(kpi * kpi).epsilon(1e-14));
    }
}

TEST_CASE("aliasing rejected") {
    DomainGrid grid = DomainGrid::interval(16);
    CHECK_THROWS_AS(SpectralBasis(grid, 17), std::invalid_argument);
    CHECK_THROWS_AS(SpectralBasis(grid, 0), std::invalid_argument);
    CHECK_NOTHROW(SpectralBasis(grid, 16));
    DomainGrid sq = DomainGrid::square(8);
    CHECK_THROWS_AS(SpectralBasis(sq, 65), std::invalid_argument);
    CHECK_NOTHROW(SpectralBasis(sq, 64));
}

TEST_CASE("forward transform picks out basis elements") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 8);
    auto coeffs = basis.forward(basis.eigenfunction(3));
    for (int k = 0; k < 8; ++k)
        CHECK(std::abs(coeffs[k] - (k == 3 ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("roundtrip identity on the span") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 24);
    std::mt19937 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        Field u = random_span_field(basis, gen);
        Field back = basis.inverse(basis.forward(u));
        double err = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j)
            err = std::max(err, std::abs(u[j] - back[j]));
        CHECK(err <= 1e-10);
    }
}

TEST_CASE("Parseval on x^2") {
    // Grid fine enough that the 32-mode truncation tail, not aliasing,
    // dominates the defect.
    DomainGrid grid = DomainGrid::interval(256);
    SpectralBasis basis(grid, 32);
    Field u(grid.num_nodes());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = grid.x(j) * grid.x(j);
    double norm2 = quadrature_inner(grid, u, u);
    auto coeffs = basis.forward(u);
    double sum2 = 0.0;
    for (double c : coeffs) sum2 += c * c;
    CHECK(std::abs(norm2 - sum2) < 1e-6);
}

TEST_CASE("transform errors") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 8);
    Field wrong(32, 1.0);
    CHECK_THROWS_AS(basis.forward(wrong), std::invalid_argument);
    std::vector<double> bad_coeffs(9, 0.0);
    CHECK_THROWS_AS(basis.inverse(bad_coeffs), std::invalid_argument);
}

TEST_CASE("semigroup identity and constants") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 32);
    std::mt19937 gen(11);
    Field u = random_span_field(basis, gen);
    Field same = basis.apply_semigroup(u, 0.3, 0.0);
    CHECK(same == u);  // t = 0 is the exact identity

    Field c = grid.constant(2.5);
    Field after = basis.apply_semigroup(c, 0.3, 1.7);
    for (double v : after) CHECK(v == Catch::Approx(2.5).epsilon(1e-14));

    CHECK_THROWS_AS(basis.apply_semigroup(u, 0.3, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(basis.apply_semigroup(u, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("semigroup eigenmode decay") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 8);
    Field e1 = basis.eigenfunction(1);
    Field decayed = basis.apply_semigroup(e1, 0.1, 1.0);
    const double factor = std::exp(-0.1 * std::numbers::pi * std::numbers::pi);
    CHECK(factor == Catch::Approx(0.372708).epsilon(1e-5));
    for (std::size_t j = 0; j < e1.size(); ++j)
        CHECK(decayed[j] == Catch::Approx(factor * e1[j]).margin(1e-12));
}

TEST_CASE("semigroup composition property") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 24);
    std::mt19937 gen(23);
    std::uniform_real_distribution<double> ut(0.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        Field u = random_span_field(basis, gen);
        double s = ut(gen), t = ut(gen), k = 0.05 + 0.2 * ut(gen);
        Field two_step = basis.apply_semigroup(basis.apply_semigroup(u, k, s), k, t);
        Field one_step = basis.apply_semigroup(u, k, s + t);
        for (std::size_t j = 0; j < u.size(); ++j)
            CHECK(std::abs(two_step[j] - one_step[j]) <= 1e-10);
    }
}

TEST_CASE("semigroup conserves mass") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 32);
    std::mt19937 gen(31);
    for (int trial = 0; trial < 10; ++trial) {
        Field u = random_span_field(basis, gen);
        Field v = basis.apply_semigroup(u, 0.2, 1.3);
        CHECK(std::abs(grid.integrate(v) - grid.integrate(u)) <= 1e-10);
    }
}

TEST_CASE("semigroup sup-norm contraction") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 16);
    std::mt19937 gen(43);
    std::uniform_real_distribution<double> ut(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Field u = random_span_field(basis, gen, 8);
        double t = ut(gen);
        Field v = basis.apply_semigroup(u, 0.1, t);
        CHECK(sup_norm(v) <= (1.0 + 1e-10) * sup_norm(u));
    }
}

TEST_CASE("semigroup keeps resolved nonnegative data nonnegative") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 16);
    // 1 + 0.6 e_1 / sqrt(2)-ish stays well above zero.
    std::vector<double> coeffs(16, 0.0);
    coeffs[0] = 1.0;
    coeffs[1] = 0.4;
    coeffs[3] = 0.2;
    Field u = basis.inverse(coeffs);
    REQUIRE(min_value(u) >= 0.0);
    for (double t : {0.01, 0.1, 0.5, 2.0}) {
        Field v = basis.apply_semigroup(u, 0.15, t);
        CHECK(min_value(v) >= -1e-8 * sup_norm(u));
    }
}

TEST_CASE("2D tensor basis") {
    DomainGrid sq = DomainGrid::square(17);
    SpectralBasis basis(sq, 25);

    // Orthonormality across a sample of mode pairs.
    for (int j : {0, 1, 4, 9, 24})
        for (int k : {0, 2, 7, 24}) {
            double ip = quadrature_inner(sq, basis.eigenfunction(j),
                                         basis.eigenfunction(k));
            CHECK(std::abs(ip - (j == k ? 1.0 : 0.0)) < 1e-10);
        }

    // Eigenvalues sorted ascending, first is the constant.
    CHECK(basis.eigenvalue(0) == 0.0);
    CHECK(basis.mode_kx(0) == 0);
    CHECK(basis.mode_ky(0) == 0);
    for (int k = 1; k < basis.num_modes(); ++k)
        CHECK(basis.eigenvalue(k) >= basis.eigenvalue(k - 1));

    // Mode (1,1) decays with lambda = 2 pi^2.
    int k11 = -1;
    for (int k = 0; k < basis.num_modes(); ++k)
        if (basis.mode_kx(k) == 1 && basis.mode_ky(k) == 1) k11 = k;
    REQUIRE(k11 >= 0);
    Field e = basis.eigenfunction(k11);
    Field v = basis.apply_semigroup(e, 0.05, 0.7);
    const double factor =
        std::exp(-0.05 * 2.0 * std::numbers::pi * std::numbers::pi * 0.7);
    for (std::size_t j = 0; j < e.size(); ++j)
        CHECK(v[j] == Catch::Approx(factor * e[j]).margin(1e-12));

    // Roundtrip on the span.
    std::mt19937 gen(5);
    Field u = random_span_field(basis, gen);
    Field back = basis.inverse(basis.forward(u));
    for (std::size_t j = 0; j < u.size(); ++j)
        CHECK(std::abs(u[j] - back[j]) <= 1e-10);
}
