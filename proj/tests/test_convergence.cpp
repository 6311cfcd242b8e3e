// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "seirs/convergence.hpp"

using namespace seirs;

namespace {

ConvergenceProblem standard_problem(const DomainGrid& grid) {
    ConvergenceProblem prob;
    prob.initial = StateV::constant(grid.num_nodes(), 0.7, 0.1, 0.15, 0.05);
    prob.coeffs = CoefficientSet::homogeneous(grid.num_nodes(), 0.5, 0.1, 0.8, 0.2,
                                              0.3, 0.4, 0.05);
    prob.noise = NoiseSpec::zero(0);
    prob.scheme.t_final = 1.0;
    return prob;
}

}  // namespace

TEST_CASE("deterministic dt study shows first order") {
    DomainGrid grid = DomainGrid::interval(32);
    SpectralBasis basis(grid, 32);
    ConvergenceProblem prob = standard_problem(grid);

    std::vector<double> dts;
    for (int k = 4; k <= 10; ++k) dts.push_back(std::pow(2.0, -k));
    ConvergenceTable table = dt_convergence_study(prob, basis, dts, 1, 1, 1);

    CHECK(table.levels.size() == dts.size() - 1);
    for (std::size_t l = 1; l < table.levels.size(); ++l)
        CHECK(table.levels[l].estimate < table.levels[l - 1].estimate);
    CHECK(table.slope >= 0.9);
    CHECK(table.slope <= 1.2);
}

TEST_CASE("GBM dt study has strong order about one half") {
    DomainGrid grid = DomainGrid::interval(16);
    SpectralBasis basis(grid, 16);
    ConvergenceProblem prob;
    prob.initial = StateV::zero(grid.num_nodes());
    prob.initial.I = grid.constant(1.0);
    prob.coeffs = CoefficientSet::homogeneous(grid.num_nodes(), 0, 0, 0, 0, 0, 0, 0.1);
    for (double& v : prob.coeffs.mu3) v = 1.0;
    prob.noise = NoiseSpec::zero(1);
    prob.noise.weights[2][0] = 0.2;
    prob.scheme.t_final = 1.0;

    std::vector<double> dts;
    for (int k = 6; k <= 10; ++k) dts.push_back(std::pow(2.0, -k));
    ConvergenceTable table = dt_convergence_study(prob, basis, dts, 200, 77, 2);

    for (std::size_t l = 1; l < table.levels.size(); ++l)
        CHECK(table.levels[l].estimate < table.levels[l - 1].estimate);
    CHECK(table.slope >= 0.35);
    CHECK(table.slope <= 1.2);
}

TEST_CASE("truncation study decreases within noise") {
    DomainGrid grid = DomainGrid::interval(64);
    SpectralBasis basis(grid, 64);
    ConvergenceProblem prob = standard_problem(grid);
    prob.noise = NoiseSpec::uniform(NoiseSpec::geometric_weights(1.0, 0.5, 32));
    prob.scheme.dt = 1e-3;

    ConvergenceTable table =
        n_convergence_study(prob, basis, {4, 8, 16, 32}, 100, 1234, 2);
    REQUIRE(table.levels.size() == 3);
    // Decreasing within 2 paired standard errors.
    for (std::size_t l = 1; l < table.levels.size(); ++l) {
        const auto& a = table.levels[l - 1];
        const auto& b = table.levels[l];
        double mean_diff = 0.0;
        std::vector<double> diffs(a.per_path.size());
        for (std::size_t p = 0; p < diffs.size(); ++p) {
            diffs[p] = a.per_path[p] - b.per_path[p];
            mean_diff += diffs[p];
        }
        mean_diff /= static_cast<double>(diffs.size());
        double var = 0.0;
        for (double d : diffs) var += (d - mean_diff) * (d - mean_diff);
        var /= static_cast<double>(diffs.size() - 1);
        const double se = std::sqrt(var / static_cast<double>(diffs.size()));
        CHECK(mean_diff >= -2.0 * se);
    }
    // The tail of a geometric weight sequence vanishes fast: expect a clear
    // drop from n = 4 to n = 16.
    CHECK(table.levels.front().estimate > table.levels.back().estimate);
}

TEST_CASE("convergence studies validate their inputs") {
    DomainGrid grid = DomainGrid::interval(16);
    SpectralBasis basis(grid, 16);
    ConvergenceProblem prob = standard_problem(grid);

    CHECK_THROWS_AS(dt_convergence_study(prob, basis, {0.1}, 4, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(dt_convergence_study(prob, basis, {0.1, 0.03}, 4, 1, 1),
                    std::invalid_argument);  // not an integer multiple
    CHECK_THROWS_AS(dt_convergence_study(prob, basis, {0.05, 0.1}, 4, 1, 1),
                    std::invalid_argument);  // not decreasing

    prob.noise = NoiseSpec::uniform(NoiseSpec::geometric_weights(1.0, 0.5, 8));
    CHECK_THROWS_AS(n_convergence_study(prob, basis, {4, 16}, 4, 1, 1),
                    std::invalid_argument);  // 16 > configured 8
    CHECK_THROWS_AS(n_convergence_study(prob, basis, {8}, 4, 1, 1),
                    std::invalid_argument);
}
