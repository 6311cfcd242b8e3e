// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "seirs/model.hpp"
#include "seirs/util.hpp"

namespace seirs {

/// Quadrature of S + E + I + R over the domain.
inline double total_mass(const StateV& v, const DomainGrid& grid) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.num_nodes(); ++j)
        s += grid.node_weights()[j] * (v.S[j] + v.E[j] + v.I[j] + v.R[j]);
    return s;
}

/// Quadrature of I + E.
inline double infected_mass(const StateV& v, const DomainGrid& grid) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.num_nodes(); ++j)
        s += grid.node_weights()[j] * (v.I[j] + v.E[j]);
    return s;
}

/// Inner integral of the permanence statistic: quadrature of (I+E)^2 ^ 1.
/// The square root belongs outside the ensemble expectation and is applied
/// by the ensemble layer, matching the (E integral)^{1/2} ordering.
inline double permanence_inner(const StateV& v, const DomainGrid& grid) {
    double s = 0.0;
    for (std::size_t j = 0; j < grid.num_nodes(); ++j) {
        const double ie = v.I[j] + v.E[j];
        s += grid.node_weights()[j] * std::min(ie * ie, 1.0);
    }
    return s;
}

/// Quadrature of 1/(S+R)^p. Returns +infinity (and sets *hit_zero) when some
/// node has S + R <= 0; never throws for that.
inline double inverse_moment(const StateV& v, const DomainGrid& grid, double p,
                             bool* hit_zero = nullptr) {
    if (!(p > 0.0)) throw std::invalid_argument("inverse_moment: p must be > 0");
    if (hit_zero) *hit_zero = false;
    double s = 0.0;
    for (std::size_t j = 0; j < grid.num_nodes(); ++j) {
        const double sr = v.S[j] + v.R[j];
        if (sr <= 0.0) {
            if (hit_zero) *hit_zero = true;
            return std::numeric_limits<double>::infinity();
        }
        s += grid.node_weights()[j] * std::pow(sr, -p);
    }
    return s;
}

struct FunctionalSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
};

/// Running time averages (1/(t - t_0)) integral of the series (trapezoid);
/// the value at the first time is the series value there.
inline FunctionalSeries time_average(const FunctionalSeries& series) {
    if (series.times.empty())
        throw std::invalid_argument("time_average: empty series");
    FunctionalSeries out;
    out.name = series.name + "_running_avg";
    out.times = series.times;
    out.values.resize(series.values.size());
    out.values[0] = series.values[0];
    double integral = 0.0;
    for (std::size_t i = 1; i < series.times.size(); ++i) {
        const double dt = series.times[i] - series.times[i - 1];
        integral += 0.5 * dt * (series.values[i] + series.values[i - 1]);
        const double span = series.times[i] - series.times[0];
        out.values[i] = integral / span;
    }
    return out;
}

struct RateFit {
    double rate = 0.0;      // decay rate (negated log-slope), 1/time
    double t_lo = 0.0, t_hi = 0.0;  // window actually used
    double r_squared = 0.0;
    double rate_se = 0.0;
    bool window_shrunk = false;  // nonpositive values trimmed from the window
    int points = 0;
};

/// Least-squares exponential rate of a positive series over [t_lo, t_hi].
/// A nonpositive value inside the window shrinks it to the positive prefix.
inline RateFit fit_exponential_rate(const FunctionalSeries& series, double t_lo,
                                    double t_hi) {
    if (!(t_lo < t_hi))
        throw std::invalid_argument("fit_exponential_rate: empty window");
    std::vector<double> ts, logs;
    RateFit out;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < t_lo || t > t_hi) continue;
        if (!(series.values[i] > 0.0)) {
            out.window_shrunk = true;
            out.t_hi = ts.empty() ? t_lo : ts.back();
            break;
        }
        ts.push_back(t);
        logs.push_back(std::log(series.values[i]));
    }
    const LinearFit fit = linear_fit(ts, logs);
    out.rate = -fit.slope;
    out.r_squared = fit.r_squared;
    out.rate_se = fit.slope_se;
    out.points = fit.points;
    return out;
}

struct MassBoundRow {
    double t = 0.0;
    double mean = 0.0;
    double envelope = 0.0;       // Gronwall: M0 e^{-mu* t} + supL (1-e^{-mu* t})/mu*
    double printed_bound = 0.0;  // M0 + supL e^{+mu* t} / mu* (as printed)
    double slack = 0.0;          // envelope - mean
    double slack_printed = 0.0;
};

struct MassBoundReport {
    bool applicable = false;  // mu_* > 0
    double mu_star = 0.0;
    double lambda_sup = 0.0;
    std::vector<MassBoundRow> rows;
};

/// Compares a total-mass mean series with the Gronwall envelope implied by
/// mu_* > 0, and with the looser growing bound as printed. M(0) is the first
/// series value; times are measured from the first entry.
inline MassBoundReport check_mass_bound(const FunctionalSeries& mean_mass,
                                        const CoefficientSet& coeffs,
                                        const DomainGrid& grid) {
    if (mean_mass.times.empty())
        throw std::invalid_argument("check_mass_bound: empty series");
    MassBoundReport rep;
    double mu_star = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid.num_nodes(); ++j)
        mu_star = std::min({mu_star, coeffs.mu1[j], coeffs.mu2[j], coeffs.mu3[j],
                            coeffs.mu4[j]});
    rep.mu_star = mu_star;
    rep.lambda_sup = max_value(coeffs.Lambda);
    if (!(mu_star > 0.0)) return rep;  // bound not applicable, reported skipped
    rep.applicable = true;

    const double m0 = mean_mass.values.front();
    const double t0 = mean_mass.times.front();
    for (std::size_t i = 0; i < mean_mass.times.size(); ++i) {
        MassBoundRow row;
        row.t = mean_mass.times[i];
        row.mean = mean_mass.values[i];
        const double dt = row.t - t0;
        const double decay = std::exp(-mu_star * dt);
        row.envelope = m0 * decay + rep.lambda_sup * (1.0 - decay) / mu_star;
        row.printed_bound = m0 + rep.lambda_sup * std::exp(mu_star * dt) / mu_star;
        row.slack = row.envelope - row.mean;
        row.slack_printed = row.printed_bound - row.mean;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace seirs
