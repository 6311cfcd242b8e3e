// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "seirs/field.hpp"
#include "seirs/noise.hpp"

namespace seirs {

/// The four compartment densities at one time instant.
struct StateV {
    Field S, E, I, R;

    Field& component(int i) {
        switch (i) {
            case 0: return S;
            case 1: return E;
            case 2: return I;
            default: return R;
        }
    }
    const Field& component(int i) const {
        return const_cast<StateV*>(this)->component(i);
    }

    std::size_t nodes() const { return S.size(); }

    static StateV zero(std::size_t nodes) {
        StateV v;
        v.S.assign(nodes, 0.0);
        v.E.assign(nodes, 0.0);
        v.I.assign(nodes, 0.0);
        v.R.assign(nodes, 0.0);
        return v;
    }

    static StateV constant(std::size_t nodes, double s, double e, double i, double r) {
        StateV v;
        v.S.assign(nodes, s);
        v.E.assign(nodes, e);
        v.I.assign(nodes, i);
        v.R.assign(nodes, r);
        return v;
    }

    bool nonnegative() const {
        for (int i = 0; i < 4; ++i)
            if (min_value(component(i)) < 0.0) return false;
        return true;
    }

    bool finite() const {
        for (int i = 0; i < 4; ++i)
            if (!all_finite(component(i))) return false;
        return true;
    }

    double sup_norm_all() const {
        double m = 0.0;
        for (int i = 0; i < 4; ++i) m = std::max(m, sup_norm(component(i)));
        return m;
    }

    double min_all() const {
        double m = min_value(S);
        m = std::min(m, min_value(E));
        m = std::min(m, min_value(I));
        return std::min(m, min_value(R));
    }
};

inline const char* compartment_name(int i) {
    constexpr const char* names[4] = {"S", "E", "I", "R"};
    return names[i];
}

/// The nine nonnegative reaction-coefficient fields and four diffusivities.
struct CoefficientSet {
    Field Lambda;                 // recruitment (density / time)
    Field mu1, mu2, mu3, mu4;     // death rates
    Field alpha;                  // infection rate
    Field beta;                   // immunity-loss rate
    Field gamma;                  // recovery rate
    Field sigma;                  // exposed -> infected progression rate
    double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;

    double diffusivity(int i) const {
        switch (i) {
            case 0: return k1;
            case 1: return k2;
            case 2: return k3;
            default: return k4;
        }
    }

    static CoefficientSet homogeneous(std::size_t nodes, double lambda, double mu,
                                      double alpha, double beta, double gamma,
                                      double sigma, double diffusivity) {
        CoefficientSet c;
        c.Lambda.assign(nodes, lambda);
        c.mu1.assign(nodes, mu);
        c.mu2.assign(nodes, mu);
        c.mu3.assign(nodes, mu);
        c.mu4.assign(nodes, mu);
        c.alpha.assign(nodes, alpha);
        c.beta.assign(nodes, beta);
        c.gamma.assign(nodes, gamma);
        c.sigma.assign(nodes, sigma);
        c.k1 = c.k2 = c.k3 = c.k4 = diffusivity;
        return c;
    }

    void validate(std::size_t nodes) const {
        const std::array<const Field*, 9> fields = {&Lambda, &mu1, &mu2, &mu3, &mu4,
                                                    &alpha,  &beta, &gamma, &sigma};
        const std::array<const char*, 9> names = {"Lambda", "mu1", "mu2",
                                                  "mu3",    "mu4", "alpha",
                                                  "beta",   "gamma", "sigma"};
        for (std::size_t f = 0; f < fields.size(); ++f) {
            if (fields[f]->size() != nodes)
                throw std::invalid_argument(std::string("CoefficientSet: field ") +
                                            names[f] + " does not match grid");
            if (min_value(*fields[f]) < 0.0 || !all_finite(*fields[f]))
                throw std::invalid_argument(std::string("CoefficientSet: field ") +
                                            names[f] + " must be nonnegative");
        }
        for (int i = 0; i < 4; ++i)
            if (!(diffusivity(i) > 0.0))
                throw std::invalid_argument("CoefficientSet: diffusivities must be > 0");
    }
};

/// Standard incidence alpha * S * I / (S + E + I + R), with the convention
/// that the term is 0 whenever S = 0 or I = 0 (which covers the 0/0 case).
inline double incidence(double s, double e, double i, double r, double alpha) {
    if (s == 0.0 || i == 0.0) return 0.0;
    return alpha * s * i / (s + e + i + r);
}

/// Pointwise reaction drift G(V); components sum to
/// Lambda - mu1 S - mu2 E - mu3 I - mu4 R (all transfer terms cancel).
/// The state must be nonnegative; clamping is the integrator's job.
inline StateV reaction_drift(const StateV& state, const CoefficientSet& coeffs) {
    const std::size_t n = state.nodes();
    coeffs.validate(n);
    if (!state.nonnegative())
        throw std::invalid_argument("reaction_drift: state has negative entries");
    StateV g = StateV::zero(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = state.S[j], e = state.E[j], i = state.I[j], r = state.R[j];
        const double inc = incidence(s, e, i, r, coeffs.alpha[j]);
        g.S[j] = coeffs.Lambda[j] - coeffs.mu1[j] * s - inc + coeffs.beta[j] * r;
        g.E[j] = -coeffs.mu2[j] * e + inc - coeffs.sigma[j] * e;
        g.I[j] = -coeffs.mu3[j] * i + coeffs.sigma[j] * e - coeffs.gamma[j] * i;
        g.R[j] = -coeffs.mu4[j] * r + coeffs.gamma[j] * i - coeffs.beta[j] * r;
    }
    return g;
}

enum class Regime { PermanenceCandidate, Extinction, Indeterminate };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::PermanenceCandidate: return "permanence-candidate";
        case Regime::Extinction: return "extinction";
        default: return "indeterminate";
    }
}

/// Threshold quantities controlling the longtime behavior.
struct ThresholdReport {
    double Lambda_star = 0.0;          // inf of the recruitment rate
    double R_hat = 0.0;                // permanence index
    double a_tilde = 0.0;              // max{a_2, a_3} noise traces
    double mu3_gamma_alpha_star = 0.0; // inf of mu3 + gamma - alpha
    double mu2_star = 0.0;             // inf of mu2
    double m = 0.0;                    // extinction rate bound
    bool alpha_ge_gamma = false;       // alpha - gamma >= 0 everywhere
    Regime predicted = Regime::Indeterminate;
};

/// Infima are discretized as minima over grid nodes; the R_hat integral uses
/// the grid's trapezoidal quadrature.
inline ThresholdReport compute_thresholds(const CoefficientSet& coeffs,
                                          const NoiseSpec& noise,
                                          const DomainGrid& grid) {
    coeffs.validate(grid.num_nodes());
    noise.validate();
    ThresholdReport rep;
    rep.Lambda_star = min_value(coeffs.Lambda);
    rep.a_tilde = std::max(noise.trace(1), noise.trace(2));

    double integral = 0.0;
    double min_ext = std::numeric_limits<double>::infinity();
    bool alpha_ge_gamma = true;
    for (std::size_t j = 0; j < grid.num_nodes(); ++j) {
        integral += grid.node_weights()[j] *
                    (0.5 * coeffs.alpha[j] -
                     (coeffs.mu2[j] + coeffs.mu3[j] + coeffs.gamma[j]));
        min_ext = std::min(min_ext,
                           coeffs.mu3[j] + coeffs.gamma[j] - coeffs.alpha[j]);
        if (coeffs.alpha[j] < coeffs.gamma[j]) alpha_ge_gamma = false;
    }
    rep.R_hat = integral - 0.5 * rep.a_tilde;
    rep.mu3_gamma_alpha_star = min_ext;
    rep.mu2_star = min_value(coeffs.mu2);
    rep.m = std::min(rep.mu3_gamma_alpha_star, rep.mu2_star);
    rep.alpha_ge_gamma = alpha_ge_gamma;

    if (rep.mu3_gamma_alpha_star > 0.0 && rep.mu2_star > 0.0)
        rep.predicted = Regime::Extinction;
    else if (rep.Lambda_star > 0.0 && rep.R_hat > 0.0 && alpha_ge_gamma)
        rep.predicted = Regime::PermanenceCandidate;
    else
        rep.predicted = Regime::Indeterminate;
    return rep;
}

/// Pointwise running hypotheses of the permanence sufficient condition,
/// evaluated on one state. Fractions are quadrature measures in [0, 1];
/// nodes where a condition's denominator vanishes count as undefined, not
/// violated.
struct HypothesisReport {
    // 0: alpha - gamma >= 0
    // 1: (S+R)/(I+E) <= (S+R+I+E)/2     where I+E > 0
    // 2: S/(S+R+I+E) > gamma/alpha      where the denominator (and alpha) > 0
    std::array<double, 3> violated_fraction{};
    std::array<double, 3> undefined_fraction{};
};

inline HypothesisReport check_permanence_hypotheses(const StateV& state,
                                                    const CoefficientSet& coeffs,
                                                    const DomainGrid& grid) {
    HypothesisReport rep;
    for (std::size_t j = 0; j < grid.num_nodes(); ++j) {
        const double w = grid.node_weights()[j];
        const double s = state.S[j], e = state.E[j], i = state.I[j], r = state.R[j];
        const double infected = i + e;
        const double total = s + r + infected;

        if (coeffs.alpha[j] - coeffs.gamma[j] < 0.0) rep.violated_fraction[0] += w;

        if (infected > 0.0) {
            if ((s + r) / infected > 0.5 * total) rep.violated_fraction[1] += w;
        } else {
            rep.undefined_fraction[1] += w;
        }

        if (total > 0.0 && coeffs.alpha[j] > 0.0) {
            if (!(s / total > coeffs.gamma[j] / coeffs.alpha[j]))
                rep.violated_fraction[2] += w;
        } else {
            rep.undefined_fraction[2] += w;
        }
    }
    return rep;
}

}  // namespace seirs
