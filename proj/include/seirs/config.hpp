// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "seirs/expression.hpp"
#include "seirs/field.hpp"
#include "seirs/integrator.hpp"
#include "seirs/model.hpp"
#include "seirs/noise.hpp"

namespace seirs {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scalar field given either as a constant or as a closed-form expression
/// in x (and y in 2D), evaluated at the grid nodes.
struct FieldSpec {
    bool is_constant = true;
    double value = 0.0;
    std::string source;  // expression text when not constant

    static FieldSpec constant(double v) {
        FieldSpec f;
        f.value = v;
        return f;
    }
    static FieldSpec expression(std::string text) {
        FieldSpec f;
        f.is_constant = false;
        f.source = std::move(text);
        return f;
    }

    Field sample(const DomainGrid& grid) const {
        if (is_constant) return grid.constant(value);
        const Expression expr = Expression::parse(source);
        Field out(grid.num_nodes());
        for (std::size_t j = 0; j < grid.num_nodes(); ++j)
            out[j] = expr(grid.x(j), grid.y(j));
        return out;
    }

    bool operator==(const FieldSpec& o) const {
        return is_constant == o.is_constant &&
               (is_constant ? value == o.value : source == o.source);
    }
};

/// Noise weight rule per component: zero, explicit list, or geometric decay.
struct WeightRule {
    enum class Kind { Zero, Geometric, List };
    Kind kind = Kind::Zero;
    double a0 = 0.0;
    double ratio = 0.5;
    std::vector<double> values;

    std::vector<double> weights(int n) const {
        switch (kind) {
            case Kind::Zero: return std::vector<double>(n, 0.0);
            case Kind::Geometric: return NoiseSpec::geometric_weights(a0, ratio, n);
            case Kind::List: {
                std::vector<double> w = values;
                w.resize(n, 0.0);  // implicit zero tail
                return w;
            }
        }
        return {};
    }

    bool operator==(const WeightRule& o) const {
        return kind == o.kind && a0 == o.a0 && ratio == o.ratio && values == o.values;
    }
};

enum class RunMode { Simulate, Ensemble, Thresholds, Convergence, Picard };

inline const char* run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::Simulate: return "simulate";
        case RunMode::Ensemble: return "ensemble";
        case RunMode::Thresholds: return "thresholds";
        case RunMode::Convergence: return "convergence";
        default: return "picard";
    }
}

struct ConvergenceConfig {
    std::string study = "dt";  // "dt" or "truncation"
    std::vector<double> dt_levels;
    std::vector<int> n_levels;
    int paths = 100;

    bool operator==(const ConvergenceConfig&) const = default;
};

struct PicardRunConfig {
    double t0 = 0.1;
    int substeps = 20;
    int max_iterations = 50;
    double tolerance = 1e-10;

    bool operator==(const PicardRunConfig&) const = default;
};

struct RunConfig {
    // domain
    int dimension = 1;
    int points_per_axis = 64;
    int basis_modes = 0;  // 0 = full grid resolution

    // coefficients
    FieldSpec Lambda, mu1, mu2, mu3, mu4, alpha, beta, gamma, sigma;
    double k1 = 0.1, k2 = 0.1, k3 = 0.1, k4 = 0.1;

    // noise
    int truncation = 16;
    std::array<WeightRule, 4> noise_weights;

    // scheme
    double dt = 1e-3;
    double t_final = 1.0;
    ClampPolicy clamp_policy = ClampPolicy::Hard;
    double epsilon = 1e-3;
    int record_every = 100;

    // initial data
    FieldSpec S0, E0, I0, R0;

    // run
    RunMode mode = RunMode::Simulate;
    int paths = 1;
    uint64_t seed = 1;
    std::string output_dir = "out";

    ConvergenceConfig convergence;
    PicardRunConfig picard;

    int resolved_basis_modes() const {
        if (basis_modes > 0) return basis_modes;
        return dimension == 1 ? points_per_axis
                              : points_per_axis * points_per_axis;
    }

    SchemeConfig scheme() const {
        SchemeConfig s;
        s.dt = dt;
        s.t_final = t_final;
        s.clamp_policy = clamp_policy;
        s.epsilon = epsilon;
        s.record_every = record_every;
        return s;
    }

    NoiseSpec noise_spec() const {
        NoiseSpec spec;
        for (int i = 0; i < 4; ++i) spec.weights[i] = noise_weights[i].weights(truncation);
        return spec;
    }

    bool operator==(const RunConfig& o) const {
        return dimension == o.dimension && points_per_axis == o.points_per_axis &&
               basis_modes == o.basis_modes && Lambda == o.Lambda && mu1 == o.mu1 &&
               mu2 == o.mu2 && mu3 == o.mu3 && mu4 == o.mu4 && alpha == o.alpha &&
               beta == o.beta && gamma == o.gamma && sigma == o.sigma &&
               k1 == o.k1 && k2 == o.k2 && k3 == o.k3 && k4 == o.k4 &&
               truncation == o.truncation && noise_weights == o.noise_weights &&
               dt == o.dt && t_final == o.t_final &&
               clamp_policy == o.clamp_policy && epsilon == o.epsilon &&
               record_every == o.record_every && S0 == o.S0 && E0 == o.E0 &&
               I0 == o.I0 && R0 == o.R0 && mode == o.mode && paths == o.paths &&
               seed == o.seed && output_dir == o.output_dir &&
               convergence == o.convergence && picard == o.picard;
    }
};

namespace config_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config error at " + path + ": " + why);
}

inline void check_keys(const json& obj, const std::string& path,
                       const std::set<std::string>& allowed) {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) fail(path + "." + item.key(), "unknown key");
}

template <typename T>
T get_number(const json& obj, const std::string& path, const std::string& key,
             T fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required) fail(path + "." + key, "missing required key");
        return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<T>();
}

inline FieldSpec get_field(const json& obj, const std::string& path,
                           const std::string& key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required key");
    const json& v = obj.at(key);
    if (v.is_number()) return FieldSpec::constant(v.get<double>());
    if (v.is_string()) {
        FieldSpec f = FieldSpec::expression(v.get<std::string>());
        try {
            Expression::parse(f.source);
        } catch (const ExpressionError& e) {
            fail(path + "." + key, e.what());
        }
        return f;
    }
    fail(path + "." + key, "expected a number or an expression string");
}

inline WeightRule parse_rule(const json& v, const std::string& path) {
    check_keys(v, path, {"kind", "a0", "ratio", "values"});
    if (!v.contains("kind")) fail(path + ".kind", "missing required key");
    const std::string kind = v.at("kind").get<std::string>();
    WeightRule rule;
    if (kind == "zero") {
        rule.kind = WeightRule::Kind::Zero;
    } else if (kind == "geometric") {
        rule.kind = WeightRule::Kind::Geometric;
        rule.a0 = get_number<double>(v, path, "a0", 0.0, true);
        rule.ratio = get_number<double>(v, path, "ratio", 0.5, true);
        if (rule.a0 < 0.0) fail(path + ".a0", "must be >= 0");
        if (rule.ratio < 0.0) fail(path + ".ratio", "must be >= 0");
    } else if (kind == "list") {
        rule.kind = WeightRule::Kind::List;
        if (!v.contains("values")) fail(path + ".values", "missing required key");
        for (const auto& x : v.at("values")) {
            if (!x.is_number()) fail(path + ".values", "expected numbers");
            rule.values.push_back(x.get<double>());
            if (rule.values.back() < 0.0) fail(path + ".values", "must be >= 0");
        }
    } else {
        fail(path + ".kind", "expected zero | geometric | list");
    }
    return rule;
}

inline json rule_to_json(const WeightRule& rule) {
    json v;
    switch (rule.kind) {
        case WeightRule::Kind::Zero: v["kind"] = "zero"; break;
        case WeightRule::Kind::Geometric:
            v["kind"] = "geometric";
            v["a0"] = rule.a0;
            v["ratio"] = rule.ratio;
            break;
        case WeightRule::Kind::List:
            v["kind"] = "list";
            v["values"] = rule.values;
            break;
    }
    return v;
}

inline json field_to_json(const FieldSpec& f) {
    if (f.is_constant) return json(f.value);
    return json(f.source);
}

}  // namespace config_detail

/// Parses and fully validates a run configuration document. Unknown keys,
/// malformed expressions, and negative coefficient values are all rejected
/// with the offending key path.
inline RunConfig parse_config(const std::string& text) {
    using nlohmann::json;
    using namespace config_detail;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(doc, "config",
               {"domain", "coefficients", "noise", "scheme", "initial", "run",
                "convergence", "picard"});

    RunConfig cfg;

    if (doc.contains("domain")) {
        const json& d = doc.at("domain");
        check_keys(d, "domain", {"dimension", "points_per_axis", "basis_modes"});
        cfg.dimension = get_number<int>(d, "domain", "dimension", 1);
        cfg.points_per_axis = get_number<int>(d, "domain", "points_per_axis", 64);
        cfg.basis_modes = get_number<int>(d, "domain", "basis_modes", 0);
        if (cfg.dimension != 1 && cfg.dimension != 2)
            fail("domain.dimension", "must be 1 or 2");
        if (cfg.points_per_axis < 2) fail("domain.points_per_axis", "must be >= 2");
        if (cfg.basis_modes < 0) fail("domain.basis_modes", "must be >= 0");
    }

    if (!doc.contains("coefficients")) fail("coefficients", "missing required block");
    {
        const json& c = doc.at("coefficients");
        check_keys(c, "coefficients",
                   {"Lambda", "mu1", "mu2", "mu3", "mu4", "alpha", "beta", "gamma",
                    "sigma", "k1", "k2", "k3", "k4"});
        cfg.Lambda = get_field(c, "coefficients", "Lambda");
        cfg.mu1 = get_field(c, "coefficients", "mu1");
        cfg.mu2 = get_field(c, "coefficients", "mu2");
        cfg.mu3 = get_field(c, "coefficients", "mu3");
        cfg.mu4 = get_field(c, "coefficients", "mu4");
        cfg.alpha = get_field(c, "coefficients", "alpha");
        cfg.beta = get_field(c, "coefficients", "beta");
        cfg.gamma = get_field(c, "coefficients", "gamma");
        cfg.sigma = get_field(c, "coefficients", "sigma");
        cfg.k1 = get_number<double>(c, "coefficients", "k1", 0.1);
        cfg.k2 = get_number<double>(c, "coefficients", "k2", 0.1);
        cfg.k3 = get_number<double>(c, "coefficients", "k3", 0.1);
        cfg.k4 = get_number<double>(c, "coefficients", "k4", 0.1);
        if (!(cfg.k1 > 0.0)) fail("coefficients.k1", "must be > 0");
        if (!(cfg.k2 > 0.0)) fail("coefficients.k2", "must be > 0");
        if (!(cfg.k3 > 0.0)) fail("coefficients.k3", "must be > 0");
        if (!(cfg.k4 > 0.0)) fail("coefficients.k4", "must be > 0");
    }

    if (doc.contains("noise")) {
        const json& nz = doc.at("noise");
        check_keys(nz, "noise", {"truncation", "weights"});
        cfg.truncation = get_number<int>(nz, "noise", "truncation", 16);
        if (cfg.truncation < 0) fail("noise.truncation", "must be >= 0");
        if (nz.contains("weights")) {
            const json& w = nz.at("weights");
            if (w.is_object() && w.contains("kind")) {
                const WeightRule rule = parse_rule(w, "noise.weights");
                for (auto& r : cfg.noise_weights) r = rule;
            } else {
                check_keys(w, "noise.weights", {"S", "E", "I", "R"});
                const std::array<const char*, 4> comp = {"S", "E", "I", "R"};
                for (int i = 0; i < 4; ++i) {
                    if (!w.contains(comp[i]))
                        fail(std::string("noise.weights.") + comp[i],
                             "missing required key");
                    cfg.noise_weights[i] = parse_rule(
                        w.at(comp[i]), std::string("noise.weights.") + comp[i]);
                }
            }
        }
        for (int i = 0; i < 4; ++i)
            if (cfg.noise_weights[i].kind == WeightRule::Kind::List &&
                static_cast<int>(cfg.noise_weights[i].values.size()) > cfg.truncation)
            fail("noise.weights", "weight list longer than the truncation level");
    }

    if (!doc.contains("scheme")) fail("scheme", "missing required block");
    {
        const json& s = doc.at("scheme");
        check_keys(s, "scheme",
                   {"dt", "t_final", "clamp", "epsilon", "record_every"});
        cfg.dt = get_number<double>(s, "scheme", "dt", 1e-3);
        cfg.t_final = get_number<double>(s, "scheme", "t_final", 0.0, true);
        cfg.epsilon = get_number<double>(s, "scheme", "epsilon", 1e-3);
        cfg.record_every = get_number<int>(s, "scheme", "record_every", 100);
        if (s.contains("clamp")) {
            const std::string c = s.at("clamp").get<std::string>();
            if (c == "hard")
                cfg.clamp_policy = ClampPolicy::Hard;
            else if (c == "smooth")
                cfg.clamp_policy = ClampPolicy::Smooth;
            else
                fail("scheme.clamp", "expected hard | smooth");
        }
        try {
            cfg.scheme().validate();
        } catch (const std::invalid_argument& e) {
            fail("scheme", e.what());
        }
    }

    if (!doc.contains("initial")) fail("initial", "missing required block");
    {
        const json& i = doc.at("initial");
        check_keys(i, "initial", {"S", "E", "I", "R"});
        cfg.S0 = get_field(i, "initial", "S");
        cfg.E0 = get_field(i, "initial", "E");
        cfg.I0 = get_field(i, "initial", "I");
        cfg.R0 = get_field(i, "initial", "R");
    }

    if (doc.contains("run")) {
        const json& r = doc.at("run");
        check_keys(r, "run", {"mode", "paths", "seed", "output_dir"});
        if (r.contains("mode")) {
            const std::string m = r.at("mode").get<std::string>();
            if (m == "simulate")
                cfg.mode = RunMode::Simulate;
            else if (m == "ensemble")
                cfg.mode = RunMode::Ensemble;
            else if (m == "thresholds")
                cfg.mode = RunMode::Thresholds;
            else if (m == "convergence")
                cfg.mode = RunMode::Convergence;
            else if (m == "picard")
                cfg.mode = RunMode::Picard;
            else
                fail("run.mode",
                     "expected simulate | ensemble | thresholds | convergence | "
                     "picard");
        }
        cfg.paths = get_number<int>(r, "run", "paths", 1);
        cfg.seed = get_number<uint64_t>(r, "run", "seed", 1);
        if (r.contains("output_dir"))
            cfg.output_dir = r.at("output_dir").get<std::string>();
        if (cfg.paths < 1) fail("run.paths", "must be >= 1");
    }

    if (doc.contains("convergence")) {
        const json& cv = doc.at("convergence");
        check_keys(cv, "convergence", {"study", "dt_levels", "n_levels", "paths"});
        if (cv.contains("study")) {
            cfg.convergence.study = cv.at("study").get<std::string>();
            if (cfg.convergence.study != "dt" && cfg.convergence.study != "truncation")
                fail("convergence.study", "expected dt | truncation");
        }
        if (cv.contains("dt_levels"))
            for (const auto& v : cv.at("dt_levels"))
                cfg.convergence.dt_levels.push_back(v.get<double>());
        if (cv.contains("n_levels"))
            for (const auto& v : cv.at("n_levels"))
                cfg.convergence.n_levels.push_back(v.get<int>());
        cfg.convergence.paths = get_number<int>(cv, "convergence", "paths", 100);
        if (cfg.convergence.paths < 1) fail("convergence.paths", "must be >= 1");
    }

    if (doc.contains("picard")) {
        const json& p = doc.at("picard");
        check_keys(p, "picard", {"t0", "substeps", "max_iterations", "tolerance"});
        cfg.picard.t0 = get_number<double>(p, "picard", "t0", 0.1);
        cfg.picard.substeps = get_number<int>(p, "picard", "substeps", 20);
        cfg.picard.max_iterations =
            get_number<int>(p, "picard", "max_iterations", 50);
        cfg.picard.tolerance = get_number<double>(p, "picard", "tolerance", 1e-10);
        if (!(cfg.picard.t0 > 0.0)) fail("picard.t0", "must be > 0");
        if (cfg.picard.substeps < 1) fail("picard.substeps", "must be >= 1");
        if (cfg.picard.max_iterations < 1)
            fail("picard.max_iterations", "must be >= 1");
        if (!(cfg.picard.tolerance > 0.0)) fail("picard.tolerance", "must be > 0");
    }

    // Sample every field once: catches expression runtime problems, negative
    // values, and y-in-1D, naming the key and the node.
    const DomainGrid grid(cfg.dimension, cfg.points_per_axis);
    const auto validate_field = [&](const FieldSpec& f, const std::string& path,
                                    bool must_be_nonneg) {
        if (!f.is_constant) {
            const Expression e = Expression::parse(f.source);
            if (cfg.dimension == 1 && e.uses_y())
                fail(path, "variable y is only available on 2D domains");
        }
        const Field sampled = f.sample(grid);
        for (std::size_t j = 0; j < sampled.size(); ++j) {
            if (!std::isfinite(sampled[j]))
                fail(path, "not finite at node x = " + std::to_string(grid.x(j)));
            if (must_be_nonneg && sampled[j] < 0.0)
                fail(path, "negative value " + std::to_string(sampled[j]) +
                               " at node x = " + std::to_string(grid.x(j)));
        }
    };
    validate_field(cfg.Lambda, "coefficients.Lambda", true);
    validate_field(cfg.mu1, "coefficients.mu1", true);
    validate_field(cfg.mu2, "coefficients.mu2", true);
    validate_field(cfg.mu3, "coefficients.mu3", true);
    validate_field(cfg.mu4, "coefficients.mu4", true);
    validate_field(cfg.alpha, "coefficients.alpha", true);
    validate_field(cfg.beta, "coefficients.beta", true);
    validate_field(cfg.gamma, "coefficients.gamma", true);
    validate_field(cfg.sigma, "coefficients.sigma", true);
    validate_field(cfg.S0, "initial.S", true);
    validate_field(cfg.E0, "initial.E", true);
    validate_field(cfg.I0, "initial.I", true);
    validate_field(cfg.R0, "initial.R", true);

    const long max_modes = cfg.dimension == 1
                               ? cfg.points_per_axis
                               : static_cast<long>(cfg.points_per_axis) *
                                     cfg.points_per_axis;
    if (cfg.resolved_basis_modes() > max_modes)
        fail("domain.basis_modes", "exceeds grid resolution");
    if (cfg.truncation > cfg.resolved_basis_modes())
        fail("noise.truncation", "exceeds the basis mode count");

    return cfg;
}

/// Full round-trip echo of a configuration, defaults resolved.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    using nlohmann::json;
    using namespace config_detail;
    json doc;
    doc["domain"] = {{"dimension", cfg.dimension},
                     {"points_per_axis", cfg.points_per_axis},
                     {"basis_modes", cfg.basis_modes}};
    doc["coefficients"] = {
        {"Lambda", field_to_json(cfg.Lambda)}, {"mu1", field_to_json(cfg.mu1)},
        {"mu2", field_to_json(cfg.mu2)},       {"mu3", field_to_json(cfg.mu3)},
        {"mu4", field_to_json(cfg.mu4)},       {"alpha", field_to_json(cfg.alpha)},
        {"beta", field_to_json(cfg.beta)},     {"gamma", field_to_json(cfg.gamma)},
        {"sigma", field_to_json(cfg.sigma)},   {"k1", cfg.k1},
        {"k2", cfg.k2},                        {"k3", cfg.k3},
        {"k4", cfg.k4}};
    doc["noise"] = {{"truncation", cfg.truncation},
                    {"weights",
                     {{"S", rule_to_json(cfg.noise_weights[0])},
                      {"E", rule_to_json(cfg.noise_weights[1])},
                      {"I", rule_to_json(cfg.noise_weights[2])},
                      {"R", rule_to_json(cfg.noise_weights[3])}}}};
    doc["scheme"] = {
        {"dt", cfg.dt},
        {"t_final", cfg.t_final},
        {"clamp", cfg.clamp_policy == ClampPolicy::Hard ? "hard" : "smooth"},
        {"epsilon", cfg.epsilon},
        {"record_every", cfg.record_every}};
    doc["initial"] = {{"S", field_to_json(cfg.S0)},
                      {"E", field_to_json(cfg.E0)},
                      {"I", field_to_json(cfg.I0)},
                      {"R", field_to_json(cfg.R0)}};
    doc["run"] = {{"mode", run_mode_name(cfg.mode)},
                  {"paths", cfg.paths},
                  {"seed", cfg.seed},
                  {"output_dir", cfg.output_dir}};
    doc["convergence"] = {{"study", cfg.convergence.study},
                          {"paths", cfg.convergence.paths}};
    if (!cfg.convergence.dt_levels.empty())
        doc["convergence"]["dt_levels"] = cfg.convergence.dt_levels;
    if (!cfg.convergence.n_levels.empty())
        doc["convergence"]["n_levels"] = cfg.convergence.n_levels;
    doc["picard"] = {{"t0", cfg.picard.t0},
                     {"substeps", cfg.picard.substeps},
                     {"max_iterations", cfg.picard.max_iterations},
                     {"tolerance", cfg.picard.tolerance}};
    return doc;
}

}  // namespace seirs
