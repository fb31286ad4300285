#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "qksvm/circuit.hpp"
#include "qksvm/errors.hpp"

#include <json.hpp>

namespace qksvm {

enum class FeatureMapKind { Z, ZZ };
enum class Entanglement { Full, Linear };

/// Data-encoding circuit family. n_features equals the qubit count.
struct FeatureMapConfig {
    FeatureMapKind kind = FeatureMapKind::ZZ;
    int reps = 2;
    Entanglement entanglement = Entanglement::Full;
    int n_features = 2;
};

/// A classical sample. label is +1/-1 for labelled points, 0 when absent.
struct DataPoint {
    std::vector<double> features;
    int label = 0;
};

struct RbfConfig {
    double sigma = 1.0;
};

/// First-order encoding angle.
inline double phi1(double x) { return x; }

/// Second-order encoding angle, symmetric in its arguments.
inline double phi2(double xi, double xj) {
    return (std::numbers::pi - xi) * (std::numbers::pi - xj);
}

namespace detail {

inline void check_features(const DataPoint& x, const FeatureMapConfig& config) {
    if (static_cast<int>(x.features.size()) != config.n_features) {
        throw UsageError("data point has " + std::to_string(x.features.size()) +
                         " features, feature map expects " + std::to_string(config.n_features));
    }
    for (double v : x.features) {
        if (!std::isfinite(v)) {
            throw UsageError("data point feature is not finite");
        }
    }
}

/// Pairs (i, j), i < j, entangled under the given scheme.
inline std::vector<std::pair<int, int>> entangled_pairs(int n, Entanglement scheme) {
    std::vector<std::pair<int, int>> pairs;
    if (scheme == Entanglement::Linear) {
        for (int i = 0; i + 1 < n; ++i) {
            pairs.emplace_back(i, i + 1);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                pairs.emplace_back(i, j);
            }
        }
    }
    return pairs;
}

} // namespace detail

/// First-order Pauli-Z map: per repetition, H on every qubit followed by
/// Phase(2*phi1(x_i)) on qubit i. Produces no entanglement.
inline Circuit build_z_feature_map(const DataPoint& x, const FeatureMapConfig& config) {
    if (config.kind != FeatureMapKind::Z) {
        throw UsageError("build_z_feature_map requires kind = Z");
    }
    if (config.reps < 1) {
        throw ConfigError("feature map repetitions must be >= 1");
    }
    detail::check_features(x, config);
    Circuit c(config.n_features);
    for (int rep = 0; rep < config.reps; ++rep) {
        for (int q = 0; q < config.n_features; ++q) {
            c.add(Gate::h(q));
        }
        for (int q = 0; q < config.n_features; ++q) {
            c.add(Gate::phase(q, 2.0 * phi1(x.features[static_cast<std::size_t>(q)])));
        }
    }
    return c;
}

/// Second-order Pauli-Z map: each repetition adds the H layer, the
/// single-qubit phases, then per entangled pair (i, j) the block
/// CNOT(i,j), Phase(2*phi2(x_i, x_j)) on j, CNOT(i,j). Pairs are emitted in
/// lexicographic order.
inline Circuit build_zz_feature_map(const DataPoint& x, const FeatureMapConfig& config) {
    if (config.kind != FeatureMapKind::ZZ) {
        throw UsageError("build_zz_feature_map requires kind = ZZ");
    }
    if (config.n_features < 2) {
        throw ConfigError("ZZ feature map needs at least 2 features");
    }
    if (config.reps < 1) {
        throw ConfigError("feature map repetitions must be >= 1");
    }
    detail::check_features(x, config);
    const auto pairs = detail::entangled_pairs(config.n_features, config.entanglement);
    Circuit c(config.n_features);
    for (int rep = 0; rep < config.reps; ++rep) {
        for (int q = 0; q < config.n_features; ++q) {
            c.add(Gate::h(q));
        }
        for (int q = 0; q < config.n_features; ++q) {
            c.add(Gate::phase(q, 2.0 * phi1(x.features[static_cast<std::size_t>(q)])));
        }
        for (const auto& [i, j] : pairs) {
            c.add(Gate::cnot(i, j));
            c.add(Gate::phase(j, 2.0 * phi2(x.features[static_cast<std::size_t>(i)],
                                            x.features[static_cast<std::size_t>(j)])));
            c.add(Gate::cnot(i, j));
        }
    }
    return c;
}

inline Circuit build_feature_map(const DataPoint& x, const FeatureMapConfig& config) {
    return config.kind == FeatureMapKind::Z ? build_z_feature_map(x, config)
                                            : build_zz_feature_map(x, config);
}

/// exp(-|x1 - x2|^2 / (2 sigma^2)).
inline double rbf_kernel(const DataPoint& x1, const DataPoint& x2, const RbfConfig& config) {
    if (x1.features.size() != x2.features.size()) {
        throw UsageError("rbf_kernel requires equal dimensions");
    }
    if (!(config.sigma > 0.0) || !std::isfinite(config.sigma)) {
        throw ConfigError("rbf sigma must be positive and finite");
    }
    double dist2 = 0.0;
    for (std::size_t i = 0; i < x1.features.size(); ++i) {
        const double d = x1.features[i] - x2.features[i];
        dist2 += d * d;
    }
    return std::exp(-dist2 / (2.0 * config.sigma * config.sigma));
}

// --- JSON (de)serialization -------------------------------------------------

inline std::string to_string(FeatureMapKind k) { return k == FeatureMapKind::Z ? "Z" : "ZZ"; }
inline std::string to_string(Entanglement e) {
    return e == Entanglement::Full ? "full" : "linear";
}

inline nlohmann::json to_json(const FeatureMapConfig& c) {
    return {{"kind", to_string(c.kind)},
            {"reps", c.reps},
            {"entanglement", to_string(c.entanglement)},
            {"n_features", c.n_features}};
}

inline FeatureMapConfig feature_map_from_json(const nlohmann::json& j) {
    FeatureMapConfig c;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "Z") {
        c.kind = FeatureMapKind::Z;
    } else if (kind == "ZZ") {
        c.kind = FeatureMapKind::ZZ;
    } else {
        throw ConfigError("unknown feature map kind: " + kind);
    }
    c.reps = j.value("reps", 2);
    const std::string ent = j.value("entanglement", "full");
    if (ent == "full") {
        c.entanglement = Entanglement::Full;
    } else if (ent == "linear") {
        c.entanglement = Entanglement::Linear;
    } else {
        throw ConfigError("unknown entanglement scheme: " + ent);
    }
    c.n_features = j.value("n_features", c.n_features);
    if (c.reps < 1 || c.n_features < 1) {
        throw ConfigError("feature map reps and n_features must be >= 1");
    }
    if (c.kind == FeatureMapKind::ZZ && c.n_features < 2) {
        throw ConfigError("ZZ feature map needs at least 2 features");
    }
    return c;
}

/// Kernel provenance carried by Gram matrices and trained models: either a
/// quantum feature map or the classical RBF baseline.
using KernelConfig = std::variant<FeatureMapConfig, RbfConfig>;

inline nlohmann::json to_json(const KernelConfig& k) {
    if (std::holds_alternative<RbfConfig>(k)) {
        return {{"kind", "RBF"}, {"sigma", std::get<RbfConfig>(k).sigma}};
    }
    return to_json(std::get<FeatureMapConfig>(k));
}

inline KernelConfig kernel_config_from_json(const nlohmann::json& j) {
    if (j.at("kind").get<std::string>() == "RBF") {
        RbfConfig r;
        r.sigma = j.at("sigma").get<double>();
        if (!(r.sigma > 0.0)) {
            throw ConfigError("rbf sigma must be positive");
        }
        return r;
    }
    return feature_map_from_json(j);
}

} // namespace qksvm
