#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qksvm/errors.hpp"
#include "qksvm/feature_map.hpp"
#include "qksvm/kernel.hpp"
#include "qksvm/linalg.hpp"
#include "qksvm/rng.hpp"

#include <json.hpp>

namespace qksvm {

struct SvmTrainConfig {
    double C = 1.0;
    double tol = 1e-3;
    int max_passes = 50;
    std::uint64_t seed = 0;
};

/// Dual solution. The decision function is sum_i y_i alpha_i K(x, x_i) - bias,
/// so a margin support vector s satisfies y_s * decision(s) = 1.
struct SvmModel {
    std::vector<double> alphas;
    std::vector<int> labels;
    std::vector<std::size_t> support_indices; // alpha_i > tol
    double bias = 0.0;
    SvmTrainConfig config;
    KernelConfig kernel;
    std::vector<std::vector<double>> training_points; // needed to rebuild kernel rows
    bool converged = true;
};

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij.
inline double dual_objective(const Matrix& k, const std::vector<int>& y,
                             const std::vector<double>& alphas) {
    const std::size_t n = alphas.size();
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        obj += alphas[i];
    }
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alphas[i] == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            quad += alphas[i] * alphas[j] * y[i] * y[j] * k(i, j);
        }
    }
    return obj - 0.5 * quad;
}

namespace detail {

inline void check_training_inputs(const Matrix& k, const std::vector<int>& y) {
    if (k.rows != k.cols) {
        throw UsageError("kernel matrix must be square");
    }
    if (k.rows != y.size() || y.empty()) {
        throw UsageError("label count must match kernel dimension");
    }
    bool has_pos = false;
    bool has_neg = false;
    for (int label : y) {
        if (label == 1) {
            has_pos = true;
        } else if (label == -1) {
            has_neg = true;
        } else {
            throw UsageError("labels must be +1 or -1");
        }
    }
    if (!has_pos || !has_neg) {
        throw DataError("training requires both classes to be present");
    }
}

/// Bias such that margin support vectors sit exactly on the margin; falls
/// back to all support vectors, then to 0 when every alpha is zero.
inline double compute_bias(const Matrix& k, const std::vector<int>& y,
                           const std::vector<double>& alphas, double C) {
    const std::size_t n = alphas.size();
    const double box_eps = 1e-9 * std::max(1.0, C);
    auto bias_at = [&](std::size_t s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += alphas[i] * y[i] * k(s, i);
        }
        return acc - y[s];
    };
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (alphas[s] > box_eps && alphas[s] < C - box_eps) {
            sum += bias_at(s);
            ++count;
        }
    }
    if (count == 0) {
        for (std::size_t s = 0; s < n; ++s) {
            if (alphas[s] > box_eps) {
                sum += bias_at(s);
                ++count;
            }
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

} // namespace detail

/// Simplified sequential minimal optimization over a precomputed kernel.
/// Second indices are drawn uniformly at random (seeded); training ends after
/// `max_passes` consecutive full sweeps without an accepted update, or at a
/// hard sweep cap (reported via `converged`).
inline SvmModel train_smo(const KernelMatrix& km, const std::vector<int>& y,
                          const SvmTrainConfig& config) {
    const Matrix& k = km.values;
    detail::check_training_inputs(k, y);
    if (!(config.C > 0.0) || !(config.tol > 0.0) || config.max_passes < 1) {
        throw ConfigError("svm config requires C > 0, tol > 0, max_passes >= 1");
    }
    const std::size_t n = y.size();
    const double C = config.C;
    std::vector<double> alphas(n, 0.0);
    double b = 0.0; // internal convention: f(i) = sum_j alpha_j y_j K_ij + b

    auto f = [&](std::size_t i) {
        double acc = b;
        for (std::size_t j = 0; j < n; ++j) {
            if (alphas[j] != 0.0) {
                acc += alphas[j] * y[j] * k(i, j);
            }
        }
        return acc;
    };

    Rng rng(derive_seed(config.seed, 0x534d4f)); // "SMO" stream
    const int sweep_cap = 200 * config.max_passes + 1000;
    int passes = 0;
    int sweeps = 0;
    bool converged = true;
    while (passes < config.max_passes) {
        if (++sweeps > sweep_cap) {
            converged = false;
            break;
        }
        int changed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e_i = f(i) - y[i];
            const double r = e_i * y[i];
            if (!((r < -config.tol && alphas[i] < C) || (r > config.tol && alphas[i] > 0.0))) {
                continue;
            }
            std::size_t j = rng.uniform_index(n - 1);
            if (j >= i) {
                ++j;
            }
            const double e_j = f(j) - y[j];
            const double ai_old = alphas[i];
            const double aj_old = alphas[j];
            double lo;
            double hi;
            if (y[i] != y[j]) {
                lo = std::max(0.0, aj_old - ai_old);
                hi = std::min(C, C + aj_old - ai_old);
            } else {
                lo = std::max(0.0, ai_old + aj_old - C);
                hi = std::min(C, ai_old + aj_old);
            }
            if (lo >= hi) {
                continue;
            }
            const double eta = 2.0 * k(i, j) - k(i, i) - k(j, j);
            if (eta >= 0.0) {
                continue;
            }
            double aj_new = aj_old - y[j] * (e_i - e_j) / eta;
            aj_new = std::clamp(aj_new, lo, hi);
            if (std::abs(aj_new - aj_old) < 1e-8) {
                continue;
            }
            const double ai_new = ai_old + y[i] * y[j] * (aj_old - aj_new);
            alphas[i] = ai_new;
            alphas[j] = aj_new;

            const double b1 = b - e_i - y[i] * (ai_new - ai_old) * k(i, i) -
                              y[j] * (aj_new - aj_old) * k(i, j);
            const double b2 = b - e_j - y[i] * (ai_new - ai_old) * k(i, j) -
                              y[j] * (aj_new - aj_old) * k(j, j);
            if (ai_new > 0.0 && ai_new < C) {
                b = b1;
            } else if (aj_new > 0.0 && aj_new < C) {
                b = b2;
            } else {
                b = 0.5 * (b1 + b2);
            }
            ++changed;
        }
        passes = changed == 0 ? passes + 1 : 0;
    }

    SvmModel model;
    model.alphas = std::move(alphas);
    model.labels = y;
    model.bias = detail::compute_bias(k, y, model.alphas, C);
    model.config = config;
    model.kernel = km.config;
    model.converged = converged;
    for (std::size_t i = 0; i < n; ++i) {
        if (model.alphas[i] > config.tol) {
            model.support_indices.push_back(i);
        }
    }
    return model;
}

/// Independent dual solver for testing: projected gradient ascent on the
/// dual with exact projection onto {0 <= alpha <= C, sum alpha_i y_i = 0}
/// (bisection on the equality multiplier). Deliberately shares no code with
/// train_smo. Limited to tiny problems.
inline std::vector<double> brute_force_dual(const KernelMatrix& km, const std::vector<int>& y,
                                            double C, int steps) {
    const Matrix& k = km.values;
    detail::check_training_inputs(k, y);
    const std::size_t n = y.size();
    if (n > 8) {
        throw UsageError("brute_force_dual supports at most 8 points");
    }
    if (!(C > 0.0) || steps < 1) {
        throw UsageError("brute_force_dual requires C > 0 and steps >= 1");
    }

    auto project = [&](std::vector<double> raw) {
        auto shifted_sum = [&](double lambda) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += y[i] * std::clamp(raw[i] - lambda * y[i], 0.0, C);
            }
            return acc;
        };
        double lo = -1.0;
        double hi = 1.0;
        for (double a : raw) {
            lo = std::min(lo, -(std::abs(a) + C + 1.0));
            hi = std::max(hi, std::abs(a) + C + 1.0);
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (shifted_sum(mid) > 0.0) {
                lo = mid; // sum decreases in lambda
            } else {
                hi = mid;
            }
        }
        const double lambda = 0.5 * (lo + hi);
        for (std::size_t i = 0; i < n; ++i) {
            raw[i] = std::clamp(raw[i] - lambda * y[i], 0.0, C);
        }
        return raw;
    };

    double lipschitz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += std::abs(k(i, j));
        }
        lipschitz = std::max(lipschitz, row);
    }
    const double step = 1.0 / std::max(lipschitz, 1e-12);

    std::vector<double> alphas(n, 0.0);
    for (int it = 0; it < steps; ++it) {
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) {
            double grad = 1.0;
            for (std::size_t j = 0; j < n; ++j) {
                grad -= y[i] * y[j] * k(i, j) * alphas[j];
            }
            next[i] = alphas[i] + step * grad;
        }
        next = project(std::move(next));
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            delta = std::max(delta, std::abs(next[i] - alphas[i]));
        }
        alphas = std::move(next);
        if (delta < 1e-13) {
            break;
        }
    }
    return alphas;
}

/// sum_i y_i alpha_i k_row[i] - bias.
inline double decision_value(const SvmModel& model, std::span<const double> k_row) {
    if (k_row.size() != model.alphas.size()) {
        throw UsageError("kernel row length must equal training size");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < k_row.size(); ++i) {
        if (model.alphas[i] != 0.0) {
            acc += model.labels[i] * model.alphas[i] * k_row[i];
        }
    }
    return acc - model.bias;
}

/// Signum classification; an exact zero classifies as +1.
inline int predict(const SvmModel& model, std::span<const double> k_row) {
    return decision_value(model, k_row) >= 0.0 ? 1 : -1;
}

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth) {
    if (predictions.empty() || predictions.size() != truth.size()) {
        throw UsageError("accuracy requires equal nonempty label vectors");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        hits += predictions[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

// --- model file --------------------------------------------------------------

inline nlohmann::json to_json(const SvmTrainConfig& c) {
    return {{"C", c.C}, {"tol", c.tol}, {"max_passes", c.max_passes}, {"seed", c.seed}};
}

inline SvmTrainConfig svm_config_from_json(const nlohmann::json& j) {
    SvmTrainConfig c;
    c.C = j.value("C", c.C);
    c.tol = j.value("tol", c.tol);
    c.max_passes = j.value("max_passes", c.max_passes);
    c.seed = j.value("seed", c.seed);
    if (!(c.C > 0.0) || !(c.tol > 0.0) || c.max_passes < 1) {
        throw ConfigError("svm config requires C > 0, tol > 0, max_passes >= 1");
    }
    return c;
}

inline nlohmann::json to_json(const SvmModel& m) {
    return {{"alphas", m.alphas},
            {"labels", m.labels},
            {"support_indices", m.support_indices},
            {"bias", m.bias},
            {"config", to_json(m.config)},
            {"feature_map", to_json(m.kernel)},
            {"training_points", m.training_points}};
}

inline SvmModel svm_model_from_json(const nlohmann::json& j) {
    SvmModel m;
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.labels = j.at("labels").get<std::vector<int>>();
    m.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
    m.bias = j.at("bias").get<double>();
    m.config = svm_config_from_json(j.at("config"));
    m.kernel = kernel_config_from_json(j.at("feature_map"));
    m.training_points = j.at("training_points").get<std::vector<std::vector<double>>>();
    if (m.alphas.size() != m.labels.size()) {
        throw ConfigError("model file has mismatched alphas/labels");
    }
    return m;
}

} // namespace qksvm
