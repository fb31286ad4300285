#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "qksvm/circuit.hpp"
#include "qksvm/device.hpp"
#include "qksvm/errors.hpp"
#include "qksvm/feature_map.hpp"
#include "qksvm/linalg.hpp"
#include "qksvm/noise.hpp"
#include "qksvm/rng.hpp"
#include "qksvm/state_vector.hpp"

#include <json.hpp>

namespace qksvm {

enum class KernelMode { Exact, Sampled };

inline std::string to_string(KernelMode m) { return m == KernelMode::Exact ? "exact" : "sampled"; }

/// Gram matrix of kernel values plus how it was produced.
struct KernelMatrix {
    Matrix values;
    KernelMode mode = KernelMode::Exact;
    int shots = 0; // 0 for exact
    KernelConfig config;
};

/// Device emulation applied to sampled kernel evaluation: circuits are routed
/// onto the coupling map and sampled under the noise model.
struct EmulationConfig {
    CouplingMap coupling;
    NoiseModel noise;
};

/// The encoded state U_phi(x)|0...0>.
inline StateVector feature_state(const DataPoint& x, const FeatureMapConfig& fm) {
    StateVector s = new_zero_state(fm.n_features);
    apply_circuit(s, build_feature_map(x, fm));
    return s;
}

/// |<phi(x)|phi(z)>|^2 via two statevectors.
inline double kernel_exact(const DataPoint& x, const DataPoint& z, const FeatureMapConfig& fm) {
    const StateVector sx = feature_state(x, fm);
    const StateVector sz = feature_state(z, fm);
    const double k = std::norm(inner_product(sx, sz));
    return std::clamp(k, 0.0, 1.0);
}

/// The composite estimation circuit U_phi(x)^dag U_phi(z); on |0...0> its
/// all-zeros outcome probability equals the kernel.
inline Circuit kernel_estimation_circuit(const DataPoint& x, const DataPoint& z,
                                         const FeatureMapConfig& fm) {
    return concatenated(build_feature_map(z, fm), inverted(build_feature_map(x, fm)));
}

/// Shot-based kernel estimate: the observed frequency of the all-zeros
/// outcome of the composite circuit. With an emulation config the circuit is
/// routed and sampled under noise; otherwise sampling is ideal.
inline double kernel_sampled(const DataPoint& x, const DataPoint& z, const FeatureMapConfig& fm,
                             std::uint64_t shots, std::uint64_t seed,
                             const EmulationConfig* emu = nullptr) {
    if (shots == 0) {
        throw UsageError("shots must be >= 1");
    }
    const Circuit composite = kernel_estimation_circuit(x, z, fm);
    const std::string zeros(static_cast<std::size_t>(composite.n_qubits), '0');
    CountHistogram hist;
    if (emu) {
        hist = noisy_sample(composite, emu->coupling, emu->noise, shots, seed);
    } else {
        StateVector s = new_zero_state(composite.n_qubits);
        apply_circuit(s, composite);
        hist = sample_counts(s, shots, seed);
    }
    const auto it = hist.counts.find(zeros);
    const std::uint64_t hits = it == hist.counts.end() ? 0 : it->second;
    return static_cast<double>(hits) / static_cast<double>(shots);
}

/// Symmetric Gram matrix over one point set. Each off-diagonal pair is
/// evaluated once with the pair-derived seed derive_seed(seed, i, j) and
/// mirrored; in sampled mode the diagonal is pinned to 1 (analytically exact)
/// instead of spending shots on it.
inline KernelMatrix gram_matrix(const std::vector<DataPoint>& points, const FeatureMapConfig& fm,
                                KernelMode mode, std::uint64_t shots, std::uint64_t seed,
                                const EmulationConfig* emu = nullptr) {
    if (points.empty()) {
        throw UsageError("gram_matrix needs at least one point");
    }
    const std::size_t n = points.size();
    KernelMatrix out;
    out.mode = mode;
    out.shots = mode == KernelMode::Sampled ? static_cast<int>(shots) : 0;
    out.config = fm;
    out.values = Matrix(n, n);

    if (mode == KernelMode::Exact) {
        std::vector<StateVector> states;
        states.reserve(n);
        for (const DataPoint& p : points) {
            states.push_back(feature_state(p, fm));
        }
        for (std::size_t i = 0; i < n; ++i) {
            out.values(i, i) = std::clamp(std::norm(inner_product(states[i], states[i])), 0.0, 1.0);
            for (std::size_t j = i + 1; j < n; ++j) {
                const double k =
                    std::clamp(std::norm(inner_product(states[i], states[j])), 0.0, 1.0);
                out.values(i, j) = k;
                out.values(j, i) = k;
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            out.values(i, i) = 1.0;
            for (std::size_t j = i + 1; j < n; ++j) {
                const double k =
                    kernel_sampled(points[i], points[j], fm, shots, derive_seed(seed, i, j), emu);
                out.values(i, j) = k;
                out.values(j, i) = k;
            }
        }
    }
    return out;
}

/// Rectangular kernel block K[test_i][train_j].
inline Matrix cross_gram(const std::vector<DataPoint>& train, const std::vector<DataPoint>& test,
                         const FeatureMapConfig& fm, KernelMode mode, std::uint64_t shots,
                         std::uint64_t seed, const EmulationConfig* emu = nullptr) {
    if (train.empty() || test.empty()) {
        throw UsageError("cross_gram needs nonempty point lists");
    }
    Matrix out(test.size(), train.size());
    if (mode == KernelMode::Exact) {
        std::vector<StateVector> train_states;
        train_states.reserve(train.size());
        for (const DataPoint& p : train) {
            train_states.push_back(feature_state(p, fm));
        }
        for (std::size_t i = 0; i < test.size(); ++i) {
            const StateVector si = feature_state(test[i], fm);
            for (std::size_t j = 0; j < train.size(); ++j) {
                out(i, j) = std::clamp(std::norm(inner_product(si, train_states[j])), 0.0, 1.0);
            }
        }
    } else {
        for (std::size_t i = 0; i < test.size(); ++i) {
            for (std::size_t j = 0; j < train.size(); ++j) {
                out(i, j) =
                    kernel_sampled(test[i], train[j], fm, shots, derive_seed(seed, i, j), emu);
            }
        }
    }
    return out;
}

/// Classical RBF Gram matrix, same container as the quantum kernels.
inline KernelMatrix rbf_gram(const std::vector<DataPoint>& points, const RbfConfig& rbf) {
    if (points.empty()) {
        throw UsageError("rbf_gram needs at least one point");
    }
    const std::size_t n = points.size();
    KernelMatrix out;
    out.mode = KernelMode::Exact;
    out.shots = 0;
    out.config = rbf;
    out.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = rbf_kernel(points[i], points[j], rbf);
            out.values(i, j) = k;
            out.values(j, i) = k;
        }
    }
    return out;
}

inline Matrix rbf_cross_gram(const std::vector<DataPoint>& train,
                             const std::vector<DataPoint>& test, const RbfConfig& rbf) {
    if (train.empty() || test.empty()) {
        throw UsageError("rbf_cross_gram needs nonempty point lists");
    }
    Matrix out(test.size(), train.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        for (std::size_t j = 0; j < train.size(); ++j) {
            out(i, j) = rbf_kernel(test[i], train[j], rbf);
        }
    }
    return out;
}

/// Eigenvalue clamping followed by symmetric diagonal renormalization.
/// Sampled Gram matrices can be slightly indefinite; this projects them back
/// to a PSD matrix with unit diagonal.
inline KernelMatrix psd_project(const KernelMatrix& km, double floor = 0.0) {
    const Matrix& k = km.values;
    if (!is_symmetric(k, 1e-12)) {
        throw UsageError("psd_project requires a symmetric matrix");
    }
    const std::size_t n = k.rows;
    SymmetricEigen eig = jacobi_eigen(k);
    for (double& lambda : eig.values) {
        lambda = std::max(lambda, floor);
    }

    Matrix rebuilt(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t m = 0; m < n; ++m) {
                acc += eig.values[m] * eig.vectors(i, m) * eig.vectors(j, m);
            }
            rebuilt(i, j) = acc;
            rebuilt(j, i) = acc;
        }
    }

    std::vector<double> inv_sqrt_diag(n);
    for (std::size_t i = 0; i < n; ++i) {
        inv_sqrt_diag[i] = 1.0 / std::sqrt(std::max(rebuilt(i, i), 1e-12));
    }
    KernelMatrix out = km;
    out.values = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = rebuilt(i, j) * inv_sqrt_diag[i] * inv_sqrt_diag[j];
            out.values(i, j) = r;
            out.values(j, i) = r;
        }
    }
    return out;
}

// --- export ------------------------------------------------------------------

/// Row-major CSV with a header row of point indices.
inline void write_matrix_csv(std::ostream& os, const Matrix& m) {
    for (std::size_t j = 0; j < m.cols; ++j) {
        os << (j == 0 ? "" : ",") << j;
    }
    os << "\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            os << (j == 0 ? "" : ",") << m(i, j);
        }
        os << "\n";
    }
}

inline nlohmann::json to_json(const KernelMatrix& km) {
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t i = 0; i < km.values.rows; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < km.values.cols; ++j) {
            row.push_back(km.values(i, j));
        }
        values.push_back(row);
    }
    return {{"mode", to_string(km.mode)},
            {"shots", km.shots},
            {"feature_map", to_json(km.config)},
            {"values", values}};
}

} // namespace qksvm
