#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qksvm/errors.hpp"
#include "qksvm/linalg.hpp"

namespace qksvm {

/// Fitted transform: projected = (x - column_means) . components[k]
/// for each retained component row k.
struct PcaTransform {
    std::vector<double> column_means;
    std::vector<std::vector<double>> components; // k rows of length d
    std::vector<double> explained_variance;      // descending
};

/// Fits PCA via the sample covariance matrix (divisor n-1) and the symmetric
/// Jacobi eigensolver. Component signs are fixed so that the entry with the
/// largest magnitude in each component is positive, which keeps projections
/// reproducible across eigensolver implementations.
inline PcaTransform fit_pca(const std::vector<std::vector<double>>& rows,
                            std::size_t n_components) {
    if (rows.size() < 2) {
        throw DataError("pca requires at least two rows");
    }
    const std::size_t d = rows[0].size();
    for (const auto& row : rows) {
        if (row.size() != d) {
            throw DataError("pca rows must have equal width");
        }
    }
    if (n_components == 0 || n_components > d) {
        throw UsageError("n_components must be in [1, feature count]");
    }

    PcaTransform pca;
    pca.column_means.assign(d, 0.0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < d; ++c) {
            pca.column_means[c] += row[c];
        }
    }
    for (double& m : pca.column_means) {
        m /= static_cast<double>(rows.size());
    }

    Matrix cov(d, d);
    for (const auto& row : rows) {
        for (std::size_t a = 0; a < d; ++a) {
            const double da = row[a] - pca.column_means[a];
            for (std::size_t b = a; b < d; ++b) {
                cov(a, b) += da * (row[b] - pca.column_means[b]);
            }
        }
    }
    const double norm = 1.0 / static_cast<double>(rows.size() - 1);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) *= norm;
            cov(b, a) = cov(a, b);
        }
    }

    const SymmetricEigen eig = jacobi_eigen(cov); // eigenvalues descending
    for (std::size_t k = 0; k < n_components; ++k) {
        std::vector<double> comp(d);
        for (std::size_t c = 0; c < d; ++c) {
            comp[c] = eig.vectors(c, k);
        }
        std::size_t pivot = 0;
        for (std::size_t c = 1; c < d; ++c) {
            if (std::abs(comp[c]) > std::abs(comp[pivot])) {
                pivot = c;
            }
        }
        if (comp[pivot] < 0.0) {
            for (double& v : comp) {
                v = -v;
            }
        }
        pca.components.push_back(std::move(comp));
        pca.explained_variance.push_back(eig.values[k]);
    }
    return pca;
}

inline std::vector<std::vector<double>> apply_pca(const PcaTransform& pca,
                                                  const std::vector<std::vector<double>>& rows) {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (row.size() != pca.column_means.size()) {
            throw UsageError("row width does not match fitted transform");
        }
        std::vector<double> projected(pca.components.size(), 0.0);
        for (std::size_t k = 0; k < pca.components.size(); ++k) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                projected[k] += (row[c] - pca.column_means[c]) * pca.components[k][c];
            }
        }
        out.push_back(std::move(projected));
    }
    return out;
}

} // namespace qksvm
