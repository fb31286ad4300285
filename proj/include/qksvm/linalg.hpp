#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "qksvm/errors.hpp"

namespace qksvm {

/// Dense row-major matrix of doubles. Small sizes only (hundreds of rows).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }
};

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) {
        throw UsageError("matrix shape mismatch in multiply");
    }
    Matrix out(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols; ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    return out;
}

inline Matrix transposed(const Matrix& a) {
    Matrix out(a.cols, a.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = 0; j < a.cols; ++j) {
            out(j, i) = a(i, j);
        }
    }
    return out;
}

inline bool is_symmetric(const Matrix& a, double tol = 1e-12) {
    if (a.rows != a.cols) {
        return false;
    }
    for (std::size_t i = 0; i < a.rows; ++i) {
        for (std::size_t j = i + 1; j < a.cols; ++j) {
            if (std::abs(a(i, j) - a(j, i)) > tol) {
                return false;
            }
        }
    }
    return true;
}

/// Eigendecomposition of a symmetric matrix: values[k] with the matching
/// eigenvector in column k of `vectors`, sorted by descending eigenvalue.
struct SymmetricEigen {
    std::vector<double> values;
    Matrix vectors;
};

/// Cyclic Jacobi rotations. Adequate for the matrix sizes used here
/// (covariances and Gram matrices up to a few hundred rows).
inline SymmetricEigen jacobi_eigen(Matrix a, int max_sweeps = 100) {
    if (a.rows != a.cols) {
        throw UsageError("jacobi_eigen requires a square matrix");
    }
    if (!is_symmetric(a, 1e-9)) {
        throw UsageError("jacobi_eigen requires a symmetric matrix");
    }
    const std::size_t n = a.rows;
    Matrix v = Matrix::identity(n);

    auto off_diagonal_norm = [&a, n]() {
        double acc = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                acc += a(p, q) * a(p, q);
            }
        }
        return std::sqrt(2.0 * acc);
    };

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (off_diagonal_norm() < 1e-14 * (1.0 + std::abs(a(0, 0)))) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&a](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

} // namespace qksvm
