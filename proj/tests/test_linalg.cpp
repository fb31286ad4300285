#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qksvm/linalg.hpp"
#include "qksvm/rng.hpp"

using namespace qksvm;
using Catch::Matchers::WithinAbs;

TEST_CASE("matrix basics: storage, identity, multiply, transpose") {
    Matrix a(2, 3);
    a(0, 0) = 1, a(0, 1) = 2, a(0, 2) = 3;
    a(1, 0) = 4, a(1, 1) = 5, a(1, 2) = 6;

    const Matrix at = transposed(a);
    CHECK(at.rows == 3);
    CHECK(at.cols == 2);
    CHECK(at(2, 1) == 6.0);

    const Matrix prod = multiply(a, at); // 2x2
    CHECK_THAT(prod(0, 0), WithinAbs(14.0, 1e-14));
    CHECK_THAT(prod(0, 1), WithinAbs(32.0, 1e-14));
    CHECK_THAT(prod(1, 1), WithinAbs(77.0, 1e-14));
    CHECK(is_symmetric(prod));

    const Matrix eye = Matrix::identity(3);
    CHECK(multiply(eye, at).data == at.data);
    CHECK_THROWS_AS(multiply(a, a), UsageError);
}

TEST_CASE("jacobi solves the 2x2 textbook case exactly") {
    Matrix m(2, 2);
    m(0, 0) = 2, m(0, 1) = 1;
    m(1, 0) = 1, m(1, 1) = 2;
    const SymmetricEigen eig = jacobi_eigen(m);
    REQUIRE(eig.values.size() == 2);
    CHECK_THAT(eig.values[0], WithinAbs(3.0, 1e-12));
    CHECK_THAT(eig.values[1], WithinAbs(1.0, 1e-12));
    // first eigenvector is (1,1)/sqrt(2) up to sign
    const double s = 1.0 / std::sqrt(2.0);
    CHECK_THAT(std::abs(eig.vectors(0, 0)), WithinAbs(s, 1e-12));
    CHECK_THAT(std::abs(eig.vectors(1, 0)), WithinAbs(s, 1e-12));
    CHECK_THAT(eig.vectors(0, 0) * eig.vectors(1, 0), WithinAbs(0.5, 1e-12)); // same sign
}

TEST_CASE("jacobi on random symmetric matrices satisfies A v = lambda v") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 3 + rng.uniform_index(5);
        Matrix a(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                a(i, j) = rng.uniform() * 2.0 - 1.0;
                a(j, i) = a(i, j);
            }
        }
        const SymmetricEigen eig = jacobi_eigen(a);

        for (std::size_t k = 0; k + 1 < n; ++k) {
            REQUIRE(eig.values[k] >= eig.values[k + 1]); // descending
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    av += a(i, j) * eig.vectors(j, k);
                }
                REQUIRE_THAT(av, WithinAbs(eig.values[k] * eig.vectors(i, k), 1e-9));
            }
        }
        // columns orthonormal
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = k; l < n; ++l) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dot += eig.vectors(i, k) * eig.vectors(i, l);
                }
                REQUIRE_THAT(dot, WithinAbs(k == l ? 1.0 : 0.0, 1e-10));
            }
        }
    }
}

TEST_CASE("jacobi rejects non-square and non-symmetric input") {
    Matrix rect(2, 3);
    CHECK_THROWS_AS(jacobi_eigen(rect), UsageError);

    Matrix asym(2, 2);
    asym(0, 1) = 1.0; // (1,0) stays 0
    CHECK_THROWS_AS(jacobi_eigen(asym), UsageError);
    CHECK_FALSE(is_symmetric(asym));
}

TEST_CASE("eigenvalues of a diagonal matrix are its entries, sorted") {
    Matrix d(3, 3);
    d(0, 0) = -1.0;
    d(1, 1) = 5.0;
    d(2, 2) = 2.0;
    const SymmetricEigen eig = jacobi_eigen(d);
    CHECK_THAT(eig.values[0], WithinAbs(5.0, 1e-14));
    CHECK_THAT(eig.values[1], WithinAbs(2.0, 1e-14));
    CHECK_THAT(eig.values[2], WithinAbs(-1.0, 1e-14));
}
