#pragma once

// Shared helpers for the test suite: a random-circuit generator and an
// independent dense-matrix simulator used as an oracle. The oracle builds
// explicit 2^n x 2^n unitaries from Kronecker products (qubit 0 = most
// significant factor) and never touches the statevector kernels under test.

#include <complex>
#include <cstdint>
#include <vector>

#include "qksvm/circuit.hpp"
#include "qksvm/rng.hpp"

namespace testutil {

using Cx = std::complex<double>;
using CMat = std::vector<std::vector<Cx>>;
using CVec = std::vector<Cx>;

inline CMat cmat_identity(std::size_t n) {
    CMat m(n, CVec(n, Cx{0.0, 0.0}));
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = Cx{1.0, 0.0};
    }
    return m;
}

inline CMat kron(const CMat& a, const CMat& b) {
    const std::size_t ar = a.size();
    const std::size_t ac = a[0].size();
    const std::size_t br = b.size();
    const std::size_t bc = b[0].size();
    CMat m(ar * br, CVec(ac * bc, Cx{0.0, 0.0}));
    for (std::size_t i = 0; i < ar; ++i) {
        for (std::size_t j = 0; j < ac; ++j) {
            for (std::size_t k = 0; k < br; ++k) {
                for (std::size_t l = 0; l < bc; ++l) {
                    m[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    return m;
}

inline CMat cmat_add(CMat a, const CMat& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            a[i][j] += b[i][j];
        }
    }
    return a;
}

inline CVec matvec(const CMat& m, const CVec& v) {
    CVec out(m.size(), Cx{0.0, 0.0});
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            out[i] += m[i][j] * v[j];
        }
    }
    return out;
}

// Single-qubit primitive matrices.
inline CMat m_h() {
    const double s = 1.0 / std::sqrt(2.0);
    return {{Cx{s, 0}, Cx{s, 0}}, {Cx{s, 0}, Cx{-s, 0}}};
}
inline CMat m_x() { return {{Cx{0, 0}, Cx{1, 0}}, {Cx{1, 0}, Cx{0, 0}}}; }
inline CMat m_phase(double t) { return {{Cx{1, 0}, Cx{0, 0}}, {Cx{0, 0}, std::polar(1.0, t)}}; }
inline CMat m_rz(double t) {
    return {{std::polar(1.0, -t / 2.0), Cx{0, 0}}, {Cx{0, 0}, std::polar(1.0, t / 2.0)}};
}
inline CMat m_p0() { return {{Cx{1, 0}, Cx{0, 0}}, {Cx{0, 0}, Cx{0, 0}}}; }
inline CMat m_p1() { return {{Cx{0, 0}, Cx{0, 0}}, {Cx{0, 0}, Cx{1, 0}}}; }

/// Kron chain with `at` placed on qubit q (qubit 0 = most significant).
inline CMat chain1(int n, int q, const CMat& at) {
    CMat m{{Cx{1, 0}}};
    for (int k = 0; k < n; ++k) {
        m = kron(m, k == q ? at : cmat_identity(2));
    }
    return m;
}

/// Kron chain with `ma` on a and `mb` on b.
inline CMat chain2(int n, int a, const CMat& ma, int b, const CMat& mb) {
    CMat m{{Cx{1, 0}}};
    for (int k = 0; k < n; ++k) {
        m = kron(m, k == a ? ma : (k == b ? mb : cmat_identity(2)));
    }
    return m;
}

/// Full unitary of one gate: CNOT = P0(c)I + P1(c)X(t); SWAP via three CNOTs.
inline CMat gate_unitary(int n, const qksvm::Gate& g) {
    using qksvm::GateKind;
    switch (g.kind) {
    case GateKind::H:
        return chain1(n, g.q0, m_h());
    case GateKind::X:
        return chain1(n, g.q0, m_x());
    case GateKind::Phase:
        return chain1(n, g.q0, m_phase(g.angle));
    case GateKind::Rz:
        return chain1(n, g.q0, m_rz(g.angle));
    case GateKind::Cnot:
        return cmat_add(chain2(n, g.q0, m_p0(), g.q1, cmat_identity(2)),
                        chain2(n, g.q0, m_p1(), g.q1, m_x()));
    default: { // Swap = CNOT(a,b) CNOT(b,a) CNOT(a,b) composed as matrices
        const CMat ab = cmat_add(chain2(n, g.q0, m_p0(), g.q1, cmat_identity(2)),
                                 chain2(n, g.q0, m_p1(), g.q1, m_x()));
        const CMat ba = cmat_add(chain2(n, g.q1, m_p0(), g.q0, cmat_identity(2)),
                                 chain2(n, g.q1, m_p1(), g.q0, m_x()));
        CMat m(ab.size(), CVec(ab.size(), Cx{0, 0}));
        // m = ab * ba * ab
        CMat t(ab.size(), CVec(ab.size(), Cx{0, 0}));
        for (std::size_t i = 0; i < ab.size(); ++i) {
            for (std::size_t k = 0; k < ab.size(); ++k) {
                for (std::size_t j = 0; j < ab.size(); ++j) {
                    t[i][j] += ab[i][k] * ba[k][j];
                }
            }
        }
        for (std::size_t i = 0; i < ab.size(); ++i) {
            for (std::size_t k = 0; k < ab.size(); ++k) {
                for (std::size_t j = 0; j < ab.size(); ++j) {
                    m[i][j] += t[i][k] * ab[k][j];
                }
            }
        }
        return m;
    }
    }
}

/// Applies a circuit to |0...0> purely with dense matrices.
inline CVec oracle_run(const qksvm::Circuit& c) {
    CVec v(std::size_t{1} << c.n_qubits, Cx{0, 0});
    v[0] = Cx{1, 0};
    for (const qksvm::Gate& g : c.gates) {
        v = matvec(gate_unitary(c.n_qubits, g), v);
    }
    return v;
}

/// Random circuit over the full gate set.
inline qksvm::Circuit random_circuit(qksvm::Rng& rng, int n_qubits, int n_gates) {
    qksvm::Circuit c(n_qubits);
    for (int i = 0; i < n_gates; ++i) {
        const auto q0 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_qubits)));
        const double angle = (rng.uniform() * 2.0 - 1.0) * 6.0;
        switch (n_qubits > 1 ? rng.uniform_index(6) : rng.uniform_index(4)) {
        case 0:
            c.add(qksvm::Gate::h(q0));
            break;
        case 1:
            c.add(qksvm::Gate::x(q0));
            break;
        case 2:
            c.add(qksvm::Gate::phase(q0, angle));
            break;
        case 3:
            c.add(qksvm::Gate::rz(q0, angle));
            break;
        default: {
            auto q1 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n_qubits - 1)));
            if (q1 >= q0) {
                ++q1;
            }
            if (rng.uniform() < 0.5) {
                c.add(qksvm::Gate::cnot(q0, q1));
            } else {
                c.add(qksvm::Gate::swap(q0, q1));
            }
            break;
        }
        }
    }
    return c;
}

} // namespace testutil
