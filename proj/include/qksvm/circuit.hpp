#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "qksvm/errors.hpp"

namespace qksvm {

enum class GateKind { H, X, Phase, Rz, Cnot, Swap };

inline bool is_two_qubit(GateKind k) { return k == GateKind::Cnot || k == GateKind::Swap; }

/// One gate instance. q0 is the target for single-qubit kinds, the control
/// for CNOT, and the first operand for SWAP. q1 is -1 for single-qubit kinds.
/// angle is meaningful for Phase and Rz only.
struct Gate {
    GateKind kind;
    int q0;
    int q1 = -1;
    double angle = 0.0;

    static Gate h(int q) { return {GateKind::H, q}; }
    static Gate x(int q) { return {GateKind::X, q}; }
    static Gate phase(int q, double theta) { return {GateKind::Phase, q, -1, theta}; }
    static Gate rz(int q, double theta) { return {GateKind::Rz, q, -1, theta}; }
    static Gate cnot(int control, int target) { return {GateKind::Cnot, control, target}; }
    static Gate swap(int a, int b) { return {GateKind::Swap, a, b}; }
};

/// Ordered gate list over a fixed register width.
struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    Circuit() = default;
    explicit Circuit(int n) : n_qubits(n) {}

    Circuit& add(const Gate& g) {
        check_gate(g);
        gates.push_back(g);
        return *this;
    }

    void check_gate(const Gate& g) const {
        auto in_range = [this](int q) { return q >= 0 && q < n_qubits; };
        if (!in_range(g.q0)) {
            throw UsageError("gate qubit index " + std::to_string(g.q0) + " out of range for " +
                             std::to_string(n_qubits) + " qubits");
        }
        if (is_two_qubit(g.kind)) {
            if (!in_range(g.q1)) {
                throw UsageError("gate qubit index " + std::to_string(g.q1) +
                                 " out of range for " + std::to_string(n_qubits) + " qubits");
            }
            if (g.q0 == g.q1) {
                throw UsageError("two-qubit gate operands must differ");
            }
        }
    }
};

/// Inverse of a single gate: Phase/Rz negate their angle, everything else in
/// this gate set is self-inverse.
inline Gate inverse(const Gate& g) {
    Gate inv = g;
    if (g.kind == GateKind::Phase || g.kind == GateKind::Rz) {
        inv.angle = -g.angle;
    }
    return inv;
}

/// Inverse circuit: gates reversed, each gate inverted.
inline Circuit inverted(const Circuit& c) {
    Circuit inv(c.n_qubits);
    inv.gates.reserve(c.gates.size());
    for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
        inv.gates.push_back(inverse(*it));
    }
    return inv;
}

/// Concatenation over the same register width.
inline Circuit concatenated(const Circuit& first, const Circuit& second) {
    if (first.n_qubits != second.n_qubits) {
        throw UsageError("cannot concatenate circuits of different widths");
    }
    Circuit out = first;
    out.gates.insert(out.gates.end(), second.gates.begin(), second.gates.end());
    return out;
}

/// Two-qubit circuit preparing (|00> + |11>)/sqrt(2): H on qubit 0, then
/// CNOT with control 0 and target 1.
inline Circuit bell_circuit() {
    Circuit c(2);
    c.add(Gate::h(0));
    c.add(Gate::cnot(0, 1));
    return c;
}

} // namespace qksvm
