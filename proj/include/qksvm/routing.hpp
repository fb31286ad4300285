#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "qksvm/circuit.hpp"
#include "qksvm/device.hpp"
#include "qksvm/errors.hpp"

namespace qksvm {

struct RoutedCircuit {
    Circuit circuit;     // over cm.n_qubits physical qubits
    Layout final_layout; // logical -> physical after all inserted SWAPs
    int swap_count = 0;
};

namespace detail {

inline void check_layout(const Layout& layout, int n_logical, int n_physical) {
    if (layout.n_logical() != n_logical) {
        throw UsageError("layout covers " + std::to_string(layout.n_logical()) +
                         " logical qubits, circuit has " + std::to_string(n_logical));
    }
    std::set<int> used;
    for (int q = 0; q < n_logical; ++q) {
        const int p = layout.physical(q);
        if (p < 0 || p >= n_physical || !used.insert(p).second) {
            throw UsageError("layout must be injective into the device qubits");
        }
    }
}

} // namespace detail

/// Greedy SWAP insertion: a two-qubit gate on uncoupled physical qubits is
/// preceded by SWAPs that walk its first operand along the BFS shortest path
/// until it is adjacent to the second. Deterministic for fixed inputs.
inline RoutedCircuit route_circuit(const Circuit& circuit, const CouplingMap& cm,
                                   const Layout& initial) {
    if (circuit.n_qubits > cm.n_qubits) {
        throw ConfigError("circuit needs " + std::to_string(circuit.n_qubits) +
                          " qubits but device " + cm.name + " has " +
                          std::to_string(cm.n_qubits));
    }
    detail::check_layout(initial, circuit.n_qubits, cm.n_qubits);

    std::vector<int> log_to_phys = initial.log_to_phys;
    std::vector<int> phys_to_log(static_cast<std::size_t>(cm.n_qubits), -1);
    for (int q = 0; q < circuit.n_qubits; ++q) {
        phys_to_log[static_cast<std::size_t>(log_to_phys[static_cast<std::size_t>(q)])] = q;
    }

    RoutedCircuit out;
    out.circuit = Circuit(cm.n_qubits);

    auto swap_physical = [&](int pa, int pb) {
        out.circuit.add(Gate::swap(pa, pb));
        ++out.swap_count;
        const int la = phys_to_log[static_cast<std::size_t>(pa)];
        const int lb = phys_to_log[static_cast<std::size_t>(pb)];
        phys_to_log[static_cast<std::size_t>(pa)] = lb;
        phys_to_log[static_cast<std::size_t>(pb)] = la;
        if (la >= 0) {
            log_to_phys[static_cast<std::size_t>(la)] = pb;
        }
        if (lb >= 0) {
            log_to_phys[static_cast<std::size_t>(lb)] = pa;
        }
    };

    for (const Gate& g : circuit.gates) {
        if (!is_two_qubit(g.kind)) {
            Gate placed = g;
            placed.q0 = log_to_phys[static_cast<std::size_t>(g.q0)];
            out.circuit.add(placed);
            continue;
        }
        int pa = log_to_phys[static_cast<std::size_t>(g.q0)];
        const int pb = log_to_phys[static_cast<std::size_t>(g.q1)];
        if (!cm.coupled(pa, pb)) {
            const std::vector<int> path = shortest_path(cm, pa, pb);
            for (std::size_t k = 0; k + 2 < path.size(); ++k) {
                swap_physical(path[k], path[k + 1]);
            }
            pa = path[path.size() - 2];
        }
        Gate placed = g;
        placed.q0 = pa;
        placed.q1 = pb;
        out.circuit.add(placed);
    }

    out.final_layout.log_to_phys = log_to_phys;
    return out;
}

} // namespace qksvm
