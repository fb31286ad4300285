#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qksvm/circuit.hpp"
#include "qksvm/device.hpp"
#include "qksvm/errors.hpp"
#include "qksvm/rng.hpp"
#include "qksvm/routing.hpp"
#include "qksvm/state_vector.hpp"

namespace qksvm {

namespace detail {

/// Pauli by index: 0 = X, 1 = Y, 2 = Z. Y is realized as Z then X, which
/// equals Y up to a global phase and is indistinguishable in sampled outcomes.
inline void apply_pauli(StateVector& s, std::uint64_t which, int q) {
    switch (which) {
    case 0:
        apply_x(s, q);
        break;
    case 1:
        apply_diagonal_on_one(s, q, ComplexAmp{-1.0, 0.0});
        apply_x(s, q);
        break;
    default:
        apply_diagonal_on_one(s, q, ComplexAmp{-1.0, 0.0});
        break;
    }
}

inline void maybe_insert_pauli(StateVector& s, Rng& rng, double p, int q) {
    if (p <= 0.0) {
        return; // no draw, keeps the zero-noise stream aligned with sample_counts
    }
    if (rng.uniform() < p) {
        apply_pauli(s, rng.uniform_index(3), q);
    }
}

/// Reads the logical outcome out of a physical basis index via the layout.
inline std::size_t physical_to_logical_index(std::size_t phys_index, const Layout& layout,
                                             int n_physical) {
    std::size_t logical = 0;
    const int n_logical = layout.n_logical();
    for (int q = 0; q < n_logical; ++q) {
        const int p = layout.physical(q);
        if (phys_index & qubit_mask(n_physical, p)) {
            logical |= qubit_mask(n_logical, q);
        }
    }
    return logical;
}

} // namespace detail

/// Stochastic-Pauli trajectory sampling of a circuit on an emulated device.
/// The circuit is routed once; each shot then replays it with a random Pauli
/// inserted after a single-qubit gate with probability p1 (on its target) and
/// after a two-qubit gate with probability p2 (independently on each
/// operand), samples one outcome, and flips each readout bit with probability
/// p_readout. Shot s draws from derive_seed(seed, s), so the histogram does
/// not depend on shot evaluation order.
inline CountHistogram noisy_sample(const Circuit& circuit, const CouplingMap& cm,
                                   const NoiseModel& noise, std::uint64_t shots,
                                   std::uint64_t seed, const Layout* initial = nullptr) {
    if (shots == 0) {
        throw UsageError("shots must be >= 1");
    }
    const Layout layout = initial ? *initial : identity_layout(circuit.n_qubits);
    const RoutedCircuit routed = route_circuit(circuit, cm, layout);
    const int n_logical = circuit.n_qubits;
    const bool gate_noise = noise.p1 > 0.0 || noise.p2 > 0.0;

    StateVector ideal;
    std::vector<double> ideal_cdf;
    if (!gate_noise) {
        ideal = new_zero_state(cm.n_qubits);
        apply_circuit(ideal, routed.circuit);
        ideal_cdf = detail::cumulative_probabilities(ideal);
    }

    StateVector scratch = new_zero_state(cm.n_qubits);
    std::map<std::size_t, std::uint64_t> raw;
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        Rng rng(derive_seed(seed, shot));
        std::size_t phys_outcome;
        if (gate_noise) {
            scratch.amplitudes.assign(scratch.dim(), ComplexAmp{0.0, 0.0});
            scratch.amplitudes[0] = ComplexAmp{1.0, 0.0};
            for (const Gate& g : routed.circuit.gates) {
                apply_gate(scratch, g);
                if (is_two_qubit(g.kind)) {
                    detail::maybe_insert_pauli(scratch, rng, noise.p2, g.q0);
                    detail::maybe_insert_pauli(scratch, rng, noise.p2, g.q1);
                } else {
                    detail::maybe_insert_pauli(scratch, rng, noise.p1, g.q0);
                }
            }
            phys_outcome =
                detail::draw_outcome(detail::cumulative_probabilities(scratch), rng.uniform());
        } else {
            phys_outcome = detail::draw_outcome(ideal_cdf, rng.uniform());
        }
        std::size_t outcome =
            detail::physical_to_logical_index(phys_outcome, routed.final_layout, cm.n_qubits);
        if (noise.p_readout > 0.0) {
            for (int q = 0; q < n_logical; ++q) {
                if (rng.uniform() < noise.p_readout) {
                    outcome ^= qubit_mask(n_logical, q);
                }
            }
        }
        ++raw[outcome];
    }

    CountHistogram hist;
    hist.shots = shots;
    for (const auto& [index, count] : raw) {
        hist.counts[index_to_bitstring(index, n_logical)] = count;
    }
    return hist;
}

} // namespace qksvm
