#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qksvm/circuit.hpp"
#include "qksvm/errors.hpp"
#include "qksvm/rng.hpp"

#include <json.hpp>

namespace qksvm {

using ComplexAmp = std::complex<double>;

constexpr int kMaxQubits = 24;

/// Bit-ordering convention, fixed project-wide:
///   qubit 0 is the MOST significant bit of the amplitude index, and
///   bitstrings render qubit 0 leftmost.
/// So for an n-qubit register, basis index i assigns qubit q the bit
/// (i >> (n-1-q)) & 1, and e.g. |10> (qubit 0 = 1, qubit 1 = 0) is index 2.
struct StateVector {
    int n_qubits = 0;
    std::vector<ComplexAmp> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }
};

/// Index mask selecting qubit q's bit.
inline std::size_t qubit_mask(int n_qubits, int q) {
    return std::size_t{1} << (n_qubits - 1 - q);
}

/// Renders a basis index as a bitstring, qubit 0 leftmost.
inline std::string index_to_bitstring(std::size_t index, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q) {
        if (index & qubit_mask(n_qubits, q)) {
            s[static_cast<std::size_t>(q)] = '1';
        }
    }
    return s;
}

/// Measurement outcomes of a register, keyed by bitstring.
struct CountHistogram {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t shots = 0;
};

inline StateVector new_zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw ConfigError("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                          "], got " + std::to_string(n_qubits));
    }
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t{1} << n_qubits, ComplexAmp{0.0, 0.0});
    s.amplitudes[0] = ComplexAmp{1.0, 0.0};
    return s;
}

namespace detail {

inline void apply_single_qubit(StateVector& s, int q, ComplexAmp u00, ComplexAmp u01,
                               ComplexAmp u10, ComplexAmp u11) {
    const std::size_t stride = qubit_mask(s.n_qubits, q);
    const std::size_t dim = s.dim();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const ComplexAmp a0 = s.amplitudes[i];
            const ComplexAmp a1 = s.amplitudes[i + stride];
            s.amplitudes[i] = u00 * a0 + u01 * a1;
            s.amplitudes[i + stride] = u10 * a0 + u11 * a1;
        }
    }
}

inline void apply_diagonal_on_one(StateVector& s, int q, ComplexAmp factor) {
    const std::size_t stride = qubit_mask(s.n_qubits, q);
    const std::size_t dim = s.dim();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            s.amplitudes[i + stride] *= factor;
        }
    }
}

inline void apply_x(StateVector& s, int q) {
    const std::size_t stride = qubit_mask(s.n_qubits, q);
    const std::size_t dim = s.dim();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            std::swap(s.amplitudes[i], s.amplitudes[i + stride]);
        }
    }
}

inline void apply_cnot(StateVector& s, int control, int target) {
    const std::size_t cmask = qubit_mask(s.n_qubits, control);
    const std::size_t tmask = qubit_mask(s.n_qubits, target);
    const std::size_t dim = s.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cmask) && !(i & tmask)) {
            std::swap(s.amplitudes[i], s.amplitudes[i | tmask]);
        }
    }
}

inline void apply_swap(StateVector& s, int a, int b) {
    const std::size_t amask = qubit_mask(s.n_qubits, a);
    const std::size_t bmask = qubit_mask(s.n_qubits, b);
    const std::size_t dim = s.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if ((i & amask) && !(i & bmask)) {
            std::swap(s.amplitudes[i], s.amplitudes[(i & ~amask) | bmask]);
        }
    }
}

} // namespace detail

inline void apply_gate(StateVector& s, const Gate& g) {
    auto in_range = [&s](int q) { return q >= 0 && q < s.n_qubits; };
    if (!in_range(g.q0) || (is_two_qubit(g.kind) && (!in_range(g.q1) || g.q0 == g.q1))) {
        throw UsageError("gate operands invalid for register of " +
                         std::to_string(s.n_qubits) + " qubits");
    }
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    switch (g.kind) {
    case GateKind::H:
        detail::apply_single_qubit(s, g.q0, {inv_sqrt2, 0}, {inv_sqrt2, 0}, {inv_sqrt2, 0},
                                   {-inv_sqrt2, 0});
        break;
    case GateKind::X:
        detail::apply_x(s, g.q0);
        break;
    case GateKind::Phase:
        detail::apply_diagonal_on_one(s, g.q0, std::polar(1.0, g.angle));
        break;
    case GateKind::Rz: {
        // diag(e^{-i a/2}, e^{+i a/2}); differs from Phase(a) by a global phase.
        const ComplexAmp lo = std::polar(1.0, -g.angle / 2.0);
        const ComplexAmp hi = std::polar(1.0, g.angle / 2.0);
        detail::apply_single_qubit(s, g.q0, lo, {0, 0}, {0, 0}, hi);
        break;
    }
    case GateKind::Cnot:
        detail::apply_cnot(s, g.q0, g.q1);
        break;
    case GateKind::Swap:
        detail::apply_swap(s, g.q0, g.q1);
        break;
    }
}

inline void apply_circuit(StateVector& s, const Circuit& c) {
    if (s.n_qubits != c.n_qubits) {
        throw UsageError("state has " + std::to_string(s.n_qubits) + " qubits but circuit has " +
                         std::to_string(c.n_qubits));
    }
    for (const Gate& g : c.gates) {
        apply_gate(s, g);
    }
}

/// <a|b> = sum conj(a_i) * b_i.
inline ComplexAmp inner_product(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) {
        throw UsageError("inner product requires equal qubit counts");
    }
    ComplexAmp acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) {
        acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    return acc;
}

inline double norm_squared(const StateVector& s) {
    double acc = 0.0;
    for (const ComplexAmp& a : s.amplitudes) {
        acc += std::norm(a);
    }
    return acc;
}

/// Probability of the all-zeros outcome, |amplitude[0]|^2.
inline double prob_all_zeros(const StateVector& s) {
    return std::norm(s.amplitudes[0]);
}

namespace detail {

inline std::vector<double> cumulative_probabilities(const StateVector& s) {
    std::vector<double> cdf(s.dim());
    double acc = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        acc += std::norm(s.amplitudes[i]);
        cdf[i] = acc;
    }
    return cdf;
}

inline std::size_t draw_outcome(const std::vector<double>& cdf, double u) {
    const double target = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) {
        --it;
    }
    return static_cast<std::size_t>(it - cdf.begin());
}

} // namespace detail

/// Seeded multinomial sampling of the computational-basis distribution.
/// Shot s draws one outcome from an Rng seeded with derive_seed(seed, s),
/// so histograms are reproducible and shot-order independent.
inline CountHistogram sample_counts(const StateVector& s, std::uint64_t shots,
                                    std::uint64_t seed) {
    if (shots == 0) {
        throw UsageError("shots must be >= 1");
    }
    const std::vector<double> cdf = detail::cumulative_probabilities(s);
    std::map<std::size_t, std::uint64_t> raw;
    for (std::uint64_t shot = 0; shot < shots; ++shot) {
        Rng rng(derive_seed(seed, shot));
        ++raw[detail::draw_outcome(cdf, rng.uniform())];
    }
    CountHistogram hist;
    hist.shots = shots;
    for (const auto& [index, count] : raw) {
        hist.counts[index_to_bitstring(index, s.n_qubits)] = count;
    }
    return hist;
}

/// Debug dump: JSON array of [re, im] pairs in index order.
inline nlohmann::json state_to_json(const StateVector& s) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ComplexAmp& a : s.amplitudes) {
        arr.push_back({a.real(), a.imag()});
    }
    return arr;
}

inline nlohmann::json histogram_to_json(const CountHistogram& h) {
    nlohmann::json j;
    j["shots"] = h.shots;
    j["counts"] = nlohmann::json::object();
    for (const auto& [bits, count] : h.counts) {
        j["counts"][bits] = count;
    }
    return j;
}

} // namespace qksvm
