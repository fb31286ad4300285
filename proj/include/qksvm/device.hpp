#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qksvm/errors.hpp"

#include <json.hpp>

namespace qksvm {

/// Device topology: the physical qubit pairs on which two-qubit gates can run.
struct CouplingMap {
    int n_qubits = 0;
    std::set<std::pair<int, int>> edges; // stored with first < second
    std::string name;

    bool coupled(int a, int b) const {
        if (a > b) {
            std::swap(a, b);
        }
        return edges.count({a, b}) > 0;
    }

    /// Neighbors in ascending index order.
    std::vector<int> neighbors(int q) const {
        std::vector<int> out;
        for (const auto& [a, b] : edges) {
            if (a == q) {
                out.push_back(b);
            } else if (b == q) {
                out.push_back(a);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Stochastic error parameters for trajectory emulation.
struct NoiseModel {
    double p1 = 0.001;      // depolarizing probability per single-qubit gate
    double p2 = 0.01;       // per two-qubit gate, each operand independently
    double p_readout = 0.02; // independent bit flip per measured qubit

    bool is_zero() const { return p1 == 0.0 && p2 == 0.0 && p_readout == 0.0; }
};

/// Injective map from logical qubits to physical qubits.
struct Layout {
    std::vector<int> log_to_phys;

    int physical(int logical) const { return log_to_phys[static_cast<std::size_t>(logical)]; }
    int n_logical() const { return static_cast<int>(log_to_phys.size()); }
};

inline Layout identity_layout(int n_logical) {
    Layout l;
    l.log_to_phys.resize(static_cast<std::size_t>(n_logical));
    for (int q = 0; q < n_logical; ++q) {
        l.log_to_phys[static_cast<std::size_t>(q)] = q;
    }
    return l;
}

namespace detail {

inline void add_edge(CouplingMap& cm, int a, int b) {
    if (a > b) {
        std::swap(a, b);
    }
    if (a < 0 || b >= cm.n_qubits || a == b) {
        throw ConfigError("coupling edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") invalid for " + std::to_string(cm.n_qubits) + " qubits");
    }
    cm.edges.insert({a, b});
}

inline bool is_connected(const CouplingMap& cm) {
    if (cm.n_qubits <= 0) {
        return false;
    }
    std::vector<bool> seen(static_cast<std::size_t>(cm.n_qubits), false);
    std::deque<int> frontier{0};
    seen[0] = true;
    int visited = 1;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop_front();
        for (int nb : cm.neighbors(q)) {
            if (!seen[static_cast<std::size_t>(nb)]) {
                seen[static_cast<std::size_t>(nb)] = true;
                ++visited;
                frontier.push_back(nb);
            }
        }
    }
    return visited == cm.n_qubits;
}

} // namespace detail

/// Built-in topologies. "ourense" is the 5-qubit T shape, "yorktown" the
/// 5-qubit bowtie; "line(n)" and "full(n)" are the path and complete graphs.
inline CouplingMap builtin_coupling_map(const std::string& name) {
    CouplingMap cm;
    cm.name = name;
    if (name == "ourense") {
        cm.n_qubits = 5;
        for (auto [a, b] : {std::pair{0, 1}, {1, 2}, {1, 3}, {3, 4}}) {
            detail::add_edge(cm, a, b);
        }
        return cm;
    }
    if (name == "yorktown") {
        cm.n_qubits = 5;
        for (auto [a, b] : {std::pair{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}}) {
            detail::add_edge(cm, a, b);
        }
        return cm;
    }
    auto parse_sized = [&name](const std::string& prefix) -> int {
        if (name.size() > prefix.size() + 1 && name.compare(0, prefix.size(), prefix) == 0 &&
            name[prefix.size()] == '(' && name.back() == ')') {
            const std::string num = name.substr(prefix.size() + 1,
                                                name.size() - prefix.size() - 2);
            try {
                return std::stoi(num);
            } catch (const std::exception&) {
                return -1;
            }
        }
        return -1;
    };
    if (const int n = parse_sized("line"); n > 0) {
        cm.n_qubits = n;
        for (int q = 0; q + 1 < n; ++q) {
            detail::add_edge(cm, q, q + 1);
        }
        return cm;
    }
    if (const int n = parse_sized("full"); n > 0) {
        cm.n_qubits = n;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                detail::add_edge(cm, a, b);
            }
        }
        return cm;
    }
    throw UsageError("unknown coupling map: " + name +
                     " (expected ourense, yorktown, line(n) or full(n))");
}

inline std::vector<std::string> builtin_device_names() { return {"ourense", "yorktown"}; }

/// Breadth-first shortest path from a to b. Ties break toward the lowest
/// next-qubit index, so the result is deterministic.
inline std::vector<int> shortest_path(const CouplingMap& cm, int a, int b) {
    if (a < 0 || a >= cm.n_qubits || b < 0 || b >= cm.n_qubits) {
        throw UsageError("shortest_path qubit out of range");
    }
    if (a == b) {
        return {a};
    }
    std::vector<int> parent(static_cast<std::size_t>(cm.n_qubits), -1);
    std::deque<int> frontier{a};
    parent[static_cast<std::size_t>(a)] = a;
    while (!frontier.empty()) {
        const int q = frontier.front();
        frontier.pop_front();
        for (int nb : cm.neighbors(q)) { // ascending order fixes the tie-break
            if (parent[static_cast<std::size_t>(nb)] == -1) {
                parent[static_cast<std::size_t>(nb)] = q;
                if (nb == b) {
                    std::vector<int> path{b};
                    int cur = b;
                    while (cur != a) {
                        cur = parent[static_cast<std::size_t>(cur)];
                        path.push_back(cur);
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                frontier.push_back(nb);
            }
        }
    }
    throw std::logic_error("coupling map is disconnected"); // excluded by invariant
}

/// Loads {name, n_qubits, edges: [[a,b],...]}; the graph must be connected.
inline CouplingMap coupling_map_from_json(const nlohmann::json& j) {
    CouplingMap cm;
    cm.name = j.value("name", "custom");
    cm.n_qubits = j.at("n_qubits").get<int>();
    if (cm.n_qubits < 1) {
        throw ConfigError("coupling map needs at least 1 qubit");
    }
    for (const auto& e : j.at("edges")) {
        detail::add_edge(cm, e.at(0).get<int>(), e.at(1).get<int>());
    }
    if (cm.n_qubits > 1 && !detail::is_connected(cm)) {
        throw ConfigError("coupling map graph must be connected");
    }
    return cm;
}

inline nlohmann::json to_json(const CouplingMap& cm) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : cm.edges) {
        edges.push_back({a, b});
    }
    return {{"name", cm.name}, {"n_qubits", cm.n_qubits}, {"edges", edges}};
}

inline nlohmann::json to_json(const NoiseModel& nm) {
    return {{"p1", nm.p1}, {"p2", nm.p2}, {"p_readout", nm.p_readout}};
}

inline NoiseModel noise_model_from_json(const nlohmann::json& j) {
    NoiseModel nm;
    nm.p1 = j.value("p1", nm.p1);
    nm.p2 = j.value("p2", nm.p2);
    nm.p_readout = j.value("p_readout", nm.p_readout);
    for (double p : {nm.p1, nm.p2, nm.p_readout}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("noise probabilities must lie in [0, 1]");
        }
    }
    return nm;
}

} // namespace qksvm
