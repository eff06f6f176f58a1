#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rpt/nfa.hpp"

namespace rpt {

struct SccDecomposition {
    // Components in topological order; each sorted by state id.
    std::vector<std::vector<State>> components;
    std::vector<std::uint32_t> component_of;
    // Single state without a self-loop.
    std::vector<bool> trivial;

    std::size_t size() const { return components.size(); }
};

struct SccStructure {
    std::uint32_t period = 1;
    std::vector<std::vector<State>> classes;
    // Class index per automaton state; kNoClass outside the component.
    std::vector<std::uint32_t> class_of;
    std::uint32_t rho = 1;

    static constexpr std::uint32_t kNoClass = 0xffffffffu;
};

SccDecomposition scc_decompose(const Nfa& a);

// gcd of cycle lengths of a non-trivial component; ValidationError otherwise.
std::uint32_t scc_period(const Nfa& a, const std::vector<State>& scc);

// Classes Q_0..Q_{period-1}. Q_0 holds the initial state when the component
// contains it, and the smallest state id otherwise.
SccStructure periodicity_classes(const Nfa& a, const std::vector<State>& scc, bool minimal_rho = true);

// Smallest rho >= 1 past which every residue-compatible pair of states is
// joined by a path of every compatible length inside the component. With
// `minimal` false, returns the guaranteed bound 3|V|^2.
std::uint32_t reachability_constant(const Nfa& a, const std::vector<State>& scc, bool minimal = true);

// lcm of the periods of the non-trivial components, 1 if there are none.
std::uint32_t global_modulus(const Nfa& a);

// A path word from s to t whose length is congruent to k modulo the global
// modulus and at least min_len, shortest then lexicographically least.
std::optional<Word> k_reachable(const Nfa& a, State s, State t, std::uint32_t k, std::size_t min_len);

// Exact-length path word from s to t, using only states allowed by `within`
// (all states when empty); lexicographically least.
std::optional<Word> path_of_length(const Nfa& a, State s, State t, std::size_t len,
                                   const std::vector<bool>& within = {});

// Shortest, then lexicographically least, word from s to any state in targets.
std::optional<Word> shortest_path(const Nfa& a, State s, const std::vector<bool>& targets);

// States reached from `from` by reading w; empty set if the run dies.
StateSet run_set(const Nfa& a, const StateSet& from, const Word& w);

}  // namespace rpt
