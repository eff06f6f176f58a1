#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rpt/nfa.hpp"

namespace rpt {

// Letter i of a positional word carries index (offset + i) mod p.
struct PositionalWord {
    std::uint32_t offset = 0;
    Word letters;

    std::size_t size() const { return letters.size(); }
    auto operator<=>(const PositionalWord&) const = default;
};

// "offset:letters", e.g. "1:ab".
std::string format_positional(const Nfa& a, const PositionalWord& w);
PositionalWord parse_positional(const Nfa& a, std::string_view text, std::uint32_t p);

// tau occurs in mu at some position j with mu.offset + j == tau.offset (mod p).
bool is_positional_factor(const PositionalWord& tau, const PositionalWord& mu, std::uint32_t p);

// Words over the (residue, symbol) alphabet; symbol r * |Sigma| + x, label "r:c".
std::vector<std::string> pair_alphabet(const std::vector<std::string>& base, std::uint32_t p);
Word encode_positional(const PositionalWord& w, std::uint32_t p, std::size_t sigma);
PositionalWord decode_positional(const Word& w, std::size_t sigma);

struct Portal {
    State s;
    std::uint32_t x;
    State t;
    std::uint32_t y;
    auto operator<=>(const Portal&) const = default;
};

// The part of an automaton a positional word is checked against: one
// component, entered at a (state, residue) seed, with the global modulus.
// For a portal the seed is (s, x); for a strongly connected automaton it is
// (q0, 0). Holds its own tables and does not refer back to the automaton.
class Scope {
public:
    static Scope whole(const Nfa& a);
    static Scope portal(const Nfa& a, const Portal& p, std::uint32_t modulus);

    std::uint32_t modulus() const { return p_; }
    std::size_t sigma() const { return sigma_; }
    const std::vector<State>& states() const { return states_; }
    // False only for a portal whose exit pair is not reachable from its entry.
    bool language_nonempty() const { return nonempty_; }
    // Component states that can be current when the next letter has index r.
    const StateSet& live(std::uint32_t r) const { return live_[r % p_]; }
    StateSet step(const StateSet& from, Symbol a) const;

    bool is_blocking(const PositionalWord& w) const;
    // Smallest e in [begin, end) such that u[begin..e] read from the live set
    // of residue `offset` dies, or `end` when it never does.
    std::size_t blocking_end(const Symbol* u, std::size_t begin, std::size_t end,
                             std::uint32_t offset) const;

    // States are the component's (state, residue) pairs; finals are the exit
    // pair of a portal, or every (final, residue) pair of a whole automaton.
    Nfa language_automaton(const std::vector<std::string>& base_alphabet) const;

    const Portal& seed() const { return seed_; }

private:
    std::uint32_t p_ = 1;
    std::size_t sigma_ = 0;
    Portal seed_{};
    bool nonempty_ = true;
    std::vector<State> states_;           // local index -> automaton state
    std::vector<std::vector<StateSet>> succ_;  // [local][symbol]
    std::vector<std::vector<std::uint64_t>> succ_mask_;  // same, when <= 64 states
    std::vector<StateSet> live_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> finals_;  // (local, residue)
    std::vector<std::vector<bool>> reached_;  // [local][residue]
    std::vector<std::uint64_t> live_mask_;
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> edges_;  // [local] (symbol, local)
    bool small_ = false;

    void build(const Nfa& a, const std::vector<State>& comp, State s, std::uint32_t x, std::uint32_t modulus);
};

// u in L(a) iff <0:u> in L(result). States (q, r), trimmed.
Nfa positional_automaton(const Nfa& a);
Nfa portal_language_automaton(const Nfa& a, const Portal& P);

// Deterministic automaton over the pair alphabet accepting exactly the
// blocking positional words of the scope; the dead subset plays the sink.
Nfa blocking_factor_automaton(const Scope& scope, const std::vector<std::string>& base_alphabet,
                              const Limits& limits = {});
// Blocking words none of whose proper positional factors are blocking.
Nfa minimal_blocking_factor_automaton(const Scope& scope, const std::vector<std::string>& base_alphabet,
                                      const Limits& limits = {});

enum class BlockingTag { Empty, Finite, Infinite };

struct BlockingClass {
    BlockingTag tag = BlockingTag::Empty;
    std::vector<PositionalWord> words;  // complete list when tag is Finite
};

BlockingClass mbf_class(const Scope& scope, const std::vector<std::string>& base_alphabet,
                        const Limits& limits = {});
std::vector<PositionalWord> enumerate_mbf(const Scope& scope, const std::vector<std::string>& base_alphabet,
                                          std::size_t max_len, const Limits& limits = {});

const char* to_string(BlockingTag t);

}  // namespace rpt
