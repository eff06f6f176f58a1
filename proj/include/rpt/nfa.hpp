#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "rpt/errors.hpp"

namespace rpt {

using State = std::uint32_t;
using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;
using StateSet = boost::dynamic_bitset<std::uint64_t>;

struct Transition {
    State from;
    Symbol symbol;
    State to;
    auto operator<=>(const Transition&) const = default;
};

struct Edge {
    Symbol symbol;
    State to;
};

// Immutable NFA. Symbols are indices into `alphabet()`, whose order is the
// declared one and drives every lexicographic tie-break.
class Nfa {
public:
    Nfa();
    Nfa(std::size_t state_count, std::vector<std::string> alphabet,
        std::vector<Transition> transitions, State initial, std::vector<State> finals,
        bool empty_language = false);

    std::size_t state_count() const { return state_count_; }
    std::size_t alphabet_size() const { return alphabet_.size(); }
    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::vector<Transition>& transitions() const { return transitions_; }
    State initial() const { return initial_; }
    const std::vector<State>& finals() const { return finals_; }
    bool is_final(State q) const { return final_flag_[q] != 0; }
    // Set only on the canonical automaton produced by trimming an empty language.
    bool empty_language() const { return empty_language_; }

    // Outgoing edges of q sorted by (symbol, target).
    std::span<const Edge> out(State q) const {
        return {out_edges_.data() + out_begin_[q], out_edges_.data() + out_begin_[q + 1]};
    }
    // Incoming edges of q; Edge::to holds the source state.
    std::span<const Edge> in(State q) const {
        return {in_edges_.data() + in_begin_[q], in_edges_.data() + in_begin_[q + 1]};
    }

    Symbol symbol_of(std::string_view label) const;
    // Maps each character of `text` to a symbol; needs single-character labels.
    Word word(std::string_view text) const;
    std::string spell(const Word& w) const;

    // Successors of the set `from` on symbol a.
    StateSet step(const StateSet& from, Symbol a) const;
    // Same, written into `next` (resized and cleared) to reuse its storage.
    void step_into(const StateSet& from, Symbol a, StateSet& next) const;
    StateSet initial_set() const;
    bool any_final(const StateSet& s) const;

    bool operator==(const Nfa& other) const;

private:
    std::size_t state_count_ = 1;
    std::vector<std::string> alphabet_;
    std::vector<Transition> transitions_;
    State initial_ = 0;
    std::vector<State> finals_;
    std::vector<char> final_flag_;
    bool empty_language_ = false;
    std::vector<Edge> out_edges_, in_edges_;
    std::vector<std::size_t> out_begin_, in_begin_;
};

Nfa parse_nfa(std::string_view text);
std::string serialize_nfa(const Nfa& a);
Nfa load_nfa(const std::string& path);

// Reachable and co-reachable part, renumbered in original id order. An empty
// language yields one non-final initial state, no transitions, and the flag set.
Nfa trim(const Nfa& a);
bool is_trim(const Nfa& a);

bool accepts(const Nfa& a, const Word& u);

std::vector<bool> reachable_from(const Nfa& a, State s);
std::vector<bool> coreachable(const Nfa& a);

}  // namespace rpt
