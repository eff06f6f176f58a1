#pragma once

#include <optional>
#include <vector>

#include "rpt/nfa.hpp"

namespace rpt {

// For n >= threshold: L contains a word of length n iff residues[n % modulus].
// Below the threshold the answer is read from `below`.
struct LengthProfile {
    std::size_t threshold = 0;
    std::size_t modulus = 1;
    std::vector<bool> residues;
    std::vector<bool> below;

    bool contains(std::size_t n) const {
        return n < threshold ? below[n] : residues[n % modulus];
    }
};

LengthProfile length_profile(const Nfa& a, const Limits& limits = {});

struct DifferenceResult {
    bool nonempty = false;
    std::optional<Word> witness;  // shortest, then least in alphabet order
};

// Decides L(a) \ L(b) != {} by exploring a x subsets(b) breadth first.
DifferenceResult difference_nonempty(const Nfa& a, const Nfa& b, const Limits& limits = {});

// Same search for L(a) and L(b) both containing a common word.
DifferenceResult intersection_nonempty(const Nfa& a, const Nfa& b, const Limits& limits = {});

Nfa universal_nfa(const std::vector<std::string>& alphabet);
bool is_universal(const Nfa& a, const Limits& limits = {});

// True iff the trimmed automaton has a cycle.
bool has_infinite_language(const Nfa& a);

}  // namespace rpt
