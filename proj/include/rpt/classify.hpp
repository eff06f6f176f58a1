#pragma once

#include <optional>
#include <vector>

#include "rpt/sccpaths.hpp"

namespace rpt {

enum class LanguageClass { Trivial, Easy, Hard };
const char* to_string(LanguageClass c);

// Either the language is finite, or `path` has a portal with no blocking
// factor at all.
struct TrivialWitness {
    bool finite_language = false;
    std::optional<SccPath> path;
    std::size_t portal = 0;
};

// For one accepting path pi2: the portals strictly between j_left and j_right
// are all equivalent to the hard portal, and the plans separate the outer
// parts of pi2 from the corresponding halves of the hard path.
struct HardMatch {
    std::size_t path_index = 0;
    int j_left = -1;
    int j_right = 0;
    SeparationPlan left;
    SeparationPlan right;
};

struct HardCertificate {
    SccPath path;
    std::size_t portal = 0;
    std::vector<HardMatch> matches;  // one per accepting path, in path order
};

struct Classification {
    LanguageClass tag = LanguageClass::Trivial;
    std::optional<TrivialWitness> trivial;
    std::optional<HardCertificate> hard;
    // Easy: a blocking sequence of the automaton, one shortest blocking
    // factor per portal of each accepting path.
    FactorSequence blocking;
};

std::optional<TrivialWitness> is_trivial(Analysis& an);
std::optional<HardCertificate> is_hard(Analysis& an);
Classification classify(Analysis& an);
Classification classify(const Nfa& a, const Limits& limits = {});

// Replays a certificate against the path predicates; throws ValidationError
// on the first failed check.
void verify_certificate(Analysis& an, const HardCertificate& cert);

// sigma below tau: each element of sigma is a positional factor of an element
// of tau, at non-decreasing indices.
bool sequence_below(const FactorSequence& sigma, const FactorSequence& tau, std::uint32_t p);

struct MbsEnumeration {
    std::vector<FactorSequence> sequences;
    // Minimal among blocking sequences within the bounds; longer elements or
    // more terms may still hide further minimal sequences.
    bool bounded = true;
};

// term_bound 0 means p^2 |Q|^2.
MbsEnumeration enumerate_mbs(Analysis& an, std::size_t term_bound, std::size_t len_bound);

// Adds "!" from every final state to the initial one and a "#" loop on every
// state. Needs a trim automaton accepting every word of length below 2.
Nfa universality_gadget(const Nfa& a);
// The same over one more letter, "♭", that labels no transition.
Nfa easiness_gadget(const Nfa& a);

}  // namespace rpt
