#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rpt/nfa.hpp"
#include "rpt/positional.hpp"
#include "rpt/structure.hpp"

namespace rpt {

// Portals joined by single letters: letters[i - 1] leads from portals[i - 1].t
// to portals[i].s and is read at index portals[i - 1].y.
struct SccPath {
    std::vector<Portal> portals;
    Word letters;

    std::size_t k() const { return portals.size() - 1; }
    auto operator<=>(const SccPath&) const = default;
};

using FactorSequence = std::vector<PositionalWord>;

struct EffectSummary {
    int left = -1;
    int right = 0;
};

enum class PortalOrder { Equivalent, Below, Above, Incomparable };

// Pa below Pb means every blocking factor of Pb also blocks Pa.
struct PortalRelation {
    bool below = false;
    bool above = false;
    std::optional<PositionalWord> only_a;  // blocks Pa but not Pb
    std::optional<PositionalWord> only_b;  // blocks Pb but not Pa

    PortalOrder order() const;
};

// One step of a separating sequence: `word` blocks the next `advance_first`
// portals of the path to be blocked and the next `advance_second` portals of
// the path to be spared.
struct SeparationStep {
    PositionalWord word;
    std::uint32_t advance_first = 0;
    std::uint32_t advance_second = 0;
    char branch() const { return advance_second == 0 ? 'A' : 'B'; }
};

struct SeparationPlan {
    std::vector<SeparationStep> steps;
    FactorSequence sequence() const;
};

// Per-automaton cache of portal scopes, blocking automata and derived
// answers. Not synchronized: share between threads only for reading after
// the entries in question have been computed.
class Analysis {
public:
    explicit Analysis(Nfa a, Limits limits = {});

    const Nfa& automaton() const { return a_; }
    std::uint32_t modulus() const { return p_; }
    const SccDecomposition& components() const { return scc_; }
    const Limits& limits() const { return limits_; }

    const Scope& scope(const Portal& P);
    // Deterministic, trimmed; over the pair alphabet.
    const Nfa& block_automaton(const Portal& P);
    const BlockingClass& mbf(const Portal& P);
    bool blocks(const PositionalWord& w, const Portal& P) { return scope(P).is_blocking(w); }
    bool has_blocking_factor(const Portal& P) { return !block_automaton(P).empty_language(); }

    const std::vector<SccPath>& accepting_paths();

    const PortalRelation& relation(const Portal& a, const Portal& b);
    bool equivalent(const Portal& a, const Portal& b) { return relation(a, b).order() == PortalOrder::Equivalent; }

    const std::optional<SeparationPlan>& separation(std::span<const Portal> first, std::span<const Portal> second);

private:
    Nfa a_;
    Limits limits_;
    std::uint32_t p_ = 1;
    SccDecomposition scc_;
    std::map<Portal, Scope> scopes_;
    std::map<Portal, Nfa> blocks_;
    std::map<Portal, BlockingClass> mbf_;
    std::optional<std::vector<SccPath>> paths_;
    std::map<std::pair<Portal, Portal>, PortalRelation> relations_;
    std::map<std::pair<std::vector<Portal>, std::vector<Portal>>, std::optional<SeparationPlan>> separations_;
};

// Accepting SCC-paths of a trim automaton, sorted. ResourceError past the
// path cap.
std::vector<SccPath> enumerate_accepting_scc_paths(const Nfa& a, const Limits& limits = {});

// Throws ValidationError naming the first broken link or portal.
void validate_scc_path(const Nfa& a, const SccPath& pi, bool accepting = true);

// Over the pair alphabet: the portal languages concatenated through the links.
Nfa scc_path_language_automaton(const Nfa& a, const SccPath& pi);

// Largest i such that sigma blocks portals 0..i in order (-1 if none), by a
// greedy scan that lets one element block several consecutive portals.
int left_effect(Analysis& an, const FactorSequence& sigma, std::span<const Portal> path);
// Smallest i such that sigma blocks portals i..k (k + 1 if none).
int right_effect(Analysis& an, const FactorSequence& sigma, std::span<const Portal> path);
EffectSummary effects(Analysis& an, const FactorSequence& sigma, const SccPath& pi);

bool is_blocking_for_path(Analysis& an, const FactorSequence& sigma, const SccPath& pi);
// Each portal blocked by its own element, at strictly increasing indices.
bool is_strongly_blocking(Analysis& an, const FactorSequence& sigma, const SccPath& pi);
bool is_blocking_sequence(Analysis& an, const FactorSequence& sigma);

PortalRelation portal_preorder(Analysis& an, const Portal& a, const Portal& b);

// A sequence blocking `first` but not `second`, if any. Searches over the
// pair (portals of first blocked, portals of second blocked) reachable by
// appending one word at a time; each step's realisable advances come from a
// product of the portals' subset automata.
std::optional<SeparationPlan> exists_separating_sequence(Analysis& an, std::span<const Portal> first,
                                                         std::span<const Portal> second);
std::optional<SeparationPlan> exists_separating_sequence(Analysis& an, const SccPath& first,
                                                         const SccPath& second);

// Given sequences whose left effect on `pi` is below i, one sequence that
// keeps portal i of pi alive while doing at least as much as each target
// sequence on its own path.
FactorSequence uniformize_sequences(Analysis& an,
                                    const std::vector<std::pair<SccPath, FactorSequence>>& targets,
                                    const SccPath& pi, std::size_t i);

}  // namespace rpt
