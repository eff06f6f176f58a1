#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rpt/language.hpp"
#include "rpt/sccpaths.hpp"

namespace rpt {

// Read access to an input word that counts queried positions. Each call adds
// the number of positions it reads; nothing outside [0, size) is ever read.
class WordAccess {
public:
    explicit WordAccess(std::span<const Symbol> word) : word_(word) {}

    std::size_t size() const { return word_.size(); }
    Symbol query(std::size_t i);
    // Positions [begin, end).
    std::span<const Symbol> read(std::size_t begin, std::size_t end);
    std::uint64_t query_count() const { return count_; }

private:
    std::span<const Symbol> word_;
    std::uint64_t count_ = 0;
};

struct Window {
    std::size_t begin = 0;
    std::span<const Symbol> letters;
    std::size_t end() const { return begin + letters.size(); }
};

struct SamplerPlan {
    std::size_t n = 0;
    double beta = 0;  // n / N
    std::uint64_t L = 1;
    std::uint32_t T = 0;
    std::vector<std::uint64_t> ell;   // 2^t
    std::vector<std::uint64_t> reps;  // ceil(2 ln 3 beta / ell_t)

    // Sum of reps_t * (2 ell_t + 1): the reads before clipping at the ends.
    std::uint64_t budget() const;
};

SamplerPlan make_plan(std::size_t n, double beta, std::uint64_t L);
inline SamplerPlan make_plan(std::size_t n, std::uint64_t N, std::uint64_t L) {
    return make_plan(n, static_cast<double>(n) / static_cast<double>(N), L);
}

// u[max(i - l, 0) .. min(i + l, n - 1)] for a uniform i.
Window one_sample(WordAccess& w, std::uint64_t ell, std::mt19937_64& rng);
std::vector<Window> sampler(WordAccess& w, const SamplerPlan& plan, std::mt19937_64& rng);

// A factor u[begin, end) blocking portal `portal` of accepting path `path`
// (both 0 for the strongly connected tester).
struct Occurrence {
    std::size_t path = 0;
    std::size_t portal = 0;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct Verdict {
    bool accept = true;
    std::uint64_t queries_used = 0;
    // Positions a full-width window would have read past either end.
    std::uint64_t clipped = 0;
    // Planned reads before clipping; 0 when no sampling took place.
    std::uint64_t planned = 0;
    bool length_reject = false;
    bool read_all = false;
    std::vector<Occurrence> evidence;
};

// The strongly connected tester: window length bound 12 m^2 / eps.
class SccTester {
public:
    explicit SccTester(const Nfa& a, const Limits& limits = {});

    SamplerPlan plan(std::size_t n, double eps) const;
    Verdict run(WordAccess& w, double eps, std::mt19937_64& rng) const;
    const Scope& scope() const { return scope_; }
    const Nfa& automaton() const { return a_; }
    const LengthProfile& lengths() const { return lengths_; }

private:
    Nfa a_;
    Scope scope_;
    LengthProfile lengths_;
};

// Path-by-path tester. With `length_bound` 0 the window bound is 2C/eps with
// C = 8 (k + 3) p; otherwise it is `length_bound` (the bounded-factor tester).
class PathTester {
public:
    explicit PathTester(Analysis& an, std::uint64_t length_bound = 0);

    std::size_t repetitions(std::size_t path) const;
    SamplerPlan plan(std::size_t path, std::size_t n, double eps) const;
    // Reads below this length go through the automaton directly.
    std::size_t read_all_below(double eps) const;
    Verdict run(WordAccess& w, double eps, std::mt19937_64& rng) const;

private:
    Analysis& an_;
    std::uint64_t bound_;
    std::vector<std::vector<const Scope*>> scopes_;
    LengthProfile lengths_;

    double constant(std::size_t path) const;
};

Verdict test_scc(const Nfa& a, WordAccess& w, double eps, std::mt19937_64& rng);
Verdict test_general(Analysis& an, WordAccess& w, double eps, std::mt19937_64& rng);
Verdict test_easy(Analysis& an, WordAccess& w, double eps, std::mt19937_64& rng, std::uint64_t B);

// Check a rejection against the full word: a length mismatch, a full read
// the automaton refuses, or blocking factors at the positions claimed.
bool replay_evidence(const SccTester& t, std::span<const Symbol> u, const Verdict& v);
bool replay_evidence(Analysis& an, std::span<const Symbol> u, const Verdict& v);

// Disjoint blocking factors of a strongly connected automaton found left to
// right with rho letters of padding after each; [begin, end) positions.
std::vector<Occurrence> greedy_blocking_decomposition(const Nfa& a, const PositionalWord& tau);

}  // namespace rpt
