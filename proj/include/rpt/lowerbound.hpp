#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rpt/sccpaths.hpp"

namespace rpt {

// tau_minus(r) = phi nu_minus^r chi is blocking for every r >= 1, while
// tau_plus(r, s) = phi nu_minus^s nu_plus nu_minus^(r-1-s) chi labels a loop
// on q_star. All four words sit at their true offsets starting from i_star.
struct PumpFamily {
    PositionalWord phi, nu_plus, nu_minus, chi;
    State q_star = 0;
    std::uint32_t i_star = 0;
    // |phi| + |nu| + |chi|, so |tau_minus(r)| <= r S for every r >= 1.
    std::size_t S = 0;

    // Pumping trace.
    std::size_t k0 = 0, k1 = 0, k2 = 0, k3 = 0, K = 0;
    // Letters appended to chi to lead back to q_star.
    std::size_t return_length = 0;
    std::size_t mbf_states = 0;

    PositionalWord tau_minus(std::size_t r) const;
    PositionalWord tau_plus(std::size_t r, std::size_t s) const;
};

// For a strongly connected automaton with infinitely many minimal blocking
// factors. Checks the family for r <= check_rounds before returning.
PumpFamily extract_pump_family(const Nfa& a, std::size_t check_rounds = 6, const Limits& limits = {});

// Throws ValidationError naming the first failed round.
void validate_pump_family(const Nfa& a, const PumpFamily& f, std::size_t rounds);

struct HardDistParams {
    PumpFamily family;
    double eps = 0;
    std::size_t n = 0;
    std::size_t ell = 0;  // interval length, a multiple of the period
    std::size_t k = 0;    // number of intervals
    std::uint32_t T = 0;  // largest kappa
    std::vector<double> p;             // p[t], t = 0..T
    std::vector<std::size_t> copies;   // copies[t] of tau at level t >= 1
    std::vector<Word> pad;             // pad[t]: q_star loop filling interval t
    Word eta_star, mu_i, mu_f;

    std::size_t interval_begin(std::size_t j) const { return mu_i.size() + j * ell; }
};

// Largest eps for which the level probabilities are well defined.
double max_epsilon(const PumpFamily& f);
HardDistParams make_hard_params(const Nfa& a, const PumpFamily& f, double eps, std::size_t n);

struct LabeledInstance {
    Word word;
    int label = 0;
    std::vector<std::uint32_t> kappa;
    std::vector<int> s;  // chosen s per interval, -1 when unused
    // Blocking copies planted (label 0) or their look-alikes (label 1).
    std::size_t special = 0;
};

LabeledInstance sample_hard_instance(const HardDistParams& params, std::mt19937_64& rng,
                                     std::optional<int> label = std::nullopt);

// Fraction of label-0 instances at distance >= eps n, by the exact oracle.
double empirical_far_rate(const Nfa& a, const HardDistParams& params, std::size_t trials, std::mt19937_64& rng);

struct AdversaryStats {
    std::size_t trials = 0;
    // Every interval with kappa > 0 got fewer than 2^kappa queries.
    double p_m = 0;
    // Label 0, at least eps n planted blocking copies, and M: a tester with
    // perfect completeness accepts these and so errs.
    double error_rate = 0;
};

// q[j] queries in interval j; only the kappa draws matter.
AdversaryStats adversary_eval(const std::vector<std::size_t>& q, const HardDistParams& params, std::size_t trials,
                              std::mt19937_64& rng);
std::size_t paper_budget(const HardDistParams& params);
std::vector<std::size_t> spread_queries(const HardDistParams& params, std::size_t budget);

struct EmbeddingWords {
    Word left;   // q0 -> s_i
    Word right;  // t_i -> t_k, final
};

// N disjoint, ordered occurrences of each element of sigma_l in a word leading
// to the entry of portal i, and of sigma_r in a word leaving its exit.
EmbeddingWords build_embedding_words(Analysis& an, const SccPath& pi, std::size_t i, const FactorSequence& sigma_l,
                                     const FactorSequence& sigma_r, std::size_t N);

// Greedy scan of <offset : w> for n ordered, disjoint occurrences of each
// element in turn.
bool has_ordered_occurrences(const Word& w, std::uint32_t offset, const FactorSequence& sigma, std::size_t n,
                             std::uint32_t p);

}  // namespace rpt
