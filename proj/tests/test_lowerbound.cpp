#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rpt/classify.hpp"
#include "rpt/lowerbound.hpp"
#include "rpt/structure.hpp"
#include "support.hpp"

using namespace rpt;
using namespace rpt::testing;

namespace {

PositionalWord pw(const Nfa& a, std::uint32_t off, const char* text) { return {off, a.word(text)}; }

const PumpFamily& rp_family() {
    static const PumpFamily f = extract_pump_family(fixture("repeated_parity"));
    return f;
}

bool loops_on(const Nfa& a, State q, const Word& w) {
    StateSet from(a.state_count());
    from.set(q);
    return run_set(a, from, w).test(q);
}

Word slice(const Word& w, std::size_t begin, std::size_t len) {
    return Word(w.begin() + static_cast<std::ptrdiff_t>(begin), w.begin() + static_cast<std::ptrdiff_t>(begin + len));
}

}  // namespace

TEST(PumpFamily, RepeatedParityInvariants) {
    Nfa a = fixture("repeated_parity");
    const auto& f = rp_family();
    EXPECT_EQ(f.nu_plus.size(), f.nu_minus.size());
    EXPECT_GE(f.nu_minus.size(), 1u);
    for (const auto* w : {&f.phi, &f.nu_plus, &f.nu_minus, &f.chi}) EXPECT_LE(w->size(), f.S);
    EXPECT_EQ(f.S, f.phi.size() + f.nu_minus.size() + f.chi.size());
    Scope sc = Scope::whole(a);
    for (std::size_t r = 1; r <= 10; ++r) {
        EXPECT_TRUE(sc.is_blocking(f.tau_minus(r))) << r;
        EXPECT_LE(f.tau_minus(r).size(), r * f.S);
        for (std::size_t s = 0; s < r; ++s) {
            auto plus = f.tau_plus(r, s);
            EXPECT_FALSE(sc.is_blocking(plus));
            EXPECT_TRUE(loops_on(a, f.q_star, plus.letters)) << r << ',' << s;
        }
    }
    EXPECT_NO_THROW(validate_pump_family(a, f, 8));
    EXPECT_THROW(f.tau_plus(2, 2), std::out_of_range);
}

TEST(PumpFamily, TamperedFamilyFailsValidation) {
    Nfa a = fixture("repeated_parity");
    auto f = rp_family();
    std::swap(f.nu_plus, f.nu_minus);
    EXPECT_THROW(validate_pump_family(a, f, 4), ValidationError);
    auto g = rp_family();
    g.nu_plus.letters.push_back(0);
    EXPECT_THROW(validate_pump_family(a, g, 4), ValidationError);
}

TEST(PumpFamily, NeedsInfinitelyManyMinimalFactors) {
    EXPECT_THROW(extract_pump_family(fixture("ab")), ValidationError);
    EXPECT_THROW(extract_pump_family(fixture("universal")), ValidationError);
    EXPECT_THROW(extract_pump_family(trim(fixture("fig1"))), ValidationError);
}

// Non-universal automata yield strongly connected gadgets with infinitely
// many minimal blocking factors; extraction must work on every one.
TEST(PumpFamily, GadgetsOfRandomAutomata) {
    std::mt19937_64 rng(99);
    int done = 0;
    for (int i = 0; i < 40 && done < 5; ++i) {
        Nfa a = trim(random_short_complete(3, rng));
        if (brute_universal(a)) continue;
        Nfa g = universality_gadget(a);
        auto f = extract_pump_family(g);
        EXPECT_NO_THROW(validate_pump_family(g, f, 6));
        ++done;
    }
    EXPECT_EQ(done, 5);
}

TEST(HardDist, ParameterInvariants) {
    Nfa a = fixture("repeated_parity");
    const auto& f = rp_family();
    const double top = max_epsilon(f);
    ASSERT_GT(top, 0);
    EXPECT_THROW(make_hard_params(a, f, top * 1.5, 10000), ValidationError);
    for (double eps : {top, top / 2, top / 5}) {
        auto h = make_hard_params(a, f, eps, 20000);
        double sum = 0;
        for (double p : h.p) {
            EXPECT_GE(p, 0);
            EXPECT_LE(p, 1);
            sum += p;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
        for (std::uint32_t t = 1; t <= h.T; ++t)
            EXPECT_NEAR(h.p[t], 3 * std::ldexp(f.S * eps, static_cast<int>(t)) / h.T, 1e-12);
        EXPECT_EQ(h.ell % global_modulus(a), 0u);
        EXPECT_EQ(h.eta_star.size(), h.ell);
        EXPECT_TRUE(loops_on(a, f.q_star, h.eta_star));
        for (std::uint32_t t = 1; t <= h.T; ++t) {
            EXPECT_GE(h.copies[t], 1u);
            EXPECT_EQ(h.copies[t] * f.tau_minus(std::size_t{1} << t).size() + h.pad[t].size(), h.ell);
            EXPECT_TRUE(loops_on(a, f.q_star, h.pad[t]));
        }
        EXPECT_EQ(h.mu_i.size() + h.k * h.ell + h.mu_f.size(), h.n);
    }
}

TEST(HardDist, LabelOneInstancesAreMembers) {
    Nfa a = fixture("repeated_parity");
    auto h = make_hard_params(a, rp_family(), max_epsilon(rp_family()) / 2, 20000);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        auto inst = sample_hard_instance(h, rng, 1);
        ASSERT_EQ(inst.word.size(), h.n);
        ASSERT_TRUE(accepts(a, inst.word));
    }
}

TEST(HardDist, IntervalContent) {
    Nfa a = fixture("repeated_parity");
    const auto& f = rp_family();
    auto h = make_hard_params(a, f, max_epsilon(f) / 2, 20000);
    std::mt19937_64 rng(2);
    Scope sc = Scope::whole(a);
    for (int i = 0; i < 50; ++i) {
        auto inst = sample_hard_instance(h, rng);
        std::size_t special = 0;
        for (std::size_t j = 0; j < h.k; ++j) {
            const std::size_t b = h.interval_begin(j);
            ASSERT_EQ(b % global_modulus(a), f.i_star % global_modulus(a));
            const auto t = inst.kappa[j];
            if (t == 0) {
                EXPECT_EQ(slice(inst.word, b, h.ell), h.eta_star);
                continue;
            }
            const std::size_t r = std::size_t{1} << t;
            const auto tau = inst.label == 0 ? f.tau_minus(r) : f.tau_plus(r, static_cast<std::size_t>(inst.s[j]));
            for (std::size_t c = 0; c < h.copies[t]; ++c) {
                const std::size_t at = b + c * tau.size();
                ASSERT_EQ(slice(inst.word, at, tau.size()), tau.letters);
                EXPECT_EQ(sc.is_blocking({static_cast<std::uint32_t>(at % sc.modulus()), tau.letters}), inst.label == 0);
            }
            special += h.copies[t];
        }
        EXPECT_EQ(special, inst.special);
    }
}

TEST(HardDist, KappaHistogram) {
    Nfa a = fixture("repeated_parity");
    const auto& f = rp_family();
    auto h = make_hard_params(a, f, max_epsilon(f) / 4, 20000);
    std::mt19937_64 rng(3);
    std::vector<double> counts(h.T + 1, 0);
    std::size_t draws = 0;
    while (draws < 100000) {
        auto inst = sample_hard_instance(h, rng);
        for (auto t : inst.kappa) counts[t] += 1;
        draws += inst.kappa.size();
    }
    // Pool the sparse tail so every bin expects at least 5.
    double chi2 = 0, obs = 0, exp = 0;
    int bins = 0;
    for (std::uint32_t t = 0; t <= h.T; ++t) {
        obs += counts[t];
        exp += h.p[t] * static_cast<double>(draws);
        if (exp >= 5 || t == h.T) {
            chi2 += (obs - exp) * (obs - exp) / exp;
            ++bins;
            obs = exp = 0;
        }
    }
    const double df = bins - 1;
    // Upper 0.1% point, Wilson-Hilferty.
    const double z = 3.09;
    const double crit = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
    EXPECT_LT(chi2, crit) << "bins " << bins;
}

TEST(Adversary, ExtremeBudgets) {
    Nfa a = fixture("repeated_parity");
    const auto& f = rp_family();
    auto h = make_hard_params(a, f, max_epsilon(f) / 8, 50000);
    std::mt19937_64 rng(4);
    auto none = adversary_eval(std::vector<std::size_t>(h.k, 0), h, 500, rng);
    EXPECT_EQ(none.p_m, 1.0);
    auto full = adversary_eval(std::vector<std::size_t>(h.k, h.ell), h, 500, rng);
    EXPECT_LT(full.p_m, 0.05);
    EXPECT_EQ(full.error_rate, 0.0);
    auto paper = adversary_eval(spread_queries(h, paper_budget(h)), h, 500, rng);
    EXPECT_GE(paper.p_m, full.p_m);
    EXPECT_THROW(adversary_eval({1, 2}, h, 10, rng), ValidationError);
}

TEST(Adversary, SpreadQueries) {
    Nfa a = fixture("repeated_parity");
    auto h = make_hard_params(a, rp_family(), max_epsilon(rp_family()) / 2, 20000);
    for (std::size_t budget : {std::size_t{0}, h.k - 1, h.k * 3 + 2}) {
        auto q = spread_queries(h, budget);
        ASSERT_EQ(q.size(), h.k);
        std::size_t sum = 0, lo = q[0], hi = q[0];
        for (auto x : q) {
            sum += x;
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        EXPECT_EQ(sum, budget);
        EXPECT_LE(hi - lo, 1u);
    }
}

TEST(Embedding, Fig1LeftWord) {
    Nfa f1 = trim(fixture("fig1"));
    Analysis an(f1);
    const auto& paths = an.accepting_paths();
    const auto& pi = paths[1];
    ASSERT_EQ(pi.portals.size(), 2u);
    auto w = build_embedding_words(an, pi, 1, {pw(f1, 0, "b")}, {}, 3);
    std::size_t bs = 0;
    for (auto x : w.left) bs += x == f1.symbol_of("b");
    EXPECT_GE(bs, 3u);
    StateSet from(f1.state_count());
    from.set(0);
    EXPECT_TRUE(run_set(f1, from, w.left).test(1));
    EXPECT_TRUE(has_ordered_occurrences(w.left, 0, {pw(f1, 0, "b")}, 3, 1));
}

TEST(Embedding, EmptySequenceGivesBaseWord) {
    Nfa f3 = fixture("fig3");
    Analysis an(f3);
    const auto& pi = an.accepting_paths()[0];
    const std::size_t m = f3.state_count();
    for (std::size_t i = 0; i <= pi.k(); ++i) {
        auto w = build_embedding_words(an, pi, i, {}, {}, 1);
        EXPECT_LE(w.left.size(), 3 * m * m * m + m);
        EXPECT_EQ(w.left.size() % 2, pi.portals[i].x);
    }
}

TEST(Embedding, OccurrencesForSeveralN) {
    Nfa f3 = fixture("fig3");
    Analysis an(f3);
    const auto& pi = an.accepting_paths()[0];
    FactorSequence left{pw(f3, 0, "ab")}, right{pw(f3, 1, "a")};
    ASSERT_LT(left_effect(an, left, pi.portals), 2);
    ASSERT_GT(right_effect(an, right, pi.portals), 2);
    for (std::size_t N : {1, 5}) {
        auto w = build_embedding_words(an, pi, 2, left, right, N);
        EXPECT_TRUE(has_ordered_occurrences(w.left, 0, left, N, 2));
        EXPECT_TRUE(has_ordered_occurrences(w.right, pi.portals[2].y, right, N, 2));
        StateSet from(f3.state_count());
        from.set(0);
        EXPECT_TRUE(run_set(f3, from, w.left).test(pi.portals[2].s));
        StateSet mid(f3.state_count());
        mid.set(pi.portals[2].t);
        EXPECT_TRUE(run_set(f3, mid, w.right).test(pi.portals.back().t));
    }
    EXPECT_THROW(build_embedding_words(an, pi, 2, {pw(f3, 0, "aa"), pw(f3, 0, "b")}, right, 1), ValidationError);
}

TEST(Embedding, OrderedOccurrenceScan) {
    Nfa ab = fixture("ab");
    Word w = ab.word("abab");
    EXPECT_TRUE(has_ordered_occurrences(w, 0, {pw(ab, 0, "ab")}, 2, 2));
    EXPECT_FALSE(has_ordered_occurrences(w, 0, {pw(ab, 1, "ab")}, 1, 2));
    EXPECT_FALSE(has_ordered_occurrences(w, 0, {pw(ab, 0, "ab"), pw(ab, 0, "a")}, 2, 2));
}
