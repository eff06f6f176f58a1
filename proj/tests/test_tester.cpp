#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rpt/classify.hpp"
#include "rpt/structure.hpp"
#include "rpt/tester.hpp"
#include "support.hpp"

using namespace rpt;
using namespace rpt::testing;

namespace {

const std::vector<std::string> kStronglyConnected{"ab", "aa_bb", "astar", "parity", "universal", "repeated_parity"};

std::uint64_t closed_form(std::size_t n, double beta, std::uint64_t L) {
    std::uint64_t total = 0;
    for (std::uint64_t ell = 1;; ell *= 2) {
        total += static_cast<std::uint64_t>(std::max(1.0, std::ceil(2.0 * std::log(3.0) * beta / ell))) * (2 * ell + 1);
        if (ell >= L) break;
    }
    (void)n;
    return total;
}

// Random letters keep repeated-parity words within 6% of the language.
Word plant_for(const Nfa& a, const std::string& name) {
    if (name == "repeated_parity") return a.word("cbc");
    // Members of fig2 hold at most one a, and random letters rarely add enough.
    if (name == "fig2") return a.word("a");
    return {};
}

}  // namespace

TEST(WordAccess, CountsEveryRead) {
    Word u{0, 1, 0, 1};
    WordAccess w(u);
    EXPECT_EQ(w.query(2), 0u);
    EXPECT_EQ(w.read(1, 4).size(), 3u);
    EXPECT_EQ(w.query_count(), 4u);
    EXPECT_THROW(w.query(4), std::out_of_range);
    EXPECT_THROW(w.read(2, 5), std::out_of_range);
    EXPECT_EQ(w.query_count(), 4u);
}

TEST(Sampler, OneSampleEdges) {
    std::mt19937_64 rng(1);
    Word one{0};
    WordAccess w1(one);
    auto win = one_sample(w1, 3, rng);
    EXPECT_EQ(win.begin, 0u);
    EXPECT_EQ(win.letters.size(), 1u);
    Word five(5, 0);
    WordAccess w5(five);
    for (int i = 0; i < 20; ++i) {
        auto full = one_sample(w5, 5, rng);
        EXPECT_EQ(full.begin, 0u);
        EXPECT_EQ(full.letters.size(), 5u);
    }
}

TEST(Sampler, CoverageFrequency) {
    std::mt19937_64 rng(1);
    const std::size_t n = 100, ell = 2, draws = 100000;
    Word u(n, 0);
    std::vector<std::size_t> hits(n, 0);
    for (std::size_t d = 0; d < draws; ++d) {
        WordAccess w(u);
        auto win = one_sample(w, ell, rng);
        EXPECT_LE(win.letters.size(), 2 * ell + 1);
        for (std::size_t j = win.begin; j < win.end(); ++j) ++hits[j];
    }
    const double p = (2.0 * ell + 1) / n;
    const double sigma = std::sqrt(p * (1 - p) / draws);
    for (std::size_t j = ell; j + ell < n; ++j)
        EXPECT_NEAR(static_cast<double>(hits[j]) / draws, p, 3 * sigma) << "position " << j;
}

TEST(Sampler, PlanShape) {
    auto single = make_plan(50, std::uint64_t{10}, 1);
    EXPECT_EQ(single.T, 0u);
    EXPECT_EQ(single.ell.size(), 1u);
    auto plan = make_plan(12000, std::uint64_t{100}, 120);
    EXPECT_EQ(plan.T, 7u);
    for (auto r : plan.reps) EXPECT_GE(r, 1u);
    EXPECT_EQ(plan.budget(), closed_form(12000, 120.0, 120));
    EXPECT_THROW(make_plan(0, 1.0, 1), ValidationError);
}

TEST(Sampler, QueriesMatchPlan) {
    std::mt19937_64 rng(2);
    const std::size_t n = 12000;
    const std::uint64_t L = 120;
    auto plan = make_plan(n, std::uint64_t{n / L}, L);
    Word u(n, 0);
    for (int t = 0; t < 20; ++t) {
        WordAccess w(u);
        auto ws = sampler(w, plan, rng);
        std::uint64_t full = 0;
        for (const auto& win : ws) full += win.letters.size();
        EXPECT_EQ(w.query_count(), full);
        EXPECT_LE(w.query_count(), plan.budget());
    }
}

// N disjoint planted factors of length L: some window holds one whole with
// probability at least 2/3.
TEST(Sampler, FindsPlantedFactors) {
    std::mt19937_64 rng(3);
    const std::size_t n = 12000, L = 16, N = 60;
    int hits = 0;
    const int trials = 2000;
    auto plan = make_plan(n, std::uint64_t{N}, L);
    for (int t = 0; t < trials; ++t) {
        std::vector<std::size_t> starts;
        const std::size_t slot = n / N;
        for (std::size_t i = 0; i < N; ++i) starts.push_back(i * slot + rng() % (slot - L));
        Word u(n, 0);
        WordAccess w(u);
        auto ws = sampler(w, plan, rng);
        bool hit = false;
        for (const auto& win : ws)
            for (auto s : starts) hit = hit || (win.begin <= s && s + L <= win.end());
        hits += hit;
    }
    EXPECT_GE(static_cast<double>(hits) / trials, 0.62);
}

TEST(SccTester, ExhaustiveMembersAccepted) {
    std::mt19937_64 rng(4);
    for (const auto& name : kStronglyConnected) {
        Nfa a = fixture(name);
        SccTester t(a);
        for (std::size_t n = 0; n <= 10; ++n)
            for (std::uint64_t c = 0; c < word_count(n, a.alphabet_size()); ++c) {
                auto u = decode_word(c, n, a.alphabet_size());
                if (!accepts(a, u)) continue;
                WordAccess w(u);
                ASSERT_TRUE(t.run(w, 0.1, rng).accept) << name;
            }
    }
}

TEST(SccTester, LongMembersAccepted) {
    std::mt19937_64 rng(5);
    for (const auto& name : kStronglyConnected) {
        Nfa a = fixture(name);
        SccTester t(a);
        for (int i = 0; i < 200; ++i) {
            const std::size_t n = 500 + rng() % 5000;
            auto u = random_member(a, n, rng);
            if (!u) continue;
            WordAccess w(*u);
            auto v = t.run(w, 0.2, rng);
            ASSERT_TRUE(v.accept) << name;
            EXPECT_EQ(v.queries_used, w.query_count());
            if (!v.read_all) EXPECT_EQ(v.queries_used + v.clipped, v.planned);
        }
    }
}

TEST(SccTester, LengthRejectReadsNothing) {
    Nfa ab = fixture("ab");
    std::mt19937_64 rng(6);
    Word u = ab.word("aba");
    WordAccess w(u);
    auto v = test_scc(ab, w, 0.1, rng);
    EXPECT_FALSE(v.accept);
    EXPECT_TRUE(v.length_reject);
    EXPECT_EQ(w.query_count(), 0u);
}

TEST(SccTester, EpsilonRange) {
    Nfa ab = fixture("ab");
    std::mt19937_64 rng(6);
    Word u = ab.word("ab");
    WordAccess w(u);
    EXPECT_THROW(test_scc(ab, w, 0.0, rng), ValidationError);
    EXPECT_THROW(test_scc(ab, w, 1.0, rng), ValidationError);
    EXPECT_THROW(SccTester(fixture("fig1")), ValidationError);
}

TEST(SccTester, FarWordsRejectedWithReplayableEvidence) {
    std::mt19937_64 rng(7);
    for (const auto& name : {"ab", "aa_bb", "astar", "repeated_parity"}) {
        Nfa a = fixture(name);
        SccTester t(a);
        auto u = make_far_word(a, 4000, 0.1, rng, plant_for(a, name));
        ASSERT_TRUE(u) << name;
        int rejects = 0;
        for (int i = 0; i < 200; ++i) {
            WordAccess w(*u);
            auto v = t.run(w, 0.1, rng);
            if (!v.accept) {
                ++rejects;
                ASSERT_TRUE(replay_evidence(t, *u, v)) << name;
                ASSERT_FALSE(v.evidence.empty());
                auto forged = v;
                forged.evidence[0].begin = forged.evidence[0].end - 1;
                forged.evidence[0].end = forged.evidence[0].begin;
                EXPECT_FALSE(replay_evidence(t, *u, forged));
            }
        }
        EXPECT_GE(rejects, 124) << name;
    }
}

TEST(PathTester, MembersAccepted) {
    std::mt19937_64 rng(8);
    for (const auto& name : {"fig1", "fig2", "fig3", "ab", "repeated_parity"}) {
        Analysis an(trim(fixture(name)));
        PathTester general(an), easy(an, 2);
        for (int i = 0; i < 20; ++i) {
            const std::size_t n = 4000 + rng() % 3000;
            auto u = random_member(an.automaton(), n, rng);
            if (!u) continue;
            for (const auto* t : {&general, &easy}) {
                WordAccess w(*u);
                auto v = t->run(w, 0.2, rng);
                ASSERT_TRUE(v.accept) << name;
                EXPECT_EQ(v.queries_used, w.query_count());
                if (!v.read_all) EXPECT_EQ(v.queries_used + v.clipped, v.planned);
            }
        }
    }
}

// A word of the second path family of Fig. 3 that the first path does not
// accept is still a member and is never rejected.
TEST(PathTester, Fig3OtherPathMember) {
    Nfa f3 = fixture("fig3");
    Analysis an(f3);
    PathTester t(an);
    Word u = f3.word("a");
    while (u.size() < 4000) {
        u.push_back(f3.symbol_of("a"));
        u.push_back(f3.symbol_of("b"));
    }
    u.push_back(f3.symbol_of("b"));
    ASSERT_TRUE(accepts(f3, u));
    std::mt19937_64 rng(9);
    for (int i = 0; i < 10; ++i) {
        WordAccess w(u);
        EXPECT_TRUE(t.run(w, 0.2, rng).accept);
    }
}

TEST(PathTester, PlanArithmetic) {
    Analysis an(trim(fixture("fig1")));
    PathTester easy(an, 2);
    // Two paths, {q0} and {q0} b {q1}; modulus 1.
    EXPECT_EQ(easy.repetitions(0), static_cast<std::size_t>(std::ceil(std::log(3.0 * 2 * 1))) + 1);
    EXPECT_EQ(easy.repetitions(1), static_cast<std::size_t>(std::ceil(std::log(3.0 * 2 * 2))) + 1);
    auto plan = easy.plan(1, 10000, 0.1);
    EXPECT_EQ(plan.L, 2u);
    EXPECT_DOUBLE_EQ(plan.beta, 2.0 * 8.0 * 4.0 / 0.1);
    EXPECT_EQ(plan.budget(), closed_form(10000, plan.beta, 2));
    EXPECT_EQ(easy.read_all_below(0.1), static_cast<std::size_t>(std::ceil(2.0 * 32.0 / 0.1)));
}

TEST(PathTester, FarWordsRejected) {
    std::mt19937_64 rng(10);
    Analysis an(trim(fixture("fig1")));
    PathTester easy(an, 2);
    auto u = make_far_word(an.automaton(), 5000, 0.1, rng);
    ASSERT_TRUE(u);
    int rejects = 0;
    for (int i = 0; i < 100; ++i) {
        WordAccess w(*u);
        auto v = easy.run(w, 0.1, rng);
        if (!v.accept) {
            ++rejects;
            ASSERT_TRUE(replay_evidence(an, *u, v));
        }
    }
    EXPECT_GE(rejects, 62);
}

TEST(Decomposition, MembersAndFarWords) {
    std::mt19937_64 rng(11);
    for (const auto& name : {"ab", "aa_bb", "astar", "repeated_parity"}) {
        Nfa a = trim(fixture(name));
        auto member = random_member(a, 2000, rng);
        ASSERT_TRUE(member);
        EXPECT_TRUE(greedy_blocking_decomposition(a, {0, *member}).empty()) << name;
        const double eps = 0.1;
        const double m = static_cast<double>(a.state_count());
        const auto n = static_cast<std::size_t>(std::ceil(6 * m * m / eps)) * 4;
        auto far = make_far_word(a, n, eps, rng, plant_for(a, name));
        ASSERT_TRUE(far) << name;
        auto occ = greedy_blocking_decomposition(a, {0, *far});
        EXPECT_GE(static_cast<double>(occ.size()), eps * n / (6 * m * m)) << name;
        Scope sc = Scope::whole(a);
        std::size_t last = 0, longer = 0;
        for (const auto& o : occ) {
            EXPECT_GE(o.begin, last);
            last = o.end;
            PositionalWord f{static_cast<std::uint32_t>(o.begin % sc.modulus()),
                             Word(far->begin() + static_cast<std::ptrdiff_t>(o.begin),
                                  far->begin() + static_cast<std::ptrdiff_t>(o.end))};
            EXPECT_TRUE(sc.is_blocking(f));
            longer += (o.end - o.begin) > 12 * m * m / eps;
        }
        EXPECT_LE(2 * longer, occ.size());
    }
}

TEST(Decomposition, NeedsAMemberLength) {
    Nfa ab = fixture("ab");
    EXPECT_THROW(greedy_blocking_decomposition(ab, {0, ab.word("aba")}), ValidationError);
}
