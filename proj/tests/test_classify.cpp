#include <gtest/gtest.h>

#include <random>

#include "rpt/classify.hpp"
#include "rpt/language.hpp"
#include "support.hpp"

using namespace rpt;
using namespace rpt::testing;

namespace {

PositionalWord pw(const Nfa& a, std::uint32_t off, const char* text) { return {off, a.word(text)}; }

LanguageClass tag_of(const std::string& name) { return classify(trim(fixture(name))).tag; }

}  // namespace

TEST(Classify, Fixtures) {
    EXPECT_EQ(tag_of("fig1"), LanguageClass::Easy);
    EXPECT_EQ(tag_of("fig2"), LanguageClass::Easy);
    EXPECT_EQ(tag_of("fig3"), LanguageClass::Easy);
    EXPECT_EQ(tag_of("astar"), LanguageClass::Easy);
    EXPECT_EQ(tag_of("ab"), LanguageClass::Easy);
    EXPECT_EQ(tag_of("aa_bb"), LanguageClass::Easy);
    EXPECT_EQ(tag_of("parity"), LanguageClass::Trivial);
    EXPECT_EQ(tag_of("universal"), LanguageClass::Trivial);
    EXPECT_EQ(tag_of("repeated_parity"), LanguageClass::Hard);
    EXPECT_STREQ(to_string(LanguageClass::Hard), "hard");
}

TEST(Classify, FiniteLanguageIsTrivial) {
    Nfa a(3, {"a", "b"}, {{0, 0, 1}, {1, 1, 2}}, 0, {2});
    auto c = classify(a);
    EXPECT_EQ(c.tag, LanguageClass::Trivial);
    ASSERT_TRUE(c.trivial);
    EXPECT_TRUE(c.trivial->finite_language);
}

TEST(Classify, TrivialWitnessHasNoBlockingFactor) {
    for (const auto& name : {"parity", "universal"}) {
        Analysis an(trim(fixture(name)));
        auto w = is_trivial(an);
        ASSERT_TRUE(w) << name;
        ASSERT_TRUE(w->path);
        EXPECT_FALSE(an.has_blocking_factor(w->path->portals.at(w->portal)));
    }
    Analysis f1(trim(fixture("fig1")));
    EXPECT_FALSE(is_trivial(f1));
}

TEST(Classify, HardCertificatesReplay) {
    Analysis an(fixture("repeated_parity"));
    auto cert = is_hard(an);
    ASSERT_TRUE(cert);
    EXPECT_NO_THROW(verify_certificate(an, *cert));
    EXPECT_EQ(an.mbf(cert->path.portals[cert->portal]).tag, BlockingTag::Infinite);
    EXPECT_EQ(cert->matches.size(), an.accepting_paths().size());
    // A tampered portal index no longer checks out.
    auto bad = *cert;
    bad.portal = bad.path.portals.size();
    EXPECT_THROW(verify_certificate(an, bad), ValidationError);
}

TEST(Classify, NotHardExamples) {
    for (const auto& name : {"fig2", "ab", "fig3"}) {
        Analysis an(trim(fixture(name)));
        EXPECT_FALSE(is_hard(an)) << name;
    }
}

TEST(Classify, EasyCarriesABlockingSequence) {
    for (const auto& name : fixture_names()) {
        Analysis an(trim(fixture(name)));
        auto c = classify(an);
        if (c.tag != LanguageClass::Easy) continue;
        EXPECT_TRUE(is_blocking_sequence(an, c.blocking)) << name;
    }
}

TEST(Mbs, FigureExamples) {
    Nfa f1 = trim(fixture("fig1"));
    Analysis a1(f1);
    auto m1 = enumerate_mbs(a1, 2, 2);
    ASSERT_EQ(m1.sequences.size(), 1u);
    EXPECT_EQ(m1.sequences[0], (FactorSequence{pw(f1, 0, "b"), pw(f1, 0, "c")}));
    Nfa f2 = trim(fixture("fig2"));
    Analysis a2(f2);
    auto m2 = enumerate_mbs(a2, 2, 2);
    ASSERT_EQ(m2.sequences.size(), 1u);
    EXPECT_EQ(m2.sequences[0], (FactorSequence{pw(f2, 0, "a")}));
    Analysis u(fixture("universal"));
    EXPECT_TRUE(enumerate_mbs(u, 3, 3).sequences.empty());
}

TEST(Mbs, TrichotomyConsistency) {
    for (const auto& name : fixture_names()) {
        Analysis an(trim(fixture(name)));
        auto c = classify(an);
        auto m = enumerate_mbs(an, 2, 2);
        if (c.tag == LanguageClass::Trivial)
            EXPECT_TRUE(m.sequences.empty()) << name;
        else if (c.tag == LanguageClass::Easy)
            EXPECT_FALSE(m.sequences.empty()) << name;
        for (const auto& s : m.sequences) EXPECT_TRUE(is_blocking_sequence(an, s)) << name;
    }
}

TEST(Mbs, SequenceOrder) {
    Nfa f1 = trim(fixture("fig1"));
    FactorSequence bc{pw(f1, 0, "b"), pw(f1, 0, "c")};
    FactorSequence bac{pw(f1, 0, "bac")};
    FactorSequence longer{pw(f1, 0, "ab"), pw(f1, 0, "acc")};
    EXPECT_TRUE(sequence_below(bc, longer, 1));
    EXPECT_FALSE(sequence_below(longer, bc, 1));
    // Several elements may embed in the same element.
    EXPECT_TRUE(sequence_below(bc, bac, 1));
    EXPECT_FALSE(sequence_below(bac, bc, 1));
    EXPECT_TRUE(sequence_below({pw(f1, 0, "c"), pw(f1, 0, "b")}, bac, 1));
    EXPECT_FALSE(sequence_below({pw(f1, 0, "c"), pw(f1, 0, "b")}, {pw(f1, 0, "c"), pw(f1, 0, "a")}, 1));
}

TEST(Mbs, CombinationCap) {
    Limits tiny;
    tiny.combinations = 5;
    Analysis an(trim(fixture("fig2")), tiny);
    EXPECT_THROW(enumerate_mbs(an, 2, 2), ResourceError);
}

TEST(Gadget, Structure) {
    Nfa u = fixture("universal");
    Nfa g = universality_gadget(u);
    EXPECT_EQ(g.alphabet_size(), 4u);
    const Symbol hash = g.symbol_of("#");
    for (State q = 0; q < g.state_count(); ++q) {
        bool loop = false;
        for (const auto& e : g.out(q)) loop = loop || (e.symbol == hash && e.to == q);
        EXPECT_TRUE(loop);
    }
    Nfa e = easiness_gadget(u);
    const Symbol flat = e.symbol_of("♭");
    for (const auto& t : e.transitions()) EXPECT_NE(t.symbol, flat);
    // Missing the one-letter word b.
    EXPECT_THROW(universality_gadget(fixture("astar")), ValidationError);
}

TEST(Gadget, LawsOnRandomAutomata) {
    std::mt19937_64 rng(2024);
    int universal = 0, other = 0;
    for (int i = 0; i < 12; ++i) {
        Nfa a = trim(random_short_complete(3 + i % 3, rng, i % 2 ? 0.5 : 0.3));
        const bool uni = brute_universal(a);
        (uni ? universal : other)++;
        Analysis g(universality_gadget(a));
        EXPECT_EQ(is_trivial(g).has_value(), uni);
        EXPECT_EQ(classify(g).tag, uni ? LanguageClass::Trivial : LanguageClass::Hard);
        auto e = classify(easiness_gadget(a)).tag;
        EXPECT_EQ(e, uni ? LanguageClass::Easy : LanguageClass::Hard);
    }
    EXPECT_GT(other, 0);
}
