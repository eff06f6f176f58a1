#include "rpt/classify.hpp"

#include <algorithm>
#include <numeric>

#include "rpt/language.hpp"

namespace rpt {

const char* to_string(LanguageClass c) {
    switch (c) {
        case LanguageClass::Trivial: return "trivial";
        case LanguageClass::Easy: return "easy";
        case LanguageClass::Hard: return "hard";
    }
    return "?";
}

std::optional<TrivialWitness> is_trivial(Analysis& an) {
    const Nfa& a = an.automaton();
    if (!has_infinite_language(a)) return TrivialWitness{true, std::nullopt, 0};
    for (const auto& pi : an.accepting_paths())
        for (std::size_t i = 0; i < pi.portals.size(); ++i)
            if (!an.has_blocking_factor(pi.portals[i])) return TrivialWitness{false, pi, i};
    return std::nullopt;
}

namespace {

std::span<const Portal> prefix(const SccPath& pi, int last) {
    return std::span<const Portal>(pi.portals).first(static_cast<std::size_t>(last + 1));
}

std::span<const Portal> suffix(const SccPath& pi, int first) {
    return std::span<const Portal>(pi.portals).subspan(static_cast<std::size_t>(first));
}

// First (j_l, j_r) in order that works for pi2 against portal i of pi.
std::optional<HardMatch> match_path(Analysis& an, const SccPath& pi, std::size_t i, const SccPath& pi2) {
    const int len = static_cast<int>(pi2.portals.size());
    const Portal& P = pi.portals[i];
    auto keep_left = prefix(pi, static_cast<int>(i));
    auto keep_right = suffix(pi, static_cast<int>(i));
    for (int jl = -1; jl < len; ++jl) {
        const auto& left = an.separation(prefix(pi2, jl), keep_left);
        if (!left) continue;
        for (int jr = jl + 1; jr <= len; ++jr) {
            if (jr - 1 > jl && !an.equivalent(pi2.portals[static_cast<std::size_t>(jr - 1)], P)) break;
            const auto& right = an.separation(suffix(pi2, jr), keep_right);
            if (right) return HardMatch{0, jl, jr, *left, *right};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<HardCertificate> is_hard(Analysis& an) {
    const auto& paths = an.accepting_paths();
    for (const auto& pi : paths)
        for (std::size_t i = 0; i < pi.portals.size(); ++i) {
            if (an.mbf(pi.portals[i]).tag != BlockingTag::Infinite) continue;
            HardCertificate cert{pi, i, {}};
            bool ok = true;
            for (std::size_t t = 0; t < paths.size() && ok; ++t) {
                auto m = match_path(an, pi, i, paths[t]);
                if (!m) {
                    ok = false;
                    break;
                }
                m->path_index = t;
                cert.matches.push_back(std::move(*m));
            }
            if (ok) return cert;
        }
    return std::nullopt;
}

Classification classify(Analysis& an) {
    Classification c;
    if (auto w = is_trivial(an)) {
        c.tag = LanguageClass::Trivial;
        c.trivial = std::move(w);
        return c;
    }
    if (auto h = is_hard(an)) {
        c.tag = LanguageClass::Hard;
        c.hard = std::move(h);
        return c;
    }
    c.tag = LanguageClass::Easy;
    const std::size_t sigma = an.automaton().alphabet_size();
    for (const auto& pi : an.accepting_paths())
        for (const auto& P : pi.portals) {
            const Nfa& b = an.block_automaton(P);
            std::vector<bool> finals(b.state_count(), false);
            for (State f : b.finals()) finals[f] = true;
            c.blocking.push_back(decode_positional(*shortest_path(b, b.initial(), finals), sigma));
        }
    return c;
}

Classification classify(const Nfa& a, const Limits& limits) {
    Analysis an(trim(a), limits);
    return classify(an);
}

void verify_certificate(Analysis& an, const HardCertificate& cert) {
    const auto& paths = an.accepting_paths();
    if (!std::binary_search(paths.begin(), paths.end(), cert.path))
        throw ValidationError("certificate path is not an accepting SCC-path");
    if (cert.portal >= cert.path.portals.size()) throw ValidationError("certificate portal out of range");
    const Portal& P = cert.path.portals[cert.portal];
    if (an.mbf(P).tag != BlockingTag::Infinite)
        throw ValidationError("certificate portal has finitely many minimal blocking factors");
    if (cert.matches.size() != paths.size()) throw ValidationError("certificate must cover every accepting path");
    const int i = static_cast<int>(cert.portal);
    for (std::size_t t = 0; t < paths.size(); ++t) {
        const HardMatch& m = cert.matches[t];
        const SccPath& pi2 = paths[m.path_index];
        const int len = static_cast<int>(pi2.portals.size());
        auto where = "match " + std::to_string(t);
        if (m.path_index != t) throw ValidationError(where + " is out of order");
        if (m.j_left < -1 || m.j_left >= m.j_right || m.j_right > len) throw ValidationError(where + " bad indices");
        for (int j = m.j_left + 1; j < m.j_right; ++j)
            if (!an.equivalent(pi2.portals[static_cast<std::size_t>(j)], P))
                throw ValidationError(where + " keeps a portal not equivalent to the hard one");
        auto sl = m.left.sequence();
        if (left_effect(an, sl, prefix(pi2, m.j_left)) != m.j_left)
            throw ValidationError(where + " left sequence does not block its prefix");
        if (left_effect(an, sl, prefix(cert.path, i)) >= i)
            throw ValidationError(where + " left sequence blocks the hard portal");
        auto sr = m.right.sequence();
        auto rest2 = suffix(pi2, m.j_right);
        if (left_effect(an, sr, rest2) != static_cast<int>(rest2.size()) - 1)
            throw ValidationError(where + " right sequence does not block its suffix");
        auto rest = suffix(cert.path, i);
        if (left_effect(an, sr, rest) == static_cast<int>(rest.size()) - 1)
            throw ValidationError(where + " right sequence blocks the hard portal");
    }
}

bool sequence_below(const FactorSequence& sigma, const FactorSequence& tau, std::uint32_t p) {
    std::size_t j = 0;
    for (const auto& mu : sigma) {
        while (j < tau.size() && !is_positional_factor(mu, tau[j], p)) ++j;
        if (j == tau.size()) return false;
    }
    return true;
}

namespace {

std::size_t total_length(const FactorSequence& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{0},
                           [](std::size_t n, const PositionalWord& w) { return n + w.size(); });
}

bool canonical_less(const FactorSequence& x, const FactorSequence& y) {
    if (x.size() != y.size()) return x.size() < y.size();
    auto lx = total_length(x), ly = total_length(y);
    if (lx != ly) return lx < ly;
    return x < y;
}

}  // namespace

MbsEnumeration enumerate_mbs(Analysis& an, std::size_t term_bound, std::size_t len_bound) {
    const Nfa& a = an.automaton();
    const std::uint32_t p = an.modulus();
    const std::size_t sigma = a.alphabet_size();
    if (term_bound == 0) term_bound = std::size_t{p} * p * a.state_count() * a.state_count();
    const auto& paths = an.accepting_paths();
    MbsEnumeration out;
    if (paths.empty()) return out;

    // Only words blocking some portal can appear in a minimal sequence.
    std::vector<Portal> portals;
    for (const auto& pi : paths) portals.insert(portals.end(), pi.portals.begin(), pi.portals.end());
    std::sort(portals.begin(), portals.end());
    portals.erase(std::unique(portals.begin(), portals.end()), portals.end());
    std::vector<PositionalWord> words;
    std::size_t budget = an.limits().combinations;
    auto spend = [&](std::size_t n) {
        if (n > budget) throw ResourceError("combinations", "minimal blocking sequence search exceeded its cap");
        budget -= n;
    };
    for (std::size_t len = 1; len <= len_bound; ++len) {
        std::vector<Symbol> letters(len, 0);
        for (;;) {
            for (std::uint32_t r = 0; r < p; ++r) {
                spend(1);
                PositionalWord w{r, letters};
                for (const auto& P : portals)
                    if (an.blocks(w, P)) {
                        words.push_back(w);
                        break;
                    }
            }
            std::size_t k = 0;
            while (k < len && ++letters[k] == sigma) letters[k++] = 0;
            if (k == len) break;
        }
    }

    // Depth-first over sequences; a blocking sequence is not extended since
    // every extension sits above it.
    std::vector<FactorSequence> blocking;
    FactorSequence cur;
    auto dfs = [&](auto&& self) -> void {
        if (cur.size() == term_bound) return;
        for (const auto& w : words) {
            spend(1);
            cur.push_back(w);
            if (is_blocking_sequence(an, cur))
                blocking.push_back(cur);
            else
                self(self);
            cur.pop_back();
        }
    };
    dfs(dfs);

    std::vector<FactorSequence> minimal;
    for (const auto& s : blocking) {
        bool is_min = true;
        for (const auto& t : blocking) {
            if (&s == &t) continue;
            spend(1);
            if (sequence_below(t, s, p) && !sequence_below(s, t, p)) {
                is_min = false;
                break;
            }
        }
        if (is_min) minimal.push_back(s);
    }
    // One representative per equivalence class.
    std::sort(minimal.begin(), minimal.end(), canonical_less);
    for (const auto& s : minimal) {
        bool dup = false;
        for (const auto& t : out.sequences) dup = dup || (sequence_below(s, t, p) && sequence_below(t, s, p));
        if (!dup) out.sequences.push_back(s);
    }
    return out;
}

namespace {

Nfa gadget(const Nfa& a, bool flat) {
    if (!is_trim(a) || a.empty_language()) throw ValidationError("gadget needs a trim automaton");
    if (!accepts(a, {})) throw ValidationError("gadget needs the empty word in the language");
    for (Symbol x = 0; x < a.alphabet_size(); ++x)
        if (!accepts(a, {x})) throw ValidationError("gadget needs every one-letter word in the language");
    auto alphabet = a.alphabet();
    for (const char* extra : {"!", "#", "♭"})
        if (std::find(alphabet.begin(), alphabet.end(), extra) != alphabet.end())
            throw ValidationError(std::string("alphabet already uses ") + extra);
    const auto bang = static_cast<Symbol>(alphabet.size());
    const auto hash = bang + 1;
    alphabet.push_back("!");
    alphabet.push_back("#");
    if (flat) alphabet.push_back("♭");
    auto ts = a.transitions();
    for (State f : a.finals()) ts.push_back({f, bang, a.initial()});
    for (State q = 0; q < a.state_count(); ++q) ts.push_back({q, hash, q});
    return Nfa(a.state_count(), std::move(alphabet), std::move(ts), a.initial(), a.finals());
}

}  // namespace

Nfa universality_gadget(const Nfa& a) { return gadget(a, false); }
Nfa easiness_gadget(const Nfa& a) { return gadget(a, true); }

}  // namespace rpt
