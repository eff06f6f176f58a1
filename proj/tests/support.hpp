// Shared helpers for the test binaries: fixture loading and brute-force
// oracles that do not go through the library's subset machinery.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rpt/distance.hpp"
#include "rpt/nfa.hpp"
#include "rpt/positional.hpp"
#include "rpt/sccpaths.hpp"

namespace rpt::testing {

inline std::string fixture_path(const std::string& name) { return std::string(RPT_FIXTURE_DIR) + "/" + name + ".aut"; }
inline Nfa fixture(const std::string& name) { return load_nfa(fixture_path(name)); }

inline const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names{"fig1",   "fig2",      "fig3",           "astar", "ab",
                                                "aa_bb",  "parity",    "universal",      "repeated_parity"};
    return names;
}

// Run search over explicit transitions, no subsets.
inline bool brute_accepts(const Nfa& a, const Word& u) {
    std::function<bool(State, std::size_t)> go = [&](State q, std::size_t i) {
        if (i == u.size()) return a.is_final(q);
        for (const auto& t : a.transitions())
            if (t.from == q && t.symbol == u[i] && go(t.to, i + 1)) return true;
        return false;
    };
    return go(a.initial(), 0);
}

// Word of length n numbered by `code` in base sigma, first letter least significant.
inline Word decode_word(std::uint64_t code, std::size_t n, std::size_t sigma) {
    Word w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = static_cast<Symbol>(code % sigma);
        code /= sigma;
    }
    return w;
}

inline std::uint64_t word_count(std::size_t n, std::size_t sigma) {
    std::uint64_t c = 1;
    for (std::size_t i = 0; i < n; ++i) c *= sigma;
    return c;
}

// Distance of every word of length n to the nearest member, by breadth-first
// search over single substitutions from all members at once. -1 when the
// language has no word of length n.
inline std::vector<int> brute_distance_table(const Nfa& a, std::size_t n) {
    const std::size_t sigma = a.alphabet_size();
    const std::uint64_t total = word_count(n, sigma);
    std::vector<int> dist(total, -1);
    std::deque<std::uint64_t> queue;
    for (std::uint64_t c = 0; c < total; ++c)
        if (brute_accepts(a, decode_word(c, n, sigma))) {
            dist[c] = 0;
            queue.push_back(c);
        }
    std::vector<std::uint64_t> place(n, 1);
    for (std::size_t i = 1; i < n; ++i) place[i] = place[i - 1] * sigma;
    while (!queue.empty()) {
        auto c = queue.front();
        queue.pop_front();
        for (std::size_t i = 0; i < n; ++i) {
            const auto digit = (c / place[i]) % sigma;
            for (std::uint64_t x = 0; x < sigma; ++x) {
                if (x == digit) continue;
                auto d = c - digit * place[i] + x * place[i];
                if (dist[d] < 0) {
                    dist[d] = dist[c] + 1;
                    queue.push_back(d);
                }
            }
        }
    }
    return dist;
}

// (state, residue) pairs of `comp` reachable from (s, x) inside comp.
inline std::set<std::pair<State, std::uint32_t>> residue_reach(const Nfa& a, const std::vector<bool>& comp, State s,
                                                                std::uint32_t x, std::uint32_t p, bool backward) {
    std::set<std::pair<State, std::uint32_t>> seen{{s, x % p}};
    std::deque<std::pair<State, std::uint32_t>> queue{{s, x % p}};
    while (!queue.empty()) {
        auto [q, r] = queue.front();
        queue.pop_front();
        for (const auto& t : a.transitions()) {
            if (!comp[t.from] || !comp[t.to]) continue;
            std::pair<State, std::uint32_t> next;
            if (!backward && t.from == q)
                next = {t.to, (r + 1) % p};
            else if (backward && t.to == q)
                next = {t.from, (r + p - 1) % p};
            else
                continue;
            if (seen.insert(next).second) queue.push_back(next);
        }
    }
    return seen;
}

// <o:w> is blocking for the portal (s, x, t, y) inside component `comp` iff no
// run of w from a pair reachable from the entry leads to a pair that still
// reaches the exit. The whole-automaton scope is the portal (q0, 0, f, *) for
// all finals f.
inline bool brute_blocking(const Nfa& a, const std::vector<bool>& comp, State s, std::uint32_t x,
                           const std::vector<std::pair<State, std::uint32_t>>& exits, std::uint32_t p,
                           const PositionalWord& w) {
    auto fwd = residue_reach(a, comp, s, x, p, false);
    std::set<std::pair<State, std::uint32_t>> back;
    for (auto [t, y] : exits) {
        auto b = residue_reach(a, comp, t, y, p, true);
        back.insert(b.begin(), b.end());
    }
    std::function<bool(State, std::size_t)> run = [&](State q, std::size_t i) {
        const auto r = static_cast<std::uint32_t>((w.offset + i) % p);
        if (i == w.size()) return back.count({q, r}) > 0;
        for (const auto& t : a.transitions())
            if (t.from == q && t.symbol == w.letters[i] && comp[t.to] && run(t.to, i + 1)) return true;
        return false;
    };
    for (auto [q, r] : fwd)
        if (r == w.offset % p && run(q, 0)) return false;
    return true;
}

// Blocking for a strongly connected automaton as a whole.
inline bool brute_blocking_whole(const Nfa& a, std::uint32_t p, const PositionalWord& w) {
    std::vector<bool> comp(a.state_count(), true);
    std::vector<std::pair<State, std::uint32_t>> exits;
    for (State f : a.finals())
        for (std::uint32_t r = 0; r < p; ++r) exits.push_back({f, r});
    return brute_blocking(a, comp, a.initial(), 0, exits, p, w);
}

// Every positional word up to max_len, offsets 0..p-1.
inline std::vector<PositionalWord> all_positional(std::size_t sigma, std::uint32_t p, std::size_t max_len) {
    std::vector<PositionalWord> out;
    for (std::size_t len = 1; len <= max_len; ++len)
        for (std::uint64_t c = 0; c < word_count(len, sigma); ++c)
            for (std::uint32_t r = 0; r < p; ++r) out.push_back({r, decode_word(c, len, sigma)});
    return out;
}

// Uniform choice among transitions that can still finish in a final state
// after exactly the remaining letters.
inline std::optional<Word> random_member(const Nfa& a, std::size_t n, std::mt19937_64& rng) {
    std::vector<std::vector<bool>> can(n + 1, std::vector<bool>(a.state_count(), false));
    for (State f : a.finals()) can[n][f] = true;
    for (std::size_t i = n; i-- > 0;)
        for (const auto& t : a.transitions())
            if (can[i + 1][t.to]) can[i][t.from] = true;
    if (!can[0][a.initial()]) return std::nullopt;
    Word w;
    State q = a.initial();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Transition> ok;
        for (const auto& t : a.transitions())
            if (t.from == q && can[i + 1][t.to]) ok.push_back(t);
        const auto& t = ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)];
        w.push_back(t.symbol);
        q = t.to;
    }
    return w;
}

// Random automaton over {a, b} with `states` states that accepts the empty
// word and both one-letter words.
inline Nfa random_short_complete(std::size_t states, std::mt19937_64& rng, double density = 0.35) {
    std::vector<Transition> ts;
    std::bernoulli_distribution edge(density), fin(0.5);
    std::vector<State> finals{0};
    for (State q = 1; q < states; ++q)
        if (fin(rng)) finals.push_back(q);
    for (State q = 0; q < states; ++q)
        for (Symbol x = 0; x < 2; ++x)
            for (State r = 0; r < states; ++r)
                if (edge(rng)) ts.push_back({q, x, r});
    std::uniform_int_distribution<std::size_t> pick(0, finals.size() - 1);
    for (Symbol x = 0; x < 2; ++x) ts.push_back({0, x, finals[pick(rng)]});
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return Nfa(states, {"a", "b"}, ts, 0, finals);
}

// Universality by explicit subset search.
inline bool brute_universal(const Nfa& a) {
    std::set<std::vector<bool>> seen;
    std::deque<std::vector<bool>> queue;
    std::vector<bool> start(a.state_count(), false);
    start[a.initial()] = true;
    seen.insert(start);
    queue.push_back(start);
    while (!queue.empty()) {
        auto s = queue.front();
        queue.pop_front();
        bool fin = false;
        for (State q = 0; q < a.state_count(); ++q) fin = fin || (s[q] && a.is_final(q));
        if (!fin) return false;
        for (Symbol x = 0; x < a.alphabet_size(); ++x) {
            std::vector<bool> t(a.state_count(), false);
            for (const auto& tr : a.transitions())
                if (s[tr.from] && tr.symbol == x) t[tr.to] = true;
            if (seen.insert(t).second) queue.push_back(t);
        }
    }
    return true;
}

// Nonempty proper factors of w at their true offsets.
inline std::vector<PositionalWord> proper_factors(const PositionalWord& w, std::uint32_t p) {
    std::vector<PositionalWord> out;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j <= w.size(); ++j)
            if (j - i < w.size())
                out.push_back({static_cast<std::uint32_t>((w.offset + i) % p),
                               Word(w.letters.begin() + static_cast<std::ptrdiff_t>(i),
                                    w.letters.begin() + static_cast<std::ptrdiff_t>(j))});
    return out;
}

// A scope together with the data the brute-force blocking oracle needs.
struct ScopeCase {
    std::string label;
    Scope scope;
    std::vector<bool> comp;
    State s;
    std::uint32_t x;
    std::vector<std::pair<State, std::uint32_t>> exits;

    bool brute_blocks(const Nfa& a, const PositionalWord& w) const {
        return brute_blocking(a, comp, s, x, exits, scope.modulus(), w);
    }
};

// The whole-automaton scope when `a` is strongly connected, then every portal
// on an accepting path of trim(a).
inline std::vector<ScopeCase> scope_cases(const Nfa& trimmed, const std::string& name) {
    std::vector<ScopeCase> out;
    Analysis an(trimmed);
    const auto p = an.modulus();
    const auto& d = an.components();
    if (d.size() == 1 && !d.trivial[0]) {
        std::vector<bool> comp(trimmed.state_count(), true);
        std::vector<std::pair<State, std::uint32_t>> exits;
        for (State f : trimmed.finals())
            for (std::uint32_t r = 0; r < p; ++r) exits.push_back({f, r});
        out.push_back({name + "/whole", Scope::whole(trimmed), comp, trimmed.initial(), 0, exits});
    }
    std::set<Portal> seen;
    for (const auto& pi : an.accepting_paths())
        for (const auto& P : pi.portals) {
            if (!seen.insert(P).second) continue;
            std::vector<bool> comp(trimmed.state_count(), false);
            for (State q : d.components[d.component_of[P.s]]) comp[q] = true;
            out.push_back({name + "/portal " + std::to_string(P.s) + "," + std::to_string(P.x) + "," +
                               std::to_string(P.t) + "," + std::to_string(P.y),
                           Scope::portal(trimmed, P, p), comp, P.s, P.x, {{P.t, P.y}}});
        }
    return out;
}

// A word of length n at distance >= ceil(eps n) from L(a), certified by the
// distance oracle: a random member overwritten at random places until far
// enough. Each overwrite is one random letter, or a copy of `plant` when given
// (random letters alone stay too close for some languages). Empty when no
// member of length n exists or the distance stops growing.
inline std::optional<Word> make_far_word(const Nfa& a, std::size_t n, double eps, std::mt19937_64& rng,
                                         const Word& plant = {}) {
    auto base = random_member(a, n, rng);
    if (!base) return std::nullopt;
    Word w = *base;
    const auto need = static_cast<std::uint64_t>(std::ceil(eps * static_cast<double>(n)));
    const std::size_t width = std::max<std::size_t>(plant.size(), 1);
    std::uniform_int_distribution<std::size_t> pos(0, n - width);
    std::uniform_int_distribution<Symbol> letter(0, static_cast<Symbol>(a.alphabet_size() - 1));
    for (int round = 0; round < 64; ++round) {
        const auto d = hamming_distance(a, w).value;
        if (d >= need) return w;
        for (std::uint64_t i = 0; i < need - d; ++i) {
            const auto at = pos(rng);
            if (plant.empty())
                w[at] = letter(rng);
            else
                std::copy(plant.begin(), plant.end(), w.begin() + static_cast<std::ptrdiff_t>(at));
        }
    }
    return std::nullopt;
}

}  // namespace rpt::testing
