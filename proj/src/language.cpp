#include "rpt/language.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "rpt/structure.hpp"

namespace rpt {

LengthProfile length_profile(const Nfa& a, const Limits& limits) {
    // The set of states reachable by words of length n evolves
    // deterministically, so it is eventually periodic.
    const std::size_t m = a.state_count();
    std::vector<StateSet> seq;
    std::unordered_map<StateSet, std::size_t> first_seen;
    StateSet cur = a.initial_set();
    std::size_t start = 0, period = 0;
    while (true) {
        auto [it, fresh] = first_seen.emplace(cur, seq.size());
        if (!fresh) {
            start = it->second;
            period = seq.size() - start;
            break;
        }
        if (seq.size() >= limits.subset_states)
            throw ResourceError("subset", "length profile exceeded the subset-state cap");
        seq.push_back(cur);
        StateSet next(m);
        for (auto q = cur.find_first(); q != StateSet::npos; q = cur.find_next(q))
            for (const auto& e : a.out(static_cast<State>(q))) next.set(e.to);
        cur = std::move(next);
    }
    LengthProfile prof;
    prof.threshold = start;
    for (std::size_t n = 0; n < start; ++n) prof.below.push_back(a.any_final(seq[n]));
    std::vector<bool> cyc(period);
    for (std::size_t i = 0; i < period; ++i) cyc[(start + i) % period] = a.any_final(seq[start + i]);
    // Report modulo the global modulus when the observed period divides it.
    std::size_t p = global_modulus(a);
    std::size_t mod = (p % period == 0) ? p : period;
    prof.modulus = mod;
    prof.residues.assign(mod, false);
    for (std::size_t r = 0; r < mod; ++r) prof.residues[r] = cyc[r % period];
    return prof;
}

namespace {

template <class Goal>
DifferenceResult product_search(const Nfa& a, const Nfa& b, const Limits& limits, Goal goal) {
    if (a.alphabet() != b.alphabet()) throw ValidationError("automata must share an alphabet");
    struct Node {
        State q;
        StateSet s;
        std::size_t parent;
        Symbol via;
    };
    constexpr std::size_t kRoot = static_cast<std::size_t>(-1);
    std::vector<Node> nodes;
    std::vector<std::unordered_map<StateSet, std::size_t>> index(a.state_count());
    auto witness = [&](std::size_t i) {
        Word w;
        for (; nodes[i].parent != kRoot; i = nodes[i].parent) w.push_back(nodes[i].via);
        std::reverse(w.begin(), w.end());
        return DifferenceResult{true, std::move(w)};
    };
    nodes.push_back({a.initial(), b.initial_set(), kRoot, 0});
    index[a.initial()].emplace(nodes[0].s, 0);
    if (goal(a.is_final(a.initial()), b.any_final(nodes[0].s))) return witness(0);
    for (std::size_t head = 0; head < nodes.size(); ++head) {
        // Copy: nodes may reallocate while expanding.
        const State q = nodes[head].q;
        const StateSet s = nodes[head].s;
        auto edges = a.out(q);
        for (std::size_t i = 0; i < edges.size();) {
            Symbol x = edges[i].symbol;
            StateSet t = b.step(s, x);
            for (; i < edges.size() && edges[i].symbol == x; ++i) {
                State q2 = edges[i].to;
                auto [it, fresh] = index[q2].emplace(t, nodes.size());
                if (!fresh) continue;
                if (nodes.size() >= limits.subset_states)
                    throw ResourceError("subset", "product exploration exceeded the subset-state cap");
                nodes.push_back({q2, t, head, x});
                if (goal(a.is_final(q2), b.any_final(t))) return witness(nodes.size() - 1);
            }
        }
    }
    return {};
}

}  // namespace

DifferenceResult difference_nonempty(const Nfa& a, const Nfa& b, const Limits& limits) {
    return product_search(a, b, limits, [](bool fa, bool fb) { return fa && !fb; });
}

DifferenceResult intersection_nonempty(const Nfa& a, const Nfa& b, const Limits& limits) {
    return product_search(a, b, limits, [](bool fa, bool fb) { return fa && fb; });
}

Nfa universal_nfa(const std::vector<std::string>& alphabet) {
    std::vector<Transition> ts;
    for (Symbol x = 0; x < alphabet.size(); ++x) ts.push_back({0, x, 0});
    return Nfa(1, alphabet, std::move(ts), 0, {0});
}

bool is_universal(const Nfa& a, const Limits& limits) {
    return !difference_nonempty(universal_nfa(a.alphabet()), a, limits).nonempty;
}

bool has_infinite_language(const Nfa& a) {
    Nfa t = trim(a);
    if (t.empty_language()) return false;
    auto d = scc_decompose(t);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!d.trivial[i]) return true;
    return false;
}

}  // namespace rpt
