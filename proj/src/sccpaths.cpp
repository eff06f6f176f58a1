#include "rpt/sccpaths.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "rpt/language.hpp"

namespace rpt {

PortalOrder PortalRelation::order() const {
    if (below && above) return PortalOrder::Equivalent;
    if (below) return PortalOrder::Below;
    if (above) return PortalOrder::Above;
    return PortalOrder::Incomparable;
}

FactorSequence SeparationPlan::sequence() const {
    FactorSequence out;
    for (const auto& s : steps) out.push_back(s.word);
    return out;
}

Analysis::Analysis(Nfa a, Limits limits) : a_(std::move(a)), limits_(limits) {
    if (!is_trim(a_)) throw ValidationError("analysis needs a trim automaton");
    p_ = global_modulus(a_);
    scc_ = scc_decompose(a_);
}

const Scope& Analysis::scope(const Portal& P) {
    auto it = scopes_.find(P);
    if (it == scopes_.end()) it = scopes_.emplace(P, Scope::portal(a_, P, p_)).first;
    return it->second;
}

const Nfa& Analysis::block_automaton(const Portal& P) {
    auto it = blocks_.find(P);
    if (it == blocks_.end())
        it = blocks_.emplace(P, blocking_factor_automaton(scope(P), a_.alphabet(), limits_)).first;
    return it->second;
}

const BlockingClass& Analysis::mbf(const Portal& P) {
    auto it = mbf_.find(P);
    if (it == mbf_.end()) it = mbf_.emplace(P, mbf_class(scope(P), a_.alphabet(), limits_)).first;
    return it->second;
}

const std::vector<SccPath>& Analysis::accepting_paths() {
    if (!paths_) paths_ = enumerate_accepting_scc_paths(a_, limits_);
    return *paths_;
}

const PortalRelation& Analysis::relation(const Portal& a, const Portal& b) {
    auto key = std::make_pair(a, b);
    auto it = relations_.find(key);
    if (it != relations_.end()) return it->second;
    PortalRelation r;
    const Nfa& ba = block_automaton(a);
    const Nfa& bb = block_automaton(b);
    auto b_not_a = difference_nonempty(bb, ba, limits_);
    auto a_not_b = difference_nonempty(ba, bb, limits_);
    r.below = !b_not_a.nonempty;
    r.above = !a_not_b.nonempty;
    if (a_not_b.witness) r.only_a = decode_positional(*a_not_b.witness, a_.alphabet_size());
    if (b_not_a.witness) r.only_b = decode_positional(*b_not_a.witness, a_.alphabet_size());
    return relations_.emplace(key, std::move(r)).first->second;
}

namespace {

struct ProductKey {
    std::uint32_t r;
    std::vector<StateSet> sets;
    bool operator==(const ProductKey&) const = default;
};

struct ProductKeyHash {
    std::size_t operator()(const ProductKey& k) const {
        std::size_t h = k.r;
        for (const auto& s : k.sets) h = h * 1000003u ^ std::hash<StateSet>{}(s);
        return h;
    }
};

std::uint32_t leading_dead(const std::vector<StateSet>& sets, std::size_t from, std::size_t to) {
    std::uint32_t n = 0;
    for (std::size_t i = from; i < to && sets[i].none(); ++i) ++n;
    return n;
}

// For every non-empty word: how many leading portals of each list it blocks.
// Returns each realised pair once, with a shortest witness.
std::map<std::pair<std::uint32_t, std::uint32_t>, PositionalWord> advance_pairs(
    Analysis& an, std::span<const Portal> first, std::span<const Portal> second) {
    std::vector<const Scope*> scopes;
    for (const auto& P : first) scopes.push_back(&an.scope(P));
    for (const auto& P : second) scopes.push_back(&an.scope(P));
    const std::size_t nf = first.size(), total = scopes.size();
    const std::uint32_t p = an.modulus();
    const std::size_t sigma = an.automaton().alphabet_size();

    std::vector<ProductKey> keys;
    std::vector<std::pair<std::int64_t, Symbol>> parent;  // (node, letter); -1 for the first letter
    std::vector<std::uint32_t> start;                      // offset of the word
    std::unordered_map<ProductKey, std::size_t, ProductKeyHash> index;
    std::deque<std::size_t> work;
    std::map<std::pair<std::uint32_t, std::uint32_t>, PositionalWord> out;

    auto word_of = [&](std::size_t node) {
        PositionalWord w;
        w.offset = start[node];
        for (std::int64_t n = static_cast<std::int64_t>(node); n >= 0; n = parent[n].first)
            w.letters.push_back(parent[n].second);
        std::reverse(w.letters.begin(), w.letters.end());
        return w;
    };
    auto visit = [&](ProductKey key, std::int64_t from, Symbol x, std::uint32_t off) {
        auto [it, fresh] = index.emplace(key, keys.size());
        if (!fresh) return;
        if (keys.size() >= an.limits().subset_states)
            throw ResourceError("subset", "separation search exceeded the subset-state cap");
        keys.push_back(std::move(key));
        parent.push_back({from, x});
        start.push_back(off);
        const std::size_t node = keys.size() - 1;
        const auto& k = keys[node];
        std::pair<std::uint32_t, std::uint32_t> adv{leading_dead(k.sets, 0, nf), leading_dead(k.sets, nf, total)};
        if (!out.count(adv)) out.emplace(adv, word_of(node));
        work.push_back(node);
    };
    for (std::uint32_t r = 0; r < p; ++r)
        for (Symbol x = 0; x < sigma; ++x) {
            ProductKey k{(r + 1) % p, {}};
            for (const auto* sc : scopes) k.sets.push_back(sc->step(sc->live(r), x));
            visit(std::move(k), -1, x, r);
        }
    while (!work.empty()) {
        std::size_t node = work.front();
        work.pop_front();
        for (Symbol x = 0; x < sigma; ++x) {
            const ProductKey& cur = keys[node];
            ProductKey k{(cur.r + 1) % p, {}};
            k.sets.reserve(total);
            for (std::size_t i = 0; i < total; ++i) k.sets.push_back(scopes[i]->step(cur.sets[i], x));
            visit(std::move(k), static_cast<std::int64_t>(node), x, start[node]);
        }
    }
    return out;
}

}  // namespace

const std::optional<SeparationPlan>& Analysis::separation(std::span<const Portal> first,
                                                          std::span<const Portal> second) {
    auto key = std::make_pair(std::vector<Portal>(first.begin(), first.end()),
                              std::vector<Portal>(second.begin(), second.end()));
    auto it = separations_.find(key);
    if (it != separations_.end()) return it->second;

    // Cursor (i, j): portals first[0..i) and second[0..j) are blocked. Words
    // only ever push both cursors forward, and a smaller j is never worse.
    const std::size_t n1 = first.size(), n2 = second.size();
    std::optional<SeparationPlan> result;
    if (n1 == 0) {
        if (n2 > 0) result = SeparationPlan{};
        return separations_.emplace(std::move(key), std::move(result)).first->second;
    }
    if (n2 == 0) return separations_.emplace(std::move(key), std::nullopt).first->second;

    struct Back {
        std::size_t i, j;
        SeparationStep step;
    };
    std::map<std::pair<std::size_t, std::size_t>, std::optional<Back>> seen;
    std::deque<std::pair<std::size_t, std::size_t>> queue{{0, 0}};
    seen[{0, 0}] = std::nullopt;
    std::optional<std::pair<std::size_t, std::size_t>> goal;
    while (!queue.empty() && !goal) {
        auto [i, j] = queue.front();
        queue.pop_front();
        auto pairs = advance_pairs(*this, first.subspan(i), second.subspan(j));
        for (const auto& [adv, w] : pairs) {
            auto [a, b] = adv;
            if (a == 0 || j + b >= n2) continue;
            std::pair<std::size_t, std::size_t> next{i + a, j + b};
            if (seen.count(next)) continue;
            seen[next] = Back{i, j, SeparationStep{w, a, b}};
            if (next.first == n1) {
                goal = next;
                break;
            }
            queue.push_back(next);
        }
    }
    if (goal) {
        SeparationPlan plan;
        for (auto cur = *goal; seen[cur];) {
            const Back& b = *seen[cur];
            plan.steps.push_back(b.step);
            cur = {b.i, b.j};
        }
        std::reverse(plan.steps.begin(), plan.steps.end());
        result = std::move(plan);
    }
    return separations_.emplace(std::move(key), std::move(result)).first->second;
}

namespace {

struct Enumerator {
    const Nfa& a;
    const SccDecomposition& scc;
    std::uint32_t p;
    std::size_t cap;
    std::map<std::pair<State, std::uint32_t>, Scope> entries;
    std::vector<SccPath> out;
    SccPath cur;

    const Scope& entry(State s, std::uint32_t x) {
        auto it = entries.find({s, x});
        if (it == entries.end()) it = entries.emplace(std::make_pair(s, x), Scope::portal(a, {s, x, s, x}, p)).first;
        return it->second;
    }

    void walk(State s, std::uint32_t x) {
        const Scope& sc = entry(s, x);
        const auto& states = sc.states();
        for (std::uint32_t y = 0; y < p; ++y) {
            const StateSet& at = sc.live(y);
            for (auto l = at.find_first(); l != StateSet::npos; l = at.find_next(l)) {
                State t = states[l];
                cur.portals.push_back({s, x, t, y});
                if (a.is_final(t)) {
                    if (out.size() >= cap)
                        throw ResourceError("paths", "accepting SCC-path count exceeded the path cap");
                    out.push_back(cur);
                }
                for (const auto& e : a.out(t)) {
                    if (scc.component_of[e.to] == scc.component_of[t]) continue;
                    cur.letters.push_back(e.symbol);
                    walk(e.to, (y + 1) % p);
                    cur.letters.pop_back();
                }
                cur.portals.pop_back();
            }
        }
    }
};

}  // namespace

std::vector<SccPath> enumerate_accepting_scc_paths(const Nfa& a, const Limits& limits) {
    if (!is_trim(a)) throw ValidationError("SCC-path enumeration needs a trim automaton");
    if (a.empty_language()) return {};
    auto scc = scc_decompose(a);
    Enumerator en{a, scc, global_modulus(a), limits.scc_paths, {}, {}, {}};
    en.walk(a.initial(), 0);
    std::sort(en.out.begin(), en.out.end());
    return std::move(en.out);
}

void validate_scc_path(const Nfa& a, const SccPath& pi, bool accepting) {
    const std::uint32_t p = global_modulus(a);
    auto scc = scc_decompose(a);
    if (pi.portals.empty()) throw ValidationError("SCC-path has no portals");
    if (pi.letters.size() + 1 != pi.portals.size()) throw ValidationError("SCC-path needs k letters for k+1 portals");
    for (std::size_t i = 0; i < pi.portals.size(); ++i) {
        const Portal& P = pi.portals[i];
        auto where = "portal " + std::to_string(i);
        if (P.s >= a.state_count() || P.t >= a.state_count() || P.x >= p || P.y >= p)
            throw ValidationError(where + " is out of range");
        if (scc.component_of[P.s] != scc.component_of[P.t])
            throw ValidationError(where + " spans two components");
        if (!Scope::portal(a, P, p).language_nonempty()) throw ValidationError(where + " has an empty language");
        if (i == 0) continue;
        const Portal& Q = pi.portals[i - 1];
        if (P.x != (Q.y + 1) % p) throw ValidationError(where + " entry residue does not follow the link");
        bool edge = false;
        for (const auto& e : a.out(Q.t)) edge = edge || (e.symbol == pi.letters[i - 1] && e.to == P.s);
        if (!edge) throw ValidationError("link " + std::to_string(i) + " is not a transition");
        if (scc.component_of[Q.t] >= scc.component_of[P.s])
            throw ValidationError("link " + std::to_string(i) + " does not move to a later component");
    }
    if (accepting) {
        if (pi.portals.front().s != a.initial() || pi.portals.front().x != 0)
            throw ValidationError("accepting SCC-path must start at (q0, 0)");
        if (!a.is_final(pi.portals.back().t)) throw ValidationError("accepting SCC-path must end in a final state");
    }
}

Nfa scc_path_language_automaton(const Nfa& a, const SccPath& pi) {
    const std::uint32_t p = global_modulus(a);
    const std::size_t sigma = a.alphabet_size();
    std::vector<Transition> ts;
    std::size_t base = 0;
    State prev_final = 0, initial = 0, last_final = 0;
    for (std::size_t i = 0; i < pi.portals.size(); ++i) {
        Nfa part = portal_language_automaton(a, pi.portals[i]);
        if (part.empty_language()) return trim(Nfa(1, pair_alphabet(a.alphabet(), p), {}, 0, {}));
        for (const auto& t : part.transitions())
            ts.push_back({static_cast<State>(base + t.from), t.symbol, static_cast<State>(base + t.to)});
        auto entry = static_cast<State>(base + part.initial());
        if (i == 0)
            initial = entry;
        else
            ts.push_back({prev_final, static_cast<Symbol>(pi.portals[i - 1].y * sigma + pi.letters[i - 1]), entry});
        // A portal automaton has a single final state: the exit pair.
        prev_final = last_final = static_cast<State>(base + part.finals().front());
        base += part.state_count();
    }
    return trim(Nfa(base, pair_alphabet(a.alphabet(), p), std::move(ts), initial, {last_final}));
}

int left_effect(Analysis& an, const FactorSequence& sigma, std::span<const Portal> path) {
    std::size_t j = 0;
    for (const auto& mu : sigma)
        while (j < path.size() && an.blocks(mu, path[j])) ++j;
    return static_cast<int>(j) - 1;
}

int right_effect(Analysis& an, const FactorSequence& sigma, std::span<const Portal> path) {
    auto j = static_cast<std::ptrdiff_t>(path.size()) - 1;
    for (auto it = sigma.rbegin(); it != sigma.rend(); ++it)
        while (j >= 0 && an.blocks(*it, path[static_cast<std::size_t>(j)])) --j;
    return static_cast<int>(j + 1);
}

EffectSummary effects(Analysis& an, const FactorSequence& sigma, const SccPath& pi) {
    return {left_effect(an, sigma, pi.portals), right_effect(an, sigma, pi.portals)};
}

bool is_blocking_for_path(Analysis& an, const FactorSequence& sigma, const SccPath& pi) {
    return left_effect(an, sigma, pi.portals) == static_cast<int>(pi.k());
}

bool is_strongly_blocking(Analysis& an, const FactorSequence& sigma, const SccPath& pi) {
    // Matching portals to distinct, increasing elements; taking the earliest
    // usable element for each portal is optimal.
    std::size_t j = 0;
    for (const auto& mu : sigma)
        if (j < pi.portals.size() && an.blocks(mu, pi.portals[j])) ++j;
    return j == pi.portals.size();
}

bool is_blocking_sequence(Analysis& an, const FactorSequence& sigma) {
    for (const auto& pi : an.accepting_paths())
        if (!is_blocking_for_path(an, sigma, pi)) return false;
    return true;
}

PortalRelation portal_preorder(Analysis& an, const Portal& a, const Portal& b) { return an.relation(a, b); }

std::optional<SeparationPlan> exists_separating_sequence(Analysis& an, std::span<const Portal> first,
                                                         std::span<const Portal> second) {
    return an.separation(first, second);
}

std::optional<SeparationPlan> exists_separating_sequence(Analysis& an, const SccPath& first,
                                                         const SccPath& second) {
    return an.separation(first.portals, second.portals);
}

FactorSequence uniformize_sequences(Analysis& an,
                                    const std::vector<std::pair<SccPath, FactorSequence>>& targets,
                                    const SccPath& pi, std::size_t i) {
    // Repeatedly emit the pending first element that blocks the least of what
    // remains of pi, then advance that target past it.
    struct Pending {
        std::vector<Portal> path;
        FactorSequence seq;
        std::size_t next = 0;
    };
    std::vector<Pending> pending;
    for (const auto& [path, seq] : targets) {
        if (left_effect(an, seq, pi.portals) >= static_cast<int>(i))
            throw ValidationError("uniformization target already blocks past the kept portal");
        if (!seq.empty()) pending.push_back({path.portals, seq, 0});
    }
    std::span<const Portal> rest(pi.portals);
    FactorSequence out;
    for (;;) {
        std::size_t best = pending.size();
        int best_effect = 0;
        for (std::size_t t = 0; t < pending.size(); ++t) {
            if (pending[t].next >= pending[t].seq.size() || pending[t].path.empty()) continue;
            int e = left_effect(an, {pending[t].seq[pending[t].next]}, rest);
            if (best == pending.size() || e < best_effect) {
                best = t;
                best_effect = e;
            }
        }
        if (best == pending.size()) break;
        Pending& chosen = pending[best];
        const PositionalWord nu = chosen.seq[chosen.next];
        out.push_back(nu);
        int j = left_effect(an, {nu}, chosen.path);
        chosen.path.erase(chosen.path.begin(), chosen.path.begin() + (j + 1));
        ++chosen.next;
        rest = rest.subspan(static_cast<std::size_t>(best_effect + 1));
    }
    return out;
}

}  // namespace rpt
