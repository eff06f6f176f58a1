#include "rpt/structure.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace rpt {

SccDecomposition scc_decompose(const Nfa& a) {
    const std::size_t m = a.state_count();
    constexpr std::uint32_t kUnset = 0xffffffffu;
    std::vector<std::uint32_t> index(m, kUnset), low(m, 0);
    std::vector<bool> on_stack(m, false);
    std::vector<State> stack;
    std::vector<std::vector<State>> found;  // reverse topological order
    std::uint32_t counter = 0;

    struct Frame {
        State q;
        std::size_t next;
    };
    for (State root = 0; root < m; ++root) {
        if (index[root] != kUnset) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            auto edges = a.out(f.q);
            if (f.next < edges.size()) {
                State t = edges[f.next++].to;
                if (index[t] == kUnset) {
                    index[t] = low[t] = counter++;
                    stack.push_back(t);
                    on_stack[t] = true;
                    frames.push_back({t, 0});
                } else if (on_stack[t]) {
                    low[f.q] = std::min(low[f.q], index[t]);
                }
                continue;
            }
            State q = f.q;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().q] = std::min(low[frames.back().q], low[q]);
            if (low[q] == index[q]) {
                std::vector<State> comp;
                State x;
                do {
                    x = stack.back();
                    stack.pop_back();
                    on_stack[x] = false;
                    comp.push_back(x);
                } while (x != q);
                std::sort(comp.begin(), comp.end());
                found.push_back(std::move(comp));
            }
        }
    }
    // Reversed Tarjan order is topological; stabilise ties by smallest id via
    // Kahn's algorithm over the condensation.
    const std::size_t c = found.size();
    std::vector<std::uint32_t> comp_of(m);
    for (std::size_t i = 0; i < c; ++i)
        for (State q : found[i]) comp_of[q] = static_cast<std::uint32_t>(i);
    std::vector<std::vector<std::uint32_t>> succ(c);
    std::vector<std::uint32_t> indeg(c, 0);
    for (const auto& t : a.transitions()) {
        auto x = comp_of[t.from], y = comp_of[t.to];
        if (x != y) succ[x].push_back(y);
    }
    for (auto& s : succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (auto y : s) ++indeg[y];
    }
    auto key = [&](std::uint32_t i) { return found[i].front(); };
    auto cmp = [&](std::uint32_t x, std::uint32_t y) { return key(x) > key(y); };
    std::vector<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < c; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    std::make_heap(ready.begin(), ready.end(), cmp);
    SccDecomposition d;
    d.component_of.assign(m, 0);
    while (!ready.empty()) {
        std::pop_heap(ready.begin(), ready.end(), cmp);
        auto i = ready.back();
        ready.pop_back();
        auto pos = static_cast<std::uint32_t>(d.components.size());
        for (State q : found[i]) d.component_of[q] = pos;
        bool trivial = false;
        if (found[i].size() == 1) {
            State q = found[i][0];
            trivial = std::none_of(a.out(q).begin(), a.out(q).end(), [&](const Edge& e) { return e.to == q; });
        }
        d.trivial.push_back(trivial);
        d.components.push_back(found[i]);
        for (auto y : succ[i])
            if (--indeg[y] == 0) {
                ready.push_back(y);
                std::push_heap(ready.begin(), ready.end(), cmp);
            }
    }
    return d;
}

namespace {

std::vector<bool> membership(const Nfa& a, const std::vector<State>& scc) {
    std::vector<bool> in(a.state_count(), false);
    for (State q : scc) in[q] = true;
    return in;
}

bool is_trivial_component(const Nfa& a, const std::vector<State>& scc) {
    if (scc.size() != 1) return false;
    for (const auto& e : a.out(scc[0]))
        if (e.to == scc[0]) return false;
    return true;
}

// BFS levels inside the component from its first state; returns the period.
std::uint32_t levels(const Nfa& a, const std::vector<State>& scc, const std::vector<bool>& in,
                     std::vector<std::int64_t>& level) {
    if (scc.empty() || is_trivial_component(a, scc))
        throw ValidationError("period is undefined for a trivial component");
    level.assign(a.state_count(), -1);
    std::deque<State> queue{scc.front()};
    level[scc.front()] = 0;
    while (!queue.empty()) {
        State q = queue.front();
        queue.pop_front();
        for (const auto& e : a.out(q))
            if (in[e.to] && level[e.to] < 0) {
                level[e.to] = level[q] + 1;
                queue.push_back(e.to);
            }
    }
    std::int64_t g = 0;
    for (State q : scc)
        for (const auto& e : a.out(q))
            if (in[e.to]) g = std::gcd(g, std::llabs(level[q] + 1 - level[e.to]));
    return static_cast<std::uint32_t>(g);
}

}  // namespace

std::uint32_t scc_period(const Nfa& a, const std::vector<State>& scc) {
    std::vector<std::int64_t> level;
    return levels(a, scc, membership(a, scc), level);
}

std::uint32_t reachability_constant(const Nfa& a, const std::vector<State>& scc, bool minimal) {
    const std::size_t v = scc.size();
    const auto fallback = static_cast<std::uint32_t>(3 * v * v);
    if (!minimal) return std::max<std::uint32_t>(fallback, 1);
    auto in = membership(a, scc);
    std::vector<std::int64_t> level;
    const std::uint32_t lambda = levels(a, scc, in, level);
    std::vector<std::uint32_t> local(a.state_count(), 0);
    for (std::size_t i = 0; i < v; ++i) local[scc[i]] = static_cast<std::uint32_t>(i);
    std::vector<StateSet> succ(v, StateSet(v));
    for (std::size_t i = 0; i < v; ++i)
        for (const auto& e : a.out(scc[i]))
            if (in[e.to]) succ[i].set(local[e.to]);
    // Required targets per (source, length mod lambda).
    std::vector<std::vector<StateSet>> need(v, std::vector<StateSet>(lambda, StateSet(v)));
    for (std::size_t i = 0; i < v; ++i)
        for (std::size_t j = 0; j < v; ++j) {
            auto diff = ((level[scc[j]] - level[scc[i]]) % lambda + lambda) % lambda;
            need[i][diff].set(j);
        }
    const std::size_t bound = 3 * v * v + 2 * lambda;
    std::vector<StateSet> reach(v, StateSet(v));
    for (std::size_t i = 0; i < v; ++i) reach[i].set(i);
    std::size_t last_gap = 0;  // last length at which some required path is missing
    bool any_gap = false;
    for (std::size_t r = 0; r <= bound; ++r) {
        bool full = true;
        for (std::size_t i = 0; i < v && full; ++i)
            if (!need[i][r % lambda].is_subset_of(reach[i])) full = false;
        if (!full) {
            last_gap = r;
            any_gap = true;
        }
        std::vector<StateSet> next(v, StateSet(v));
        for (std::size_t i = 0; i < v; ++i)
            for (auto j = reach[i].find_first(); j != StateSet::npos; j = reach[i].find_next(j))
                next[i] |= succ[j];
        reach.swap(next);
    }
    if (any_gap && last_gap + 1 > fallback) return std::max<std::uint32_t>(fallback, 1);
    return std::max<std::uint32_t>(any_gap ? static_cast<std::uint32_t>(last_gap + 1) : 0, 1);
}

SccStructure periodicity_classes(const Nfa& a, const std::vector<State>& scc, bool minimal_rho) {
    auto in = membership(a, scc);
    std::vector<std::int64_t> level;
    SccStructure s;
    s.period = levels(a, scc, in, level);
    State anchor = in[a.initial()] ? a.initial() : scc.front();
    const std::int64_t lam = s.period;
    s.classes.assign(s.period, {});
    s.class_of.assign(a.state_count(), SccStructure::kNoClass);
    for (State q : scc) {
        auto c = static_cast<std::uint32_t>(((level[q] - level[anchor]) % lam + lam) % lam);
        s.class_of[q] = c;
        s.classes[c].push_back(q);
    }
    s.rho = reachability_constant(a, scc, minimal_rho);
    return s;
}

std::uint32_t global_modulus(const Nfa& a) {
    auto d = scc_decompose(a);
    std::uint64_t p = 1;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!d.trivial[i]) p = std::lcm(p, static_cast<std::uint64_t>(scc_period(a, d.components[i])));
    if (p > 0xffffffu) throw ResourceError("modulus", "global modulus too large");
    return static_cast<std::uint32_t>(p);
}

std::optional<Word> k_reachable(const Nfa& a, State s, State t, std::uint32_t k, std::size_t min_len) {
    const std::uint32_t p = global_modulus(a);
    k %= p;
    // Counter saturates at min_len then cycles through residues.
    const std::size_t span = min_len + p;
    auto norm = [&](std::size_t len) { return len < min_len ? len : min_len + (len - min_len) % p; };
    const std::size_t m = a.state_count();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(m * span, kNone);
    std::vector<Symbol> via(m * span, 0);
    std::vector<bool> seen(m * span, false);
    auto id = [&](State q, std::size_t c) { return static_cast<std::size_t>(q) * span + c; };
    auto is_goal = [&](State q, std::size_t c) { return q == t && c >= min_len && c % p == k % p; };
    std::deque<std::pair<State, std::size_t>> queue{{s, 0}};
    seen[id(s, 0)] = true;
    while (!queue.empty()) {
        auto [q, c] = queue.front();
        queue.pop_front();
        if (is_goal(q, c)) {
            Word w;
            for (std::size_t cur = id(q, c); parent[cur] != kNone; cur = parent[cur]) w.push_back(via[cur]);
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (const auto& e : a.out(q)) {
            std::size_t nc = norm(c + 1);
            auto nid = id(e.to, nc);
            if (!seen[nid]) {
                seen[nid] = true;
                parent[nid] = id(q, c);
                via[nid] = e.symbol;
                queue.push_back({e.to, nc});
            }
        }
    }
    return std::nullopt;
}

std::optional<Word> path_of_length(const Nfa& a, State s, State t, std::size_t len,
                                   const std::vector<bool>& within) {
    const std::size_t m = a.state_count();
    auto allowed = [&](State q) { return within.empty() || within[q]; };
    if (!allowed(s) || !allowed(t)) return std::nullopt;
    // ok[j] = states from which t is reachable in exactly j steps.
    std::vector<StateSet> ok(len + 1, StateSet(m));
    ok[0].set(t);
    for (std::size_t j = 1; j <= len; ++j)
        for (std::size_t q = 0; q < m; ++q) {
            if (!allowed(static_cast<State>(q))) continue;
            for (const auto& e : a.out(static_cast<State>(q)))
                if (allowed(e.to) && ok[j - 1].test(e.to)) {
                    ok[j].set(q);
                    break;
                }
        }
    if (!ok[len].test(s)) return std::nullopt;
    Word w;
    State q = s;
    for (std::size_t j = len; j > 0; --j)
        for (const auto& e : a.out(q))
            if (allowed(e.to) && ok[j - 1].test(e.to)) {
                w.push_back(e.symbol);
                q = e.to;
                break;
            }
    return w;
}

std::optional<Word> shortest_path(const Nfa& a, State s, const std::vector<bool>& targets) {
    const std::size_t m = a.state_count();
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> parent(m, kNone);
    std::vector<Symbol> via(m, 0);
    std::vector<bool> seen(m, false);
    std::deque<State> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
        State q = queue.front();
        queue.pop_front();
        if (targets[q]) {
            Word w;
            for (std::size_t cur = q; parent[cur] != kNone; cur = parent[cur]) w.push_back(via[cur]);
            std::reverse(w.begin(), w.end());
            return w;
        }
        for (const auto& e : a.out(q))
            if (!seen[e.to]) {
                seen[e.to] = true;
                parent[e.to] = q;
                via[e.to] = e.symbol;
                queue.push_back(e.to);
            }
    }
    return std::nullopt;
}

StateSet run_set(const Nfa& a, const StateSet& from, const Word& w) {
    StateSet cur = from;
    for (Symbol x : w) {
        cur = a.step(cur, x);
        if (cur.none()) break;
    }
    return cur;
}

}  // namespace rpt
