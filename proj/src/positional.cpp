#include "rpt/positional.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <unordered_map>

#include "rpt/structure.hpp"

namespace rpt {

std::string format_positional(const Nfa& a, const PositionalWord& w) {
    return std::to_string(w.offset) + ":" + a.spell(w.letters);
}

PositionalWord parse_positional(const Nfa& a, std::string_view text, std::uint32_t p) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0)
        throw ParseError("positional word '" + std::string(text) + "'", "expected offset:letters");
    std::uint32_t off = 0;
    for (char c : text.substr(0, colon)) {
        if (c < '0' || c > '9')
            throw ParseError("positional word '" + std::string(text) + "'", "offset is not a number");
        off = off * 10 + static_cast<std::uint32_t>(c - '0');
    }
    return {off % p, a.word(text.substr(colon + 1))};
}

bool is_positional_factor(const PositionalWord& tau, const PositionalWord& mu, std::uint32_t p) {
    if (tau.size() > mu.size()) return false;
    for (std::size_t j = 0; j + tau.size() <= mu.size(); ++j) {
        if ((mu.offset + j) % p != tau.offset % p) continue;
        if (std::equal(tau.letters.begin(), tau.letters.end(), mu.letters.begin() + j)) return true;
    }
    return false;
}

std::vector<std::string> pair_alphabet(const std::vector<std::string>& base, std::uint32_t p) {
    std::vector<std::string> out;
    for (std::uint32_t r = 0; r < p; ++r)
        for (const auto& s : base) out.push_back(std::to_string(r) + ":" + s);
    return out;
}

Word encode_positional(const PositionalWord& w, std::uint32_t p, std::size_t sigma) {
    Word out;
    out.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        out.push_back(static_cast<Symbol>(((w.offset + i) % p) * sigma + w.letters[i]));
    return out;
}

PositionalWord decode_positional(const Word& w, std::size_t sigma) {
    PositionalWord out;
    if (!w.empty()) out.offset = static_cast<std::uint32_t>(w.front() / sigma);
    for (Symbol s : w) out.letters.push_back(static_cast<Symbol>(s % sigma));
    return out;
}

namespace {

std::vector<State> component_of(const Nfa& a, State s) {
    auto fwd = reachable_from(a, s);
    // States that reach s: reverse search.
    std::vector<bool> bwd(a.state_count(), false);
    std::deque<State> queue{s};
    bwd[s] = true;
    while (!queue.empty()) {
        State q = queue.front();
        queue.pop_front();
        for (const auto& e : a.in(q))
            if (!bwd[e.to]) {
                bwd[e.to] = true;
                queue.push_back(e.to);
            }
    }
    std::vector<State> comp;
    for (State q = 0; q < a.state_count(); ++q)
        if (fwd[q] && bwd[q]) comp.push_back(q);
    return comp;
}

}  // namespace

void Scope::build(const Nfa& a, const std::vector<State>& comp, State s, std::uint32_t x,
                  std::uint32_t modulus) {
    p_ = modulus;
    sigma_ = a.alphabet_size();
    states_ = comp;
    const std::size_t v = comp.size();
    std::vector<std::uint32_t> local(a.state_count(), 0xffffffffu);
    for (std::size_t i = 0; i < v; ++i) local[comp[i]] = static_cast<std::uint32_t>(i);
    succ_.assign(v, std::vector<StateSet>(sigma_, StateSet(v)));
    edges_.assign(v, {});
    for (std::size_t i = 0; i < v; ++i)
        for (const auto& e : a.out(comp[i]))
            if (local[e.to] != 0xffffffffu) {
                succ_[i][e.symbol].set(local[e.to]);
                edges_[i].push_back({e.symbol, local[e.to]});
            }
    reached_.assign(v, std::vector<bool>(p_, false));
    std::deque<std::pair<std::uint32_t, std::uint32_t>> queue{{local[s], x % p_}};
    reached_[local[s]][x % p_] = true;
    while (!queue.empty()) {
        auto [q, r] = queue.front();
        queue.pop_front();
        for (auto [sym, q2] : edges_[q]) {
            std::uint32_t r2 = (r + 1) % p_;
            if (!reached_[q2][r2]) {
                reached_[q2][r2] = true;
                queue.push_back({q2, r2});
            }
        }
    }
    live_.assign(p_, StateSet(v));
    for (std::size_t q = 0; q < v; ++q)
        for (std::uint32_t r = 0; r < p_; ++r)
            if (reached_[q][r]) live_[r].set(q);
    small_ = v <= 64;
    if (small_) {
        succ_mask_.assign(v, std::vector<std::uint64_t>(sigma_, 0));
        for (std::size_t q = 0; q < v; ++q)
            for (std::size_t sym = 0; sym < sigma_; ++sym)
                for (auto t = succ_[q][sym].find_first(); t != StateSet::npos; t = succ_[q][sym].find_next(t))
                    succ_mask_[q][sym] |= std::uint64_t{1} << t;
        live_mask_.assign(p_, 0);
    }
    (void)s;
}

Scope Scope::whole(const Nfa& a) {
    auto comp = component_of(a, a.initial());
    if (comp.size() != a.state_count())
        throw ValidationError("whole-automaton scope needs a strongly connected automaton");
    Scope sc;
    sc.build(a, comp, a.initial(), 0, global_modulus(a));
    sc.seed_ = {a.initial(), 0, a.initial(), 0};
    for (std::size_t i = 0; i < comp.size(); ++i)
        if (a.is_final(comp[i]))
            for (std::uint32_t r = 0; r < sc.p_; ++r)
                if (sc.reached_[i][r]) sc.finals_.push_back({static_cast<std::uint32_t>(i), r});
    sc.nonempty_ = !sc.finals_.empty();
    if (sc.small_)
        for (std::uint32_t r = 0; r < sc.p_; ++r)
            for (auto q = sc.live_[r].find_first(); q != StateSet::npos; q = sc.live_[r].find_next(q))
                sc.live_mask_[r] |= std::uint64_t{1} << q;
    if (!sc.nonempty_)
        for (auto& l : sc.live_) l.reset();
    if (!sc.nonempty_) std::fill(sc.live_mask_.begin(), sc.live_mask_.end(), 0);
    return sc;
}

Scope Scope::portal(const Nfa& a, const Portal& P, std::uint32_t modulus) {
    if (P.s >= a.state_count() || P.t >= a.state_count()) throw ValidationError("portal state out of range");
    if (P.x >= modulus || P.y >= modulus) throw ValidationError("portal residue out of range");
    auto comp = component_of(a, P.s);
    if (!std::binary_search(comp.begin(), comp.end(), P.t))
        throw ValidationError("portal endpoints lie in different components");
    Scope sc;
    sc.build(a, comp, P.s, P.x, modulus);
    sc.seed_ = P;
    auto lt = static_cast<std::uint32_t>(std::lower_bound(comp.begin(), comp.end(), P.t) - comp.begin());
    sc.nonempty_ = sc.reached_[lt][P.y];
    if (sc.nonempty_) sc.finals_.push_back({lt, P.y});
    if (!sc.nonempty_)
        for (auto& l : sc.live_) l.reset();
    if (sc.small_)
        for (std::uint32_t r = 0; r < sc.p_; ++r)
            for (auto q = sc.live_[r].find_first(); q != StateSet::npos; q = sc.live_[r].find_next(q))
                sc.live_mask_[r] |= std::uint64_t{1} << q;
    return sc;
}

StateSet Scope::step(const StateSet& from, Symbol a) const {
    StateSet next(states_.size());
    for (auto q = from.find_first(); q != StateSet::npos; q = from.find_next(q)) next |= succ_[q][a];
    return next;
}

bool Scope::is_blocking(const PositionalWord& w) const {
    StateSet cur = live(w.offset);
    for (Symbol a : w.letters) {
        if (cur.none()) return true;
        cur = step(cur, a);
    }
    return cur.none();
}

std::size_t Scope::blocking_end(const Symbol* u, std::size_t begin, std::size_t end,
                                std::uint32_t offset) const {
    if (small_) {
        std::uint64_t cur = live_mask_[offset % p_];
        if (cur == 0) return begin;
        for (std::size_t i = begin; i < end; ++i) {
            std::uint64_t next = 0;
            const Symbol x = u[i];
            for (std::uint64_t bits = cur; bits != 0; bits &= bits - 1)
                next |= succ_mask_[static_cast<std::size_t>(__builtin_ctzll(bits))][x];
            if (next == 0) return i;
            cur = next;
        }
        return end;
    }
    StateSet cur = live(offset);
    if (cur.none()) return begin;
    for (std::size_t i = begin; i < end; ++i) {
        cur = step(cur, u[i]);
        if (cur.none()) return i;
    }
    return end;
}

Nfa Scope::language_automaton(const std::vector<std::string>& base_alphabet) const {
    const std::size_t v = states_.size();
    auto id = [&](std::size_t q, std::uint32_t r) { return static_cast<State>(q * p_ + r); };
    std::vector<Transition> ts;
    for (std::size_t q = 0; q < v; ++q)
        for (std::uint32_t r = 0; r < p_; ++r) {
            if (!reached_[q][r]) continue;
            for (auto [sym, q2] : edges_[q])
                ts.push_back({id(q, r), static_cast<Symbol>(r * sigma_ + sym), id(q2, (r + 1) % p_)});
        }
    std::vector<State> finals;
    if (nonempty_)
        for (auto [q, r] : finals_) finals.push_back(id(q, r));
    auto lseed = static_cast<std::size_t>(
        std::lower_bound(states_.begin(), states_.end(), seed_.s) - states_.begin());
    Nfa raw(v * p_, pair_alphabet(base_alphabet, p_), std::move(ts), id(lseed, seed_.x), std::move(finals));
    return trim(raw);
}

Nfa positional_automaton(const Nfa& a) {
    const std::uint32_t p = global_modulus(a);
    const std::size_t m = a.state_count(), sigma = a.alphabet_size();
    std::vector<Transition> ts;
    for (const auto& t : a.transitions())
        for (std::uint32_t r = 0; r < p; ++r)
            ts.push_back({static_cast<State>(t.from * p + r), static_cast<Symbol>(r * sigma + t.symbol),
                          static_cast<State>(t.to * p + (r + 1) % p)});
    std::vector<State> finals;
    for (State f : a.finals())
        for (std::uint32_t r = 0; r < p; ++r) finals.push_back(static_cast<State>(f * p + r));
    return trim(Nfa(m * p, pair_alphabet(a.alphabet(), p), std::move(ts),
                    static_cast<State>(a.initial() * p), std::move(finals)));
}

Nfa portal_language_automaton(const Nfa& a, const Portal& P) {
    return Scope::portal(a, P, global_modulus(a)).language_automaton(a.alphabet());
}

namespace {

struct SetHash {
    std::size_t operator()(const StateSet& s) const { return std::hash<StateSet>{}(s); }
};

// Lazily explored deterministic automaton; node 0 is the fresh initial state
// that reads the first letter at any residue.
template <class Key, class KeyHash>
struct LazyDfa {
    std::vector<Key> keys;
    std::unordered_map<Key, State, KeyHash> index;
    std::vector<Transition> transitions;
    std::vector<State> finals;
    std::size_t cap;

    State intern(const Key& k, bool& fresh) {
        auto [it, inserted] = index.emplace(k, static_cast<State>(keys.size() + 1));
        fresh = inserted;
        if (inserted) {
            if (keys.size() + 1 >= cap)
                throw ResourceError("subset", "blocking-factor construction exceeded the subset-state cap");
            keys.push_back(k);
        }
        return it->second;
    }
};

struct BlockKey {
    StateSet set;
    std::uint32_t r;
    bool operator==(const BlockKey&) const = default;
};
struct BlockKeyHash {
    std::size_t operator()(const BlockKey& k) const { return std::hash<StateSet>{}(k.set) * 31 + k.r; }
};

struct MinKey {
    StateSet full;
    StateSet tail;
    bool tail_started;
    std::uint32_t r;
    bool operator==(const MinKey&) const = default;
};
struct MinKeyHash {
    std::size_t operator()(const MinKey& k) const {
        std::hash<StateSet> h;
        return ((h(k.full) * 1000003u) ^ h(k.tail)) * 31 + k.r * 2 + (k.tail_started ? 1 : 0);
    }
};

}  // namespace

Nfa blocking_factor_automaton(const Scope& scope, const std::vector<std::string>& base_alphabet,
                              const Limits& limits) {
    const std::uint32_t p = scope.modulus();
    const std::size_t sigma = scope.sigma();
    LazyDfa<BlockKey, BlockKeyHash> dfa{{}, {}, {}, {}, limits.subset_states};
    std::deque<State> work;
    auto visit = [&](State from, Symbol label, BlockKey key) {
        bool fresh = false;
        State to = dfa.intern(key, fresh);
        dfa.transitions.push_back({from, label, to});
        if (fresh) {
            if (key.set.none()) dfa.finals.push_back(to);
            work.push_back(to);
        }
    };
    for (std::uint32_t r = 0; r < p; ++r)
        for (Symbol x = 0; x < sigma; ++x)
            visit(0, static_cast<Symbol>(r * sigma + x), {scope.step(scope.live(r), x), (r + 1) % p});
    while (!work.empty()) {
        State id = work.front();
        work.pop_front();
        BlockKey k = dfa.keys[id - 1];
        for (Symbol x = 0; x < sigma; ++x)
            visit(id, static_cast<Symbol>(k.r * sigma + x), {scope.step(k.set, x), (k.r + 1) % p});
    }
    return trim(Nfa(dfa.keys.size() + 1, pair_alphabet(base_alphabet, p), std::move(dfa.transitions), 0,
                    std::move(dfa.finals)));
}

Nfa minimal_blocking_factor_automaton(const Scope& scope, const std::vector<std::string>& base_alphabet,
                                      const Limits& limits) {
    // A blocking word is minimal iff dropping its first letter and dropping
    // its last letter both give non-blocking words: every proper factor is a
    // factor of one of those two, and blocking is closed under extension.
    // The state tracks the runs of the whole word and of the word minus its
    // first letter; the empty word counts as non-blocking.
    const std::uint32_t p = scope.modulus();
    const std::size_t sigma = scope.sigma();
    LazyDfa<MinKey, MinKeyHash> dfa{{}, {}, {}, {}, limits.subset_states};
    std::deque<State> work;
    auto visit = [&](State from, Symbol label, MinKey key) {
        if (key.tail_started && key.tail.none()) return;  // a proper suffix already blocks
        bool fresh = false;
        State to = dfa.intern(key, fresh);
        dfa.transitions.push_back({from, label, to});
        if (fresh) {
            if (key.full.none())
                dfa.finals.push_back(to);  // accepting states are never extended
            else
                work.push_back(to);
        }
    };
    const std::size_t v = scope.states().size();
    for (std::uint32_t r = 0; r < p; ++r)
        for (Symbol x = 0; x < sigma; ++x)
            visit(0, static_cast<Symbol>(r * sigma + x),
                  {scope.step(scope.live(r), x), StateSet(v), false, (r + 1) % p});
    while (!work.empty()) {
        State id = work.front();
        work.pop_front();
        MinKey k = dfa.keys[id - 1];
        for (Symbol x = 0; x < sigma; ++x) {
            StateSet tail = k.tail_started ? scope.step(k.tail, x) : scope.step(scope.live(k.r), x);
            visit(id, static_cast<Symbol>(k.r * sigma + x), {scope.step(k.full, x), tail, true, (k.r + 1) % p});
        }
    }
    return trim(Nfa(dfa.keys.size() + 1, pair_alphabet(base_alphabet, p), std::move(dfa.transitions), 0,
                    std::move(dfa.finals)));
}

const char* to_string(BlockingTag t) {
    switch (t) {
        case BlockingTag::Empty: return "empty";
        case BlockingTag::Finite: return "finite";
        case BlockingTag::Infinite: return "infinite";
    }
    return "?";
}

namespace {

void collect_words(const Nfa& m, State q, Word& prefix, std::size_t max_len, std::vector<Word>& out) {
    if (m.is_final(q)) out.push_back(prefix);
    if (prefix.size() == max_len) return;
    for (const auto& e : m.out(q)) {
        prefix.push_back(e.symbol);
        collect_words(m, e.to, prefix, max_len, out);
        prefix.pop_back();
    }
}

std::vector<PositionalWord> decode_all(std::vector<Word> words, std::size_t sigma) {
    std::vector<PositionalWord> out;
    for (const auto& w : words) out.push_back(decode_positional(w, sigma));
    std::sort(out.begin(), out.end(), [](const PositionalWord& x, const PositionalWord& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return std::tie(x.offset, x.letters) < std::tie(y.offset, y.letters);
    });
    return out;
}

}  // namespace

BlockingClass mbf_class(const Scope& scope, const std::vector<std::string>& base_alphabet, const Limits& limits) {
    Nfa m = minimal_blocking_factor_automaton(scope, base_alphabet, limits);
    BlockingClass c;
    if (m.empty_language()) return c;
    auto d = scc_decompose(m);
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!d.trivial[i]) {
            c.tag = BlockingTag::Infinite;
            return c;
        }
    c.tag = BlockingTag::Finite;
    std::vector<Word> words;
    Word prefix;
    collect_words(m, m.initial(), prefix, m.state_count(), words);
    c.words = decode_all(std::move(words), scope.sigma());
    return c;
}

std::vector<PositionalWord> enumerate_mbf(const Scope& scope, const std::vector<std::string>& base_alphabet,
                                          std::size_t max_len, const Limits& limits) {
    Nfa m = minimal_blocking_factor_automaton(scope, base_alphabet, limits);
    if (m.empty_language()) return {};
    std::vector<Word> words;
    Word prefix;
    collect_words(m, m.initial(), prefix, max_len, words);
    return decode_all(std::move(words), scope.sigma());
}

}  // namespace rpt
