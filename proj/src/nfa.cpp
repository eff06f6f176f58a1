#include "rpt/nfa.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rpt {

namespace {

std::size_t env_or(const char* name, std::size_t fallback) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(v, &end, 10);
    if (end == v || *end != '\0' || parsed == 0)
        throw ValidationError(std::string(name) + " must be a positive integer");
    return static_cast<std::size_t>(parsed);
}

}  // namespace

Limits Limits::from_env() {
    Limits l;
    l.subset_states = env_or("RPT_SUBSET_CAP", l.subset_states);
    l.scc_paths = env_or("RPT_PATH_CAP", l.scc_paths);
    l.combinations = env_or("RPT_COMBO_CAP", l.combinations);
    return l;
}

Nfa::Nfa() : Nfa(1, {}, {}, 0, {}) {}

Nfa::Nfa(std::size_t state_count, std::vector<std::string> alphabet,
         std::vector<Transition> transitions, State initial, std::vector<State> finals,
         bool empty_language)
    : state_count_(state_count),
      alphabet_(std::move(alphabet)),
      transitions_(std::move(transitions)),
      initial_(initial),
      finals_(std::move(finals)),
      empty_language_(empty_language) {
    if (state_count_ == 0) throw ValidationError("automaton needs at least one state");
    {
        auto sorted = alphabet_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("duplicate alphabet symbol");
    }
    if (initial_ >= state_count_) throw ValidationError("initial state out of range");
    for (State f : finals_)
        if (f >= state_count_) throw ValidationError("final state " + std::to_string(f) + " out of range");
    for (const auto& t : transitions_) {
        if (t.from >= state_count_ || t.to >= state_count_)
            throw ValidationError("transition endpoint out of range");
        if (t.symbol >= alphabet_.size()) throw ValidationError("transition symbol out of range");
    }
    std::sort(transitions_.begin(), transitions_.end());
    transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
    std::sort(finals_.begin(), finals_.end());
    finals_.erase(std::unique(finals_.begin(), finals_.end()), finals_.end());
    final_flag_.assign(state_count_, 0);
    for (State f : finals_) final_flag_[f] = 1;

    out_begin_.assign(state_count_ + 1, 0);
    in_begin_.assign(state_count_ + 1, 0);
    for (const auto& t : transitions_) {
        ++out_begin_[t.from + 1];
        ++in_begin_[t.to + 1];
    }
    for (std::size_t q = 0; q < state_count_; ++q) {
        out_begin_[q + 1] += out_begin_[q];
        in_begin_[q + 1] += in_begin_[q];
    }
    out_edges_.resize(transitions_.size());
    in_edges_.resize(transitions_.size());
    auto out_fill = out_begin_;
    auto in_fill = in_begin_;
    for (const auto& t : transitions_) {
        out_edges_[out_fill[t.from]++] = {t.symbol, t.to};
        in_edges_[in_fill[t.to]++] = {t.symbol, t.from};
    }
    for (std::size_t q = 0; q < state_count_; ++q) {
        std::sort(in_edges_.begin() + in_begin_[q], in_edges_.begin() + in_begin_[q + 1],
                  [](const Edge& x, const Edge& y) {
                      return std::tie(x.symbol, x.to) < std::tie(y.symbol, y.to);
                  });
    }
}

Symbol Nfa::symbol_of(std::string_view label) const {
    for (std::size_t i = 0; i < alphabet_.size(); ++i)
        if (alphabet_[i] == label) return static_cast<Symbol>(i);
    throw ValidationError("symbol '" + std::string(label) + "' is not in the alphabet");
}

Word Nfa::word(std::string_view text) const {
    Word w;
    w.reserve(text.size());
    for (char c : text) w.push_back(symbol_of(std::string_view(&c, 1)));
    return w;
}

std::string Nfa::spell(const Word& w) const {
    std::string s;
    for (Symbol a : w) s += alphabet_.at(a);
    return s;
}

StateSet Nfa::step(const StateSet& from, Symbol a) const {
    StateSet next;
    step_into(from, a, next);
    return next;
}

void Nfa::step_into(const StateSet& from, Symbol a, StateSet& next) const {
    next.resize(state_count_);
    next.reset();
    for (auto q = from.find_first(); q != StateSet::npos; q = from.find_next(q)) {
        auto edges = out(static_cast<State>(q));
        auto it = std::lower_bound(edges.begin(), edges.end(), a,
                                   [](const Edge& e, Symbol s) { return e.symbol < s; });
        for (; it != edges.end() && it->symbol == a; ++it) next.set(it->to);
    }
}

StateSet Nfa::initial_set() const {
    StateSet s(state_count_);
    s.set(initial_);
    return s;
}

bool Nfa::any_final(const StateSet& s) const {
    for (State f : finals_)
        if (s.test(f)) return true;
    return false;
}

bool Nfa::operator==(const Nfa& o) const {
    return state_count_ == o.state_count_ && alphabet_ == o.alphabet_ &&
           transitions_ == o.transitions_ && initial_ == o.initial_ && finals_ == o.finals_ &&
           empty_language_ == o.empty_language_;
}

namespace {

using nlohmann::json;

std::string line_of(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return "line " + std::to_string(line);
}

const json& field(const json& doc, const char* name) {
    auto it = doc.find(name);
    if (it == doc.end()) throw ParseError(std::string("field '") + name + "'", "missing");
    return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw ParseError(where, "expected an integer");
    return v.get<std::int64_t>();
}

}  // namespace

Nfa parse_nfa(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(line_of(text, e.byte == 0 ? 0 : e.byte - 1), e.what());
    }
    if (!doc.is_object()) throw ParseError("line 1", "expected an object");

    std::int64_t states = as_int(field(doc, "states"), "field 'states'");
    if (states <= 0) throw ParseError("field 'states'", "must be positive");

    const json& alpha = field(doc, "alphabet");
    if (!alpha.is_array()) throw ParseError("field 'alphabet'", "expected a list");
    std::vector<std::string> alphabet;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        std::string where = "field 'alphabet[" + std::to_string(i) + "]'";
        if (!alpha[i].is_string()) throw ParseError(where, "expected a string");
        auto s = alpha[i].get<std::string>();
        if (s.size() != 1) throw ParseError(where, "symbols are single characters");
        alphabet.push_back(s);
    }

    std::int64_t initial = as_int(field(doc, "initial"), "field 'initial'");
    if (initial < 0 || initial >= states) throw ValidationError("initial state out of range");

    const json& fin = field(doc, "finals");
    if (!fin.is_array()) throw ParseError("field 'finals'", "expected a list");
    std::vector<State> finals;
    for (std::size_t i = 0; i < fin.size(); ++i) {
        auto f = as_int(fin[i], "field 'finals[" + std::to_string(i) + "]'");
        if (f < 0 || f >= states) throw ValidationError("final state " + std::to_string(f) + " out of range");
        finals.push_back(static_cast<State>(f));
    }

    const json& tr = field(doc, "transitions");
    if (!tr.is_array()) throw ParseError("field 'transitions'", "expected a list");
    std::vector<Transition> transitions;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        std::string where = "field 'transitions[" + std::to_string(i) + "]'";
        const json& t = tr[i];
        if (!t.is_array() || t.size() != 3 || !t[1].is_string())
            throw ParseError(where, "expected [from, symbol, to]");
        auto from = as_int(t[0], where);
        auto to = as_int(t[2], where);
        if (from < 0 || from >= states || to < 0 || to >= states)
            throw ValidationError(where + ": state out of range");
        auto sym = t[1].get<std::string>();
        auto it = std::find(alphabet.begin(), alphabet.end(), sym);
        if (it == alphabet.end())
            throw ValidationError(where + ": symbol '" + sym + "' is not in the alphabet");
        transitions.push_back({static_cast<State>(from), static_cast<Symbol>(it - alphabet.begin()),
                               static_cast<State>(to)});
    }
    return Nfa(static_cast<std::size_t>(states), std::move(alphabet), std::move(transitions),
               static_cast<State>(initial), std::move(finals));
}

std::string serialize_nfa(const Nfa& a) {
    json doc;
    doc["states"] = a.state_count();
    doc["alphabet"] = a.alphabet();
    doc["initial"] = a.initial();
    doc["finals"] = a.finals();
    json tr = json::array();
    for (const auto& t : a.transitions()) tr.push_back({t.from, a.alphabet()[t.symbol], t.to});
    doc["transitions"] = tr;
    return doc.dump() + "\n";
}

Nfa load_nfa(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_nfa(ss.str());
}

std::vector<bool> reachable_from(const Nfa& a, State s) {
    std::vector<bool> seen(a.state_count(), false);
    std::deque<State> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
        State q = queue.front();
        queue.pop_front();
        for (const auto& e : a.out(q))
            if (!seen[e.to]) {
                seen[e.to] = true;
                queue.push_back(e.to);
            }
    }
    return seen;
}

std::vector<bool> coreachable(const Nfa& a) {
    std::vector<bool> seen(a.state_count(), false);
    std::deque<State> queue;
    for (State f : a.finals()) {
        seen[f] = true;
        queue.push_back(f);
    }
    while (!queue.empty()) {
        State q = queue.front();
        queue.pop_front();
        for (const auto& e : a.in(q))
            if (!seen[e.to]) {
                seen[e.to] = true;
                queue.push_back(e.to);
            }
    }
    return seen;
}

Nfa trim(const Nfa& a) {
    auto fwd = reachable_from(a, a.initial());
    auto bwd = coreachable(a);
    if (!bwd[a.initial()]) return Nfa(1, a.alphabet(), {}, 0, {}, true);
    std::vector<State> id(a.state_count(), 0);
    State next = 0;
    for (std::size_t q = 0; q < a.state_count(); ++q)
        if (fwd[q] && bwd[q]) id[q] = next++;
    std::vector<Transition> ts;
    for (const auto& t : a.transitions())
        if (fwd[t.from] && bwd[t.from] && fwd[t.to] && bwd[t.to])
            ts.push_back({id[t.from], t.symbol, id[t.to]});
    std::vector<State> finals;
    for (State f : a.finals())
        if (fwd[f]) finals.push_back(id[f]);
    return Nfa(next, a.alphabet(), std::move(ts), id[a.initial()], std::move(finals));
}

bool is_trim(const Nfa& a) {
    if (a.empty_language()) return true;
    auto fwd = reachable_from(a, a.initial());
    auto bwd = coreachable(a);
    for (std::size_t q = 0; q < a.state_count(); ++q)
        if (!fwd[q] || !bwd[q]) return false;
    return true;
}

bool accepts(const Nfa& a, const Word& u) {
    StateSet cur = a.initial_set(), next;
    for (Symbol x : u) {
        a.step_into(cur, x, next);
        if (next.none()) return false;
        cur.swap(next);
    }
    return a.any_final(cur);
}

}  // namespace rpt
