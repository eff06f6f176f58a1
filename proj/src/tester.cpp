#include "rpt/tester.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rpt/structure.hpp"

namespace rpt {

Symbol WordAccess::query(std::size_t i) {
    if (i >= word_.size()) throw std::out_of_range("query past the end of the word");
    ++count_;
    return word_[i];
}

std::span<const Symbol> WordAccess::read(std::size_t begin, std::size_t end) {
    if (begin > end || end > word_.size()) throw std::out_of_range("read outside the word");
    count_ += end - begin;
    return word_.subspan(begin, end - begin);
}

std::uint64_t SamplerPlan::budget() const {
    std::uint64_t total = 0;
    for (std::size_t t = 0; t < ell.size(); ++t) total += reps[t] * (2 * ell[t] + 1);
    return total;
}

SamplerPlan make_plan(std::size_t n, double beta, std::uint64_t L) {
    if (n == 0 || L == 0 || !(beta > 0)) throw ValidationError("sampler needs n, L >= 1 and beta > 0");
    SamplerPlan plan;
    plan.n = n;
    plan.beta = beta;
    plan.L = L;
    while ((std::uint64_t{1} << plan.T) < L) ++plan.T;
    for (std::uint32_t t = 0; t <= plan.T; ++t) {
        const std::uint64_t ell = std::uint64_t{1} << t;
        plan.ell.push_back(ell);
        auto r = static_cast<std::uint64_t>(std::ceil(2.0 * std::log(3.0) * beta / static_cast<double>(ell)));
        plan.reps.push_back(std::max<std::uint64_t>(r, 1));
    }
    return plan;
}

Window one_sample(WordAccess& w, std::uint64_t ell, std::mt19937_64& rng) {
    const std::size_t n = w.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t i = pick(rng);
    const std::size_t l = i >= ell ? i - ell : 0;
    const std::size_t r = std::min<std::size_t>(i + ell, n - 1);
    return {l, w.read(l, r + 1)};
}

std::vector<Window> sampler(WordAccess& w, const SamplerPlan& plan, std::mt19937_64& rng) {
    std::vector<Window> out;
    out.reserve(std::accumulate(plan.reps.begin(), plan.reps.end(), std::uint64_t{0}));
    for (std::size_t t = 0; t < plan.ell.size(); ++t)
        for (std::uint64_t k = 0; k < plan.reps[t]; ++k) out.push_back(one_sample(w, plan.ell[t], rng));
    return out;
}

namespace {

std::uint64_t clipped_of(const std::vector<Window>& ws, const SamplerPlan& plan) {
    std::uint64_t full = plan.budget(), got = 0;
    for (const auto& win : ws) got += win.letters.size();
    return full - got;
}

void check_eps(double eps) {
    if (!(eps > 0 && eps < 1)) throw ValidationError("epsilon must lie in (0, 1)");
}

// Earliest e >= from with u[from..e] blocking for `sc`, scanning windows
// sorted by start; returns false when none of them has one.
bool earliest_block(const Scope& sc, const std::vector<Window>& ws, std::size_t from, std::size_t& begin,
                    std::size_t& end) {
    bool found = false;
    std::size_t best = 0;
    for (const auto& win : ws) {
        if (found && win.begin > best) break;
        if (win.end() <= from) continue;
        const std::size_t b = std::max(win.begin, from);
        const std::size_t rel = b - win.begin;
        const std::size_t e =
            sc.blocking_end(win.letters.data(), rel, win.letters.size(), static_cast<std::uint32_t>(b % sc.modulus()));
        if (e == win.letters.size()) continue;
        const std::size_t abs = win.begin + e;
        if (!found || abs < best) {
            found = true;
            best = abs;
            begin = b;
        }
    }
    end = best + 1;
    return found;
}

}  // namespace

SccTester::SccTester(const Nfa& a, const Limits& limits)
    : a_(trim(a)), scope_(Scope::whole(a_)), lengths_(length_profile(a_, limits)) {}

SamplerPlan SccTester::plan(std::size_t n, double eps) const {
    check_eps(eps);
    const double m = static_cast<double>(a_.state_count());
    const double L = 12.0 * m * m / eps;
    return make_plan(n, L, static_cast<std::uint64_t>(std::ceil(L)));
}

Verdict SccTester::run(WordAccess& w, double eps, std::mt19937_64& rng) const {
    check_eps(eps);
    Verdict v;
    const std::size_t n = w.size();
    const double m = static_cast<double>(a_.state_count());
    if (!lengths_.contains(n)) {
        v.accept = false;
        v.length_reject = true;
        return v;
    }
    if (static_cast<double>(n) < 12.0 * m * m / eps) {
        auto all = w.read(0, n);
        v.read_all = true;
        v.accept = accepts(a_, Word(all.begin(), all.end()));
        v.queries_used = w.query_count();
        return v;
    }
    SamplerPlan plan = this->plan(n, eps);
    auto windows = sampler(w, plan, rng);
    v.planned = plan.budget();
    v.clipped = clipped_of(windows, plan);
    v.queries_used = w.query_count();
    for (const auto& win : windows) {
        const std::size_t e = scope_.blocking_end(win.letters.data(), 0, win.letters.size(),
                                                  static_cast<std::uint32_t>(win.begin % scope_.modulus()));
        if (e == win.letters.size()) continue;
        // Positions inside the window were all read; rebase to the window.
        const std::span<const Symbol> local = win.letters;
        std::size_t s = 0;
        for (std::size_t c = e; c > 0; --c)
            if (scope_.blocking_end(local.data(), c, e + 1,
                                    static_cast<std::uint32_t>((win.begin + c) % scope_.modulus())) <= e) {
                s = c;
                break;
            }
        v.accept = false;
        v.evidence.push_back({0, 0, win.begin + s, win.begin + e + 1});
        break;
    }
    return v;
}

PathTester::PathTester(Analysis& an, std::uint64_t length_bound)
    : an_(an), bound_(length_bound), lengths_(length_profile(an.automaton(), an.limits())) {
    for (const auto& pi : an_.accepting_paths()) {
        std::vector<const Scope*> row;
        for (const auto& P : pi.portals) row.push_back(&an_.scope(P));
        scopes_.push_back(std::move(row));
    }
}

double PathTester::constant(std::size_t path) const {
    const double k = static_cast<double>(scopes_[path].size() - 1);
    return 8.0 * (k + 3.0) * an_.modulus();
}

std::size_t PathTester::repetitions(std::size_t path) const {
    const double K = static_cast<double>(scopes_.size());
    const double k1 = static_cast<double>(scopes_[path].size());
    return static_cast<std::size_t>(std::ceil(std::log(3.0 * K * k1))) + 1;
}

SamplerPlan PathTester::plan(std::size_t path, std::size_t n, double eps) const {
    check_eps(eps);
    const double beta = 2.0 * constant(path) / eps;
    const std::uint64_t L = bound_ ? bound_ : static_cast<std::uint64_t>(std::ceil(beta));
    return make_plan(n, beta, L);
}

std::size_t PathTester::read_all_below(double eps) const {
    check_eps(eps);
    std::size_t most = 0;
    for (std::size_t i = 0; i < scopes_.size(); ++i)
        most = std::max(most, static_cast<std::size_t>(std::ceil(2.0 * constant(i) / eps)));
    return most;
}

Verdict PathTester::run(WordAccess& w, double eps, std::mt19937_64& rng) const {
    check_eps(eps);
    Verdict v;
    const std::size_t n = w.size();
    if (!lengths_.contains(n)) {
        v.accept = false;
        v.length_reject = true;
        return v;
    }
    if (n < read_all_below(eps)) {
        auto all = w.read(0, n);
        v.read_all = true;
        v.accept = accepts(an_.automaton(), Word(all.begin(), all.end()));
        v.queries_used = w.query_count();
        return v;
    }
    const std::uint64_t base = rng();
    bool all_rejected = true;
    std::vector<Occurrence> evidence;
    for (std::size_t pi = 0; pi < scopes_.size(); ++pi) {
        // Each path draws from its own stream so paths do not perturb each other.
        std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                          static_cast<std::uint32_t>(pi)};
        std::mt19937_64 sub(seq);
        const SamplerPlan plan = this->plan(pi, n, eps);
        // Longest window per start. A window inside another one holds no
        // factor the other lacks, so only the maximal ones are scanned.
        std::vector<Window> longest(n);
        const std::size_t runs = repetitions(pi) * scopes_[pi].size();
        for (std::size_t r = 0; r < runs; ++r) {
            auto ws = sampler(w, plan, sub);
            v.planned += plan.budget();
            v.clipped += clipped_of(ws, plan);
            for (const auto& win : ws)
                if (win.letters.size() > longest[win.begin].letters.size()) longest[win.begin] = win;
        }
        std::vector<Window> windows;
        std::size_t reach = 0;
        for (const auto& win : longest)
            if (win.end() > reach) {
                windows.push_back(win);
                reach = win.end();
            }
        std::size_t from = 0;
        std::vector<Occurrence> found;
        for (std::size_t j = 0; j < scopes_[pi].size(); ++j) {
            std::size_t b = 0, e = 0;
            if (!earliest_block(*scopes_[pi][j], windows, from, b, e)) break;
            found.push_back({pi, j, b, e});
            from = e;
        }
        if (found.size() == scopes_[pi].size())
            evidence.insert(evidence.end(), found.begin(), found.end());
        else
            all_rejected = false;
    }
    v.queries_used = w.query_count();
    // An automaton without accepting paths has an empty language, which the
    // length check has already rejected.
    v.accept = !all_rejected;
    if (!v.accept) v.evidence = std::move(evidence);
    return v;
}

Verdict test_scc(const Nfa& a, WordAccess& w, double eps, std::mt19937_64& rng) {
    return SccTester(a).run(w, eps, rng);
}

Verdict test_general(Analysis& an, WordAccess& w, double eps, std::mt19937_64& rng) {
    return PathTester(an).run(w, eps, rng);
}

Verdict test_easy(Analysis& an, WordAccess& w, double eps, std::mt19937_64& rng, std::uint64_t B) {
    if (B == 0) throw ValidationError("bounded-factor tester needs B >= 1");
    return PathTester(an, B).run(w, eps, rng);
}

bool replay_evidence(const SccTester& t, std::span<const Symbol> u, const Verdict& v) {
    if (v.accept) return true;
    if (v.length_reject) return !t.lengths().contains(u.size());
    if (v.read_all) return !accepts(t.automaton(), Word(u.begin(), u.end()));
    if (v.evidence.empty()) return false;
    const Scope& sc = t.scope();
    for (const auto& o : v.evidence) {
        if (o.end > u.size() || o.begin >= o.end) return false;
        if (sc.blocking_end(u.data(), o.begin, o.end, static_cast<std::uint32_t>(o.begin % sc.modulus())) >= o.end)
            return false;
    }
    return true;
}

bool replay_evidence(Analysis& an, std::span<const Symbol> u, const Verdict& v) {
    if (v.accept) return true;
    if (v.length_reject) return !length_profile(an.automaton(), an.limits()).contains(u.size());
    if (v.read_all) return !accepts(an.automaton(), Word(u.begin(), u.end()));
    const auto& paths = an.accepting_paths();
    for (std::size_t pi = 0; pi < paths.size(); ++pi) {
        std::size_t next = 0, from = 0;
        for (const auto& o : v.evidence) {
            if (o.path != pi) continue;
            if (o.portal != next || o.begin < from || o.begin >= o.end || o.end > u.size()) return false;
            const Scope& sc = an.scope(paths[pi].portals[o.portal]);
            if (sc.blocking_end(u.data(), o.begin, o.end, static_cast<std::uint32_t>(o.begin % sc.modulus())) >=
                o.end)
                return false;
            ++next;
            from = o.end;
        }
        if (next != paths[pi].portals.size()) return false;
    }
    return true;
}

std::vector<Occurrence> greedy_blocking_decomposition(const Nfa& a, const PositionalWord& tau) {
    Nfa t = trim(a);
    if (!length_profile(t).contains(tau.size()))
        throw ValidationError("no member of the language has the length of the word");
    Scope sc = Scope::whole(t);
    std::vector<State> all(t.state_count());
    for (State q = 0; q < t.state_count(); ++q) all[q] = q;
    const std::size_t rho = std::max<std::uint32_t>(1, reachability_constant(t, all, true));
    const std::size_t n = tau.size();
    std::vector<Occurrence> out;
    if (n <= 2 * rho) return out;
    for (std::size_t i = rho; i < n - rho;) {
        const std::size_t e = sc.blocking_end(tau.letters.data(), i, n - rho,
                                              static_cast<std::uint32_t>((tau.offset + i) % sc.modulus()));
        if (e == n - rho) break;
        out.push_back({0, 0, i, e + rho});
        i = e + rho;
    }
    return out;
}

}  // namespace rpt
