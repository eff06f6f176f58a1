#include "rpt/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpt/distance.hpp"
#include "rpt/structure.hpp"

namespace rpt {

namespace {

void append(Word& w, const Word& x, std::size_t times = 1) {
    for (std::size_t i = 0; i < times; ++i) w.insert(w.end(), x.begin(), x.end());
}

Word power(const Word& x, std::size_t times) {
    Word w;
    w.reserve(x.size() * times);
    append(w, x, times);
    return w;
}

StateSet singleton(const Nfa& a, State q) {
    StateSet s(a.state_count());
    s.set(q);
    return s;
}

StateSet to_global(const Nfa& a, const Scope& scope, const StateSet& local) {
    StateSet g(a.state_count());
    for (auto i = local.find_first(); i != StateSet::npos; i = local.find_next(i)) g.set(scope.states()[i]);
    return g;
}

// States of one run of w from `from`, ending inside `end_in`; empty if none.
std::vector<State> concrete_run(const Nfa& a, const StateSet& from, const Word& w, const StateSet& end_in) {
    std::vector<StateSet> sets{from};
    sets.reserve(w.size() + 1);
    for (Symbol x : w) sets.push_back(a.step(sets.back(), x));
    StateSet last = sets.back() & end_in;
    if (last.none()) return {};
    std::vector<State> run(w.size() + 1);
    run.back() = static_cast<State>(last.find_first());
    for (std::size_t k = w.size(); k-- > 0;) {
        for (const Edge& e : a.in(run[k + 1]))
            if (e.symbol == w[k] && sets[k].test(e.to)) {
                run[k] = e.to;
                break;
            }
    }
    return run;
}

std::uint32_t mod(std::int64_t v, std::uint32_t p) {
    auto r = v % static_cast<std::int64_t>(p);
    return static_cast<std::uint32_t>(r < 0 ? r + p : r);
}

}  // namespace

PositionalWord PumpFamily::tau_minus(std::size_t r) const {
    PositionalWord w{i_star, phi.letters};
    append(w.letters, nu_minus.letters, r);
    append(w.letters, chi.letters);
    return w;
}

PositionalWord PumpFamily::tau_plus(std::size_t r, std::size_t s) const {
    if (r == 0 || s >= r) throw std::out_of_range("tau_plus needs 0 <= s < r");
    PositionalWord w{i_star, phi.letters};
    append(w.letters, nu_minus.letters, s);
    append(w.letters, nu_plus.letters);
    append(w.letters, nu_minus.letters, r - 1 - s);
    append(w.letters, chi.letters);
    return w;
}

void validate_pump_family(const Nfa& a, const PumpFamily& f, std::size_t rounds) {
    if (f.nu_plus.size() != f.nu_minus.size()) throw ValidationError("nu_plus and nu_minus differ in length");
    Scope scope = Scope::whole(a);
    StateSet home = singleton(a, f.q_star);
    for (std::size_t r = 1; r <= rounds; ++r) {
        if (!scope.is_blocking(f.tau_minus(r)))
            throw ValidationError("tau_minus(" + std::to_string(r) + ") is not blocking");
        for (std::size_t s = 0; s < r; ++s)
            if (!run_set(a, home, f.tau_plus(r, s).letters).test(f.q_star))
                throw ValidationError("tau_plus(" + std::to_string(r) + ", " + std::to_string(s) +
                                      ") does not loop on q_star");
    }
}

PumpFamily extract_pump_family(const Nfa& a, std::size_t check_rounds, const Limits& limits) {
    if (!is_trim(a) || a.empty_language()) throw ValidationError("pump extraction needs a trim automaton");
    auto d = scc_decompose(a);
    if (d.size() != 1 || d.trivial[0]) throw ValidationError("pump extraction needs a strongly connected automaton");
    const std::uint32_t p = global_modulus(a);
    const std::size_t sigma = a.alphabet_size();
    Scope scope = Scope::whole(a);
    Nfa m = minimal_blocking_factor_automaton(scope, a.alphabet(), limits);
    if (m.empty_language()) throw ValidationError("the automaton has no blocking factor");

    // tau mu^k eta is minimal blocking for every k: pick the cycle state of
    // the minimal blocking automaton with the shortest such triple.
    auto md = scc_decompose(m);
    std::vector<bool> finals(m.state_count(), false);
    for (State f : m.finals()) finals[f] = true;
    std::optional<std::tuple<Word, Word, Word>> best;
    for (State c = 0; c < m.state_count(); ++c) {
        if (md.trivial[md.component_of[c]]) continue;
        std::vector<bool> at_c(m.state_count(), false);
        at_c[c] = true;
        auto tau = shortest_path(m, m.initial(), at_c);
        auto eta = shortest_path(m, c, finals);
        std::optional<Word> mu;
        for (const Edge& e : m.out(c)) {
            auto back = shortest_path(m, e.to, at_c);
            if (!back) continue;
            Word cyc{e.symbol};
            append(cyc, *back);
            if (!mu || cyc.size() < mu->size() || (cyc.size() == mu->size() && cyc < *mu)) mu = cyc;
        }
        if (!tau || !eta || !mu) continue;
        auto total = tau->size() + mu->size() + eta->size();
        if (!best || total < std::get<0>(*best).size() + std::get<1>(*best).size() + std::get<2>(*best).size())
            best.emplace(*tau, *mu, *eta);
    }
    if (!best) throw ValidationError("finitely many minimal blocking factors: no pump exists");

    auto [tau_p, mu_p, eta_p] = *best;
    PositionalWord tau = decode_positional(tau_p, sigma);
    PositionalWord mu = decode_positional(mu_p, sigma);
    PositionalWord eta = decode_positional(eta_p, sigma);
    // A pair-alphabet word with empty tau still fixes the residue through mu.
    const std::uint32_t i_star = tau.size() ? tau.offset : mu.offset;
    const std::size_t states = a.state_count();
    const std::size_t M = states + 1;
    StateSet all(states);
    all.set();

    // Run of tau mu^M from a live state: two equal states among the M
    // boundaries after at least one copy of mu.
    Word lead = tau.letters;
    append(lead, mu.letters, M);
    auto run1 = concrete_run(a, to_global(a, scope, scope.live(i_star)), lead, all);
    if (run1.empty()) throw std::logic_error("proper prefix of a minimal blocking factor dies");
    auto boundary1 = [&](std::size_t j) { return run1[tau.size() + j * mu.size()]; };
    std::size_t ja = 0, jb = 0;
    for (std::size_t j = 1; j <= M && !jb; ++j)
        for (std::size_t i = 1; i < j; ++i)
            if (boundary1(i) == boundary1(j)) {
                ja = i;
                jb = j;
                break;
            }
    if (!jb) throw std::logic_error("no repeated boundary state in the prefix run");

    // Run of mu^M eta from a live state: a repeat among the boundaries
    // before the last copy of mu.
    Word trail = power(mu.letters, M);
    append(trail, eta.letters);
    const auto mu_residue = static_cast<std::uint32_t>((i_star + tau.size()) % p);
    auto run2 = concrete_run(a, to_global(a, scope, scope.live(mu_residue)), trail, all);
    if (run2.empty()) throw std::logic_error("proper suffix of a minimal blocking factor dies");
    auto boundary2 = [&](std::size_t j) { return run2[j * mu.size()]; };
    std::size_t ka = 0, kb = 0;
    for (std::size_t j = 1; j < M && !kb; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (boundary2(i) == boundary2(j)) {
                ka = i;
                kb = j;
                break;
            }
    if (!kb) throw std::logic_error("no repeated boundary state in the suffix run");

    PumpFamily f;
    f.q_star = run1[0];
    f.i_star = i_star;
    f.k0 = ja;
    f.k1 = jb - ja;
    f.k2 = kb - ka;
    f.k3 = M - kb;
    f.mbf_states = m.state_count();
    const State p1 = boundary1(ja);
    const State p2 = boundary2(kb);
    const State q_end = run2.back();

    f.phi = {i_star, tau.letters};
    append(f.phi.letters, mu.letters, f.k0);
    const auto rho = reachability_constant(a, d.components[0]);
    f.K = std::max<std::size_t>(rho, 1) * f.k1 * f.k2;
    std::optional<Word> bridge = path_of_length(a, p1, p2, f.K * mu.size());
    for (int tries = 0; tries < 8 && !bridge; ++tries) {
        f.K += f.k1 * f.k2;
        bridge = path_of_length(a, p1, p2, f.K * mu.size());
    }
    if (!bridge) throw ResourceError("scc_paths", "no replacement loop of the pumped length");
    const auto nu_offset = static_cast<std::uint32_t>((i_star + f.phi.size()) % p);
    f.nu_minus = {nu_offset, power(mu.letters, f.K)};
    f.nu_plus = {nu_offset, *bridge};
    const auto chi_offset = static_cast<std::uint32_t>((i_star + tau.size()) % p);
    f.chi = {chi_offset, power(mu.letters, f.k3)};
    append(f.chi.letters, eta.letters);
    std::vector<bool> home(states, false);
    home[f.q_star] = true;
    auto back = shortest_path(a, q_end, home);
    if (!back) throw std::logic_error("strongly connected automaton without a return path");
    f.return_length = back->size();
    append(f.chi.letters, *back);
    f.S = f.phi.size() + f.nu_minus.size() + f.chi.size();
    validate_pump_family(a, f, check_rounds);
    return f;
}

double max_epsilon(const PumpFamily& f) {
    // For eps in (2^-(T+1)/S, 2^-T/S] the level sum is 3 S eps (2^(T+1) - 2) / T.
    const double S = static_cast<double>(f.S);
    double best = 0;
    for (int T = 1; T < 60; ++T) {
        const double hi = std::ldexp(1.0, -T) / S;
        const double lo = std::ldexp(1.0, -(T + 1)) / S;
        const double cap = T / (3.0 * S * (std::ldexp(1.0, T + 1) - 2.0));
        const double e = std::min(hi, cap);
        if (e > lo) best = std::max(best, e);
    }
    return best;
}

HardDistParams make_hard_params(const Nfa& a, const PumpFamily& f, double eps, std::size_t n) {
    if (!(eps > 0) || eps > max_epsilon(f) * (1 + 1e-12))
        throw ValidationError("eps is outside the range where the level probabilities are defined");
    HardDistParams h;
    h.family = f;
    h.eps = eps;
    h.n = n;
    const double S = static_cast<double>(f.S);
    h.T = static_cast<std::uint32_t>(std::floor(std::log2(1.0 / (S * eps)) + 1e-9));
    h.p.assign(h.T + 1, 0.0);
    double sum = 0;
    for (std::uint32_t t = 1; t <= h.T; ++t) sum += h.p[t] = 3.0 * std::ldexp(S * eps, static_cast<int>(t)) / h.T;
    h.p[0] = std::max(0.0, 1.0 - sum);

    const std::uint32_t lambda = global_modulus(a);
    h.ell = static_cast<std::size_t>(std::floor(1.0 / eps + 1e-9));
    h.ell -= h.ell % lambda;
    if (h.ell == 0) throw ValidationError("eps too large for the period");

    auto mu_i = k_reachable(a, a.initial(), f.q_star, f.i_star % lambda, 0);
    if (!mu_i) throw std::logic_error("q_star unreachable at its residue");
    h.mu_i = *mu_i;
    if (n < h.mu_i.size()) throw ValidationError("n too small for the hard distribution");

    auto eta_star = path_of_length(a, f.q_star, f.q_star, h.ell);
    if (!eta_star) throw ValidationError("no loop of interval length on q_star");
    h.eta_star = *eta_star;

    h.copies.assign(h.T + 1, 0);
    h.pad.assign(h.T + 1, {});
    for (std::uint32_t t = 1; t <= h.T; ++t) {
        const std::size_t r = std::size_t{1} << t;
        const std::size_t len = f.tau_minus(r).size();
        auto N = static_cast<std::size_t>(std::floor(std::ldexp(1.0, -static_cast<int>(t)) / (S * eps) + 1e-9));
        for (; N > 0; --N) {
            if (N * len > h.ell) continue;
            if (auto pad = path_of_length(a, f.q_star, f.q_star, h.ell - N * len)) {
                h.pad[t] = *pad;
                break;
            }
        }
        if (N == 0) throw ValidationError("interval too short for level " + std::to_string(t));
        h.copies[t] = N;
    }

    // mu_f takes the slack; drop intervals until a final state is reachable
    // from q_star in exactly the slack.
    const std::size_t rest = n - h.mu_i.size();
    const std::size_t give_up = h.ell + 3 * a.state_count() * a.state_count() + lambda;
    std::vector<bool> fin(a.state_count(), false);
    for (State q : a.finals()) fin[q] = true;
    for (std::size_t k = rest / h.ell + 1; k-- > 0;) {
        const std::size_t slack = rest - k * h.ell;
        if (slack > give_up) break;
        for (State q : a.finals())
            if (auto w = path_of_length(a, f.q_star, q, slack)) {
                h.k = k;
                h.mu_f = *w;
                return h;
            }
    }
    throw ValidationError("no word of length " + std::to_string(n) + " fits the hard distribution");
}

LabeledInstance sample_hard_instance(const HardDistParams& h, std::mt19937_64& rng, std::optional<int> label) {
    LabeledInstance inst;
    inst.label = label ? *label : static_cast<int>(std::uniform_int_distribution<int>(0, 1)(rng));
    std::discrete_distribution<std::uint32_t> level(h.p.begin(), h.p.end());
    inst.word.reserve(h.n);
    append(inst.word, h.mu_i);
    for (std::size_t j = 0; j < h.k; ++j) {
        const std::uint32_t kappa = level(rng);
        inst.kappa.push_back(kappa);
        if (kappa == 0) {
            inst.s.push_back(-1);
            append(inst.word, h.eta_star);
            continue;
        }
        const std::size_t r = std::size_t{1} << kappa;
        const std::size_t N = h.copies[kappa];
        if (inst.label == 0) {
            inst.s.push_back(-1);
            append(inst.word, h.family.tau_minus(r).letters, N);
        } else {
            const auto s = std::uniform_int_distribution<std::size_t>(0, r - 1)(rng);
            inst.s.push_back(static_cast<int>(s));
            append(inst.word, h.family.tau_plus(r, s).letters, N);
        }
        inst.special += N;
        append(inst.word, h.pad[kappa]);
    }
    append(inst.word, h.mu_f);
    return inst;
}

double empirical_far_rate(const Nfa& a, const HardDistParams& h, std::size_t trials, std::mt19937_64& rng) {
    if (trials == 0) throw ValidationError("trials must be positive");
    std::size_t far = 0;
    const double bound = h.eps * static_cast<double>(h.n);
    for (std::size_t i = 0; i < trials; ++i) {
        auto inst = sample_hard_instance(h, rng, 0);
        auto d = hamming_distance(a, inst.word);
        if (d.infinite() || static_cast<double>(d.value) >= bound) ++far;
    }
    return static_cast<double>(far) / static_cast<double>(trials);
}

AdversaryStats adversary_eval(const std::vector<std::size_t>& q, const HardDistParams& h, std::size_t trials,
                              std::mt19937_64& rng) {
    if (trials == 0) throw ValidationError("trials must be positive");
    if (q.size() != h.k) throw ValidationError("need one query count per interval");
    std::discrete_distribution<std::uint32_t> level(h.p.begin(), h.p.end());
    std::bernoulli_distribution coin(0.5);
    const double bound = h.eps * static_cast<double>(h.n);
    std::size_t hit_m = 0, errors = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        const bool zero = !coin(rng);
        bool m = true;
        std::size_t planted = 0;
        for (std::size_t j = 0; j < h.k; ++j) {
            const std::uint32_t kappa = level(rng);
            if (kappa == 0) continue;
            planted += h.copies[kappa];
            if (q[j] >= (std::size_t{1} << kappa)) m = false;
        }
        hit_m += m;
        errors += m && zero && static_cast<double>(planted) >= bound;
    }
    AdversaryStats st;
    st.trials = trials;
    st.p_m = static_cast<double>(hit_m) / static_cast<double>(trials);
    st.error_rate = static_cast<double>(errors) / static_cast<double>(trials);
    return st;
}

std::size_t paper_budget(const HardDistParams& h) {
    const double S = static_cast<double>(h.family.S);
    return static_cast<std::size_t>(std::floor(std::log2(S / h.eps) / (72.0 * h.eps)));
}

std::vector<std::size_t> spread_queries(const HardDistParams& h, std::size_t budget) {
    std::vector<std::size_t> q(h.k, 0);
    if (h.k == 0) return q;
    for (std::size_t j = 0; j < h.k; ++j) q[j] = budget / h.k + (j < budget % h.k ? 1 : 0);
    return q;
}

bool has_ordered_occurrences(const Word& w, std::uint32_t offset, const FactorSequence& sigma, std::size_t n,
                             std::uint32_t p) {
    std::size_t pos = 0;
    for (const auto& nu : sigma) {
        std::size_t found = 0;
        for (std::size_t j = pos; found < n && j + nu.size() <= w.size(); ++j) {
            if ((offset + j) % p != nu.offset % p) continue;
            if (!std::equal(nu.letters.begin(), nu.letters.end(), w.begin() + static_cast<std::ptrdiff_t>(j))) continue;
            ++found;
            j += nu.size() - 1;
            pos = j + 1;
        }
        if (found < n) return false;
    }
    return true;
}

namespace {

// A cycle on z (read from residue rz) inside the component of P that holds
// nu at its own residue.
Word cycle_with(Analysis& an, const Portal& P, State z, std::uint32_t rz, const PositionalWord& nu) {
    const Nfa& a = an.automaton();
    const std::uint32_t p = an.modulus();
    const Scope& scope = an.scope(P);
    StateSet comp(a.state_count());
    for (State q : scope.states()) comp.set(q);
    auto run = concrete_run(a, to_global(a, scope, scope.live(nu.offset)), nu.letters, comp);
    if (run.empty()) throw std::logic_error("element expected not to block its host portal");
    auto alpha = k_reachable(a, z, run.front(), mod(static_cast<std::int64_t>(nu.offset) - rz, p), 0);
    std::vector<bool> at_z(a.state_count(), false);
    at_z[z] = true;
    auto beta = shortest_path(a, run.back(), at_z);
    if (!alpha || !beta) throw std::logic_error("host component is not strongly connected");
    Word c = *alpha;
    append(c, nu.letters);
    append(c, *beta);
    return c;
}

Word portal_word(const Nfa& a, const Portal& P, std::uint32_t p) {
    auto u = k_reachable(a, P.s, P.t, mod(static_cast<std::int64_t>(P.y) - P.x, p), 0);
    if (!u) throw std::logic_error("portal language empty");
    return *u;
}

}  // namespace

EmbeddingWords build_embedding_words(Analysis& an, const SccPath& pi, std::size_t i, const FactorSequence& sigma_l,
                                     const FactorSequence& sigma_r, std::size_t N) {
    const Nfa& a = an.automaton();
    const std::uint32_t p = an.modulus();
    const auto& P = pi.portals;
    const int k = static_cast<int>(P.size()) - 1;
    if (i > static_cast<std::size_t>(k)) throw ValidationError("portal index out of range");
    validate_scc_path(a, pi);
    std::span<const Portal> all(P);
    if (left_effect(an, sigma_l, all) >= static_cast<int>(i))
        throw ValidationError("left sequence blocks the chosen portal");
    if (right_effect(an, sigma_r, all) <= static_cast<int>(i))
        throw ValidationError("right sequence blocks the chosen portal");

    // Host portal of each element: the first one it leaves alive.
    std::vector<std::size_t> host_l, host_r(sigma_r.size());
    std::size_t cur = 0;
    for (const auto& nu : sigma_l) {
        cur += static_cast<std::size_t>(left_effect(an, {nu}, all.subspan(cur)) + 1);
        host_l.push_back(cur);
    }
    cur = static_cast<std::size_t>(k);
    for (std::size_t e = sigma_r.size(); e-- > 0;) {
        const int first = right_effect(an, {sigma_r[e]}, all.first(cur + 1));
        cur = static_cast<std::size_t>(first) - 1;
        host_r[e] = cur;
    }

    auto plant = [&](Word& w, const FactorSequence& sigma, const std::vector<std::size_t>& hosts, std::size_t h,
                     State z, std::uint32_t rz) {
        for (std::size_t e = 0; e < sigma.size(); ++e)
            if (hosts[e] == h) append(w, cycle_with(an, P[h], z, rz, sigma[e]), std::size_t{p} * N);
    };

    EmbeddingWords out;
    for (std::size_t h = 0; h <= i; ++h) {
        plant(out.left, sigma_l, host_l, h, P[h].s, P[h].x);
        if (h < i) {
            append(out.left, portal_word(a, P[h], p));
            out.left.push_back(pi.letters[h]);
        }
    }
    plant(out.right, sigma_r, host_r, i, P[i].t, P[i].y);
    for (std::size_t h = i + 1; h <= static_cast<std::size_t>(k); ++h) {
        out.right.push_back(pi.letters[h - 1]);
        plant(out.right, sigma_r, host_r, h, P[h].s, P[h].x);
        append(out.right, portal_word(a, P[h], p));
    }

    if (!run_set(a, singleton(a, a.initial()), out.left).test(P[i].s) || out.left.size() % p != P[i].x % p ||
        !run_set(a, singleton(a, P[i].t), out.right).test(P.back().t) ||
        !has_ordered_occurrences(out.left, 0, sigma_l, N, p) ||
        !has_ordered_occurrences(out.right, (P[i].y) % p, sigma_r, N, p))
        throw std::logic_error("embedding words failed their own check");
    return out;
}

}  // namespace rpt
