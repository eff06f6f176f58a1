// rpt: classify regular languages by testing complexity, run the testers,
// and generate hard instances.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rpt/classify.hpp"
#include "rpt/distance.hpp"
#include "rpt/kernels.hpp"
#include "rpt/language.hpp"
#include "rpt/lowerbound.hpp"
#include "rpt/structure.hpp"
#include "rpt/tester.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;
using namespace rpt;

namespace {

constexpr int kOk = 0, kReject = 1, kUsage = 2, kCap = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string digest(const std::string& text) {
    // FNV-1a, enough to tell inputs apart in a report.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) h = (h ^ c) * 1099511628211ull;
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::vector<Word> read_words(const Nfa& a, const std::string& path) {
    std::string text = path == "-" ? std::string(std::istreambuf_iterator<char>(std::cin), {}) : read_file(path);
    std::vector<Word> words;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        words.push_back(a.word(line));
    }
    return words;
}

std::mt19937_64 substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> s{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    for (auto t : tags) {
        s.push_back(static_cast<std::uint32_t>(t));
        s.push_back(static_cast<std::uint32_t>(t >> 32));
    }
    std::seed_seq seq(s.begin(), s.end());
    return std::mt19937_64(seq);
}

void print_text(const json& j, int indent = 0) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (const auto& [key, value] : j.items()) {
        if (value.is_object()) {
            std::cout << pad << key << ":\n";
            print_text(value, indent + 2);
        } else if (value.is_array() && !value.empty() && value.front().is_object()) {
            std::cout << pad << key << ":\n";
            for (const auto& row : value) {
                std::cout << pad << "  -";
                for (const auto& [k, v] : row.items()) std::cout << ' ' << k << '=' << (v.is_string() ? v.get<std::string>() : v.dump());
                std::cout << '\n';
            }
        } else {
            std::cout << pad << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
        }
    }
}

struct Output {
    std::string format = "text";
    void emit(const json& j) const {
        if (format == "json")
            std::cout << j.dump(2) << '\n';
        else
            print_text(j);
    }
};

json report(const std::string& command, const std::string& input_text) {
    json r;
    r["command"] = command;
    r["inputs_digest"] = digest(input_text);
    r["kernel"] = kernels::best_kernel().name;
    return r;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

json portal_json(const Portal& P) { return json::array({P.s, P.x, P.t, P.y}); }

json path_json(const Nfa& a, const SccPath& pi) {
    json ps = json::array();
    for (const auto& P : pi.portals) ps.push_back(portal_json(P));
    return {{"portals", ps}, {"letters", a.spell(pi.letters)}};
}

json sequence_json(const Nfa& a, const FactorSequence& s) {
    json out = json::array();
    for (const auto& w : s) out.push_back(format_positional(a, w));
    return out;
}

// ---- classify ----

int cmd_classify(const std::string& path, const Output& out, const Limits& limits) {
    auto text = read_file(path);
    Nfa a = parse_nfa(text);
    json r = report("classify", text);
    auto t0 = std::chrono::steady_clock::now();
    try {
        Analysis an(trim(a), limits);
        auto c = classify(an);
        r["class"] = to_string(c.tag);
        json w;
        if (c.trivial) {
            w["finite_language"] = c.trivial->finite_language;
            if (c.trivial->path) {
                w["path"] = path_json(an.automaton(), *c.trivial->path);
                w["portal_without_blocking_factor"] = c.trivial->portal;
            }
        } else if (c.hard) {
            w["path"] = path_json(an.automaton(), c.hard->path);
            w["portal"] = c.hard->portal;
            json ms = json::array();
            for (const auto& m : c.hard->matches)
                ms.push_back({{"path", m.path_index},
                              {"j_left", m.j_left},
                              {"j_right", m.j_right},
                              {"left", sequence_json(an.automaton(), m.left.sequence())},
                              {"right", sequence_json(an.automaton(), m.right.sequence())}});
            w["matches"] = ms;
        } else {
            w["blocking_sequence"] = sequence_json(an.automaton(), c.blocking);
        }
        r["witness"] = w;
        r["caps_hit"] = json::array();
        r["time_ms"] = ms_since(t0);
        if (out.format == "text") {
            std::cout << r["class"].get<std::string>() << '\n';
            print_text(w, 2);
        } else {
            out.emit(r);
        }
        return kOk;
    } catch (const ResourceError& e) {
        r["class"] = nullptr;
        r["witness"] = nullptr;
        r["caps_hit"] = json::array({e.cap()});
        r["error"] = e.what();
        out.emit(r);
        return kCap;
    }
}

// ---- test ----

struct TestOptions {
    double eps = 0.1;
    std::uint64_t seed = 0;
    std::size_t trials = 1;
    std::string tester = "auto";
    std::uint64_t bound = 0;
};

int cmd_test(const std::string& aut, const std::string& wordfile, const TestOptions& o, const Output& out,
             const Limits& limits) {
    if (!(o.eps > 0 && o.eps < 1)) throw UsageError("--epsilon must lie in (0, 1)");
    auto text = read_file(aut);
    Nfa a = trim(parse_nfa(text));
    auto words = read_words(a, wordfile);
    json r = report("test", text);
    r["seed"] = o.seed;
    r["epsilon"] = o.eps;

    std::string kind = o.tester;
    if (kind == "auto") {
        auto d = scc_decompose(a);
        kind = d.size() == 1 && !d.trivial[0] ? "scc" : "general";
    }
    if (kind == "easy" && o.bound == 0) throw UsageError("--tester easy needs --bound");
    r["tester"] = kind;
    std::optional<SccTester> scc;
    std::optional<Analysis> an;
    if (kind == "scc")
        scc.emplace(a, limits);
    else
        an.emplace(a, limits);

    auto t0 = std::chrono::steady_clock::now();
    json rows = json::array();
    std::size_t rejects = 0;
    std::uint64_t total_queries = 0, max_queries = 0;
    for (std::size_t wi = 0; wi < words.size(); ++wi)
        for (std::size_t t = 0; t < o.trials; ++t) {
            auto rng = substream(o.seed, {wi, t});
            WordAccess w(words[wi]);
            Verdict v = kind == "scc"       ? scc->run(w, o.eps, rng)
                        : kind == "general" ? test_general(*an, w, o.eps, rng)
                                            : test_easy(*an, w, o.eps, rng, o.bound);
            rejects += !v.accept;
            total_queries += v.queries_used;
            max_queries = std::max(max_queries, v.queries_used);
            rows.push_back({{"word", wi},
                            {"trial", t},
                            {"accept", v.accept},
                            {"queries", v.queries_used},
                            {"planned", v.planned},
                            {"read_all", v.read_all}});
        }
    const auto runs = words.size() * o.trials;
    r["trials"] = rows;
    r["aggregate"] = {{"runs", runs},
                      {"reject_rate", runs ? static_cast<double>(rejects) / static_cast<double>(runs) : 0.0},
                      {"mean_queries", runs ? static_cast<double>(total_queries) / static_cast<double>(runs) : 0.0},
                      {"max_queries", max_queries}};
    r["caps_hit"] = json::array();
    r["time_ms"] = ms_since(t0);
    out.emit(r);
    if (runs == 1) return rejects ? kReject : kOk;
    return kOk;
}

// ---- distance ----

int cmd_distance(const std::string& aut, const std::string& wordfile, const Output& out) {
    auto text = read_file(aut);
    Nfa a = parse_nfa(text);
    auto words = read_words(a, wordfile);
    if (out.format == "text") {
        for (const auto& w : words) {
            auto d = hamming_distance(a, w);
            std::cout << (d.infinite() ? std::string("inf") : std::to_string(d.value)) << '\n';
        }
        return kOk;
    }
    json r = report("distance", text);
    json rows = json::array();
    for (std::size_t i = 0; i < words.size(); ++i) {
        auto d = hamming_distance(a, words[i]);
        rows.push_back({{"word", i}, {"length", words[i].size()}, {"distance", d.infinite() ? json("inf") : json(d.value)}});
    }
    r["results"] = rows;
    out.emit(r);
    return kOk;
}

// ---- mbf ----

int cmd_mbf(const std::string& aut, std::size_t max_len, bool cls, const std::string& portal, const Output& out,
            const Limits& limits) {
    auto text = read_file(aut);
    Nfa a = trim(parse_nfa(text));
    json r = report("mbf", text);
    Analysis an(a, limits);
    std::vector<Portal> portals;
    if (!portal.empty()) {
        Portal P{};
        char c1, c2, c3;
        std::istringstream in(portal);
        if (!(in >> P.s >> c1 >> P.x >> c2 >> P.t >> c3 >> P.y) || c1 != ',' || c2 != ',' || c3 != ',')
            throw UsageError("--portal expects s,x,t,y");
        portals.push_back(P);
    } else {
        for (const auto& pi : an.accepting_paths()) portals.insert(portals.end(), pi.portals.begin(), pi.portals.end());
        std::sort(portals.begin(), portals.end());
        portals.erase(std::unique(portals.begin(), portals.end()), portals.end());
    }
    json rows = json::array();
    for (const auto& P : portals) {
        json row{{"portal", portal_json(P)}};
        const Scope& scope = an.scope(P);
        if (cls) row["class"] = to_string(an.mbf(P).tag);
        if (max_len > 0 || !cls) {
            json ws = json::array();
            for (const auto& w : enumerate_mbf(scope, a.alphabet(), max_len ? max_len : 4, limits))
                ws.push_back(format_positional(a, w));
            row["words"] = ws;
        }
        rows.push_back(row);
    }
    r["portals"] = rows;
    if (out.format == "text") {
        for (const auto& row : rows) {
            std::cout << "portal " << row["portal"].dump();
            if (row.contains("class")) std::cout << ' ' << row["class"].get<std::string>();
            std::cout << '\n';
            if (row.contains("words"))
                for (const auto& w : row["words"]) std::cout << "  " << w.get<std::string>() << '\n';
        }
        return kOk;
    }
    out.emit(r);
    return kOk;
}

// ---- paths ----

int cmd_paths(const std::string& aut, bool structure, const std::string& check, const Output& out,
              const Limits& limits) {
    auto text = read_file(aut);
    Nfa a = trim(parse_nfa(text));
    json r = report("paths", text);
    Analysis an(a, limits);
    if (structure) {
        const auto& d = an.components();
        json comps = json::array();
        for (std::size_t i = 0; i < d.size(); ++i) {
            json c{{"states", d.components[i]}, {"trivial", static_cast<bool>(d.trivial[i])}};
            if (!d.trivial[i]) {
                c["period"] = scc_period(a, d.components[i]);
                c["rho"] = reachability_constant(a, d.components[i]);
            }
            comps.push_back(c);
        }
        r["components"] = comps;
        r["modulus"] = an.modulus();
    }
    std::optional<FactorSequence> seq;
    if (!check.empty()) {
        seq.emplace();
        std::istringstream in(check);
        for (std::string item; std::getline(in, item, ',');) seq->push_back(parse_positional(a, item, an.modulus()));
    }
    json rows = json::array();
    const auto& paths = an.accepting_paths();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        json row{{"index", i}};
        row.update(path_json(a, paths[i]));
        if (seq) {
            auto e = effects(an, *seq, paths[i]);
            row["left_effect"] = e.left;
            row["right_effect"] = e.right;
            row["blocking"] = is_blocking_for_path(an, *seq, paths[i]);
        }
        rows.push_back(row);
    }
    r["paths"] = rows;
    if (seq) r["blocking_sequence"] = is_blocking_sequence(an, *seq);
    out.emit(r);
    return kOk;
}

// ---- hard-gen ----

int cmd_hard_gen(const std::string& aut, double eps, std::size_t n, std::uint64_t seed, std::size_t count,
                 const std::string& prefix, const Output& out, const Limits& limits) {
    auto text = read_file(aut);
    Nfa a = trim(parse_nfa(text));
    auto family = extract_pump_family(a, 6, limits);
    if (eps <= 0) eps = max_epsilon(family) / 2;
    auto params = make_hard_params(a, family, eps, n);
    std::ofstream words(prefix + ".words"), labels(prefix + ".labels");
    if (!words || !labels) throw UsageError("cannot write " + prefix + ".*");
    std::size_t ones = 0;
    for (std::size_t i = 0; i < count; ++i) {
        auto rng = substream(seed, {i});
        auto inst = sample_hard_instance(params, rng);
        ones += inst.label;
        words << a.spell(inst.word) << '\n';
        labels << json{{"index", i}, {"label", inst.label}, {"kappa", inst.kappa}, {"s", inst.s}, {"special", inst.special}}.dump()
               << '\n';
    }
    json r = report("hard-gen", text);
    r["seed"] = seed;
    r["family"] = {{"phi", format_positional(a, family.phi)},
                   {"nu_minus", format_positional(a, family.nu_minus)},
                   {"nu_plus", format_positional(a, family.nu_plus)},
                   {"chi", format_positional(a, family.chi)},
                   {"q_star", family.q_star},
                   {"i_star", family.i_star},
                   {"S", family.S}};
    r["params"] = {{"epsilon", eps},  {"epsilon_max", max_epsilon(family)}, {"n", n}, {"ell", params.ell},
                   {"intervals", params.k}, {"levels", params.T}, {"p", params.p}};
    r["output"] = {{"words", prefix + ".words"}, {"labels", prefix + ".labels"}, {"count", count}, {"label_one", ones}};
    out.emit(r);
    return kOk;
}

// ---- bench ----

Nfa load_fixture(const std::string& dir, const std::string& name) {
    auto path = (fs::path(dir) / (name + ".aut")).string();
    if (!fs::exists(path)) throw UsageError("missing fixture " + path);
    return trim(load_nfa(path));
}

const std::vector<std::string> kFixtures{"fig1", "fig2", "fig3", "astar", "ab", "aa_bb", "parity", "universal",
                                         "repeated_parity"};

json bench_completeness(const std::string& dir, std::uint64_t seed) {
    json rows = json::array();
    for (const auto& name : kFixtures) {
        Nfa a = load_fixture(dir, name);
        Analysis an(a);
        std::size_t members = 0, rejects = 0;
        std::vector<Word> layer{{}};
        for (std::size_t len = 0; len <= 8; ++len) {
            for (const auto& w : layer) {
                if (!accepts(a, w)) continue;
                ++members;
                auto rng = substream(seed, {len, members});
                WordAccess acc(w);
                rejects += !test_general(an, acc, 0.1, rng).accept;
            }
            std::vector<Word> next;
            for (const auto& w : layer)
                for (Symbol x = 0; x < a.alphabet_size(); ++x) {
                    next.push_back(w);
                    next.back().push_back(x);
                }
            layer = std::move(next);
        }
        rows.push_back({{"fixture", name}, {"members", members}, {"rejections", rejects}});
    }
    return rows;
}

json bench_budget(const std::string& dir) {
    Nfa a = load_fixture(dir, "repeated_parity");
    SccTester scc(a);
    Analysis an(a);
    PathTester easy(an, 4);
    json rows = json::array();
    const std::size_t n = 1'000'000;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        auto ps = scc.plan(n, eps);
        auto pe = easy.plan(0, n, eps);
        rows.push_back({{"fixture", "repeated_parity"},
                        {"epsilon", eps},
                        {"n", n},
                        {"scc_budget", ps.budget()},
                        {"scc_per_inv_eps_log", static_cast<double>(ps.budget()) * eps / std::log(1 / eps)},
                        {"easy_budget", pe.budget() * easy.repetitions(0)},
                        {"easy_per_inv_eps", static_cast<double>(pe.budget() * easy.repetitions(0)) * eps}});
    }
    return rows;
}

json bench_lowerbound(const std::string& dir, std::uint64_t seed) {
    Nfa a = load_fixture(dir, "repeated_parity");
    auto family = extract_pump_family(a);
    const double eps = 1.0 / (static_cast<double>(family.S) * 64.0);
    json grid = json::array();
    for (std::size_t n : {2000u, 10000u, 50000u}) {
        auto params = make_hard_params(a, family, eps, n);
        auto rng = substream(seed, {n});
        grid.push_back({{"n", n}, {"epsilon", eps}, {"far_rate", empirical_far_rate(a, params, 100, rng)}});
    }
    auto params = make_hard_params(a, family, eps, 50000);
    json adv = json::array();
    const auto budget = paper_budget(params);
    for (std::size_t q : {std::size_t{0}, budget, 4 * budget, params.ell * params.k}) {
        auto rng = substream(seed, {q, 1});
        auto st = adversary_eval(spread_queries(params, q), params, 2000, rng);
        adv.push_back({{"budget", q}, {"p_m", st.p_m}, {"error_rate", st.error_rate}});
    }
    return {{"S", family.S}, {"far_rate", grid}, {"adversary", adv}};
}

int cmd_bench(const std::string& only, const std::string& dir, std::uint64_t seed, const Output& out) {
    static const std::vector<std::string> parts{"completeness", "budget", "lowerbound"};
    if (!only.empty() && std::find(parts.begin(), parts.end(), only) == parts.end())
        throw UsageError("--only takes completeness, budget or lowerbound");
    json r = report("bench", dir);
    r["seed"] = seed;
    auto t0 = std::chrono::steady_clock::now();
    if (only.empty() || only == "completeness") r["completeness"] = bench_completeness(dir, seed);
    if (only.empty() || only == "budget") r["budget"] = bench_budget(dir);
    if (only.empty() || only == "lowerbound") r["lowerbound"] = bench_lowerbound(dir, seed);
    r["time_ms"] = ms_since(t0);
    out.emit(r);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Property testing toolkit for regular languages"};
    app.require_subcommand(1);
    app.fallthrough();
    Output out;
    app.add_option("--format", out.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    std::string aut, wordfile;
    auto* classify_cmd = app.add_subcommand("classify", "Trivial, easy or hard to test");
    classify_cmd->add_option("automaton", aut)->required();

    TestOptions topt;
    auto* test_cmd = app.add_subcommand("test", "Run a property tester on each word of a file");
    test_cmd->add_option("automaton", aut)->required();
    test_cmd->add_option("wordfile", wordfile, "One word per line, '-' for stdin")->required();
    test_cmd->add_option("--epsilon", topt.eps)->required();
    test_cmd->add_option("--seed", topt.seed)->required();
    test_cmd->add_option("--trials", topt.trials)->check(CLI::PositiveNumber);
    test_cmd->add_option("--tester", topt.tester)->check(CLI::IsMember({"auto", "scc", "general", "easy"}));
    test_cmd->add_option("--bound", topt.bound, "Factor length bound for the easy tester");

    auto* dist_cmd = app.add_subcommand("distance", "Exact Hamming distance of each word to the language");
    dist_cmd->add_option("automaton", aut)->required();
    dist_cmd->add_option("wordfile", wordfile)->required();

    std::size_t max_len = 0;
    bool mbf_class = false;
    std::string portal;
    auto* mbf_cmd = app.add_subcommand("mbf", "Minimal blocking factors per portal");
    mbf_cmd->add_option("automaton", aut)->required();
    mbf_cmd->add_option("--max-len", max_len);
    mbf_cmd->add_flag("--class", mbf_class);
    mbf_cmd->add_option("--portal", portal, "s,x,t,y");

    bool structure = false;
    std::string check;
    auto* paths_cmd = app.add_subcommand("paths", "Accepting SCC-paths");
    paths_cmd->add_option("automaton", aut)->required();
    paths_cmd->add_flag("--structure", structure);
    paths_cmd->add_option("--check-seq", check, "Comma-separated positional words, e.g. 0:aa,0:b");

    double eps = 0;
    std::size_t n = 0, count = 1;
    std::uint64_t seed = 0;
    std::string prefix = "hard";
    auto* hard_cmd = app.add_subcommand("hard-gen", "Sample labeled instances of the hard distribution");
    hard_cmd->add_option("automaton", aut)->required();
    hard_cmd->add_option("--epsilon", eps, "Default: half the largest admissible value");
    hard_cmd->add_option("--n", n)->required();
    hard_cmd->add_option("--seed", seed)->required();
    hard_cmd->add_option("--count", count);
    hard_cmd->add_option("--out", prefix, "Writes PREFIX.words and PREFIX.labels");

    std::string only;
    std::string fixture_dir = RPT_FIXTURE_DIR;
    bool lowerbound = false;
    auto* bench_cmd = app.add_subcommand("bench", "Experiment tables over the bundled fixtures");
    bench_cmd->add_option("--only", only);
    bench_cmd->add_flag("--lowerbound", lowerbound, "Same as --only lowerbound");
    bench_cmd->add_option("--fixtures", fixture_dir);
    bench_cmd->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    const Limits limits = Limits::from_env();
    try {
        if (*classify_cmd) return cmd_classify(aut, out, limits);
        if (*test_cmd) return cmd_test(aut, wordfile, topt, out, limits);
        if (*dist_cmd) return cmd_distance(aut, wordfile, out);
        if (*mbf_cmd) return cmd_mbf(aut, max_len, mbf_class, portal, out, limits);
        if (*paths_cmd) return cmd_paths(aut, structure, check, out, limits);
        if (*hard_cmd) return cmd_hard_gen(aut, eps, n, seed, count, prefix, out, limits);
        if (*bench_cmd) return cmd_bench(lowerbound ? "lowerbound" : only, fixture_dir, seed, out);
    } catch (const ResourceError& e) {
        std::cerr << "rpt: resource cap '" << e.cap() << "' exceeded: " << e.what() << '\n';
        return kCap;
    } catch (const ParseError& e) {
        std::cerr << "rpt: parse error: " << e.what() << '\n';
        return kUsage;
    } catch (const ValidationError& e) {
        std::cerr << "rpt: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "rpt: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
