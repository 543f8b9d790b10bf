#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "hodp/engine.hpp"
#include "support.hpp"

using namespace hodp;
using testing_support::load;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool has_line(const std::string& text, const std::string& line)
{
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l))
        if (l.find(line) != std::string::npos) return true;
    return false;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::vector<std::string> corpus_files()
{
    std::vector<std::string> out;
    for (auto& e : std::filesystem::directory_iterator(HODP_CORPUS_DIR))
        if (e.path().extension() == ".afs") out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
    {
        path = std::filesystem::temp_directory_path() / ("hodp_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    void write(const std::string& name, const std::string& text) const { std::ofstream(path / name) << text; }
};

}  // namespace

TEST_CASE("YES for twice, map, eval and mapappend")
{
    for (const char* f : {"twice.afs", "map.afs", "eval.afs", "mapappend.afs"}) {
        CAPTURE(f);
        auto t0 = std::chrono::steady_clock::now();
        Proof p = prove(load(f));
        CHECK(seconds_since(t0) < 60);
        CHECK(p.verdict == Proof::Verdict::Yes);
        CHECK(check_proof(load(f), print_proof(p)).valid);
    }
}

TEST_CASE("MAYBE for the non-terminating system")
{
    AFS a = load("fga.afs");
    Proof p = prove(a);
    CHECK(p.verdict == Proof::Verdict::Maybe);
    CHECK_FALSE(p.blocking.empty());
    CHECK(p.steps.back().kind == ProofStep::Kind::GiveUp);
    auto r = bounded_reductions(parse_term("f(o)", a), a.rules, 4);
    CHECK(r.loop);
}

TEST_CASE("proof text")
{
    std::string eval = print_proof(prove(load("eval.afs")));
    CHECK(first_line(eval) == "YES");
    CHECK(has_line(eval, "SUBTERM CRITERION nu(dom#) = 2"));
    CHECK(has_line(eval, "PRUNE 4"));

    std::string twice = print_proof(prove(load("twice.afs")), 1);
    CHECK(has_line(twice, "formative rules: 2 (B), 4 (D)"));
    CHECK(has_line(twice, "  constraints:"));
    CHECK(has_line(twice, "untag I-"));
    CHECK_FALSE(has_line(print_proof(prove(load("twice.afs")), 0), "  constraints:"));

    Proof empty = prove(parse_afs("SIG\n  o : nat\nRULES\n"));
    CHECK(empty.verdict == Proof::Verdict::Yes);
    REQUIRE(empty.steps.size() == 1);
    CHECK(empty.steps[0].kind == ProofStep::Kind::Preparation);
}

TEST_CASE("proofs are deterministic and re-check")
{
    for (auto& f : corpus_files()) {
        CAPTURE(f);
        AFS a = load(f);
        std::string p1 = print_proof(prove(a), 1), p2 = print_proof(prove(a), 1);
        CHECK(p1 == p2);
        ProofCheck c = check_proof(a, p1);
        CHECK_MESSAGE(c.valid, c.reason);
    }
}

TEST_CASE("check rejects tampered proofs")
{
    AFS a = load("eval.afs");
    std::string p = print_proof(prove(a));
    auto replace = [&](const std::string& from, const std::string& to) {
        std::string q = p;
        auto pos = q.find(from);
        REQUIRE(pos != std::string::npos);
        q.replace(pos, from.size(), to);
        return q;
    };
    CHECK_FALSE(check_proof(a, replace("YES", "NO")).valid);
    CHECK_FALSE(check_proof(a, replace("    nu(dom#) = 2\n", "    nu(dom#) = 1\n")).valid);
    CHECK_FALSE(check_proof(a, replace("removed: 3", "removed: 1 3")).valid);
    CHECK_FALSE(check_proof(a, p.substr(0, p.rfind("SCC"))).valid);  // YES without the last step
    CHECK_FALSE(check_proof(load("twice.afs"), p).valid);              // proof of another system
    std::string maybe = "MAYBE\n";
    CHECK(check_proof(a, maybe).valid);  // claims nothing
}

TEST_CASE("engine toggles and budgets")
{
    AFS a = load("eval.afs");
    Config only_subterm;
    only_subterm.use_poly = only_subterm.use_rpo = false;
    Proof p = prove(a, only_subterm);
    CHECK(p.verdict == Proof::Verdict::Maybe);
    CHECK(p.steps.back().tried == std::vector<std::string>{"subterm"});

    Config rpo_only;
    rpo_only.use_poly = false;
    Proof q = prove(a, rpo_only);
    CHECK(q.verdict == Proof::Verdict::Yes);
    CHECK(has_line(print_proof(q), "ARGFUN+RPO"));

    Config tiny;
    tiny.timeout = 1e-9;
    tiny.per_scc = 1e-9;
    Proof r = prove(load("twice.afs"), tiny);
    CHECK(r.verdict == Proof::Verdict::Maybe);
    CHECK(r.steps.back().timeout);
    CHECK(first_line(print_proof(r)) == "MAYBE");
}

TEST_CASE("monotone progress: every step removes pairs")
{
    for (auto& f : corpus_files()) {
        Proof p = prove(load(f));
        int removed = 0;
        for (auto& st : p.steps) {
            if (st.kind == ProofStep::Kind::Subterm || st.kind == ProofStep::Kind::ReductionPair ||
                st.kind == ProofStep::Kind::Prune)
                CHECK_FALSE(st.removed.empty());
            removed += static_cast<int>(st.removed.size());
        }
        if (p.verdict == Proof::Verdict::Yes) CHECK(removed == static_cast<int>(p.dps.pairs.size()));
    }
}

TEST_CASE("completion rules are simulated by the original rules")
{
    std::vector<AFS> systems;
    for (auto& f : corpus_files()) systems.push_back(load(f));
    systems.push_back(parse_afs(R"(
SIG
  o : nat
  s : [nat] -> nat
  K : [nat] -> nat -> nat -> nat
  C : [nat -> nat * nat -> nat] -> nat -> nat
VARS
  x : nat
  y : nat
  z : nat
  F : nat -> nat
  G : nat -> nat
RULES
  K(x) => \y. \z. s(x)
  C(F, G) => \x. F @ (G @ x)
)"));
    std::mt19937 rng(11);
    int checked = 0;
    for (auto& a : systems) {
        AFS c = complete(a);
        testing_support::TermGenerator gen{a, rng};
        for (auto& r : c.rules) {
            if (r.origin != RuleOrigin::Completion) continue;
            int n = static_cast<int>(app_args(r.lhs).size());
            for (int k = 0; k < 10; ++k) {
                Subst g;
                for (auto& v : free_vars(r.lhs)) g[v->name] = gen.gen(v->type, 3);
                Term l = apply_subst(r.lhs, g), rhs = apply_subst(r.rhs, g);
                auto red = bounded_reductions(l, a.rules, n + 2);
                bool found = false;
                for (auto& t : red.terms) found = found || alpha_equal(t, rhs);
                CHECK_MESSAGE(found, to_string(l) << " does not reach " << to_string(rhs));
                ++checked;
            }
        }
    }
    CHECK(checked >= 30);
}

TEST_CASE("no loops from random start terms of YES systems")
{
    std::mt19937 rng(5);
    for (auto& f : corpus_files()) {
        AFS a = load(f);
        if (prove(a).verdict != Proof::Verdict::Yes) continue;
        CAPTURE(f);
        testing_support::TermGenerator gen{a, rng};
        std::set<Type> types;
        for (auto& s : a.signature) {
            types.insert(result_base(s->output));
            for (Type t : s->inputs) types.insert(result_base(t));
        }
        std::vector<Type> ts(types.begin(), types.end());
        for (int k = 0; k < 50; ++k) {
            Term t = gen.gen(ts[k % ts.size()], 10);
            auto r = bounded_reductions(t, a.rules, 200);
            CHECK_MESSAGE(!r.loop, "loop from " << to_string(t));
        }
    }
}

TEST_CASE("nonterminating corpus entries have loops")
{
    struct Case {
        const char* file;
        const char* start;
        int steps;
    };
    for (auto c : {Case{"fga.afs", "f(o)", 4}, Case{"loop.afs", "h(s(o))", 2},
                   Case{"omega.afs", "app(lam(\\x. app(x, x)), lam(\\x. app(x, x)))", 2}}) {
        CAPTURE(c.file);
        AFS a = load(c.file);
        REQUIRE(a.expect);
        CHECK(*a.expect == "MAYBE");
        auto r = bounded_reductions(parse_term(c.start, a), a.rules, c.steps);
        CHECK(r.loop);
    }
}

TEST_CASE("run_corpus")
{
    auto t0 = std::chrono::steady_clock::now();
    CorpusSummary s = run_corpus(HODP_CORPUS_DIR);
    CHECK(seconds_since(t0) < 300);
    CHECK(s.entries.size() == 12);
    CHECK(s.ok());
    for (auto& e : s.entries) {
        CAPTURE(e.file);
        CHECK(e.expect.has_value());
        CHECK(e.verdict == *e.expect);
    }

    TempDir empty("empty");
    CorpusSummary none = run_corpus(empty.path.string());
    CHECK(none.entries.empty());
    CHECK(none.ok());

    TempDir mixed("mixed");
    mixed.write("bad.afs", "SIG\n  o : nat\nVARS\n  x : nat\nRULES\n  x => o\n");
    mixed.write("good.afs", "# expect: YES\nSIG\n  o : nat\n  f : [nat] -> nat\nVARS\n  x : nat\nRULES\n  f(x) => o\n");
    mixed.write("wrong.afs", "# expect: YES\n" + std::string(
                                                    "SIG\n  o : nat\n  f : [nat] -> nat\nVARS\n  x : nat\nRULES\n"
                                                    "  f(x) => f(x)\n"));
    CorpusSummary m = run_corpus(mixed.path.string());
    REQUIRE(m.entries.size() == 3);
    CHECK(m.entries[0].verdict == "ERROR");
    CHECK(m.entries[0].ok);
    CHECK(m.entries[1].verdict == "YES");
    CHECK(m.entries[1].ok);
    CHECK(m.entries[2].verdict == "MAYBE");
    CHECK_FALSE(m.entries[2].ok);
    CHECK_FALSE(m.ok());
    CHECK(print_summary(m).find("FAIL") != std::string::npos);
}
