#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <random>
#include <regex>

#include "hodp/certificate.hpp"
#include "hodp/engine.hpp"
#include "hodp/graph.hpp"
#include "hodp/poly.hpp"
#include "hodp/rpo.hpp"
#include "hodp/subterm.hpp"
#include "support.hpp"

using namespace hodp;
using testing_support::prepared;

namespace {

struct Problem {
    AFS afs;
    DPGraph graph;
    std::vector<DependencyPair> scc;
    ConstraintSet cs;
};

Problem problem(const std::string& file, bool allow_static, int which, const std::vector<int>& drop = {})
{
    Problem p;
    p.afs = prepared(file);
    DPGraph g = approximate_graph(dependency_pairs(p.afs, allow_static), p.afs);
    std::vector<int> pos;
    for (int i : drop) pos.push_back(i - 1);
    g = prune(remove_nodes(prune(g), pos));
    p.graph = g;
    auto comps = sccs(g);
    REQUIRE(which < static_cast<int>(comps.size()));
    for (int v : comps[which]) p.scc.push_back(g.nodes[v]);
    p.cs = build_constraints(p.scc, p.afs);
    return p;
}

Certificate poly_cert(const AFS& a, const std::vector<std::pair<std::string, std::string>>& js, std::vector<int> strict)
{
    std::vector<std::string> lines;
    for (auto& [f, v] : js) lines.push_back("J(" + f + ") = " + v);
    std::string s = "strict:";
    for (int i : strict) s += " " + std::to_string(i);
    lines.push_back(s);
    return parse_certificate(Certificate::Kind::Poly, lines, a);
}

std::vector<int> pair_indices(const ConstraintSet& cs)
{
    std::vector<int> out;
    for (auto& c : cs.strict) out.push_back(c.pair);
    return out;
}

}  // namespace

TEST_CASE("goodmap interpretation")
{
    Problem p = problem("map.afs", false, 0);
    auto all = pair_indices(p.cs);
    REQUIRE(all.size() == 2);
    Certificate c = poly_cert(p.afs,
                              {{"map#", "\\F x. F(x) + x"}, {"map", "\\F x. x * F(x) + x"}, {"cons", "\\x y. x + y + 1"}},
                              all);
    Verdict v = check_certificate(p.scc, p.cs, c, p.afs);
    CHECK_MESSAGE(v.valid, v.reason);
    CHECK(v.strict == all);
    CHECK(sample_constraints(p.cs, c.J, all, 200, 1));
}

TEST_CASE("twicemono, both stages")
{
    Problem p1 = problem("twice.afs", true, 0);
    Certificate c1 = poly_cert(p1.afs,
                               {{"I", "\\n. n"},
                                {"I#", "\\n. n"},
                                {"I-", "\\n. n"},
                                {"o", "0"},
                                {"s", "\\n. n + 1"},
                                {"twice", "\\f n. f(f(n))"},
                                {"twice#", "\\f n. f(f(n))"}},
                               {1, 2});
    Verdict v1 = check_certificate(p1.scc, p1.cs, c1, p1.afs);
    CHECK_MESSAGE(v1.valid, v1.reason);

    // Pairs 1 and 2 (the I# pairs) are gone; the rest is one SCC.
    Problem p2 = problem("twice.afs", true, 0, {1, 2});
    CHECK(pair_indices(p2.cs) == std::vector<int>{4, 5, 6, 7});
    CHECK(p2.cs.weak.empty());
    Certificate c2 = poly_cert(
        p2.afs, {{"twice", "\\f n. max(f(f(n)), n) + 1"}, {"twice#", "\\f n. max(f(f(n)), n) + 1"}}, {4, 5, 6, 7});
    Verdict v2 = check_certificate(p2.scc, p2.cs, c2, p2.afs);
    CHECK_MESSAGE(v2.valid, v2.reason);
    CHECK(sample_constraints(p2.cs, c2.J, {4, 5, 6, 7}, 200, 2));
}

TEST_CASE("eval argument filtering and precedence")
{
    Problem p = problem("eval.afs", true, 2);
    CHECK(pair_indices(p.cs) == std::vector<int>{3});
    Certificate c = parse_certificate(Certificate::Kind::Rpo,
                                      {"pi(dom) = keep(1,2)", "prec fun > dom'", "prec dom' > s", "prec dom' > o",
                                       "strict: 3"},
                                      p.afs);
    Verdict v = check_certificate(p.scc, p.cs, c, p.afs);
    CHECK_MESSAGE(v.valid, v.reason);

    // Without the filtering dom(x, y, o) >= x still holds, but the pair needs
    // fun above dom.
    Certificate bad = parse_certificate(Certificate::Kind::Rpo, {"prec dom > fun", "strict: 3"}, p.afs);
    CHECK_FALSE(check_certificate(p.scc, p.cs, bad, p.afs).valid);
    Certificate cyclic = parse_certificate(Certificate::Kind::Rpo,
                                           {"pi(dom) = keep(1,2)", "prec fun > dom'", "prec dom' > fun", "strict: 3"},
                                           p.afs);
    CHECK_FALSE(check_certificate(p.scc, p.cs, cyclic, p.afs).valid);
}

TEST_CASE("projection certificates")
{
    Problem p = problem("eval.afs", true, 1);
    Certificate good = parse_certificate(Certificate::Kind::Projection, {"nu(dom#) = 2", "strict: 2"}, p.afs);
    CHECK(check_certificate(p.scc, p.cs, good, p.afs).valid);
    Certificate first = parse_certificate(Certificate::Kind::Projection, {"nu(dom#) = 1", "strict: 2"}, p.afs);
    CHECK_FALSE(check_certificate(p.scc, p.cs, first, p.afs).valid);
    Certificate wide = parse_certificate(Certificate::Kind::Projection, {"nu(dom#) = 4", "strict: 2"}, p.afs);
    CHECK_FALSE(check_certificate(p.scc, p.cs, wide, p.afs).valid);

    Problem t = problem("twice.afs", true, 0);
    CHECK_FALSE(subterm_criterion(t.scc).has_value());
}

TEST_CASE("certificate text round trip")
{
    Problem p = problem("map.afs", false, 0);
    Certificate c = poly_cert(p.afs, {{"map#", "\\F x. F(x) + x"}, {"cons", "\\x y. x + y + 1"}}, {1});
    auto lines = certificate_lines(c, p.afs);
    Certificate back = parse_certificate(Certificate::Kind::Poly, lines, p.afs);
    CHECK(certificate_lines(back, p.afs) == lines);
    CHECK_THROWS_AS(parse_certificate(Certificate::Kind::Poly, {"J(map#) = \\F x. F(x) +"}, p.afs), Error);
    CHECK_THROWS_AS(parse_certificate(Certificate::Kind::Poly, {"J(nosuch) = 0", "strict: 1"}, p.afs), Error);
}

TEST_CASE("searches on trivial problems")
{
    AFS a = prepared("twice.afs");
    Sym f = make_symbol("f#", {base_type("nat")}, base_type("nat"), SymKind::Marked, "f");
    Term x = mk_var("x", base_type("nat"));
    ConstraintSet loop;
    loop.strict.push_back({mk_fun(f, {x}), mk_fun(f, {x}), 1, "pair 1"});
    CHECK_FALSE(poly::search(loop, {}).has_value());
    CHECK_FALSE(rpo::search(loop, a).has_value());

    ConstraintSet empty;
    auto r = rpo::search(empty, a);
    if (r) {
        CHECK(r->pi.empty());
        CHECK(r->prec.empty());
        CHECK(r->strict.empty());
    }
    CHECK_FALSE(poly::search(empty, {}).has_value());
}

// ---------------------------------------------------------------- sampling properties

namespace {

using poly::ExprP;

struct ExprGen {
    std::mt19937& rng;
    std::vector<int> base;
    int fun;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    ExprP gen(int depth)
    {
        int k = depth <= 0 ? pick(2) : pick(6);
        switch (k) {
        case 0: return poly::cnst(pick(3));
        case 1: return poly::slot(base[pick(static_cast<int>(base.size()))]);
        case 2: return poly::add(gen(depth - 1), gen(depth - 1));
        case 3: return poly::mul(gen(depth - 1), gen(depth - 1));
        case 4: return poly::max(gen(depth - 1), gen(depth - 1));
        default: {
            poly::Value arg{{}, {}, gen(depth - 1)};
            return poly::call(fun, {arg});
        }
        }
    }

    // Something likely to be below e.
    ExprP below(const ExprP& e, int depth)
    {
        switch (pick(4)) {
        case 0: return e->a && pick(2) ? e->a : e->b ? e->b : gen(depth);
        case 1: return poly::add(e, poly::cnst(pick(2)));
        case 2: return e;
        default: return gen(depth);
        }
    }
};

bool contains_call(const ExprP& e)
{
    if (!e) return false;
    if (e->k == poly::Expr::K::Call) return true;
    return contains_call(e->a) || contains_call(e->b);
}

}  // namespace

TEST_CASE("symbolic comparison is sound under sampling")
{
    std::mt19937 rng(20240611);
    int fun = poly::fresh_slot();
    ExprGen g{rng, {poly::fresh_slot(), poly::fresh_slot(), poly::fresh_slot()}, fun};
    poly::Comparator cmp;
    int asserted = 0, samples = 0, counterexamples = 0, with_calls = 0;
    for (int round = 0; round < 3000 && samples < 5000; ++round) {
        ExprP l = g.gen(3);
        ExprP r = g.below(l, 2);
        bool strict = g.pick(2) == 0;
        bool said = strict ? cmp.gt(l, r) : cmp.geq(l, r);
        if (!said) continue;
        ++asserted;
        with_calls += contains_call(l) || contains_call(r);
        std::map<int, int> slots;
        poly::collect_slots(l, slots);
        poly::collect_slots(r, slots);
        for (int k = 0; k < 5; ++k) {
            poly::Sample s;
            poly::randomize(s, slots, rng);
            poly::Nat a = poly::eval(l, s), b = poly::eval(r, s);
            ++samples;
            if (a < b || (strict && a == b)) {
                ++counterexamples;
                MESSAGE("counterexample: " << poly::to_string(l) << (strict ? " > " : " >= ") << poly::to_string(r));
            }
        }
    }
    CHECK(samples >= 1000);
    CHECK(with_calls > 50);
    CHECK(counterexamples == 0);
    MESSAGE(asserted << " asserted comparisons, " << samples << " samples");
}

TEST_CASE("monotonicity sampling separates monotone from non-monotone values")
{
    AFS a = prepared("twice.afs");
    Sym twice = a.symbol("twice");
    std::vector<Type> pt = twice->inputs;
    for (Type t : arg_types(twice->output)) pt.push_back(t);
    CHECK(sample_monotone(twice, poly::parse_value("\\f n. f(f(n)) + 2 * n", pt), 300, 3));
    CHECK(sample_monotone(twice, poly::parse_value("\\f n. max(f(n), n)", pt), 300, 3));
}

namespace {

const char* kRpoSig = R"(
SIG
  o : nat
  s : [nat] -> nat
  plus : [nat * nat] -> nat
  h : [nat -> nat * nat] -> nat
  k : [nat] -> nat
VARS
  x : nat
  y : nat
  z : nat
  F : nat -> nat
RULES
)";

struct TermGen {
    const AFS& afs;
    std::mt19937& rng;
    int counter = 0;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
    Type nat() const { return base_type("nat"); }

    Term gen(int depth, std::vector<Term>& bound, bool ground = false)
    {
        int choice = depth <= 0 ? pick(2) : pick(7);
        auto sym = [&](const char* n) { return afs.symbol(n); };
        switch (choice) {
        case 0:
            if (!bound.empty() && pick(2)) return bound[pick(static_cast<int>(bound.size()))];
            if (!ground) return mk_var(pick(2) ? "x" : "y", nat());
            return mk_fun(sym("o"), {});
        case 1: return mk_fun(sym("o"), {});
        case 2: return mk_fun(sym("s"), {gen(depth - 1, bound, ground)});
        case 3: return mk_fun(sym("plus"), {gen(depth - 1, bound, ground), gen(depth - 1, bound, ground)});
        case 4: return mk_fun(sym("k"), {gen(depth - 1, bound, ground)});
        case 5: {
            Term v = mk_var("b" + std::to_string(counter++), nat());
            bound.push_back(v);
            Term body = gen(depth - 1, bound, ground);
            bound.pop_back();
            return mk_fun(sym("h"), {mk_lam(v, body), gen(depth - 1, bound, ground)});
        }
        default:
            if (ground) return mk_fun(sym("s"), {gen(depth - 1, bound, ground)});
            return mk_app(mk_var("F", arrow(nat(), nat())), gen(depth - 1, bound, ground));
        }
    }

    Term gen(int depth, bool ground = false)
    {
        std::vector<Term> bound;
        return gen(depth, bound, ground);
    }

    Subst substitution()
    {
        Subst s;
        s["x"] = gen(2, true);
        s["y"] = gen(2, true);
        Term v = mk_var("g" + std::to_string(counter++), nat());
        std::vector<Term> bound{v};
        s["F"] = mk_lam(v, gen(2, bound, true));
        return s;
    }
};

rpo::Precedence random_precedence(const AFS& a, std::mt19937& rng)
{
    rpo::Precedence p;
    std::vector<Sym> syms;
    for (auto& f : a.signature) syms.push_back(f);
    for (int i = 0; i < 4; ++i) {
        Sym f = syms[rng() % syms.size()], g = syms[rng() % syms.size()];
        if (f != g) p.add(f, g);
    }
    p.frozen = true;
    return p;
}

}  // namespace

TEST_CASE("path ordering: irreflexive, transitive and stable on samples")
{
    AFS a = parse_afs(kRpoSig);
    std::mt19937 rng(7);
    TermGen tg{a, rng};
    int samples = 0, related = 0, stable_checks = 0, trans_checks = 0;
    for (int round = 0; round < 1200; ++round) {
        rpo::Precedence prec = random_precedence(a, rng);
        Term s0 = tg.gen(4);
        auto subs = subterms(s0);
        Term t0 = tg.pick(2) ? subs[tg.pick(static_cast<int>(subs.size()))] : tg.gen(3);
        if (!t0->type->is_base() || !typecheck(t0)->is_base()) t0 = tg.gen(3);
        Term s = rpo::embed(s0, {}, a), t = rpo::embed(t0, {}, a);
        ++samples;
        CHECK_FALSE(rpo::gt(s, s, prec));
        CHECK(rpo::geq(s, s, prec));
        if (!rpo::gt(s, t, prec)) continue;
        ++related;
        CHECK_FALSE(rpo::gt(t, s, prec));
        Subst g = tg.substitution();
        Term sg = rpo::embed(apply_subst(s0, g), {}, a), tg2 = rpo::embed(apply_subst(t0, g), {}, a);
        ++stable_checks;
        bool stable = rpo::gt(sg, tg2, prec);
        CHECK_MESSAGE(stable, to_string(s0) << " > " << to_string(t0) << " but not after substitution");
        Term u0 = tg.gen(3);
        Term u = rpo::embed(u0, {}, a);
        if (rpo::gt(t, u, prec)) {
            ++trans_checks;
            CHECK_MESSAGE(rpo::gt(s, u, prec), to_string(s0) << " > " << to_string(t0) << " > " << to_string(u0));
        }
    }
    CHECK(samples >= 1000);
    CHECK(related > 100);
    MESSAGE(samples << " samples, " << related << " related, " << stable_checks << " stability checks, "
                    << trans_checks << " transitivity checks");
}

// ---------------------------------------------------------------- mutation

namespace {

struct Valid {
    Problem p;
    Certificate c;
};

// Hand-written witnesses (with their slack) plus two searched certificates.
std::vector<Valid> witness_certificates()
{
    std::vector<Valid> out;
    {
        Problem p = problem("map.afs", false, 0);
        out.push_back({p, poly_cert(p.afs,
                                    {{"map#", "\\F x. F(x) + x"},
                                     {"map", "\\F x. x * F(x) + x"},
                                     {"cons", "\\x y. x + y + 1"}},
                                    {1, 2})});
    }
    {
        Problem p = problem("twice.afs", true, 0);
        out.push_back({p, poly_cert(p.afs,
                                    {{"I", "\\n. n"},
                                     {"I#", "\\n. n"},
                                     {"I-", "\\n. n"},
                                     {"s", "\\n. n + 1"},
                                     {"twice", "\\f n. f(f(n))"},
                                     {"twice#", "\\f n. f(f(n))"}},
                                    {1, 2})});
    }
    {
        Problem p = problem("twice.afs", true, 0, {1, 2});
        out.push_back({p, poly_cert(p.afs,
                                    {{"twice", "\\f n. max(f(f(n)), n) + 1"}, {"twice#", "\\f n. max(f(f(n)), n) + 1"}},
                                    {4, 5, 6, 7})});
    }
    {
        Problem p = problem("eval.afs", true, 2);
        out.push_back({p, parse_certificate(Certificate::Kind::Rpo,
                                            {"pi(dom) = keep(1,2)", "prec fun > dom'", "prec dom' > s",
                                             "prec dom' > o", "strict: 3"},
                                            p.afs)});
    }
    return out;
}

// Every reduction-pair certificate the engine emits on the corpus, with the
// SCC and constraint set it was found for.
std::vector<Valid> engine_certificates()
{
    std::vector<Valid> out;
    for (auto& e : std::filesystem::directory_iterator(HODP_CORPUS_DIR)) {
        AFS input = load_afs(e.path().string());
        Proof proof = prove(input);
        Prepared prep = prepare(input);
        DPGraph g = prep.graph;
        for (auto& st : proof.steps) {
            if (st.kind != ProofStep::Kind::Subterm && st.kind != ProofStep::Kind::ReductionPair) continue;
            g = prune(g);
            std::vector<int> pos;
            for (int i : st.scc) pos.push_back(i - 1);
            Valid v;
            v.p.afs = prep.afs;
            v.p.graph = g;
            for (int i : pos) v.p.scc.push_back(g.nodes[i]);
            v.p.cs = build_constraints(v.p.scc, prep.afs);
            v.c = *st.cert;
            if (st.kind == ProofStep::Kind::ReductionPair) out.push_back(v);
            std::vector<int> gone;
            for (int i : st.removed) gone.push_back(i - 1);
            g = remove_nodes(g, gone);
        }
    }
    return out;
}

// Lowers one coefficient of one J line: a number n becomes n - 1, or an
// occurrence of a base parameter (implicit coefficient 1) becomes 0.
std::optional<std::string> lower_coefficient(const std::string& line, std::mt19937& rng)
{
    std::size_t dot = line.find(". ");
    std::size_t from = dot == std::string::npos ? line.find(" = ") + 3 : dot + 2;
    static const std::regex tok(R"(\b(\d+|x\d+)\b)");
    std::vector<std::pair<std::size_t, std::string>> hits;
    for (auto it = std::sregex_iterator(line.begin() + from, line.end(), tok); it != std::sregex_iterator(); ++it) {
        std::string m = (*it)[1];
        if (m == "0") continue;
        hits.push_back({from + static_cast<std::size_t>(it->position(1)), m});
    }
    if (hits.empty()) return std::nullopt;
    auto [pos, m] = hits[rng() % hits.size()];
    std::string rep = std::isdigit(static_cast<unsigned char>(m[0])) ? std::to_string(std::stoi(m) - 1) : "0";
    return line.substr(0, pos) + rep + line.substr(pos + m.size());
}

std::optional<std::string> mutate_rpo_line(const std::string& line, std::mt19937& rng)
{
    if (line.rfind("prec ", 0) == 0) {
        std::istringstream is(line.substr(5));
        std::string f, gt, g;
        is >> f >> gt >> g;
        return "prec " + g + " > " + f;
    }
    if (line.rfind("pi(", 0) == 0) {
        std::string head = line.substr(0, line.find(" = ") + 3);
        const char* alts[] = {"keep()", "keep(1)", "arg(1)"};
        std::string rep = alts[rng() % 3];
        if (head + rep == line) rep = "keep()";
        return head + rep;
    }
    return std::nullopt;
}


struct MutationStats {
    int made = 0, rejected = 0, survivors_confirmed = 0;
};

MutationStats mutate_and_check(std::vector<Valid>& valid, int count, unsigned seed)
{
    for (auto& v : valid) {
        Verdict ok = check_certificate(v.p.scc, v.p.cs, v.c, v.p.afs);
        REQUIRE_MESSAGE(ok.valid, ok.reason);
    }
    std::mt19937 rng(seed);
    MutationStats st;
    while (st.made < count) {
        Valid& v = valid[rng() % valid.size()];
        auto lines = certificate_lines(v.c, v.p.afs);
        if (lines.size() < 2) continue;
        std::size_t i = rng() % (lines.size() - 1);
        auto m = v.c.kind == Certificate::Kind::Poly ? lower_coefficient(lines[i], rng) : mutate_rpo_line(lines[i], rng);
        if (!m || *m == lines[i]) continue;
        lines[i] = *m;
        ++st.made;
        bool valid_mutant = false;
        try {
            Certificate c = parse_certificate(v.c.kind, lines, v.p.afs);
            valid_mutant = check_certificate(v.p.scc, v.p.cs, c, v.p.afs).valid;
            if (valid_mutant) {
                // A surviving mutant must be genuinely valid.
                bool sampled = true;
                if (c.kind == Certificate::Kind::Poly) {
                    sampled = sample_constraints(v.p.cs, c.J, c.strict, 300, 5);
                    for (auto& [name, val] : c.J.J)
                        if (Sym f = v.p.afs.symbol(name)) sampled = sampled && sample_monotone(f, val, 300, 5);
                }
                CHECK_MESSAGE(sampled, "accepted mutant fails sampling: " << lines[i]);
                st.survivors_confirmed += sampled;
                MESSAGE("survivor: " << lines[i]);
            }
        } catch (const Error&) {
        }
        st.rejected += !valid_mutant;
    }
    return st;
}

}  // namespace

TEST_CASE("mutated engine certificates are rejected")
{
    auto valid = engine_certificates();
    REQUIRE(valid.size() >= 5);
    MutationStats st = mutate_and_check(valid, 100, 99);
    MESSAGE(st.rejected << " of " << st.made << " mutants rejected, " << st.survivors_confirmed
                        << " survivors confirmed");
    CHECK(st.rejected >= 95);
    CHECK(st.rejected + st.survivors_confirmed == st.made);
}

TEST_CASE("mutated hand-written witnesses are rejected or still valid")
{
    auto valid = witness_certificates();
    MutationStats st = mutate_and_check(valid, 100, 99);
    MESSAGE(st.rejected << " of " << st.made << " mutants rejected, " << st.survivors_confirmed
                        << " survivors confirmed");
    CHECK(st.rejected + st.survivors_confirmed == st.made);
}
