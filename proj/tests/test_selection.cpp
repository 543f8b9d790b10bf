#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hodp/constraints.hpp"
#include "hodp/graph.hpp"
#include "support.hpp"

using namespace hodp;
using testing_support::prepared;

namespace {

std::set<std::string> labels(const std::vector<Rule>& rs)
{
    std::set<std::string> out;
    for (auto& r : rs) out.insert(r.label);
    return out;
}

const char* kIfHead = R"(
SIG
  nil : funlist
  cons : [nat -> nat * funlist] -> funlist
  head : [funlist] -> nat -> nat
  tail : [funlist] -> funlist
  true : bool
  false : bool
  test : [nat -> nat] -> bool
  s : [nat] -> nat
  if : [bool * nat -> string * nat -> string] -> nat -> string
VARS
  F : nat -> nat
  F1 : nat -> string
  F2 : nat -> string
  t : funlist
  x : nat
RULES
  if(true, F1, F2) => F1
  if(false, F1, F2) => F2
  test(\x. s(x)) => true
  head(cons(F, t)) => F
  tail(cons(F, t)) => t
)";

}  // namespace

TEST_CASE("R+ of twice is R")
{
    AFS a = prepared("twice.afs");
    CHECK(build_rplus(a).size() == a.rules.size());
}

TEST_CASE("formative rules of the twice SCC")
{
    AFS a = prepared("twice.afs");
    DPProblem p = dependency_pairs(a);
    DPGraph g = prune(approximate_graph(p, a));
    auto cs = sccs(g);
    REQUIRE(cs.size() == 1);
    std::vector<DependencyPair> scc;
    for (int i : cs[0]) scc.push_back(g.nodes[i]);
    // (B) is rule 2 and (D) is the completion rule 4.
    CHECK(labels(formative_rules(scc, a)) == std::set<std::string>{"2", "4"});

    auto T = [&](const std::string& s) { return parse_term(s, a); };
    Type nat = base_type("nat");
    auto fs = formative_symbols(T("s(n)"), build_rplus(a));
    std::set<TypedSymbol> want = {{TypedSymbol::Head::Fn, "s", nat},
                                  {TypedSymbol::Head::Fn, "I", nat},
                                  {TypedSymbol::Head::Fn, "twice", nat}};
    CHECK(fs == want);
    CHECK(formative_rules_of(T("F"), build_rplus(a)).empty());
}

TEST_CASE("formative rules with functional rules and abstractions")
{
    AFS a = classify(complete(parse_afs(kIfHead)));
    auto rplus = build_rplus(a);
    CHECK(rplus.size() == 8);
    auto fr = formative_rules_of(parse_term("true", a), rplus);
    std::set<std::string> got;
    for (auto& r : fr) got.insert(to_string(r));
    std::set<std::string> want = {
        to_string(Rule{parse_term("test(\\x. s(x))", a), parse_term("true", a)}),
        to_string(Rule{parse_term("head(cons(F, t))", a), parse_term("F", a)}),
        to_string(Rule{parse_term("tail(cons(F, t))", a), parse_term("t", a)}),
    };
    // the applied head rule is (H), whose variable name comes from completion
    CHECK(got.size() == 4);
    for (auto& w : want) CHECK(got.count(w));
    bool has_h = false;
    for (auto& r : fr)
        has_h |= r.lhs->is_app() && head(r.lhs)->is_fun() && head(r.lhs)->sym->name == "head";
    CHECK(has_h);
}

TEST_CASE("formative rules refuse non-local systems")
{
    AFS a = classify(complete(parse_afs(R"(
SIG
  o : nat
  b : nat
  f : [nat * nat] -> nat
VARS
  x : nat
RULES
  f(x, x) => f(o, b)
)")));
    CHECK_FALSE(a.local);
    DPProblem p = dependency_pairs(a);
    try {
        formative_rules(p.pairs, a);
        FAIL("expected NotLocal");
    } catch (const Error& e) {
        CHECK(e.kind == Error::Kind::NotLocal);
    }
}

TEST_CASE("usable rules of the append SCC")
{
    AFS a = prepared("mapappend.afs");
    DPProblem p = dependency_pairs(a, false);
    DPGraph g = prune(approximate_graph(p, a));
    auto cs = sccs(g);
    REQUIRE(cs.size() == 2);
    std::vector<DependencyPair> map_scc, app_scc;
    for (auto& c : cs) {
        std::vector<DependencyPair> v;
        for (int i : c) v.push_back(g.nodes[i]);
        (v[0].lhs->sym->base == "append" ? app_scc : map_scc) = v;
    }
    REQUIRE(app_scc.size() == 1);
    auto ur = usable_rules(app_scc, a.rules);
    CHECK_FALSE(ur.all);
    CHECK(labels(ur.rules) == std::set<std::string>{"3", "4"});
    CHECK(map_scc.size() == 2);
    CHECK(usable_rules(map_scc, a.rules).all);
}

TEST_CASE("risky terms")
{
    AFS a = prepared("twice.afs");
    auto T = [&](const std::string& s) { return parse_term(s, a); };
    CHECK(is_risky(T("F @ n")));
    CHECK(is_risky(T("s(F @ n)")));
    CHECK_FALSE(is_risky(T("s(I(n))")));
    CHECK_FALSE(is_risky(T("twice(F)")));
}
