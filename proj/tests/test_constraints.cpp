#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hodp/constraints.hpp"
#include "hodp/graph.hpp"
#include "support.hpp"

using namespace hodp;
using testing_support::prepared;

namespace {

std::vector<std::vector<DependencyPair>> components(const AFS& a, bool allow_static)
{
    DPGraph g = prune(approximate_graph(dependency_pairs(a, allow_static), a));
    std::vector<std::vector<DependencyPair>> out;
    for (auto& c : sccs(g)) {
        std::vector<DependencyPair> scc;
        for (int v : c) scc.push_back(g.nodes[v]);
        out.push_back(scc);
    }
    return out;
}

std::set<std::string> origins(const ConstraintSet& cs)
{
    std::set<std::string> out;
    for (auto& c : cs.all()) out.insert(c.origin);
    return out;
}

}  // namespace

TEST_CASE("twice SCC constraints")
{
    AFS a = prepared("twice.afs");
    auto comps = components(a, true);
    REQUIRE(comps.size() == 1);
    ConstraintSet cs = build_constraints(comps[0], a);
    CHECK(cs.mode == Mode::LocalCollapsing);
    CHECK(cs.S == std::set<std::string>{"I-"});
    CHECK(cs.strict.size() == 6);
    CHECK(cs.all().size() == 10);
    CHECK(origins(cs) == std::set<std::string>{"pair 1", "pair 2", "pair 4", "pair 5", "pair 6", "pair 7", "rule 2",
                                               "rule 4", "untag I-", "untag-mark I-"});
    // The recursive call under the binder is tagged.
    for (auto& c : cs.strict)
        if (c.pair == 1) CHECK(to_string(c.rhs).find("I-(") != std::string::npos);
    for (auto& c : cs.all()) {
        CHECK(typecheck(c.lhs)->is_base());
        CHECK(typecheck(c.lhs) == typecheck(c.rhs));
    }
}

TEST_CASE("eval constraints per SCC")
{
    AFS a = prepared("eval.afs");
    auto comps = components(a, true);
    REQUIRE(comps.size() == 3);
    for (int i = 0; i < 2; ++i) {
        ConstraintSet cs = build_constraints(comps[i], a);
        CHECK(cs.mode == Mode::NonCollapsing);
        CHECK(cs.S.empty());
        CHECK(cs.usable_applied);
        bool pairing = false;
        for (auto& c : cs.weak) pairing |= c.origin == "pairing";
        CHECK(pairing);
    }
    ConstraintSet last = build_constraints(comps[2], a);
    CHECK(last.mode == Mode::LocalCollapsing);
    CHECK(last.S.empty());
    CHECK(origins(last) == std::set<std::string>{"pair 3", "rule 2", "rule 4", "rule 5"});
}

TEST_CASE("from SCC with a symbol below a binder")
{
    AFS a = prepared("from.afs");
    auto comps = components(a, false);
    std::vector<int> sizes;
    for (auto& c : comps) sizes.push_back(static_cast<int>(c.size()));
    CHECK(sizes == std::vector<int>{1, 3, 1});
    ConstraintSet cs = build_constraints(comps[1], a);
    CHECK(cs.mode == Mode::LocalCollapsing);
    CHECK(cs.S == std::set<std::string>{"s-"});
    auto o = origins(cs);
    CHECK(o.count("untag s-"));
    for (int r = 1; r <= 8; ++r) CHECK(o.count("rule " + std::to_string(r)));
}

TEST_CASE("map with dynamic pairs gives the three goodmap constraints")
{
    AFS a = prepared("map.afs");
    auto comps = components(a, false);
    REQUIRE(comps.size() == 1);
    ConstraintSet cs = build_constraints(comps[0], a);
    CHECK(cs.strict.size() == 2);
    REQUIRE(cs.weak.size() == 1);
    CHECK(cs.weak[0].origin == "rule 2");
}

TEST_CASE("non-local system uses basic mode")
{
    AFS a = prepared("nonlocal.afs");
    CHECK_FALSE(a.local);
    auto comps = components(a, true);
    REQUIRE_FALSE(comps.empty());
    ConstraintSet cs = build_constraints(comps[0], a);
    CHECK(cs.mode == Mode::Basic);
    for (auto& f : a.signature) CHECK(cs.S.count(f->name));
    auto o = origins(cs);
    CHECK(o.count("mark ap"));
    CHECK(o.count("mark max"));
    CHECK(cs.formative.empty());
}

TEST_CASE("first-order SCC keeps only usable rules")
{
    AFS a = prepared("rev.afs");
    auto comps = components(a, true);
    REQUIRE(comps.size() == 2);
    ConstraintSet cs = build_constraints(comps[1], a);  // rev
    CHECK(cs.mode == Mode::NonCollapsing);
    CHECK_FALSE(cs.usable_all);
    std::set<std::string> labels;
    for (auto& r : cs.usable) labels.insert(r.label);
    CHECK(labels == std::set<std::string>{"1", "2", "3", "4"});
}
