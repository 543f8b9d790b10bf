#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hodp/types.hpp"

namespace hodp {

enum class SymKind { Plain, Marked, Tagged, Fresh, Extension };

struct Symbol {
    std::string name;  // unique printable name: f, f#, f-, !c{nat}
    std::string base;  // user symbol this one derives from
    SymKind kind = SymKind::Plain;
    std::vector<Type> inputs;
    Type output = nullptr;

    int arity() const { return static_cast<int>(inputs.size()); }
    Type type() const { return arrows(inputs, output); }
};
using Sym = std::shared_ptr<const Symbol>;

Sym make_symbol(const std::string& name, std::vector<Type> inputs, Type output,
                SymKind kind = SymKind::Plain, const std::string& base = "");
Sym marked(const Sym& f);
Sym tagged(const Sym& f);
// The plain user symbol underlying a marked or tagged one.
Sym plain(const Sym& f);
Sym fresh_constant(Type t);
inline bool same_symbol(const Sym& a, const Sym& b) { return a->name == b->name; }

enum class TermKind { Var, BVar, Abs, App, Fun };

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

// Locally nameless terms: free variables carry names, bound variables are
// de Bruijn indices, so α-equivalence is structural equality.
struct TermNode {
    TermKind kind;
    Type type = nullptr;
    std::string name;  // Var: the name; Abs: binder hint used for printing
    int index = 0;     // BVar
    Type binder = nullptr;  // Abs: type of the bound variable
    Sym sym;                // Fun
    std::vector<Term> kids; // Fun: arguments; App: {fun, arg}; Abs: {body}
    std::size_t hash = 0;
    int size = 1;
    int loose = 0;  // 1 + largest dangling index, 0 when locally closed

    bool is_var() const { return kind == TermKind::Var; }
    bool is_abs() const { return kind == TermKind::Abs; }
    bool is_app() const { return kind == TermKind::App; }
    bool is_fun() const { return kind == TermKind::Fun; }
};

Term mk_var(const std::string& name, Type type);
Term mk_bvar(int index, Type type);
Term mk_abs_raw(const std::string& hint, Type binder, const Term& body);
// λx.body, abstracting the free variable x (name and type) of body.
Term mk_lam(const Term& x, const Term& body);
Term mk_app(const Term& s, const Term& t);
Term mk_apps(Term s, const std::vector<Term>& args);
Term mk_fun(const Sym& f, const std::vector<Term>& args);

bool alpha_equal(const Term& s, const Term& t);
struct TermHash {
    std::size_t operator()(const Term& t) const { return t->hash; }
};
struct TermEq {
    bool operator()(const Term& a, const Term& b) const { return alpha_equal(a, b); }
};
using TermSet = std::unordered_set<Term, TermHash, TermEq>;
template <class V>
using TermMap = std::unordered_map<Term, V, TermHash, TermEq>;

// Deterministic total order on terms (used for sorting in proofs).
bool term_less(const Term& a, const Term& b);

// Recomputes the type of a term bottom-up; throws IllTyped on inconsistency.
Type typecheck(const Term& t);

using Subst = std::map<std::string, Term>;
Term apply_subst(const Term& t, const Subst& s);

// Replaces bound index 0 of an abstraction body by u.
Term instantiate(const Term& body, const Term& u);
Term beta_root(const Term& t);  // requires t = (λx.s)·u
Term beta_normal(const Term& t, int budget = 100000);
bool is_beta_normal(const Term& t);

std::optional<Subst> match(const Term& pattern, const Term& subject);

Term head(const Term& t);
std::vector<Term> app_args(const Term& t);
std::vector<Term> free_vars(const Term& t);  // first-occurrence order
bool occurs_free(const std::string& name, const Term& t);
void collect_var_names(const Term& t, std::set<std::string>& out);

// Locally closed subterms; bound variables that become free are replaced by
// `fill(type)` (a fresh variable or a c_σ constant).
std::vector<Term> subterms(const Term& t);
std::vector<Term> subterms_with(const Term& t, const std::function<Term(Type)>& fill);

Term mark(const Term& t, const std::set<std::string>& defined);

// A fresh variable name that avoids everything in `avoid`.
std::string fresh_name(const std::string& hint, const std::set<std::string>& avoid);

std::string to_string(const Term& t);

enum class RuleOrigin { User, Completion, RPlus, Untag, Extra };

struct Rule {
    Term lhs;
    Term rhs;
    RuleOrigin origin = RuleOrigin::User;
    std::string label;  // display label, e.g. the rule number
};
std::string to_string(const Rule& r);
bool rule_equal(const Rule& a, const Rule& b);

// All one-step reducts (rule steps at every position and β-steps), deduplicated modulo α.
std::vector<Term> rewrite_step(const Term& t, const std::vector<Rule>& rules, bool with_beta = true);

struct Reductions {
    std::vector<Term> terms;       // discovered terms in BFS order; terms[0] is the start
    std::vector<int> parent;       // BFS tree
    std::vector<int> depth;
    std::vector<std::pair<int, int>> edges;
    bool loop = false;
    std::vector<Term> loop_trace;  // start …→ t …→ t when a loop was found
    bool budget_exceeded = false;
    bool exhausted = false;        // every reachable term was expanded within the step bound
    std::vector<bool> normal;      // expanded and without reducts
    std::vector<Term> trace_to(int node) const;
    bool terminating_within_budget() const { return exhausted && !loop; }
};

Reductions bounded_reductions(const Term& t, const std::vector<Rule>& rules, int max_steps,
                              std::size_t max_terms = 20000);

}  // namespace hodp
