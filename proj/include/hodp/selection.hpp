#pragma once

#include <set>
#include <string>
#include <vector>

#include "hodp/dp.hpp"

namespace hodp {

struct TypedSymbol {
    enum class Head { Fn, Abs, Var };
    Head head = Head::Fn;
    std::string name;  // symbol name when head == Fn
    Type type = nullptr;

    bool operator<(const TypedSymbol& o) const;
    bool operator==(const TypedSymbol& o) const;
};
std::string to_string(const TypedSymbol& a);

// Symb_∅(s).  Free variables applied to arguments are treated as VAR.
std::set<TypedSymbol> symb(const Term& s);
bool has_form(const Term& r, const TypedSymbol& a);

// Formative symbols and rules of a term with respect to R⁺.
std::set<TypedSymbol> formative_symbols(const Term& s, const std::vector<Rule>& rplus);
std::vector<Rule> formative_rules_of(const Term& s, const std::vector<Rule>& rplus);
// Union over the head arguments of every pair's left-hand side.  Throws NotLocal.
std::vector<Rule> formative_rules(const std::vector<DependencyPair>& ps, const AFS& afs);

bool is_risky(const Term& s);

struct UsableRules {
    bool all = false;  // every rule of the base set
    std::vector<Rule> rules;
};
// For a non-collapsing pair the unmarked root symbol of its right-hand side is
// treated as occurring in the arguments, so the rules of the recursive call
// itself are included.
UsableRules usable_rules(const std::vector<DependencyPair>& ps, const std::vector<Rule>& base);

}  // namespace hodp
