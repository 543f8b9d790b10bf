#pragma once

#include <set>
#include <string>
#include <vector>

#include "hodp/selection.hpp"

namespace hodp {

enum class Mode { NonCollapsing, Basic, LocalCollapsing };
std::string to_string(Mode m);

struct Constraint {
    Term lhs;
    Term rhs;
    int pair = 0;  // index of the dependency pair, 0 for rule constraints
    std::string origin;
};

struct ConstraintSet {
    Mode mode = Mode::NonCollapsing;
    std::vector<Constraint> strict;  // one per pair, both sides of base type
    std::vector<Constraint> weak;
    std::set<std::string> S;         // names of protected symbols
    std::vector<Rule> formative;
    std::vector<Rule> usable;
    bool usable_applied = false;
    bool usable_all = false;

    // Every function symbol occurring in a constraint, by name.
    std::vector<Sym> symbols() const;
    std::vector<Constraint> all() const;
};

// l·x1···xn, with fresh variables, up to base type.
Term flatten_lhs(const Term& l, std::set<std::string>& avoid);
// p·c1···cm up to base type.
Term flatten_rhs(const Term& p);

Sym pairing_symbol(Type t);
bool is_pairing(const Sym& f);

ConstraintSet build_constraints(const std::vector<DependencyPair>& scc, const AFS& afs);

}  // namespace hodp
