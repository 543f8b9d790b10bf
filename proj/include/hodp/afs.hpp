#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hodp/term.hpp"

namespace hodp {

struct AFS {
    std::vector<Sym> signature;  // user symbols, declaration order
    std::map<std::string, Sym> symbols;
    std::map<std::string, Type> var_types;  // VARS block
    std::vector<Rule> rules;                 // file order, completion rules appended
    std::set<std::string> defined;           // names of symbols heading some LHS

    bool left_linear = true;
    bool fully_extended = true;
    bool local = true;
    bool base_output = true;
    bool pfp = true;
    bool spfp = true;

    std::optional<std::string> expect;  // from a `# expect:` header

    Sym symbol(const std::string& name) const;  // also resolves f# and f-
    bool is_defined(const Sym& f) const { return defined.count(f->base) > 0; }
    std::vector<Sym> constructors() const;
};

struct ParseEnv {
    std::function<Sym(const std::string&)> symbol;                  // nullptr when unknown
    std::function<std::optional<Type>(const std::string&)> var;      // free variable typing
};

Type parse_type(const std::string& text);
Term parse_term_with(const std::string& text, const ParseEnv& env);
Term parse_term(const std::string& text, const AFS& afs, const std::map<std::string, Type>& extra_vars = {});

// Parses, validates the rules and computes the defined symbols.  Classification
// flags are filled by classify().
AFS parse_afs(const std::string& text);
AFS load_afs(const std::string& path);

// Throws IllegalLhs (or IllTyped) if l ⇒ r is not a legal rule.
void validate_rule(const Term& lhs, const Term& rhs);

AFS complete(const AFS& afs);
AFS classify(AFS afs);
std::vector<Rule> build_rplus(const AFS& afs);

// Symbols occurring in the terms of the AFS (user symbols only), and helpers.
std::set<std::string> lhs_variables_repeated(const Term& lhs);

}  // namespace hodp
