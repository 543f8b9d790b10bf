#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hodp/constraints.hpp"

namespace hodp::rpo {

// What an argument function does with f(x1..xn).
struct PiChoice {
    enum class K { Keep, Arg, Rule } k = K::Keep;
    std::vector<int> keep;  // 0-based positions kept, in order (Keep)
    int arg = 0;            // 0-based (Arg)
    Rule rule;              // f(x⃗) ⇒ r with distinct variables x⃗ (Rule)
    bool identity(int arity) const;
};
std::string to_string(const PiChoice& c, int arity);

using Pi = std::map<std::string, PiChoice>;  // by symbol name; absent = identity

// Precedence over the extended signature.  User-level facts are stored; the
// facts about @, Λ and c_σ are built in.
class Precedence {
public:
    bool gt(const Sym& f, const Sym& g) const;
    // Adds f > g between user-level symbols; false if it would create a cycle.
    bool add(const Sym& f, const Sym& g);
    void remove_last();
    const std::vector<std::pair<std::string, std::string>>& facts() const { return facts_; }
    bool frozen = false;  // when set, add() only accepts facts that already hold

private:
    bool reaches(const std::string& a, const std::string& b) const;
    std::vector<std::pair<std::string, std::string>> facts_;
};

enum class SymClass { User, App, Lam, Const };
SymClass classify_symbol(const Sym& f);

// π̄(t), then μ(·).
Term filter(const Term& t, const Pi& pi, const AFS& afs);
Term mu(const Term& t);
Term embed(const Term& t, const Pi& pi, const AFS& afs);  // μ(π̄(t))

// Decision procedure for a fixed precedence.
bool gt(const Term& s, const Term& t, const Precedence& prec);
bool geq(const Term& s, const Term& t, const Precedence& prec);

// Options for a symbol, in search order.
std::vector<PiChoice> pi_options(const Sym& f, const AFS& afs, bool in_s);
bool s_subterm_ok(const Sym& f, const PiChoice& c);

struct RpoResult {
    Pi pi;
    std::vector<std::pair<std::string, std::string>> prec;
    std::vector<int> strict;
};

struct RpoOptions {
    long node_budget = 3'000'000;
    double deadline = 0;  // steady-clock seconds; 0 = none
};

std::optional<RpoResult> search(const ConstraintSet& cs, const AFS& afs, const RpoOptions& opt = {});

}  // namespace hodp::rpo
