#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hodp/constraints.hpp"

namespace hodp::poly {

using Nat = std::uint64_t;

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

// A weakly monotonic functional in η-long form: λ params. body, body of base type.
struct Value {
    std::vector<int> params;
    std::vector<Type> ptypes;
    ExprP body;
};

struct Expr {
    enum class K { Const, Slot, Add, Mul, Max, Call };
    K k = K::Const;
    Nat c = 0;
    int id = 0;               // Slot / Call: the slot
    ExprP a, b;
    std::vector<Value> args;  // Call: one value per argument type of the slot
};

ExprP cnst(Nat c);
ExprP slot(int id);
ExprP add(ExprP a, ExprP b);
ExprP mul(ExprP a, ExprP b);
ExprP max(ExprP a, ExprP b);
ExprP call(int id, std::vector<Value> args);

int fresh_slot();
Value eta(int id, Type t);       // the slot itself, η-expanded
Value zero(Type t);              // 0_σ
Value apply(const Value& v, const std::vector<Value>& args);
ExprP at_zero(const Value& v);   // v(0⃗)
ExprP subst(const ExprP& e, const std::map<int, Value>& m);

// J_f for every symbol; c_σ ↦ 0 and pairing symbols ↦ max are built in.
// Symbols without an entry get the sum of their flattened arguments.
struct Interpretation {
    std::map<std::string, Value> J;
    Value of(const Sym& f) const;
};
Value default_value(const Sym& f);
Value max_value(const Sym& f);  // pointwise max of the flattened arguments

// Interpretation of a term; free variables become slots recorded in `vars`.
Value interpret(const Term& t, const Interpretation& I, std::map<std::string, int>& vars);

std::string to_string(const Value& v, const std::map<int, std::string>& names = {});
std::string to_string(const ExprP& e, const std::map<int, std::string>& names = {});
// "\F n. F(F(n)) + 1" for a symbol; parameter names chosen from the type.
std::string print_value(const Value& v);
Value parse_value(const std::string& text, const std::vector<Type>& ptypes);

// Symbolic comparison: sound, incomplete.
class Comparator {
public:
    explicit Comparator(int split_depth = 2) : split_depth_(split_depth) {}
    bool geq(const ExprP& l, const ExprP& r);
    bool gt(const ExprP& l, const ExprP& r) { return geq(l, add(r, cnst(1))); }
    // Compares two values of the same type pointwise.
    bool geq(const Value& l, const Value& r);
    bool gt(const Value& l, const Value& r);

private:
    struct Impl;
    int split_depth_;
};

bool orient_weak(const Constraint& c, const Interpretation& I);
bool orient_strict(const Constraint& c, const Interpretation& I);
// J_f(0,..,n,..,0) ⊒ n(0⃗) for every argument position of f.
bool s_condition(const Sym& f, const Value& j);

// Numeric evaluation for sampling.
struct Sample {
    std::map<int, Nat> base;
    std::map<int, std::function<Nat(const std::vector<Nat>&)>> fun;
};
Nat eval(const ExprP& e, const Sample& s);
// Random valuation for the given slots (naturals up to 5, functionals from
// {constant k, n+k, 2n} applied to the sum of their arguments).
void randomize(Sample& s, const std::map<int, int>& slots, std::mt19937& rng);
// Slot id -> number of arguments (0 for base slots).
void collect_slots(const ExprP& e, std::map<int, int>& out);

struct SearchOptions {
    int coef_bound = 3;
    int max_weight = 8;
    double deadline = 0;  // seconds since epoch (steady clock); 0 = none
};

struct PolyResult {
    Interpretation I;
    std::vector<int> strict;  // pair indices oriented strictly
};

std::optional<PolyResult> search(const ConstraintSet& cs, const SearchOptions& opt);

}  // namespace hodp::poly
