#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hodp {

struct TypeNode;
// Types are interned: two Type handles are structurally equal iff the pointers are equal.
using Type = const TypeNode*;

struct TypeNode {
    std::string base;  // set for base types
    Type left = nullptr;
    Type right = nullptr;
    std::size_t hash = 0;
    int size = 1;
    bool is_base() const { return left == nullptr; }
};

Type base_type(const std::string& name);
Type arrow(Type left, Type right);
Type arrows(const std::vector<Type>& inputs, Type output);

// Splits σ1 ⇒ … ⇒ σn ⇒ ι into its inputs and the base result.
std::vector<Type> arg_types(Type t);
Type result_base(Type t);
int arity_of(Type t);

// True if `sub` occurs as a proper subterm of `t` (as a type expression).
bool is_strict_subtype(Type sub, Type t);

std::string to_string(Type t);

class Error : public std::runtime_error {
public:
    enum class Kind { Syntax, IllTyped, IllegalLhs, TypeMismatch, NotLocal, Budget, Internal, Usage };
    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    Kind kind;
};

const char* kind_name(Error::Kind k);

}  // namespace hodp
