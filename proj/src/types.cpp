#include "hodp/types.hpp"

#include <cstdint>
#include <mutex>
#include <unordered_map>

namespace hodp {

namespace {

struct Table {
    std::mutex mu;
    std::unordered_map<std::string, std::unique_ptr<TypeNode>> bases;
    std::unordered_map<std::uint64_t, std::unique_ptr<TypeNode>> arrows;
};

Table& table()
{
    static Table t;
    return t;
}

std::uint64_t pair_key(Type a, Type b)
{
    // Pointers are stable for the lifetime of the process; mix them into one key.
    auto x = reinterpret_cast<std::uintptr_t>(a);
    auto y = reinterpret_cast<std::uintptr_t>(b);
    return static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint64_t>(y);
}

}  // namespace

Type base_type(const std::string& name)
{
    auto& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    auto it = t.bases.find(name);
    if (it != t.bases.end()) return it->second.get();
    auto n = std::make_unique<TypeNode>();
    n->base = name;
    n->hash = std::hash<std::string>{}(name);
    Type res = n.get();
    t.bases.emplace(name, std::move(n));
    return res;
}

Type arrow(Type left, Type right)
{
    auto& t = table();
    std::lock_guard<std::mutex> lock(t.mu);
    auto key = pair_key(left, right);
    // Collisions on the mixed key are resolved by probing successive keys.
    for (;; ++key) {
        auto it = t.arrows.find(key);
        if (it == t.arrows.end()) break;
        if (it->second->left == left && it->second->right == right) return it->second.get();
    }
    auto n = std::make_unique<TypeNode>();
    n->left = left;
    n->right = right;
    n->hash = left->hash * 31 + right->hash * 17 + 7;
    n->size = left->size + right->size + 1;
    Type res = n.get();
    t.arrows.emplace(key, std::move(n));
    return res;
}

Type arrows(const std::vector<Type>& inputs, Type output)
{
    Type r = output;
    for (auto it = inputs.rbegin(); it != inputs.rend(); ++it) r = arrow(*it, r);
    return r;
}

std::vector<Type> arg_types(Type t)
{
    std::vector<Type> out;
    while (!t->is_base()) {
        out.push_back(t->left);
        t = t->right;
    }
    return out;
}

Type result_base(Type t)
{
    while (!t->is_base()) t = t->right;
    return t;
}

int arity_of(Type t)
{
    int n = 0;
    while (!t->is_base()) {
        ++n;
        t = t->right;
    }
    return n;
}

bool is_strict_subtype(Type sub, Type t)
{
    if (t->is_base()) return false;
    return t->left == sub || t->right == sub || is_strict_subtype(sub, t->left) ||
           is_strict_subtype(sub, t->right);
}

std::string to_string(Type t)
{
    if (t->is_base()) return t->base;
    std::string l = to_string(t->left);
    if (!t->left->is_base()) l = "(" + l + ")";
    return l + " -> " + to_string(t->right);
}

const char* kind_name(Error::Kind k)
{
    switch (k) {
    case Error::Kind::Syntax: return "SyntaxError";
    case Error::Kind::IllTyped: return "IllTyped";
    case Error::Kind::IllegalLhs: return "IllegalLhs";
    case Error::Kind::TypeMismatch: return "TypeMismatch";
    case Error::Kind::NotLocal: return "NotLocal";
    case Error::Kind::Budget: return "BudgetExceeded";
    case Error::Kind::Internal: return "InternalError";
    case Error::Kind::Usage: return "UsageError";
    }
    return "Error";
}

}  // namespace hodp
