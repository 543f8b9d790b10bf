#pragma once

#include <functional>
#include <random>
#include <set>
#include <string>

#include "hodp/afs.hpp"

namespace testing_support {

inline std::string corpus(const std::string& name) { return std::string(HODP_CORPUS_DIR) + "/" + name; }

inline hodp::AFS load(const std::string& name) { return hodp::load_afs(corpus(name)); }

// (l1, r1) and (l2, r2) are equal up to a consistent renaming of free variables.
inline bool variant(const hodp::Term& l1, const hodp::Term& r1, const hodp::Term& l2, const hodp::Term& r2)
{
    auto s = hodp::match(l2, l1);
    if (!s) return false;
    std::set<std::string> targets;
    for (auto& [x, t] : *s) {
        if (!t->is_var() || !targets.insert(t->name).second) return false;
    }
    for (auto& v : hodp::free_vars(r2))
        if (!s->count(v->name)) return false;
    return hodp::alpha_equal(hodp::apply_subst(r2, *s), r1);
}

inline hodp::AFS prepared(const std::string& name) { return hodp::classify(hodp::complete(load(name))); }

// Random well-typed closed term of type t over the user signature, roughly
// `size` symbols.  Bound variables are introduced for functional arguments.
struct TermGenerator {
    const hodp::AFS& afs;
    std::mt19937& rng;
    int counter = 0;

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

    hodp::Term gen(hodp::Type t, int& budget, std::vector<hodp::Term>& scope)
    {
        using namespace hodp;
        if (!t->is_base()) {
            Term x = mk_var("z" + std::to_string(counter++), t->left);
            scope.push_back(x);
            Term body = gen(t->right, budget, scope);
            scope.pop_back();
            return mk_lam(x, body);
        }
        std::vector<std::function<Term()>> options;
        for (auto& v : scope) {
            if (result_base(v->type) != t) continue;
            options.push_back([&, v] {
                Term out = v;
                for (Type a : arg_types(v->type)) out = mk_app(out, gen(a, budget, scope));
                return out;
            });
        }
        for (auto& f : afs.signature) {
            if (result_base(f->output) != t) continue;
            int width = static_cast<int>(f->inputs.size() + arg_types(f->output).size());
            if (width > 0 && budget <= 0) continue;
            options.push_back([&, f] {
                --budget;
                std::vector<Term> args;
                for (Type a : f->inputs) args.push_back(gen(a, budget, scope));
                Term out = mk_fun(f, args);
                for (Type a : arg_types(f->output)) out = mk_app(out, gen(a, budget, scope));
                return out;
            });
        }
        if (options.empty()) return mk_fun(fresh_constant(t), {});
        return options[pick(static_cast<int>(options.size()))]();
    }

    hodp::Term gen(hodp::Type t, int size)
    {
        std::vector<hodp::Term> scope;
        return gen(t, size, scope);
    }
};

}  // namespace testing_support
