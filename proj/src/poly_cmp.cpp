#include <algorithm>
#include <set>
#include <unordered_map>

#include "hodp/poly.hpp"

namespace hodp::poly {

namespace {

struct Overflow {};

constexpr std::size_t kMaxBranches = 2048;

using Mono = std::vector<int>;       // sorted atom ids, with repetition
using Poly = std::map<Mono, Nat>;    // empty poly = 0
using NF = std::vector<Poly>;        // max of polys

int canon_id(int depth, int j) { return -1 - (depth * 100 + j); }

}  // namespace

struct Comparator::Impl {
    struct Atom {
        bool is_call = false;
        int id = 0;
        std::vector<Poly> base;  // base arguments, by position (empty for functional ones)
        std::vector<NF> fun;     // functional arguments, by position (empty for base ones)
        std::vector<bool> is_fun;
    };
    std::vector<Atom> atoms;
    std::unordered_map<std::string, int> index;
    std::set<std::pair<int, int>> hyps;  // a ≥ b

    std::string key(const Poly& p) const
    {
        std::string k = "{";
        for (auto& [m, c] : p) {
            k += std::to_string(c) + ":";
            for (int a : m) k += std::to_string(a) + ".";
            k += ";";
        }
        return k + "}";
    }
    std::string key(const NF& n) const
    {
        std::vector<std::string> ks;
        for (auto& p : n) ks.push_back(key(p));
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        std::string k = "[";
        for (auto& s : ks) k += s + "|";
        return k + "]";
    }

    int intern(Atom a)
    {
        std::string k = a.is_call ? "C" + std::to_string(a.id) + "(" : "S" + std::to_string(a.id);
        if (a.is_call) {
            for (std::size_t i = 0; i < a.is_fun.size(); ++i) k += (a.is_fun[i] ? key(a.fun[i]) : key(a.base[i])) + ",";
            k += ")";
        }
        auto it = index.find(k);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(atoms.size());
        atoms.push_back(std::move(a));
        index.emplace(k, id);
        return id;
    }

    static Poly padd(const Poly& a, const Poly& b)
    {
        Poly r = a;
        for (auto& [m, c] : b) r[m] += c;
        return r;
    }
    static Poly pmul(const Poly& a, const Poly& b)
    {
        Poly r;
        for (auto& [m1, c1] : a)
            for (auto& [m2, c2] : b) {
                Mono m = m1;
                m.insert(m.end(), m2.begin(), m2.end());
                std::sort(m.begin(), m.end());
                r[m] += c1 * c2;
            }
        return r;
    }
    static NF dedupe(NF n)
    {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
        if (n.size() > kMaxBranches) throw Overflow{};
        return n;
    }
    template <class F>
    static NF cross(const NF& a, const NF& b, F f)
    {
        if (a.size() * b.size() > kMaxBranches) throw Overflow{};
        NF r;
        for (auto& x : a)
            for (auto& y : b) r.push_back(f(x, y));
        return dedupe(std::move(r));
    }

    NF norm(const ExprP& e, int depth)
    {
        switch (e->k) {
        case Expr::K::Const: {
            Poly p;
            if (e->c) p[{}] = e->c;
            return {p};
        }
        case Expr::K::Slot: {
            Atom a;
            a.id = e->id;
            return {Poly{{{intern(a)}, 1}}};
        }
        case Expr::K::Add: return cross(norm(e->a, depth), norm(e->b, depth), padd);
        case Expr::K::Mul: return cross(norm(e->a, depth), norm(e->b, depth), pmul);
        case Expr::K::Max: {
            NF a = norm(e->a, depth), b = norm(e->b, depth);
            a.insert(a.end(), b.begin(), b.end());
            return dedupe(std::move(a));
        }
        case Expr::K::Call: {
            // Base arguments: max is pushed outwards (pointwise, F(max(a,b)) = max(F(a),F(b))).
            std::vector<NF> argn;
            std::vector<bool> is_fun;
            for (auto& v : e->args) {
                if (v.params.empty()) {
                    argn.push_back(norm(v.body, depth));
                    is_fun.push_back(false);
                    continue;
                }
                std::map<int, Value> m;
                for (std::size_t j = 0; j < v.params.size(); ++j) m[v.params[j]] = eta(canon_id(depth, j), v.ptypes[j]);
                argn.push_back(norm(subst(v.body, m), depth + 1));
                is_fun.push_back(true);
            }
            NF out;
            std::vector<std::size_t> pick(argn.size(), 0);
            while (true) {
                Atom a;
                a.is_call = true;
                a.id = e->id;
                a.is_fun = is_fun;
                a.base.resize(argn.size());
                a.fun.resize(argn.size());
                for (std::size_t i = 0; i < argn.size(); ++i) {
                    if (is_fun[i]) a.fun[i] = argn[i];
                    else a.base[i] = argn[i][pick[i]];
                }
                out.push_back(Poly{{{intern(std::move(a))}, 1}});
                if (out.size() > kMaxBranches) throw Overflow{};
                std::size_t i = 0;
                for (; i < argn.size(); ++i) {
                    if (is_fun[i]) continue;
                    if (++pick[i] < argn[i].size()) break;
                    pick[i] = 0;
                }
                if (i == argn.size()) break;
            }
            return dedupe(std::move(out));
        }
        }
        return {Poly{}};
    }

    bool atom_geq(int a, int b, int fuel = 4)
    {
        if (a == b) return true;
        if (hyps.count({a, b})) return true;
        const Atom& x = atoms[a];
        const Atom& y = atoms[b];
        if (x.is_call && y.is_call && x.id == y.id && x.is_fun.size() == y.is_fun.size()) {
            bool ok = true;
            for (std::size_t i = 0; ok && i < x.is_fun.size(); ++i) {
                if (x.is_fun[i]) ok = nf_geq(x.fun[i], y.fun[i]);
                else ok = poly_geq(x.base[i], y.base[i]);
            }
            if (ok) return true;
        }
        if (fuel > 0)
            for (auto& [h1, h2] : hyps)
                if (h1 == a && h2 != b && atom_geq(h2, b, fuel - 1)) return true;
        return false;
    }

    bool mono_geq(const Mono& l, const Mono& r)
    {
        if (l.size() != r.size()) return false;
        if (l == r) return true;
        std::vector<bool> used(l.size(), false);
        std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
            if (i == r.size()) return true;
            for (std::size_t j = 0; j < l.size(); ++j) {
                if (used[j] || !atom_geq(l[j], r[i])) continue;
                used[j] = true;
                if (go(i + 1)) return true;
                used[j] = false;
            }
            return false;
        };
        return go(0);
    }

    bool poly_geq(const Poly& l, const Poly& r)
    {
        Poly rest = l;
        std::vector<std::pair<Mono, Nat>> todo;
        for (auto& [m, c] : r) {
            auto it = rest.find(m);
            Nat take = it == rest.end() ? 0 : std::min(it->second, c);
            if (take) it->second -= take;
            if (c > take) todo.push_back({m, c - take});
        }
        for (auto& [m, c] : todo) {
            if (m.empty()) return false;  // constants are only covered by constants
            Nat need = c;
            for (auto& [lm, lc] : rest) {
                if (!lc || !need || !mono_geq(lm, m)) continue;
                Nat take = std::min(lc, need);
                lc -= take;
                need -= take;
            }
            if (need) return false;
        }
        return true;
    }

    bool nf_geq(const NF& l, const NF& r)
    {
        for (auto& rb : r) {
            bool covered = false;
            for (auto& lb : l)
                if (poly_geq(lb, rb)) {
                    covered = true;
                    break;
                }
            if (!covered) return false;
        }
        return true;
    }

    void top_atoms(const NF& n, std::set<int>& out) const
    {
        for (auto& p : n)
            for (auto& [m, c] : p)
                for (int a : m) {
                    out.insert(a);
                    for (auto& b : atoms[a].base)
                        for (auto& [m2, c2] : b) out.insert(m2.begin(), m2.end());
                }
    }

    bool split(const NF& l, const NF& r, const std::vector<std::pair<int, int>>& cands, int depth)
    {
        if (nf_geq(l, r)) return true;
        if (depth == 0) return false;
        for (auto [a, b] : cands) {
            if (hyps.count({a, b}) || hyps.count({b, a})) continue;
            auto saved = hyps;
            hyps.insert({a, b});
            bool ok = split(l, r, cands, depth - 1);
            hyps = saved;
            if (!ok) continue;
            hyps.insert({b, a});
            ok = split(l, r, cands, depth - 1);
            hyps = saved;
            if (ok) return true;
        }
        return false;
    }
};

bool Comparator::geq(const ExprP& l, const ExprP& r)
{
    Impl im;
    try {
        NF nl = im.norm(l, 0);
        NF nr = im.norm(r, 0);
        if (im.nf_geq(nl, nr)) return true;
        if (split_depth_ <= 0) return false;
        std::set<int> as;
        im.top_atoms(nl, as);
        im.top_atoms(nr, as);
        std::vector<int> v(as.begin(), as.end());
        std::vector<std::pair<int, int>> cands;
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = i + 1; j < v.size(); ++j) cands.push_back({v[i], v[j]});
        if (cands.size() > 40) cands.resize(40);
        return im.split(nl, nr, cands, split_depth_);
    } catch (const Overflow&) {
        return false;
    }
}

namespace {

std::pair<ExprP, ExprP> common_bodies(const Value& l, const Value& r)
{
    if (l.ptypes != r.ptypes) throw Error(Error::Kind::TypeMismatch, "comparing values of different types");
    std::vector<Value> ps;
    for (Type t : l.ptypes) ps.push_back(eta(fresh_slot(), t));
    return {poly::apply(l, ps).body, poly::apply(r, ps).body};
}

}  // namespace

bool Comparator::geq(const Value& l, const Value& r)
{
    auto [a, b] = common_bodies(l, r);
    return geq(a, b);
}

bool Comparator::gt(const Value& l, const Value& r)
{
    auto [a, b] = common_bodies(l, r);
    return gt(a, b);
}

namespace {

std::pair<Value, Value> interpret_pair(const Constraint& c, const Interpretation& I)
{
    std::map<std::string, int> vars;
    Value l = interpret(c.lhs, I, vars);
    Value r = interpret(c.rhs, I, vars);
    return {l, r};
}

}  // namespace

bool orient_weak(const Constraint& c, const Interpretation& I)
{
    auto [l, r] = interpret_pair(c, I);
    Comparator cmp;
    return cmp.geq(l, r);
}

bool orient_strict(const Constraint& c, const Interpretation& I)
{
    auto [l, r] = interpret_pair(c, I);
    Comparator cmp;
    return cmp.gt(l, r);
}

bool s_condition(const Sym& f, const Value& j)
{
    (void)f;
    Comparator cmp(0);
    for (std::size_t i = 0; i < j.params.size(); ++i) {
        std::vector<Value> args;
        Value probe;
        for (std::size_t k = 0; k < j.params.size(); ++k) {
            if (k == i) {
                probe = eta(fresh_slot(), j.ptypes[k]);
                args.push_back(probe);
            } else {
                args.push_back(zero(j.ptypes[k]));
            }
        }
        if (!cmp.geq(poly::apply(j, args).body, at_zero(probe))) return false;
    }
    return true;
}

}  // namespace hodp::poly
