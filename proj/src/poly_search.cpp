#include <chrono>
#include <unordered_map>

#include "hodp/poly.hpp"

namespace hodp::poly {

namespace {

double now_seconds()
{
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct Deadline {};

// One summand of a template, without its coefficient.
struct Component {
    enum class K { Const, Flat, Apply, Nested } k = K::Const;
    int param = 0;
    int form = -1;  // linear form: a base parameter index, or -1 for the sum of all base parameters
};

struct Template {
    std::vector<Component> comps;
    std::vector<Type> ptypes;
    std::vector<int> base;  // indices of base parameters

    Value build(const std::vector<int>& coef) const
    {
        Value v;
        std::vector<Value> ps;
        for (Type t : ptypes) {
            int p = fresh_slot();
            v.params.push_back(p);
            v.ptypes.push_back(t);
            ps.push_back(eta(p, t));
        }
        auto form = [&](int f) {
            if (f >= 0) return ps[f].body;
            ExprP e = cnst(0);
            for (int b : base) e = add(e, ps[b].body);
            return e;
        };
        // p_i applied to L at base positions and 0 at functional ones.
        auto call_with = [&](int i, const ExprP& l) {
            std::vector<Value> args;
            for (Type a : arg_types(ptypes[i])) args.push_back(a->is_base() ? Value{{}, {}, l} : zero(a));
            return poly::apply(ps[i], args).body;
        };
        ExprP body = cnst(0);
        for (std::size_t c = 0; c < comps.size(); ++c) {
            if (!coef[c]) continue;
            const Component& k = comps[c];
            ExprP e;
            switch (k.k) {
            case Component::K::Const: e = cnst(1); break;
            case Component::K::Flat: e = at_zero(ps[k.param]); break;
            case Component::K::Apply: e = call_with(k.param, form(k.form)); break;
            case Component::K::Nested: e = call_with(k.param, call_with(k.param, form(k.form))); break;
            }
            body = add(body, mul(cnst(coef[c]), e));
        }
        v.body = body;
        return v;
    }
};

Template make_template(const Sym& f)
{
    Template t;
    t.ptypes = f->inputs;
    for (Type a : arg_types(f->output)) t.ptypes.push_back(a);
    for (std::size_t i = 0; i < t.ptypes.size(); ++i)
        if (t.ptypes[i]->is_base()) t.base.push_back(static_cast<int>(i));
    t.comps.push_back({Component::K::Const, 0, -1});
    for (std::size_t i = 0; i < t.ptypes.size(); ++i) t.comps.push_back({Component::K::Flat, static_cast<int>(i), -1});
    std::vector<int> forms(t.base.begin(), t.base.end());
    if (t.base.size() >= 2) forms.push_back(-1);
    for (std::size_t i = 0; i < t.ptypes.size(); ++i) {
        Type ty = t.ptypes[i];
        if (ty->is_base()) continue;
        auto as = arg_types(ty);
        bool any_base = false;
        for (Type a : as) any_base |= a->is_base();
        if (!any_base) continue;
        for (int l : forms) t.comps.push_back({Component::K::Apply, static_cast<int>(i), l});
        if (as.size() == 1) {
            for (int l : forms) t.comps.push_back({Component::K::Nested, static_cast<int>(i), l});
        }
    }
    return t;
}

struct SymbolSpace {
    Sym sym;
    Template tmpl;
    bool in_s = false;
    std::vector<std::vector<std::vector<int>>> by_weight;  // weight -> coefficient vectors
    std::vector<std::vector<Value>> values;

    void ensure(int w, int bound)
    {
        while (static_cast<int>(by_weight.size()) <= w) {
            int target = static_cast<int>(by_weight.size());
            std::vector<std::vector<int>> out;
            std::vector<int> coef(tmpl.comps.size(), 0);
            std::function<void(std::size_t, int)> go = [&](std::size_t i, int left) {
                if (i == coef.size()) {
                    if (left == 0) out.push_back(coef);
                    return;
                }
                for (int c = 0; c <= std::min(bound, left); ++c) {
                    coef[i] = c;
                    go(i + 1, left - c);
                }
                coef[i] = 0;
            };
            go(0, target);
            std::vector<std::vector<int>> kept;
            std::vector<Value> vals;
            for (auto& c : out) {
                Value v = tmpl.build(c);
                if (in_s && !s_condition(sym, v)) continue;
                kept.push_back(c);
                vals.push_back(v);
            }
            by_weight.push_back(std::move(kept));
            values.push_back(std::move(vals));
        }
    }
};

void collect_syms(const Term& t, std::vector<Sym>& out, std::set<std::string>& seen)
{
    if (t->is_fun() && t->sym->kind != SymKind::Fresh && !is_pairing(t->sym) && seen.insert(t->sym->name).second)
        out.push_back(t->sym);
    for (auto& k : t->kids) collect_syms(k, out, seen);
}

void collect_names(const Term& t, std::set<std::string>& out)
{
    if (t->is_fun()) out.insert(t->sym->name);
    for (auto& k : t->kids) collect_names(k, out);
}

class Searcher {
public:
    Searcher(const ConstraintSet& cs, const SearchOptions& opt) : cs_(cs), opt_(opt)
    {
        all_ = cs.all();
        std::set<std::string> seen;
        std::vector<Sym> syms;
        for (auto& c : all_) {
            collect_syms(c.lhs, syms, seen);
            collect_syms(c.rhs, syms, seen);
        }
        for (auto& s : syms) {
            SymbolSpace sp;
            sp.sym = s;
            sp.tmpl = make_template(s);
            sp.in_s = cs.S.count(s->name) > 0;
            pos_[s->name] = static_cast<int>(space_.size());
            space_.push_back(std::move(sp));
        }
        check_at_.assign(space_.size() + 1, {});
        for (std::size_t i = 0; i < all_.size(); ++i) {
            std::set<std::string> names;
            collect_names(all_[i].lhs, names);
            collect_names(all_[i].rhs, names);
            int last = -1;
            std::vector<int> members;
            for (auto& n : names) {
                auto it = pos_.find(n);
                if (it == pos_.end()) continue;
                last = std::max(last, it->second);
                members.push_back(it->second);
            }
            members_.push_back(members);
            check_at_[last + 1].push_back(static_cast<int>(i));
        }
        choice_.assign(space_.size(), {-1, -1});
    }

    std::optional<PolyResult> run()
    {
        try {
            for (auto ci : check_at_[0])
                if (!weak_ok(ci)) return std::nullopt;
            for (int w = 0; w <= opt_.max_weight; ++w) {
                if (dfs(0, w)) return result_;
            }
        } catch (const Deadline&) {
        }
        return std::nullopt;
    }

private:
    const ConstraintSet& cs_;
    SearchOptions opt_;
    std::vector<Constraint> all_;
    std::vector<SymbolSpace> space_;
    std::map<std::string, int> pos_;
    std::vector<std::vector<int>> check_at_;  // by (last symbol position + 1)
    std::vector<std::vector<int>> members_;
    std::vector<std::pair<int, int>> choice_;  // (weight, index) per symbol
    std::unordered_map<std::string, bool> memo_;
    PolyResult result_;
    long nodes_ = 0;

    Interpretation current(const std::vector<int>& which) const
    {
        Interpretation I;
        for (int s : which) {
            auto [w, k] = choice_[s];
            I.J[space_[s].sym->name] = space_[s].values[w][k];
        }
        return I;
    }

    std::string memo_key(int ci, char tag) const
    {
        std::string k(1, tag);
        k += std::to_string(ci);
        for (int s : members_[ci]) k += "/" + std::to_string(choice_[s].first) + "." + std::to_string(choice_[s].second);
        return k;
    }

    bool weak_ok(int ci)
    {
        std::string k = memo_key(ci, 'w');
        auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;
        bool ok = orient_weak(all_[ci], current(members_[ci]));
        memo_.emplace(k, ok);
        return ok;
    }

    bool strict_ok(int ci)
    {
        std::string k = memo_key(ci, 's');
        auto it = memo_.find(k);
        if (it != memo_.end()) return it->second;
        bool ok = orient_strict(all_[ci], current(members_[ci]));
        memo_.emplace(k, ok);
        return ok;
    }

    bool dfs(std::size_t k, int remaining)
    {
        if (opt_.deadline > 0 && (++nodes_ & 63) == 0 && now_seconds() > opt_.deadline) throw Deadline{};
        if (k == space_.size()) {
            if (remaining != 0) return false;
            std::vector<int> strict;
            for (std::size_t i = 0; i < all_.size(); ++i)
                if (all_[i].pair > 0 && strict_ok(static_cast<int>(i))) strict.push_back(all_[i].pair);
            if (strict.empty()) return false;
            std::vector<int> everyone(space_.size());
            for (std::size_t i = 0; i < space_.size(); ++i) everyone[i] = static_cast<int>(i);
            result_.I = current(everyone);
            result_.strict = strict;
            return true;
        }
        int lo = k + 1 == space_.size() ? remaining : 0;
        for (int w = lo; w <= remaining; ++w) {
            space_[k].ensure(w, opt_.coef_bound);
            for (std::size_t t = 0; t < space_[k].by_weight[w].size(); ++t) {
                choice_[k] = {w, static_cast<int>(t)};
                bool ok = true;
                for (int ci : check_at_[k + 1])
                    if (!weak_ok(ci)) {
                        ok = false;
                        break;
                    }
                if (ok && dfs(k + 1, remaining - w)) return true;
            }
        }
        choice_[k] = {-1, -1};
        return false;
    }
};

}  // namespace

std::optional<PolyResult> search(const ConstraintSet& cs, const SearchOptions& opt)
{
    Searcher s(cs, opt);
    return s.run();
}

}  // namespace hodp::poly
