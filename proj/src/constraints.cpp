#include "hodp/constraints.hpp"

#include <map>

namespace hodp {

std::string to_string(Mode m)
{
    switch (m) {
    case Mode::NonCollapsing: return "non-collapsing";
    case Mode::Basic: return "basic";
    case Mode::LocalCollapsing: return "local-collapsing";
    }
    return "?";
}

namespace {

void collect_symbols(const Term& t, std::map<std::string, Sym>& out)
{
    if (t->is_fun()) out.emplace(t->sym->name, t->sym);
    for (auto& k : t->kids) collect_symbols(k, out);
}

}  // namespace

std::vector<Sym> ConstraintSet::symbols() const
{
    std::map<std::string, Sym> m;
    for (auto& c : all()) {
        collect_symbols(c.lhs, m);
        collect_symbols(c.rhs, m);
    }
    std::vector<Sym> out;
    for (auto& [n, f] : m) out.push_back(f);
    return out;
}

std::vector<Constraint> ConstraintSet::all() const
{
    std::vector<Constraint> out = strict;
    out.insert(out.end(), weak.begin(), weak.end());
    return out;
}

Term flatten_lhs(const Term& l, std::set<std::string>& avoid)
{
    Term out = l;
    for (Type t : arg_types(l->type)) {
        std::string n = fresh_name("x", avoid);
        avoid.insert(n);
        out = mk_app(out, mk_var(n, t));
    }
    return out;
}

Term flatten_rhs(const Term& p)
{
    Term out = p;
    for (Type t : arg_types(p->type)) out = mk_app(out, mk_fun(fresh_constant(t), {}));
    return out;
}

Sym pairing_symbol(Type t)
{
    return make_symbol("!p{" + to_string(t) + "}", {t, t}, t, SymKind::Extension, "!p");
}

bool is_pairing(const Sym& f) { return f->kind == SymKind::Extension && f->base == "!p"; }

namespace {

void symbols_below_abs(const Term& t, bool below, std::set<std::string>& out)
{
    if (t->is_fun() && below && t->sym->kind == SymKind::Plain) out.insert(t->sym->name);
    bool b = below || t->is_abs();
    for (auto& k : t->kids) symbols_below_abs(k, b, out);
}

std::vector<Term> fresh_args(const Sym& f)
{
    std::vector<Term> xs;
    for (int i = 0; i < f->arity(); ++i) xs.push_back(mk_var("x" + std::to_string(i + 1), f->inputs[i]));
    return xs;
}

Constraint rule_constraint(const Rule& r, const std::string& origin)
{
    return {r.lhs, r.rhs, 0, origin};
}

}  // namespace

ConstraintSet build_constraints(const std::vector<DependencyPair>& scc, const AFS& afs)
{
    ConstraintSet cs;
    bool collapsing = is_collapsing(scc);
    cs.mode = !collapsing ? Mode::NonCollapsing : afs.local ? Mode::LocalCollapsing : Mode::Basic;

    if (cs.mode != Mode::Basic && afs.local) cs.formative = formative_rules(scc, afs);

    for (auto& p : scc) {
        std::set<std::string> avoid;
        collect_var_names(p.lhs, avoid);
        collect_var_names(p.rhs, avoid);
        Term rhs = cs.mode == Mode::LocalCollapsing ? tag(p.rhs) : p.rhs;
        cs.strict.push_back({flatten_lhs(p.lhs, avoid), flatten_rhs(rhs), p.index, "pair " + std::to_string(p.index)});
    }

    switch (cs.mode) {
    case Mode::NonCollapsing: {
        auto ur = usable_rules(scc, afs.local ? cs.formative : afs.rules);
        cs.usable = ur.rules;
        cs.usable_all = ur.all;
        cs.usable_applied = true;
        for (auto& r : cs.usable) cs.weak.push_back(rule_constraint(r, "rule " + r.label));
        std::set<std::string> seen;
        auto add_pairing = [&](Type t) {
            if (!seen.insert(to_string(t)).second) return;
            Sym p = pairing_symbol(t);
            Term x = mk_var("x", t), y = mk_var("y", t);
            cs.weak.push_back({mk_fun(p, {x, y}), x, 0, "pairing"});
            cs.weak.push_back({mk_fun(p, {x, y}), y, 0, "pairing"});
        };
        for (auto& f : afs.signature) {
            for (Type t : f->inputs) add_pairing(t);
            add_pairing(f->output);
        }
        break;
    }
    case Mode::Basic: {
        for (auto& f : afs.signature) cs.S.insert(f->name);
        for (auto& r : afs.rules) cs.weak.push_back(rule_constraint(r, "rule " + r.label));
        for (auto& f : afs.signature) {
            if (!afs.is_defined(f)) continue;
            auto xs = fresh_args(f);
            cs.weak.push_back({mk_fun(f, xs), mk_fun(marked(f), xs), 0, "mark " + f->name});
        }
        break;
    }
    case Mode::LocalCollapsing: {
        std::set<std::string> below;
        for (auto& r : cs.formative) symbols_below_abs(r.rhs, false, below);
        for (auto& p : scc) symbols_below_abs(p.rhs, false, below);
        for (auto& n : below) cs.S.insert(n + "-");
        for (auto& r : cs.formative) {
            Rule t = r;
            t.rhs = tag(r.rhs);
            cs.weak.push_back(rule_constraint(t, "rule " + r.label));
        }
        for (auto& n : below) {
            Sym f = afs.symbol(n);
            Sym ft = tagged(f);
            auto xs = fresh_args(f);
            cs.weak.push_back({mk_fun(ft, xs), mk_fun(f, xs), 0, "untag " + ft->name});
            if (afs.is_defined(f))
                cs.weak.push_back({mk_fun(ft, xs), mk_fun(marked(f), xs), 0, "untag-mark " + ft->name});
        }
        break;
    }
    }
    return cs;
}

}  // namespace hodp
