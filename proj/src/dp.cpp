#include "hodp/dp.hpp"

namespace hodp {

std::string to_string(const DependencyPair& p)
{
    return to_string(p.lhs) + " ~> " + to_string(p.rhs);
}

std::vector<Term> spine_args(const Term& t)
{
    Term h = head(t);
    std::vector<Term> out;
    if (h->is_fun()) out = h->kids;
    for (auto& a : app_args(t)) out.push_back(a);
    return out;
}

std::vector<Term> candidate_terms(const Term& r, const AFS& afs)
{
    std::vector<Term> out;
    for (auto& u : subterms_with(r, [](Type ty) { return mk_fun(fresh_constant(ty), {}); })) {
        Term h = head(u);
        if (h->is_fun() && h->sym->kind == SymKind::Plain && afs.is_defined(h->sym))
            out.push_back(u);
        else if (h->is_var() && u->is_app())
            out.push_back(u);
    }
    return out;
}

bool is_collapsing(const std::vector<DependencyPair>& ps)
{
    for (auto& p : ps)
        if (p.collapsing) return true;
    return false;
}

namespace {

bool rhs_collapses(const Term& rhs)
{
    Term h = head(rhs);
    return h->is_var() || h->kind == TermKind::BVar;
}

}  // namespace

DPProblem dependency_pairs(const AFS& afs, bool allow_static)
{
    DPProblem out;
    auto push = [&](Term l, Term r, PairKind kind, const Rule& rule) {
        DependencyPair p{l, r, kind, rhs_collapses(r), rule.label, 0};
        if (allow_static && afs.spfp && p.collapsing) {
            out.static_mode = true;
            return;
        }
        p.index = static_cast<int>(out.pairs.size()) + 1;
        out.pairs.push_back(p);
    };
    for (auto& rule : afs.rules) {
        TermSet strict;
        auto subs = subterms(rule.lhs);
        for (std::size_t i = 1; i < subs.size(); ++i) strict.insert(subs[i]);
        Term ml = mark(rule.lhs, afs.defined);
        for (auto& p : candidate_terms(rule.rhs, afs)) {
            if (strict.count(p)) continue;
            push(ml, mark(p, afs.defined), PairKind::Candidate, rule);
        }
        if (rule.lhs->type->is_base()) continue;
        Term h = head(rule.rhs);
        bool ok = h->is_var() || (h->is_fun() && afs.is_defined(h->sym));
        if (!ok) continue;
        std::set<std::string> used;
        collect_var_names(rule.lhs, used);
        collect_var_names(rule.rhs, used);
        Term l = rule.lhs, r = rule.rhs;
        for (Type t : arg_types(rule.lhs->type)) {
            std::string n = fresh_name("y", used);
            used.insert(n);
            Term y = mk_var(n, t);
            l = mk_app(l, y);
            r = mk_app(r, y);
            push(l, r, PairKind::AppliedHead, rule);
        }
    }
    out.collapsing_set = is_collapsing(out.pairs);
    return out;
}

Term tag(const Term& t, const std::set<std::string>& z)
{
    switch (t->kind) {
    case TermKind::Var:
    case TermKind::BVar: return t;
    case TermKind::Abs: return mk_abs_raw(t->name, t->binder, tag(t->kids[0], z));
    case TermKind::App: return mk_app(tag(t->kids[0], z), tag(t->kids[1], z));
    case TermKind::Fun: {
        std::vector<Term> kids;
        for (auto& k : t->kids) kids.push_back(tag(k, z));
        if (t->sym->kind != SymKind::Plain) return mk_fun(t->sym, kids);
        bool meets = t->loose > 0;
        if (!meets && !z.empty())
            for (auto& v : free_vars(t))
                if (z.count(v->name)) meets = true;
        return mk_fun(meets ? tagged(t->sym) : t->sym, kids);
    }
    }
    return t;
}

Term untag(const Term& t)
{
    switch (t->kind) {
    case TermKind::Var:
    case TermKind::BVar: return t;
    case TermKind::Abs: return mk_abs_raw(t->name, t->binder, untag(t->kids[0]));
    case TermKind::App: return mk_app(untag(t->kids[0]), untag(t->kids[1]));
    case TermKind::Fun: {
        std::vector<Term> kids;
        for (auto& k : t->kids) kids.push_back(untag(k));
        return mk_fun(t->sym->kind == SymKind::Tagged ? plain(t->sym) : t->sym, kids);
    }
    }
    return t;
}

namespace {

void tagged_symbols(const Term& t, std::map<std::string, Sym>& out)
{
    if (t->is_fun() && t->sym->kind == SymKind::Tagged) out.emplace(t->sym->name, t->sym);
    for (auto& k : t->kids) tagged_symbols(k, out);
}

}  // namespace

Rule untag_rule(const Sym& f)
{
    std::vector<Term> xs;
    for (int i = 0; i < f->arity(); ++i) xs.push_back(mk_var("x" + std::to_string(i + 1), f->inputs[i]));
    return {mk_fun(f, xs), mk_fun(plain(f), xs), RuleOrigin::Untag, "untag " + f->name};
}

std::vector<Rule> build_rtag(const std::vector<Rule>& rules)
{
    std::vector<Rule> out;
    std::map<std::string, Sym> seen;
    for (auto& r : rules) {
        Rule t = r;
        t.rhs = tag(r.rhs);
        tagged_symbols(t.rhs, seen);
        out.push_back(t);
    }
    for (auto& [name, f] : seen) out.push_back(untag_rule(f));
    return out;
}

}  // namespace hodp
