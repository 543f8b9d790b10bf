#include "hodp/selection.hpp"

#include <functional>
#include <map>

namespace hodp {

bool TypedSymbol::operator<(const TypedSymbol& o) const
{
    if (head != o.head) return head < o.head;
    if (name != o.name) return name < o.name;
    return to_string(type) < to_string(o.type);
}

bool TypedSymbol::operator==(const TypedSymbol& o) const
{
    return head == o.head && name == o.name && type == o.type;
}

std::string to_string(const TypedSymbol& a)
{
    std::string h = a.head == TypedSymbol::Head::Abs ? "ABS" : a.head == TypedSymbol::Head::Var ? "VAR" : a.name;
    return "<" + h + ", " + to_string(a.type) + ">";
}

namespace {

void symb_rec(const Term& t, std::set<TypedSymbol>& out)
{
    if (t->is_abs()) {
        out.insert({TypedSymbol::Head::Abs, "", t->type});
        symb_rec(t->kids[0], out);
        return;
    }
    Term h = head(t);
    auto args = app_args(t);
    if (h->is_fun()) {
        out.insert({TypedSymbol::Head::Fn, h->sym->name, t->type});
        for (auto& k : h->kids) symb_rec(k, out);
    } else if (h->kind == TermKind::BVar || (h->is_var() && !args.empty())) {
        out.insert({TypedSymbol::Head::Var, "", t->type});
    } else if (h->is_abs()) {
        symb_rec(h, out);
    }
    for (auto& a : args) symb_rec(a, out);
}

}  // namespace

std::set<TypedSymbol> symb(const Term& s)
{
    std::set<TypedSymbol> out;
    symb_rec(s, out);
    return out;
}

bool has_form(const Term& r, const TypedSymbol& a)
{
    if (r->type != a.type) return false;
    Term h = head(r);
    if (h->is_var() || h->kind == TermKind::BVar) return true;
    if (a.head == TypedSymbol::Head::Abs) return r->is_abs();
    if (a.head == TypedSymbol::Head::Fn) return h->is_fun() && h->sym->name == a.name;
    return false;
}

namespace {

// Closes `syms` under ⊑_fo and records which rules were reached.
void close_formative(std::set<TypedSymbol>& syms, const std::vector<Rule>& rplus, std::vector<bool>& used)
{
    used.assign(rplus.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < rplus.size(); ++i) {
            if (used[i]) continue;
            bool hit = false;
            for (auto& a : syms)
                if (has_form(rplus[i].rhs, a)) {
                    hit = true;
                    break;
                }
            if (!hit) continue;
            used[i] = true;
            changed = true;
            for (auto& b : symb(rplus[i].lhs)) syms.insert(b);
        }
    }
}

}  // namespace

std::set<TypedSymbol> formative_symbols(const Term& s, const std::vector<Rule>& rplus)
{
    auto syms = symb(s);
    std::vector<bool> used;
    close_formative(syms, rplus, used);
    return syms;
}

std::vector<Rule> formative_rules_of(const Term& s, const std::vector<Rule>& rplus)
{
    auto syms = symb(s);
    std::vector<bool> used;
    close_formative(syms, rplus, used);
    std::vector<Rule> out;
    for (std::size_t i = 0; i < rplus.size(); ++i)
        if (used[i]) out.push_back(rplus[i]);
    return out;
}

std::vector<Rule> formative_rules(const std::vector<DependencyPair>& ps, const AFS& afs)
{
    if (!afs.local) throw Error(Error::Kind::NotLocal, "formative rules require a local AFS");
    auto rplus = build_rplus(afs);
    std::set<TypedSymbol> syms;
    for (auto& p : ps)
        for (auto& a : spine_args(p.lhs))
            for (auto& b : symb(a)) syms.insert(b);
    std::vector<bool> used;
    close_formative(syms, rplus, used);
    std::vector<Rule> out;
    for (std::size_t i = 0; i < rplus.size(); ++i)
        if (used[i]) out.push_back(rplus[i]);
    return out;
}

bool is_risky(const Term& s)
{
    if (s->is_app() && s->kids[0]->is_var()) return true;
    for (auto& k : s->kids)
        if (is_risky(k)) return true;
    return false;
}

namespace {

void symbol_names(const Term& t, std::set<std::string>& out)
{
    if (t->is_fun() && t->sym->kind != SymKind::Fresh && t->sym->kind != SymKind::Extension)
        out.insert(t->sym->base);
    for (auto& k : t->kids) symbol_names(k, out);
}

std::string root_name(const Rule& r)
{
    Term h = head(r.lhs);
    return h->is_fun() ? h->sym->base : "";
}

}  // namespace

UsableRules usable_rules(const std::vector<DependencyPair>& ps, const std::vector<Rule>& base)
{
    UsableRules out;
    if (ps.empty()) return out;
    auto everything = [&] {
        out.all = true;
        out.rules = base;
        return out;
    };
    if (is_collapsing(ps)) return everything();

    // f ⊒_us g, with "wild" symbols reaching every symbol.
    std::map<std::string, std::set<std::string>> succ;
    std::set<std::string> wild;
    for (auto& r : base) {
        std::string f = root_name(r);
        symbol_names(r.rhs, succ[f]);
        bool functional = !r.rhs->type->is_base() && (r.rhs->is_abs() || r.rhs->is_var());
        if (is_risky(r.rhs) || functional) wild.insert(f);
    }

    std::set<std::string> seeds;
    for (auto& p : ps) {
        Term h = head(p.rhs);
        if (h->is_fun()) seeds.insert(h->sym->base);
        for (auto& a : spine_args(p.rhs)) {
            if (is_risky(a)) return everything();
            symbol_names(a, seeds);
        }
    }
    std::set<std::string> reach;
    std::vector<std::string> todo(seeds.begin(), seeds.end());
    while (!todo.empty()) {
        std::string f = todo.back();
        todo.pop_back();
        if (!reach.insert(f).second) continue;
        if (wild.count(f)) return everything();
        for (auto& g : succ[f]) todo.push_back(g);
    }
    for (auto& r : base)
        if (reach.count(root_name(r))) out.rules.push_back(r);
    return out;
}

}  // namespace hodp
