#include "hodp/term.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace hodp {

// ---------------------------------------------------------------- symbols

Sym make_symbol(const std::string& name, std::vector<Type> inputs, Type output, SymKind kind,
                const std::string& base)
{
    auto s = std::make_shared<Symbol>();
    s->name = name;
    s->base = base.empty() ? name : base;
    s->kind = kind;
    s->inputs = std::move(inputs);
    s->output = output;
    return s;
}

Sym marked(const Sym& f)
{
    if (f->kind == SymKind::Marked) return f;
    return make_symbol(f->base + "#", f->inputs, f->output, SymKind::Marked, f->base);
}

Sym tagged(const Sym& f)
{
    if (f->kind == SymKind::Tagged) return f;
    return make_symbol(f->base + "-", f->inputs, f->output, SymKind::Tagged, f->base);
}

Sym plain(const Sym& f)
{
    if (f->kind == SymKind::Plain) return f;
    return make_symbol(f->base, f->inputs, f->output, SymKind::Plain, f->base);
}

Sym fresh_constant(Type t)
{
    std::string n = "!c{" + to_string(t) + "}";
    return make_symbol(n, {}, t, SymKind::Fresh, n);
}

// ---------------------------------------------------------------- construction

namespace {

std::size_t mix(std::size_t h, std::size_t v)
{
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

[[noreturn]] void ill_typed(const std::string& msg)
{
    throw Error(Error::Kind::IllTyped, msg);
}

}  // namespace

Term mk_var(const std::string& name, Type type)
{
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Var;
    n->type = type;
    n->name = name;
    n->hash = mix(std::hash<std::string>{}(name), type->hash);
    return n;
}

Term mk_bvar(int index, Type type)
{
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::BVar;
    n->type = type;
    n->index = index;
    n->hash = mix(0x51ed27, static_cast<std::size_t>(index));
    n->loose = index + 1;
    return n;
}

Term mk_abs_raw(const std::string& hint, Type binder, const Term& body)
{
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Abs;
    n->type = arrow(binder, body->type);
    n->name = hint;
    n->binder = binder;
    n->kids = {body};
    n->hash = mix(mix(0xab5, binder->hash), body->hash);
    n->size = body->size + 1;
    n->loose = std::max(0, body->loose - 1);
    return n;
}

namespace {

Term abstract_rec(const Term& t, const std::string& name, Type type, int depth)
{
    switch (t->kind) {
    case TermKind::Var:
        if (t->name == name && t->type == type) return mk_bvar(depth, type);
        return t;
    case TermKind::BVar:
        return t;
    case TermKind::Abs: {
        Term b = abstract_rec(t->kids[0], name, type, depth + 1);
        if (b == t->kids[0]) return t;
        return mk_abs_raw(t->name, t->binder, b);
    }
    case TermKind::App: {
        Term f = abstract_rec(t->kids[0], name, type, depth);
        Term a = abstract_rec(t->kids[1], name, type, depth);
        if (f == t->kids[0] && a == t->kids[1]) return t;
        return mk_app(f, a);
    }
    case TermKind::Fun: {
        std::vector<Term> args;
        bool changed = false;
        for (auto& k : t->kids) {
            args.push_back(abstract_rec(k, name, type, depth));
            changed = changed || args.back() != k;
        }
        if (!changed) return t;
        return mk_fun(t->sym, args);
    }
    }
    return t;
}

}  // namespace

Term mk_lam(const Term& x, const Term& body)
{
    if (!x->is_var()) ill_typed("abstraction over a non-variable");
    return mk_abs_raw(x->name, x->type, abstract_rec(body, x->name, x->type, 0));
}

Term mk_app(const Term& s, const Term& t)
{
    if (s->type->is_base())
        ill_typed("cannot apply " + to_string(s) + " of base type " + to_string(s->type));
    if (s->type->left != t->type)
        ill_typed("argument " + to_string(t) + " has type " + to_string(t->type) + ", expected " +
                  to_string(s->type->left));
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::App;
    n->type = s->type->right;
    n->kids = {s, t};
    n->hash = mix(mix(0xa99, s->hash), t->hash);
    n->size = s->size + t->size + 1;
    n->loose = std::max(s->loose, t->loose);
    return n;
}

Term mk_apps(Term s, const std::vector<Term>& args)
{
    for (auto& a : args) s = mk_app(s, a);
    return s;
}

Term mk_fun(const Sym& f, const std::vector<Term>& args)
{
    if (static_cast<int>(args.size()) != f->arity())
        ill_typed("symbol " + f->name + " expects " + std::to_string(f->arity()) + " arguments, got " +
                  std::to_string(args.size()));
    auto n = std::make_shared<TermNode>();
    n->kind = TermKind::Fun;
    n->type = f->output;
    n->sym = f;
    std::size_t h = std::hash<std::string>{}(f->name);
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i]->type != f->inputs[i])
            ill_typed("argument " + std::to_string(i + 1) + " of " + f->name + " has type " +
                      to_string(args[i]->type) + ", expected " + to_string(f->inputs[i]));
        h = mix(h, args[i]->hash);
        n->size += args[i]->size;
        n->loose = std::max(n->loose, args[i]->loose);
    }
    n->kids = args;
    n->hash = h;
    return n;
}

// ---------------------------------------------------------------- equality

bool alpha_equal(const Term& s, const Term& t)
{
    if (s == t) return true;
    if (s->hash != t->hash || s->kind != t->kind || s->type != t->type || s->size != t->size)
        return false;
    switch (s->kind) {
    case TermKind::Var: return s->name == t->name;
    case TermKind::BVar: return s->index == t->index;
    case TermKind::Abs: return s->binder == t->binder && alpha_equal(s->kids[0], t->kids[0]);
    case TermKind::App: return alpha_equal(s->kids[0], t->kids[0]) && alpha_equal(s->kids[1], t->kids[1]);
    case TermKind::Fun:
        if (s->sym->name != t->sym->name) return false;
        for (std::size_t i = 0; i < s->kids.size(); ++i)
            if (!alpha_equal(s->kids[i], t->kids[i])) return false;
        return true;
    }
    return false;
}

namespace {

int compare_terms(const Term& a, const Term& b)
{
    if (a == b) return 0;
    if (a->kind != b->kind) return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
    if (a->size != b->size) return a->size < b->size ? -1 : 1;
    if (a->type != b->type) {
        auto x = to_string(a->type), y = to_string(b->type);
        if (x != y) return x < y ? -1 : 1;
    }
    switch (a->kind) {
    case TermKind::Var: return a->name.compare(b->name);
    case TermKind::BVar: return a->index == b->index ? 0 : (a->index < b->index ? -1 : 1);
    case TermKind::Abs: return compare_terms(a->kids[0], b->kids[0]);
    case TermKind::App: {
        int c = compare_terms(a->kids[0], b->kids[0]);
        return c != 0 ? c : compare_terms(a->kids[1], b->kids[1]);
    }
    case TermKind::Fun: {
        int c = a->sym->name.compare(b->sym->name);
        if (c != 0) return c;
        for (std::size_t i = 0; i < a->kids.size(); ++i) {
            c = compare_terms(a->kids[i], b->kids[i]);
            if (c != 0) return c;
        }
        return 0;
    }
    }
    return 0;
}

}  // namespace

bool term_less(const Term& a, const Term& b) { return compare_terms(a, b) < 0; }

// ---------------------------------------------------------------- typing

Type typecheck(const Term& t)
{
    std::vector<Type> env;
    std::function<Type(const Term&)> go = [&](const Term& u) -> Type {
        switch (u->kind) {
        case TermKind::Var: return u->type;
        case TermKind::BVar:
            if (u->index >= static_cast<int>(env.size())) ill_typed("dangling bound variable");
            if (env[env.size() - 1 - u->index] != u->type) ill_typed("bound variable type conflict");
            return u->type;
        case TermKind::Abs: {
            env.push_back(u->binder);
            Type b = go(u->kids[0]);
            env.pop_back();
            return arrow(u->binder, b);
        }
        case TermKind::App: {
            Type f = go(u->kids[0]);
            Type a = go(u->kids[1]);
            if (f->is_base() || f->left != a) ill_typed("application type mismatch in " + to_string(u));
            return f->right;
        }
        case TermKind::Fun:
            if (static_cast<int>(u->kids.size()) != u->sym->arity()) ill_typed("arity mismatch for " + u->sym->name);
            for (std::size_t i = 0; i < u->kids.size(); ++i)
                if (go(u->kids[i]) != u->sym->inputs[i])
                    ill_typed("argument type mismatch for " + u->sym->name);
            return u->sym->output;
        }
        return nullptr;
    };
    Type r = go(t);
    if (r != t->type) ill_typed("cached type disagrees with derived type");
    return r;
}

// ---------------------------------------------------------------- substitution

Term apply_subst(const Term& t, const Subst& s)
{
    if (s.empty()) return t;
    switch (t->kind) {
    case TermKind::Var: {
        auto it = s.find(t->name);
        if (it == s.end()) return t;
        if (it->second->type != t->type)
            throw Error(Error::Kind::TypeMismatch, "substitution for " + t->name + " changes its type");
        return it->second;
    }
    case TermKind::BVar: return t;
    case TermKind::Abs: {
        Term b = apply_subst(t->kids[0], s);
        return b == t->kids[0] ? t : mk_abs_raw(t->name, t->binder, b);
    }
    case TermKind::App: {
        Term f = apply_subst(t->kids[0], s), a = apply_subst(t->kids[1], s);
        return (f == t->kids[0] && a == t->kids[1]) ? t : mk_app(f, a);
    }
    case TermKind::Fun: {
        std::vector<Term> args;
        bool changed = false;
        for (auto& k : t->kids) {
            args.push_back(apply_subst(k, s));
            changed = changed || args.back() != k;
        }
        return changed ? mk_fun(t->sym, args) : t;
    }
    }
    return t;
}

namespace {

Term inst_rec(const Term& t, const Term& u, int depth)
{
    if (t->loose <= depth) return t;
    switch (t->kind) {
    case TermKind::BVar: return t->index == depth ? u : t;
    case TermKind::Abs: return mk_abs_raw(t->name, t->binder, inst_rec(t->kids[0], u, depth + 1));
    case TermKind::App: return mk_app(inst_rec(t->kids[0], u, depth), inst_rec(t->kids[1], u, depth));
    case TermKind::Fun: {
        std::vector<Term> args;
        for (auto& k : t->kids) args.push_back(inst_rec(k, u, depth));
        return mk_fun(t->sym, args);
    }
    default: return t;
    }
}

thread_local unsigned long fresh_counter = 0;

Term internal_var(Type t)
{
    return mk_var("%" + std::to_string(++fresh_counter), t);
}

}  // namespace

Term instantiate(const Term& body, const Term& u) { return inst_rec(body, u, 0); }

Term beta_root(const Term& t)
{
    if (!t->is_app() || !t->kids[0]->is_abs()) throw Error(Error::Kind::Internal, "beta_root on non-redex");
    return instantiate(t->kids[0]->kids[0], t->kids[1]);
}

Term beta_normal(const Term& t, int budget)
{
    int steps = 0;
    std::function<Term(const Term&)> nf = [&](const Term& u) -> Term {
        switch (u->kind) {
        case TermKind::Var:
        case TermKind::BVar: return u;
        case TermKind::Abs: {
            Term z = internal_var(u->binder);
            Term b = nf(instantiate(u->kids[0], z));
            Term r = mk_lam(z, b);
            return mk_abs_raw(u->name, u->binder, r->kids[0]);
        }
        case TermKind::App: {
            Term f = nf(u->kids[0]);
            if (f->is_abs()) {
                if (++steps > budget) throw Error(Error::Kind::Budget, "beta normalisation budget exceeded");
                return nf(instantiate(f->kids[0], u->kids[1]));
            }
            return mk_app(f, nf(u->kids[1]));
        }
        case TermKind::Fun: {
            std::vector<Term> args;
            for (auto& k : u->kids) args.push_back(nf(k));
            return mk_fun(u->sym, args);
        }
        }
        return u;
    };
    return nf(t);
}

bool is_beta_normal(const Term& t)
{
    if (t->is_app() && t->kids[0]->is_abs()) return false;
    for (auto& k : t->kids)
        if (!is_beta_normal(k)) return false;
    return true;
}

// ---------------------------------------------------------------- matching

namespace {

bool match_rec(const Term& p, const Term& s, Subst& g)
{
    if (p->type != s->type) return false;
    switch (p->kind) {
    case TermKind::Var: {
        // A binding may not mention variables bound inside the pattern.
        if (s->loose > 0) return false;
        auto it = g.find(p->name);
        if (it != g.end()) return alpha_equal(it->second, s);
        g.emplace(p->name, s);
        return true;
    }
    case TermKind::BVar: return s->kind == TermKind::BVar && s->index == p->index;
    case TermKind::Abs:
        return s->kind == TermKind::Abs && s->binder == p->binder && match_rec(p->kids[0], s->kids[0], g);
    case TermKind::App:
        return s->kind == TermKind::App && match_rec(p->kids[0], s->kids[0], g) &&
               match_rec(p->kids[1], s->kids[1], g);
    case TermKind::Fun:
        if (s->kind != TermKind::Fun || s->sym->name != p->sym->name) return false;
        for (std::size_t i = 0; i < p->kids.size(); ++i)
            if (!match_rec(p->kids[i], s->kids[i], g)) return false;
        return true;
    }
    return false;
}

}  // namespace

std::optional<Subst> match(const Term& pattern, const Term& subject)
{
    Subst g;
    if (!match_rec(pattern, subject, g)) return std::nullopt;
    return g;
}

// ---------------------------------------------------------------- inspection

Term head(const Term& t)
{
    Term h = t;
    while (h->is_app()) h = h->kids[0];
    return h;
}

std::vector<Term> app_args(const Term& t)
{
    std::vector<Term> out;
    Term h = t;
    while (h->is_app()) {
        out.push_back(h->kids[1]);
        h = h->kids[0];
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::vector<Term> free_vars(const Term& t)
{
    std::vector<Term> out;
    std::set<std::pair<std::string, Type>> seen;
    std::function<void(const Term&)> go = [&](const Term& u) {
        if (u->is_var()) {
            if (seen.insert({u->name, u->type}).second) out.push_back(u);
            return;
        }
        for (auto& k : u->kids) go(k);
    };
    go(t);
    return out;
}

bool occurs_free(const std::string& name, const Term& t)
{
    if (t->is_var()) return t->name == name;
    for (auto& k : t->kids)
        if (occurs_free(name, k)) return true;
    return false;
}

void collect_var_names(const Term& t, std::set<std::string>& out)
{
    if (t->is_var()) out.insert(t->name);
    if (t->is_abs()) out.insert(t->name);
    for (auto& k : t->kids) collect_var_names(k, out);
}

std::vector<Term> subterms_with(const Term& t, const std::function<Term(Type)>& fill)
{
    std::vector<Term> out;
    TermSet seen;
    std::function<void(const Term&)> go = [&](const Term& u) {
        if (seen.insert(u).second) out.push_back(u);
        switch (u->kind) {
        case TermKind::Abs: go(instantiate(u->kids[0], fill(u->binder))); break;
        case TermKind::App:
        case TermKind::Fun:
            for (auto& k : u->kids) go(k);
            break;
        default: break;
        }
    };
    go(t);
    return out;
}

std::vector<Term> subterms(const Term& t)
{
    std::set<std::string> avoid;
    collect_var_names(t, avoid);
    return subterms_with(t, [&](Type ty) {
        std::string n = fresh_name("z", avoid);
        avoid.insert(n);
        return mk_var(n, ty);
    });
}

Term mark(const Term& t, const std::set<std::string>& defined)
{
    if (t->is_fun() && t->sym->kind == SymKind::Plain && defined.count(t->sym->name))
        return mk_fun(marked(t->sym), t->kids);
    return t;
}

std::string fresh_name(const std::string& hint, const std::set<std::string>& avoid)
{
    if (!avoid.count(hint)) return hint;
    for (int i = 1;; ++i) {
        std::string n = hint + std::to_string(i);
        if (!avoid.count(n)) return n;
    }
}

// ---------------------------------------------------------------- printing

namespace {

void print_rec(const Term& t, int ctx, std::vector<std::string>& env, std::set<std::string>& used,
               std::ostringstream& os)
{
    switch (t->kind) {
    case TermKind::Var: os << t->name; break;
    case TermKind::BVar:
        if (t->index < static_cast<int>(env.size())) os << env[env.size() - 1 - t->index];
        else os << "?" << t->index;
        break;
    case TermKind::Abs: {
        std::string hint = t->name.empty() || t->name[0] == '%' ? "x" : t->name;
        std::string n = fresh_name(hint, used);
        if (ctx != 0) os << "(";
        os << "\\" << n << ":" << to_string(t->binder) << ". ";
        used.insert(n);
        env.push_back(n);
        print_rec(t->kids[0], 0, env, used, os);
        env.pop_back();
        used.erase(n);
        if (ctx != 0) os << ")";
        break;
    }
    case TermKind::App:
        if (ctx == 2) os << "(";
        print_rec(t->kids[0], 1, env, used, os);
        os << " @ ";
        print_rec(t->kids[1], 2, env, used, os);
        if (ctx == 2) os << ")";
        break;
    case TermKind::Fun:
        os << t->sym->name;
        if (!t->kids.empty()) {
            os << "(";
            for (std::size_t i = 0; i < t->kids.size(); ++i) {
                if (i) os << ", ";
                print_rec(t->kids[i], 0, env, used, os);
            }
            os << ")";
        }
        break;
    }
}

}  // namespace

std::string to_string(const Term& t)
{
    std::set<std::string> used;
    for (auto& v : free_vars(t)) used.insert(v->name);
    std::vector<std::string> env;
    std::ostringstream os;
    print_rec(t, 0, env, used, os);
    return os.str();
}

std::string to_string(const Rule& r) { return to_string(r.lhs) + " => " + to_string(r.rhs); }

bool rule_equal(const Rule& a, const Rule& b)
{
    // Rules are equal up to renaming of their free variables: match both ways.
    auto g = match(a.lhs, b.lhs);
    if (!g) return false;
    for (auto& [k, v] : *g)
        if (!v->is_var()) return false;
    auto h = match(b.lhs, a.lhs);
    if (!h) return false;
    return alpha_equal(apply_subst(a.rhs, *g), b.rhs);
}

// ---------------------------------------------------------------- rewriting

namespace {

void reducts_rec(const Term& t, const std::vector<Rule>& rules, bool with_beta, std::vector<Term>& out)
{
    if (with_beta && t->is_app() && t->kids[0]->is_abs()) out.push_back(beta_root(t));
    for (auto& r : rules) {
        if (r.lhs->type != t->type) continue;
        if (auto g = match(r.lhs, t)) out.push_back(apply_subst(r.rhs, *g));
    }
    switch (t->kind) {
    case TermKind::App: {
        std::vector<Term> sub;
        reducts_rec(t->kids[0], rules, with_beta, sub);
        for (auto& s : sub) out.push_back(mk_app(s, t->kids[1]));
        sub.clear();
        reducts_rec(t->kids[1], rules, with_beta, sub);
        for (auto& s : sub) out.push_back(mk_app(t->kids[0], s));
        break;
    }
    case TermKind::Fun:
        for (std::size_t i = 0; i < t->kids.size(); ++i) {
            std::vector<Term> sub;
            reducts_rec(t->kids[i], rules, with_beta, sub);
            for (auto& s : sub) {
                auto args = t->kids;
                args[i] = s;
                out.push_back(mk_fun(t->sym, args));
            }
        }
        break;
    case TermKind::Abs: {
        Term z = internal_var(t->binder);
        std::vector<Term> sub;
        reducts_rec(instantiate(t->kids[0], z), rules, with_beta, sub);
        for (auto& s : sub) {
            Term l = mk_lam(z, s);
            out.push_back(mk_abs_raw(t->name, t->binder, l->kids[0]));
        }
        break;
    }
    default: break;
    }
}

}  // namespace

std::vector<Term> rewrite_step(const Term& t, const std::vector<Rule>& rules, bool with_beta)
{
    std::vector<Term> raw;
    reducts_rec(t, rules, with_beta, raw);
    std::vector<Term> out;
    TermSet seen;
    for (auto& r : raw)
        if (seen.insert(r).second) out.push_back(r);
    return out;
}

std::vector<Term> Reductions::trace_to(int node) const
{
    std::vector<Term> tr;
    for (int i = node; i >= 0; i = parent[i]) tr.push_back(terms[i]);
    std::reverse(tr.begin(), tr.end());
    return tr;
}

Reductions bounded_reductions(const Term& t, const std::vector<Rule>& rules, int max_steps, std::size_t max_terms)
{
    Reductions res;
    TermMap<int> index;
    res.terms.push_back(t);
    res.parent.push_back(-1);
    res.depth.push_back(0);
    res.normal.push_back(false);
    index.emplace(t, 0);
    std::vector<std::vector<int>> succ(1);
    bool cut = false;
    for (std::size_t i = 0; i < res.terms.size(); ++i) {
        if (res.depth[i] >= max_steps) {
            cut = true;
            continue;
        }
        auto next = rewrite_step(res.terms[i], rules);
        res.normal[i] = next.empty();
        for (auto& n : next) {
            auto it = index.find(n);
            int j;
            if (it == index.end()) {
                if (res.terms.size() >= max_terms) {
                    res.budget_exceeded = true;
                    continue;
                }
                j = static_cast<int>(res.terms.size());
                res.terms.push_back(n);
                res.parent.push_back(static_cast<int>(i));
                res.depth.push_back(res.depth[i] + 1);
                res.normal.push_back(false);
                succ.emplace_back();
                index.emplace(n, j);
            } else {
                j = it->second;
            }
            res.edges.push_back({static_cast<int>(i), j});
            succ[i].push_back(j);
        }
    }
    res.exhausted = !cut && !res.budget_exceeded;

    // Any cycle among discovered terms is an infinite reduction.
    int n = static_cast<int>(res.terms.size());
    std::vector<int> color(n, 0), from(n, -1);
    int cyc_start = -1, cyc_end = -1;
    for (int s = 0; s < n && cyc_start < 0; ++s) {
        if (color[s]) continue;
        std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
        color[s] = 1;
        while (!stack.empty() && cyc_start < 0) {
            auto& [v, k] = stack.back();
            if (k < succ[v].size()) {
                int w = succ[v][k++];
                if (color[w] == 0) {
                    color[w] = 1;
                    from[w] = v;
                    stack.push_back({w, 0});
                } else if (color[w] == 1) {
                    cyc_start = w;
                    cyc_end = v;
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    if (cyc_start >= 0) {
        res.loop = true;
        res.loop_trace = res.trace_to(cyc_start);
        std::vector<Term> cyc;
        for (int v = cyc_end; v != cyc_start; v = from[v]) cyc.push_back(res.terms[v]);
        std::reverse(cyc.begin(), cyc.end());
        for (auto& c : cyc) res.loop_trace.push_back(c);
        res.loop_trace.push_back(res.terms[cyc_start]);
    }
    return res;
}

}  // namespace hodp
