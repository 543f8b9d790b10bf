#include "hodp/rpo.hpp"

#include <chrono>
#include <functional>

#include "hodp/dp.hpp"

namespace hodp::rpo {

bool PiChoice::identity(int arity) const
{
    if (k != K::Keep || static_cast<int>(keep.size()) != arity) return false;
    for (int i = 0; i < arity; ++i)
        if (keep[i] != i) return false;
    return true;
}

std::string to_string(const PiChoice& c, int arity)
{
    switch (c.k) {
    case PiChoice::K::Keep: {
        if (c.identity(arity)) return "id";
        std::string s = "keep(";
        for (std::size_t i = 0; i < c.keep.size(); ++i) s += (i ? "," : "") + std::to_string(c.keep[i] + 1);
        return s + ")";
    }
    case PiChoice::K::Arg: return "arg(" + std::to_string(c.arg + 1) + ")";
    case PiChoice::K::Rule: return "rule(" + c.rule.label + ")";
    }
    return "?";
}

SymClass classify_symbol(const Sym& f)
{
    if (f->kind == SymKind::Fresh) return SymClass::Const;
    if (f->kind == SymKind::Extension && f->base == "@") return SymClass::App;
    if (f->kind == SymKind::Extension && f->base == "\\") return SymClass::Lam;
    return SymClass::User;
}

bool Precedence::reaches(const std::string& a, const std::string& b) const
{
    std::set<std::string> seen{a};
    std::vector<std::string> todo{a};
    while (!todo.empty()) {
        std::string x = todo.back();
        todo.pop_back();
        for (auto& [p, q] : facts_) {
            if (p != x) continue;
            if (q == b) return true;
            if (seen.insert(q).second) todo.push_back(q);
        }
    }
    return false;
}

bool Precedence::gt(const Sym& f, const Sym& g) const
{
    SymClass cf = classify_symbol(f), cg = classify_symbol(g);
    switch (cf) {
    case SymClass::User: return cg != SymClass::User || (f->name != g->name && reaches(f->name, g->name));
    case SymClass::App:
        if (cg == SymClass::App) return is_strict_subtype(g->inputs[0], f->inputs[0]);
        return cg == SymClass::Lam || cg == SymClass::Const;
    case SymClass::Lam: return cg == SymClass::Const;
    case SymClass::Const: return false;
    }
    return false;
}

bool Precedence::add(const Sym& f, const Sym& g)
{
    if (frozen) return false;
    if (classify_symbol(f) != SymClass::User || classify_symbol(g) != SymClass::User) return false;
    if (f->name == g->name || reaches(g->name, f->name)) return false;
    facts_.push_back({f->name, g->name});
    return true;
}

void Precedence::remove_last() { facts_.pop_back(); }

// ---------------------------------------------------------------- π̄ and μ

namespace {

Sym filtered_symbol(const Sym& f, const std::vector<int>& keep)
{
    std::vector<Type> ins;
    for (int i : keep) ins.push_back(f->inputs[i]);
    return make_symbol(f->name + "'", ins, f->output, SymKind::Extension, f->name + "'");
}

Sym app_symbol(Type fun)
{
    return make_symbol("@{" + to_string(fun) + "}", {fun, fun->left}, fun->right, SymKind::Extension, "@");
}

Sym lam_symbol(Type fun)
{
    return make_symbol("\\{" + to_string(fun) + "}", {fun}, fun, SymKind::Extension, "\\");
}

// The right-hand side used by a rule choice: marked at the root for f#.
Term rule_rhs(const Sym& f, const Rule& r, const AFS& afs)
{
    if (f->kind == SymKind::Marked) return mark(r.rhs, afs.defined);
    return r.rhs;
}

}  // namespace

Term filter(const Term& t, const Pi& pi, const AFS& afs)
{
    switch (t->kind) {
    case TermKind::Var:
    case TermKind::BVar: return t;
    case TermKind::Abs: return mk_abs_raw(t->name, t->binder, filter(t->kids[0], pi, afs));
    case TermKind::App: return mk_app(filter(t->kids[0], pi, afs), filter(t->kids[1], pi, afs));
    case TermKind::Fun: {
        std::vector<Term> args;
        for (auto& k : t->kids) args.push_back(filter(k, pi, afs));
        auto it = pi.find(t->sym->name);
        if (it == pi.end() || it->second.identity(t->sym->arity())) return mk_fun(t->sym, args);
        const PiChoice& c = it->second;
        switch (c.k) {
        case PiChoice::K::Keep: {
            std::vector<Term> kept;
            for (int i : c.keep) kept.push_back(args[i]);
            return mk_fun(filtered_symbol(t->sym, c.keep), kept);
        }
        case PiChoice::K::Arg: return args[c.arg];
        case PiChoice::K::Rule: {
            Subst s;
            for (std::size_t i = 0; i < args.size(); ++i) s[c.rule.lhs->kids[i]->name] = args[i];
            return apply_subst(rule_rhs(t->sym, c.rule, afs), s);
        }
        }
    }
    }
    return t;
}

Term mu(const Term& t)
{
    switch (t->kind) {
    case TermKind::Var:
    case TermKind::BVar: return t;
    case TermKind::Abs: return mk_fun(lam_symbol(t->type), {mk_abs_raw(t->name, t->binder, mu(t->kids[0]))});
    case TermKind::App: return mk_fun(app_symbol(t->kids[0]->type), {mu(t->kids[0]), mu(t->kids[1])});
    case TermKind::Fun: {
        std::vector<Term> args;
        for (auto& k : t->kids) args.push_back(mu(k));
        return mk_fun(t->sym, args);
    }
    }
    return t;
}

Term embed(const Term& t, const Pi& pi, const AFS& afs) { return mu(filter(t, pi, afs)); }

// ---------------------------------------------------------------- ordering

namespace {

struct BudgetExceeded {};

// Types up to identification of all base types.
bool type_equiv(Type a, Type b)
{
    if (a->is_base() || b->is_base()) return a->is_base() && b->is_base();
    return type_equiv(a->left, b->left) && type_equiv(a->right, b->right);
}

using Names = std::set<std::string>;
using K = std::function<bool()>;

class Orienter {
public:
    explicit Orienter(Precedence& p, long budget = -1, double deadline = 0)
        : prec_(p), budget_(budget), deadline_(deadline)
    {
    }

    bool geq(const Term& s, const Term& t, const Names& x, const K& k)
    {
        if (alpha_equal(s, t)) return k();
        return gt(s, t, x, k);
    }

    bool gt(const Term& s, const Term& t, const Names& x, const K& k)
    {
        tick();
        if (t->is_var() && x.count(t->name)) return s->is_fun() && k();
        if (t->is_abs()) {
            std::set<std::string> avoid = x;
            collect_var_names(s, avoid);
            collect_var_names(t, avoid);
            Term z = mk_var(fresh_name("z", avoid), t->binder);
            Term tb = instantiate(t->kids[0], z);
            if (s->is_fun()) {
                Names x2 = x;
                x2.insert(z->name);
                return gt(s, tb, x2, k);
            }
            if (s->is_abs() && s->binder == t->binder) return gt(instantiate(s->kids[0], z), tb, x, k);
            return false;
        }
        if (!s->is_fun() || !type_equiv(s->type, t->type)) return false;
        // subterm
        for (auto& si : s->kids)
            if (geq(si, t, {}, k)) return true;
        if (!t->is_fun()) return false;
        const Sym& f = s->sym;
        const Sym& g = t->sym;
        if (f->name == g->name && s->kids.size() == t->kids.size()) {
            std::size_t i = 0;
            while (i < s->kids.size() && alpha_equal(s->kids[i], t->kids[i])) ++i;
            if (i == s->kids.size()) return false;
            return gt(s->kids[i], t->kids[i], {}, [&] { return args_below(s, t, x, 0, k); });
        }
        return prec_gt(f, g, [&] { return args_below(s, t, x, 0, k); });
    }

private:
    Precedence& prec_;
    long budget_;
    double deadline_;
    long ticks_ = 0;

    void tick()
    {
        ++ticks_;
        if (budget_ >= 0 && ticks_ > budget_) throw BudgetExceeded{};
        if (deadline_ > 0 && (ticks_ & 1023) == 0) {
            using namespace std::chrono;
            if (duration<double>(steady_clock::now().time_since_epoch()).count() > deadline_) throw BudgetExceeded{};
        }
    }

    bool prec_gt(const Sym& f, const Sym& g, const K& k)
    {
        if (prec_.gt(f, g)) return k();
        if (!prec_.add(f, g)) return false;
        if (k()) return true;
        prec_.remove_last();
        return false;
    }

    // Every argument of t is below s, or below some argument of s.
    bool args_below(const Term& s, const Term& t, const Names& x, std::size_t j, const K& k)
    {
        if (j == t->kids.size()) return k();
        const Term& tj = t->kids[j];
        auto next = [&] { return args_below(s, t, x, j + 1, k); };
        for (auto& si : s->kids)
            if (alpha_equal(si, tj)) return next();
        if (gt(s, tj, x, next)) return true;
        for (auto& si : s->kids)
            if (gt(si, tj, {}, next)) return true;
        return false;
    }
};

}  // namespace

bool gt(const Term& s, const Term& t, const Precedence& prec)
{
    Precedence p = prec;
    p.frozen = true;
    Orienter o(p);
    return o.gt(s, t, {}, [] { return true; });
}

bool geq(const Term& s, const Term& t, const Precedence& prec)
{
    Precedence p = prec;
    p.frozen = true;
    Orienter o(p);
    return o.geq(s, t, {}, [] { return true; });
}

// ---------------------------------------------------------------- search

std::vector<PiChoice> pi_options(const Sym& f, const AFS& afs, bool in_s)
{
    std::vector<PiChoice> out;
    int n = f->arity();
    PiChoice id;
    for (int i = 0; i < n; ++i) id.keep.push_back(i);
    out.push_back(id);
    if (f->kind == SymKind::Fresh || f->kind == SymKind::Extension) return out;
    if (n <= 4) {
        // proper subsets, larger first
        std::vector<std::vector<int>> subs;
        for (int mask = (1 << n) - 2; mask >= 0; --mask) {
            std::vector<int> keep;
            for (int i = 0; i < n; ++i)
                if (mask & (1 << i)) keep.push_back(i);
            subs.push_back(keep);
        }
        std::stable_sort(subs.begin(), subs.end(), [](auto& a, auto& b) { return a.size() > b.size(); });
        for (auto& s : subs) {
            PiChoice c;
            c.keep = s;
            out.push_back(c);
        }
    }
    Type full = f->output;
    for (int i = 0; i < n; ++i) {
        if (f->inputs[i] != full) continue;
        PiChoice c;
        c.k = PiChoice::K::Arg;
        c.arg = i;
        out.push_back(c);
    }
    Sym base = plain(f);
    for (auto& r : afs.rules) {
        if (!r.lhs->is_fun() || r.lhs->sym->name != base->name) continue;
        std::set<std::string> seen;
        bool ok = true;
        for (auto& a : r.lhs->kids) ok = ok && a->is_var() && seen.insert(a->name).second;
        if (!ok) continue;
        PiChoice c;
        c.k = PiChoice::K::Rule;
        c.rule = r;
        out.push_back(c);
    }
    if (in_s) {
        std::vector<PiChoice> kept;
        for (auto& c : out)
            if (s_subterm_ok(f, c)) kept.push_back(c);
        out = kept;
    }
    return out;
}

bool s_subterm_ok(const Sym& f, const PiChoice& c)
{
    int n = f->arity();
    switch (c.k) {
    case PiChoice::K::Keep: return static_cast<int>(c.keep.size()) == n;
    case PiChoice::K::Arg: return n == 1;
    case PiChoice::K::Rule: {
        std::set<std::string> fv;
        for (auto& v : free_vars(c.rule.rhs)) fv.insert(v->name);
        for (auto& a : c.rule.lhs->kids)
            if (!fv.count(a->name)) return false;
        return true;
    }
    }
    return false;
}

namespace {

void fun_symbols(const Term& t, std::vector<Sym>& out, std::set<std::string>& seen)
{
    if (t->is_fun() && seen.insert(t->sym->name).second) out.push_back(t->sym);
    for (auto& k : t->kids) fun_symbols(k, out, seen);
}

class Search {
public:
    Search(const ConstraintSet& cs, const AFS& afs, const RpoOptions& opt)
        : cs_(cs), afs_(afs), orient_(prec_, opt.node_budget, opt.deadline)
    {
        for (auto& c : cs.strict) todo_.push_back(c);
        for (auto& c : cs.weak) todo_.push_back(c);
    }

    std::optional<RpoResult> run()
    {
        try {
            if (step(0)) return result_;
        } catch (const BudgetExceeded&) {
        }
        return std::nullopt;
    }

private:
    const ConstraintSet& cs_;
    const AFS& afs_;
    Precedence prec_;
    Orienter orient_;
    std::vector<Constraint> todo_;
    Pi pi_;
    std::vector<int> strict_;
    RpoResult result_;

    bool assign(const std::vector<Sym>& syms, std::size_t i, const K& k)
    {
        if (i == syms.size()) return k();
        const Sym& f = syms[i];
        if (pi_.count(f->name)) return assign(syms, i + 1, k);
        for (auto& c : pi_options(f, afs_, cs_.S.count(f->name) > 0)) {
            pi_[f->name] = c;
            if (assign(syms, i + 1, k)) return true;
        }
        pi_.erase(f->name);
        return false;
    }

    bool step(std::size_t i)
    {
        if (i == todo_.size()) return finish();
        const Constraint& c = todo_[i];
        std::vector<Sym> syms;
        std::set<std::string> seen;
        fun_symbols(c.lhs, syms, seen);
        fun_symbols(c.rhs, syms, seen);
        return assign(syms, 0, [&] {
            Term l = embed(c.lhs, pi_, afs_);
            Term r = embed(c.rhs, pi_, afs_);
            if (c.pair > 0) {
                strict_.push_back(c.pair);
                if (orient_.gt(l, r, {}, [&] { return step(i + 1); })) return true;
                strict_.pop_back();
            }
            return orient_.geq(l, r, {}, [&] { return step(i + 1); });
        });
    }

    bool finish()
    {
        if (strict_.empty()) return false;
        result_.pi.clear();
        for (auto& [name, c] : pi_) {
            Sym f = afs_.symbol(name);
            int n = f ? f->arity() : static_cast<int>(c.keep.size());
            if (!c.identity(n)) result_.pi[name] = c;
        }
        result_.prec = prec_.facts();
        // Pairs oriented weakly may still be strict under the final choice.
        std::set<int> strict(strict_.begin(), strict_.end());
        for (auto& c : cs_.strict)
            if (!strict.count(c.pair) && gt(embed(c.lhs, pi_, afs_), embed(c.rhs, pi_, afs_), prec_))
                strict.insert(c.pair);
        result_.strict.assign(strict.begin(), strict.end());
        return true;
    }
};

}  // namespace

std::optional<RpoResult> search(const ConstraintSet& cs, const AFS& afs, const RpoOptions& opt)
{
    Search s(cs, afs, opt);
    return s.run();
}

}  // namespace hodp::rpo
