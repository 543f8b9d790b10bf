#include <atomic>
#include <cctype>
#include <sstream>

#include "hodp/poly.hpp"

namespace hodp::poly {

namespace {
std::atomic<int> slot_counter{1};
}

int fresh_slot() { return slot_counter++; }

ExprP cnst(Nat c)
{
    auto e = std::make_shared<Expr>();
    e->k = Expr::K::Const;
    e->c = c;
    return e;
}

ExprP slot(int id)
{
    auto e = std::make_shared<Expr>();
    e->k = Expr::K::Slot;
    e->id = id;
    return e;
}

namespace {

ExprP binop(Expr::K k, ExprP a, ExprP b)
{
    auto e = std::make_shared<Expr>();
    e->k = k;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

bool is_const(const ExprP& e, Nat c) { return e->k == Expr::K::Const && e->c == c; }

}  // namespace

ExprP add(ExprP a, ExprP b)
{
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->k == Expr::K::Const && b->k == Expr::K::Const) return cnst(a->c + b->c);
    return binop(Expr::K::Add, std::move(a), std::move(b));
}

ExprP mul(ExprP a, ExprP b)
{
    if (is_const(a, 0) || is_const(b, 0)) return cnst(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (a->k == Expr::K::Const && b->k == Expr::K::Const) return cnst(a->c * b->c);
    return binop(Expr::K::Mul, std::move(a), std::move(b));
}

ExprP max(ExprP a, ExprP b)
{
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->k == Expr::K::Const && b->k == Expr::K::Const) return cnst(std::max(a->c, b->c));
    return binop(Expr::K::Max, std::move(a), std::move(b));
}

ExprP call(int id, std::vector<Value> args)
{
    auto e = std::make_shared<Expr>();
    e->k = Expr::K::Call;
    e->id = id;
    e->args = std::move(args);
    return e;
}

Value eta(int id, Type t)
{
    if (t->is_base()) return {{}, {}, slot(id)};
    Value v;
    std::vector<Value> args;
    for (Type a : arg_types(t)) {
        int p = fresh_slot();
        v.params.push_back(p);
        v.ptypes.push_back(a);
        args.push_back(eta(p, a));
    }
    v.body = call(id, args);
    return v;
}

Value zero(Type t)
{
    Value v;
    for (Type a : arg_types(t)) {
        v.params.push_back(fresh_slot());
        v.ptypes.push_back(a);
    }
    v.body = cnst(0);
    return v;
}

ExprP subst(const ExprP& e, const std::map<int, Value>& m)
{
    if (m.empty()) return e;
    switch (e->k) {
    case Expr::K::Const: return e;
    case Expr::K::Slot: {
        auto it = m.find(e->id);
        if (it == m.end()) return e;
        if (!it->second.params.empty()) throw Error(Error::Kind::Internal, "functional value in base position");
        return it->second.body;
    }
    case Expr::K::Add: return add(subst(e->a, m), subst(e->b, m));
    case Expr::K::Mul: return mul(subst(e->a, m), subst(e->b, m));
    case Expr::K::Max: return max(subst(e->a, m), subst(e->b, m));
    case Expr::K::Call: {
        std::vector<Value> args;
        for (auto& v : e->args) {
            if (v.params.empty()) {
                args.push_back({{}, {}, subst(v.body, m)});
                continue;
            }
            // Rename the bound parameters so nothing in m can be captured.
            std::map<int, Value> inner = m;
            Value w;
            w.ptypes = v.ptypes;
            for (std::size_t j = 0; j < v.params.size(); ++j) {
                int p = fresh_slot();
                w.params.push_back(p);
                inner[v.params[j]] = eta(p, v.ptypes[j]);
            }
            w.body = subst(v.body, inner);
            args.push_back(w);
        }
        auto it = m.find(e->id);
        if (it == m.end()) return call(e->id, args);
        return poly::apply(it->second, args).body;
    }
    }
    return e;
}

Value apply(const Value& v, const std::vector<Value>& args)
{
    if (args.size() > v.params.size()) throw Error(Error::Kind::Internal, "over-application of a value");
    std::map<int, Value> m;
    for (std::size_t i = 0; i < args.size(); ++i) m[v.params[i]] = args[i];
    Value out;
    out.params.assign(v.params.begin() + args.size(), v.params.end());
    out.ptypes.assign(v.ptypes.begin() + args.size(), v.ptypes.end());
    out.body = subst(v.body, m);
    return out;
}

ExprP at_zero(const Value& v)
{
    std::vector<Value> zs;
    for (Type t : v.ptypes) zs.push_back(zero(t));
    return poly::apply(v, zs).body;
}

namespace {

Value renamed(const Value& v)
{
    if (v.params.empty()) return v;
    std::map<int, Value> m;
    Value w;
    w.ptypes = v.ptypes;
    for (std::size_t j = 0; j < v.params.size(); ++j) {
        int p = fresh_slot();
        w.params.push_back(p);
        m[v.params[j]] = eta(p, v.ptypes[j]);
    }
    w.body = subst(v.body, m);
    return w;
}

std::vector<Type> param_types(const Sym& f)
{
    std::vector<Type> ts = f->inputs;
    for (Type t : arg_types(f->output)) ts.push_back(t);
    return ts;
}

Value lambda_over(const Sym& f, const std::function<ExprP(const std::vector<Value>&)>& body)
{
    Value v;
    std::vector<Value> ps;
    for (Type t : param_types(f)) {
        int p = fresh_slot();
        v.params.push_back(p);
        v.ptypes.push_back(t);
        ps.push_back(eta(p, t));
    }
    v.body = body(ps);
    return v;
}

}  // namespace

Value default_value(const Sym& f)
{
    return lambda_over(f, [](const std::vector<Value>& ps) {
        ExprP e = cnst(0);
        for (auto& p : ps) e = add(e, at_zero(p));
        return e;
    });
}

Value max_value(const Sym& f)
{
    return lambda_over(f, [](const std::vector<Value>& ps) {
        ExprP e = cnst(0);
        for (auto& p : ps) e = max(e, at_zero(p));
        return e;
    });
}

Value Interpretation::of(const Sym& f) const
{
    if (f->kind == SymKind::Fresh) return zero(f->output);
    if (is_pairing(f)) return max_value(f);
    auto it = J.find(f->name);
    if (it != J.end()) return renamed(it->second);
    return default_value(f);
}

namespace {

Value interp_rec(const Term& t, const Interpretation& I, std::map<std::string, int>& vars,
                 std::vector<Value>& bound)
{
    switch (t->kind) {
    case TermKind::Var: {
        auto it = vars.find(t->name);
        int id = it == vars.end() ? (vars[t->name] = fresh_slot()) : it->second;
        return eta(id, t->type);
    }
    case TermKind::BVar: return bound[bound.size() - 1 - t->index];
    case TermKind::Abs: {
        int p = fresh_slot();
        bound.push_back(eta(p, t->binder));
        Value b = interp_rec(t->kids[0], I, vars, bound);
        bound.pop_back();
        Value v;
        v.params.push_back(p);
        v.ptypes.push_back(t->binder);
        v.params.insert(v.params.end(), b.params.begin(), b.params.end());
        v.ptypes.insert(v.ptypes.end(), b.ptypes.begin(), b.ptypes.end());
        v.body = b.body;
        return v;
    }
    case TermKind::App: {
        Value s = interp_rec(t->kids[0], I, vars, bound);
        Value u = interp_rec(t->kids[1], I, vars, bound);
        Value r = poly::apply(s, {u});
        r.body = max(r.body, at_zero(u));
        return r;
    }
    case TermKind::Fun: {
        std::vector<Value> args;
        for (auto& k : t->kids) args.push_back(interp_rec(k, I, vars, bound));
        return poly::apply(I.of(t->sym), args);
    }
    }
    throw Error(Error::Kind::Internal, "bad term");
}

}  // namespace

Value interpret(const Term& t, const Interpretation& I, std::map<std::string, int>& vars)
{
    std::vector<Value> bound;
    return interp_rec(t, I, vars, bound);
}

// ---------------------------------------------------------------- printing

namespace {

std::string slot_name(int id, const std::map<int, std::string>& names)
{
    auto it = names.find(id);
    return it != names.end() ? it->second : "v" + std::to_string(id);
}

void print_expr(const ExprP& e, int prec, std::map<int, std::string>& names, int& fresh, std::ostream& os);

void print_val(const Value& v, std::map<int, std::string>& names, int& fresh, std::ostream& os)
{
    if (v.params.empty()) {
        print_expr(v.body, 0, names, fresh, os);
        return;
    }
    os << "\\";
    for (std::size_t j = 0; j < v.params.size(); ++j) {
        std::string n = (v.ptypes[j]->is_base() ? "n" : "G") + std::to_string(fresh++);
        names[v.params[j]] = n;
        os << (j ? " " : "") << n;
    }
    os << ". ";
    print_expr(v.body, 0, names, fresh, os);
}

void print_expr(const ExprP& e, int prec, std::map<int, std::string>& names, int& fresh, std::ostream& os)
{
    switch (e->k) {
    case Expr::K::Const: os << e->c; break;
    case Expr::K::Slot: os << slot_name(e->id, names); break;
    case Expr::K::Add:
        if (prec > 0) os << "(";
        print_expr(e->a, 0, names, fresh, os);
        os << " + ";
        print_expr(e->b, 0, names, fresh, os);
        if (prec > 0) os << ")";
        break;
    case Expr::K::Mul:
        if (prec > 1) os << "(";
        print_expr(e->a, 1, names, fresh, os);
        os << " * ";
        print_expr(e->b, 1, names, fresh, os);
        if (prec > 1) os << ")";
        break;
    case Expr::K::Max:
        os << "max(";
        print_expr(e->a, 0, names, fresh, os);
        os << ", ";
        print_expr(e->b, 0, names, fresh, os);
        os << ")";
        break;
    case Expr::K::Call:
        os << slot_name(e->id, names) << "(";
        for (std::size_t i = 0; i < e->args.size(); ++i) {
            if (i) os << ", ";
            if (!e->args[i].params.empty()) os << "(";
            print_val(e->args[i], names, fresh, os);
            if (!e->args[i].params.empty()) os << ")";
        }
        os << ")";
        break;
    }
}

}  // namespace

std::string to_string(const ExprP& e, const std::map<int, std::string>& names)
{
    std::ostringstream os;
    auto n = names;
    int fresh = 100;
    print_expr(e, 0, n, fresh, os);
    return os.str();
}

std::string to_string(const Value& v, const std::map<int, std::string>& names)
{
    std::ostringstream os;
    auto n = names;
    int fresh = 100;
    print_val(v, n, fresh, os);
    return os.str();
}

std::string print_value(const Value& v)
{
    std::map<int, std::string> names;
    std::ostringstream os;
    int nb = 0, nf = 0;
    std::vector<std::string> ps;
    for (std::size_t j = 0; j < v.params.size(); ++j) {
        std::string n = v.ptypes[j]->is_base() ? "x" + std::to_string(++nb) : "F" + std::to_string(++nf);
        names[v.params[j]] = n;
        ps.push_back(n);
    }
    if (!ps.empty()) {
        os << "\\";
        for (std::size_t j = 0; j < ps.size(); ++j) os << (j ? " " : "") << ps[j];
        os << ". ";
    }
    int fresh = 1;
    print_expr(v.body, 0, names, fresh, os);
    return os.str();
}

// ---------------------------------------------------------------- parsing

namespace {

struct ExprParser {
    std::string s;
    std::size_t i = 0;
    std::map<std::string, std::pair<int, Type>> env;

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw Error(Error::Kind::Syntax, "interpretation '" + s + "' at " + std::to_string(i) + ": " + msg);
    }
    void ws()
    {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c)
    {
        ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    std::string ident()
    {
        ws();
        std::size_t b = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
        if (b == i) fail("identifier expected");
        return s.substr(b, i - b);
    }

    // A value of the given type: "\a b. e" or a bare expression when base.
    Value value(Type t)
    {
        ws();
        auto saved = env;
        Value v;
        if (eat('\\')) {
            auto ts = arg_types(t);
            std::size_t k = 0;
            while (true) {
                ws();
                if (eat('.')) break;
                if (k >= ts.size()) fail("too many parameters");
                std::string n = ident();
                int p = fresh_slot();
                v.params.push_back(p);
                v.ptypes.push_back(ts[k]);
                env[n] = {p, ts[k]};
                ++k;
            }
            if (k != ts.size()) fail("expected " + std::to_string(ts.size()) + " parameters");
        } else if (!t->is_base()) {
            fail("functional value expected");
        }
        v.body = expr();
        env = saved;
        return v;
    }

    ExprP expr()
    {
        ExprP e = term();
        while (eat('+')) e = add(e, term());
        return e;
    }
    ExprP term()
    {
        ExprP e = factor();
        while (eat('*')) e = mul(e, factor());
        return e;
    }
    ExprP factor()
    {
        ws();
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            Nat c = 0;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) c = c * 10 + (s[i++] - '0');
            return cnst(c);
        }
        if (eat('(')) {
            ExprP e = expr();
            if (!eat(')')) fail("')' expected");
            return e;
        }
        std::string n = ident();
        if (n == "max") {
            if (!eat('(')) fail("'(' expected");
            ExprP a = expr();
            if (!eat(',')) fail("',' expected");
            ExprP b = expr();
            if (!eat(')')) fail("')' expected");
            return max(a, b);
        }
        auto it = env.find(n);
        if (it == env.end()) fail("unknown name " + n);
        auto [id, ty] = it->second;
        if (ty->is_base()) return slot(id);
        auto ts = arg_types(ty);
        std::vector<Value> args;
        if (!eat('(')) fail("'(' expected after functional " + n);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            if (k && !eat(',')) fail("',' expected");
            bool paren = !ts[k]->is_base() && eat('(');
            args.push_back(value(ts[k]));
            if (paren && !eat(')')) fail("')' expected");
        }
        if (!eat(')')) fail("')' expected");
        return call(id, args);
    }
};

}  // namespace

Value parse_value(const std::string& text, const std::vector<Type>& ptypes)
{
    ExprParser p;
    p.s = text;
    Type t = arrows(ptypes, base_type("o"));
    Value v = ptypes.empty() ? Value{{}, {}, nullptr} : Value{};
    if (ptypes.empty()) {
        p.ws();
        if (p.eat('\\')) {
            p.ws();
            if (!p.eat('.')) p.fail("no parameters expected");
        }
        v.body = p.expr();
    } else {
        v = p.value(t);
    }
    p.ws();
    if (p.i != p.s.size()) p.fail("trailing input");
    return v;
}

// ---------------------------------------------------------------- sampling

Nat eval(const ExprP& e, const Sample& s)
{
    switch (e->k) {
    case Expr::K::Const: return e->c;
    case Expr::K::Slot: {
        auto it = s.base.find(e->id);
        return it == s.base.end() ? 0 : it->second;
    }
    case Expr::K::Add: return eval(e->a, s) + eval(e->b, s);
    case Expr::K::Mul: return eval(e->a, s) * eval(e->b, s);
    case Expr::K::Max: return std::max(eval(e->a, s), eval(e->b, s));
    case Expr::K::Call: {
        std::vector<Nat> args;
        for (auto& v : e->args) {
            if (v.params.empty()) {
                args.push_back(eval(v.body, s));
            } else {
                // Functional arguments are observed through their value at 0.
                Sample z = s;
                for (auto p : v.params) z.base[p] = 0;
                for (auto p : v.params) z.fun[p] = [](const std::vector<Nat>&) -> Nat { return 0; };
                args.push_back(eval(v.body, z));
            }
        }
        auto it = s.fun.find(e->id);
        if (it == s.fun.end()) return 0;
        return it->second(args);
    }
    }
    return 0;
}

void collect_slots(const ExprP& e, std::map<int, int>& out)
{
    switch (e->k) {
    case Expr::K::Const: break;
    case Expr::K::Slot: out.emplace(e->id, 0); break;
    case Expr::K::Add:
    case Expr::K::Mul:
    case Expr::K::Max:
        collect_slots(e->a, out);
        collect_slots(e->b, out);
        break;
    case Expr::K::Call:
        out.emplace(e->id, static_cast<int>(e->args.size()));
        for (auto& v : e->args) {
            std::map<int, int> inner;
            collect_slots(v.body, inner);
            for (auto p : v.params) inner.erase(p);
            out.insert(inner.begin(), inner.end());
        }
        break;
    }
}

void randomize(Sample& s, const std::map<int, int>& slots, std::mt19937& rng)
{
    std::uniform_int_distribution<int> small(0, 5), kind(0, 2);
    for (auto [id, arity] : slots) {
        if (arity == 0) {
            s.base[id] = small(rng);
            continue;
        }
        int k = small(rng);
        switch (kind(rng)) {
        case 0: s.fun[id] = [k](const std::vector<Nat>&) -> Nat { return k; }; break;
        case 1:
            s.fun[id] = [k](const std::vector<Nat>& a) -> Nat {
                Nat t = k;
                for (Nat x : a) t += x;
                return t;
            };
            break;
        default:
            s.fun[id] = [](const std::vector<Nat>& a) -> Nat {
                Nat t = 0;
                for (Nat x : a) t += x;
                return 2 * t;
            };
        }
    }
}

}  // namespace hodp::poly
