#include "hodp/certificate.hpp"

#include <algorithm>
#include <random>
#include <regex>
#include <set>
#include <sstream>

namespace hodp {

std::string kind_name(Certificate::Kind k)
{
    switch (k) {
    case Certificate::Kind::Projection: return "PROJECTION";
    case Certificate::Kind::Poly: return "POLY";
    case Certificate::Kind::Rpo: return "ARGFUN+RPO";
    }
    return "?";
}

namespace {

std::string strict_line(const std::vector<int>& s)
{
    std::string out = "strict:";
    for (int i : s) out += " " + std::to_string(i);
    return out;
}

std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& line, const std::string& why)
{
    throw Error(Error::Kind::Syntax, "certificate line '" + line + "': " + why);
}

// "key(name) = value"
std::pair<std::string, std::string> keyed(const std::string& line, const std::string& key)
{
    if (line.rfind(key + "(", 0) != 0) bad(line, "expected " + key + "(...)");
    std::size_t eq = line.find(") = ", key.size() + 1);
    if (eq == std::string::npos) bad(line, "expected ') = '");
    return {line.substr(key.size() + 1, eq - key.size() - 1), trim(line.substr(eq + 4))};
}

std::vector<Type> param_types(const Sym& f)
{
    std::vector<Type> ts = f->inputs;
    for (Type t : arg_types(f->output)) ts.push_back(t);
    return ts;
}

Sym need_symbol(const AFS& afs, const std::string& name, const std::string& line)
{
    Sym f = afs.symbol(name);
    if (!f) bad(line, "unknown symbol " + name);
    return f;
}

void collect_syms(const Term& t, std::map<std::string, Sym>& out)
{
    if (t->is_fun()) out.emplace(t->sym->name, t->sym);
    for (auto& k : t->kids) collect_syms(k, out);
}

std::map<std::string, Sym> constraint_symbols(const ConstraintSet& cs)
{
    std::map<std::string, Sym> out;
    for (auto& c : cs.all()) {
        collect_syms(c.lhs, out);
        collect_syms(c.rhs, out);
    }
    return out;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

std::vector<std::string> certificate_lines(const Certificate& c, const AFS& afs)
{
    std::vector<std::string> out;
    switch (c.kind) {
    case Certificate::Kind::Projection:
        for (auto& [f, i] : c.nu) out.push_back("nu(" + f + ") = " + std::to_string(i + 1));
        break;
    case Certificate::Kind::Poly:
        for (auto& [f, v] : c.J.J) out.push_back("J(" + f + ") = " + poly::print_value(v));
        break;
    case Certificate::Kind::Rpo:
        for (auto& [f, ch] : c.pi) {
            Sym s = afs.symbol(f);
            out.push_back("pi(" + f + ") = " + rpo::to_string(ch, s ? s->arity() : -1));
        }
        for (auto& [f, g] : c.prec) out.push_back("prec " + f + " > " + g);
        break;
    }
    out.push_back(strict_line(c.strict));
    return out;
}

Certificate parse_certificate(Certificate::Kind kind, const std::vector<std::string>& lines, const AFS& afs)
{
    Certificate c;
    c.kind = kind;
    bool have_strict = false;
    for (auto& raw : lines) {
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.rfind("strict:", 0) == 0) {
            std::istringstream is(line.substr(7));
            int i;
            while (is >> i) c.strict.push_back(i);
            if (!is.eof()) bad(line, "pair numbers expected");
            have_strict = true;
            continue;
        }
        switch (kind) {
        case Certificate::Kind::Projection: {
            auto [f, v] = keyed(line, "nu");
            try {
                c.nu[f] = std::stoi(v) - 1;
            } catch (const std::exception&) {
                bad(line, "index expected");
            }
            break;
        }
        case Certificate::Kind::Poly: {
            auto [f, v] = keyed(line, "J");
            Sym s = need_symbol(afs, f, line);
            c.J.J[f] = poly::parse_value(v, param_types(s));
            break;
        }
        case Certificate::Kind::Rpo: {
            if (line.rfind("prec ", 0) == 0) {
                std::istringstream is(line.substr(5));
                std::string f, gt, g;
                if (!(is >> f >> gt >> g) || gt != ">") bad(line, "expected 'prec f > g'");
                c.prec.push_back({f, g});
                break;
            }
            auto [f, v] = keyed(line, "pi");
            Sym s = need_symbol(afs, f, line);
            rpo::PiChoice ch;
            auto inner = [&](const std::string& key) {
                if (v.rfind(key + "(", 0) != 0 || v.back() != ')') return std::optional<std::string>{};
                return std::optional<std::string>{v.substr(key.size() + 1, v.size() - key.size() - 2)};
            };
            if (v == "id") {
                for (int i = 0; i < s->arity(); ++i) ch.keep.push_back(i);
            } else if (auto k = inner("keep")) {
                std::istringstream is(*k);
                std::string tok;
                while (std::getline(is, tok, ',')) {
                    if (trim(tok).empty()) continue;
                    try {
                        ch.keep.push_back(std::stoi(tok) - 1);
                    } catch (const std::exception&) {
                        bad(line, "position expected");
                    }
                }
            } else if (auto a = inner("arg")) {
                ch.k = rpo::PiChoice::K::Arg;
                try {
                    ch.arg = std::stoi(*a) - 1;
                } catch (const std::exception&) {
                    bad(line, "position expected");
                }
            } else if (auto r = inner("rule")) {
                ch.k = rpo::PiChoice::K::Rule;
                bool found = false;
                for (auto& rule : afs.rules)
                    if (rule.label == *r && rule.lhs->is_fun() && rule.lhs->sym->name == plain(s)->name) {
                        ch.rule = rule;
                        found = true;
                    }
                if (!found) bad(line, "no rule " + *r + " for " + f);
            } else {
                bad(line, "unknown argument function");
            }
            c.pi[f] = ch;
            break;
        }
        }
    }
    if (!have_strict) throw Error(Error::Kind::Syntax, "certificate without a strict: line");
    return c;
}

bool sample_monotone(const Sym& f, const poly::Value& v, int samples, unsigned seed)
{
    (void)f;
    std::mt19937 rng(seed);
    std::map<int, int> slots;
    poly::collect_slots(v.body, slots);
    for (std::size_t j = 0; j < v.params.size(); ++j) slots.emplace(v.params[j], arity_of(v.ptypes[j]));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(v.params.size()) - 1), bump(1, 3);
    for (int k = 0; k < samples && !v.params.empty(); ++k) {
        poly::Sample s;
        poly::randomize(s, slots, rng);
        poly::Nat before = poly::eval(v.body, s);
        int j = pick(rng);
        int p = v.params[j];
        poly::Nat d = bump(rng);
        if (v.ptypes[j]->is_base()) {
            s.base[p] += d;
        } else {
            auto old = s.fun[p];
            s.fun[p] = [old, d](const std::vector<poly::Nat>& a) { return old(a) + d; };
        }
        if (poly::eval(v.body, s) < before) return false;
    }
    return true;
}

bool sample_constraints(const ConstraintSet& cs, const poly::Interpretation& I, const std::vector<int>& strict,
                        int samples, unsigned seed)
{
    std::mt19937 rng(seed);
    for (auto& c : cs.all()) {
        std::map<std::string, int> vars;
        poly::Value l = poly::interpret(c.lhs, I, vars);
        poly::Value r = poly::interpret(c.rhs, I, vars);
        std::vector<poly::Value> ps;
        for (Type t : l.ptypes) ps.push_back(poly::eta(poly::fresh_slot(), t));
        poly::ExprP lb = poly::apply(l, ps).body, rb = poly::apply(r, ps).body;
        std::map<int, int> slots;
        poly::collect_slots(lb, slots);
        poly::collect_slots(rb, slots);
        bool want_strict = c.pair > 0 && contains(strict, c.pair);
        for (int k = 0; k < samples; ++k) {
            poly::Sample s;
            poly::randomize(s, slots, rng);
            poly::Nat a = poly::eval(lb, s), b = poly::eval(rb, s);
            if (a < b || (want_strict && a == b)) return false;
        }
    }
    return true;
}

namespace {

Verdict fail(const std::string& why)
{
    Verdict v;
    v.reason = why;
    return v;
}

std::string describe(const Constraint& c) { return c.origin + ": " + to_string(c.lhs) + " vs " + to_string(c.rhs); }

Verdict check_projection(const std::vector<DependencyPair>& scc, const Certificate& c)
{
    if (is_collapsing(scc)) return fail("projection on a collapsing set");
    Verdict v;
    for (auto& p : scc) {
        int st = projection_status(p, c.nu);
        if (st == 0) return fail("pair " + std::to_string(p.index) + " is not decreasing under nu");
        if (st == 2) v.strict.push_back(p.index);
    }
    for (int s : c.strict)
        if (!contains(v.strict, s)) return fail("pair " + std::to_string(s) + " is not strictly decreasing");
    v.strict = c.strict;
    if (v.strict.empty()) return fail("no strict pair");
    v.valid = true;
    return v;
}

Verdict check_poly(const ConstraintSet& cs, const Certificate& c)
{
    auto syms = constraint_symbols(cs);
    for (auto& [name, val] : c.J.J) {
        auto it = syms.find(name);
        if (it == syms.end()) continue;
        if (!poly::s_condition(it->second, val) && cs.S.count(name))
            return fail("S condition fails for " + name);
        if (!sample_monotone(it->second, val, 200, 17)) return fail("J(" + name + ") is not monotone");
    }
    for (auto& name : cs.S) {
        auto it = syms.find(name);
        if (it != syms.end() && !c.J.J.count(name) && !poly::s_condition(it->second, c.J.of(it->second)))
            return fail("S condition fails for " + name);
    }
    for (auto& k : cs.all()) {
        bool strict = k.pair > 0 && contains(c.strict, k.pair);
        bool ok = strict ? poly::orient_strict(k, c.J) : poly::orient_weak(k, c.J);
        if (!ok) return fail(std::string(strict ? "strict" : "weak") + " constraint fails, " + describe(k));
    }
    for (int s : c.strict) {
        bool known = false;
        for (auto& k : cs.strict) known |= k.pair == s;
        if (!known) return fail("pair " + std::to_string(s) + " is not in the problem");
    }
    if (c.strict.empty()) return fail("no strict pair");
    Verdict v;
    v.valid = true;
    v.strict = c.strict;
    return v;
}

bool valid_choice(const Sym& f, const rpo::PiChoice& ch)
{
    int n = f->arity();
    switch (ch.k) {
    case rpo::PiChoice::K::Keep:
        for (std::size_t i = 0; i < ch.keep.size(); ++i)
            if (ch.keep[i] < 0 || ch.keep[i] >= n || (i && ch.keep[i] <= ch.keep[i - 1])) return false;
        return true;
    case rpo::PiChoice::K::Arg: return ch.arg >= 0 && ch.arg < n && f->inputs[ch.arg] == f->output;
    case rpo::PiChoice::K::Rule: {
        const Term& l = ch.rule.lhs;
        if (!l->is_fun() || l->sym->name != plain(f)->name || l->sym->arity() != n) return false;
        std::set<std::string> seen;
        for (auto& a : l->kids)
            if (!a->is_var() || !seen.insert(a->name).second) return false;
        return true;
    }
    }
    return false;
}

Verdict check_rpo(const ConstraintSet& cs, const Certificate& c, const AFS& afs)
{
    auto syms = constraint_symbols(cs);
    rpo::Precedence prec;
    for (auto& [f, g] : c.prec) {
        auto a = syms.find(f), b = syms.find(g);
        Sym fs = a != syms.end() ? a->second : make_symbol(f, {}, base_type("o"), SymKind::Extension, f);
        Sym gs = b != syms.end() ? b->second : make_symbol(g, {}, base_type("o"), SymKind::Extension, g);
        if (f.rfind("@", 0) == 0 || f.rfind("\\", 0) == 0 || f.rfind("!c", 0) == 0 || g.rfind("@", 0) == 0 ||
            g.rfind("\\", 0) == 0 || g.rfind("!c", 0) == 0)
            return fail("precedence fact on a built-in symbol: " + f + " > " + g);
        if (!prec.add(fs, gs)) return fail("precedence is cyclic at " + f + " > " + g);
    }
    for (auto& [name, ch] : c.pi) {
        auto it = syms.find(name);
        if (it == syms.end()) continue;
        if (it->second->kind == SymKind::Fresh || rpo::classify_symbol(it->second) != rpo::SymClass::User ||
            is_pairing(it->second)) {
            if (!ch.identity(it->second->arity())) return fail("argument function on a fixed symbol " + name);
            continue;
        }
        if (!valid_choice(it->second, ch)) return fail("invalid argument function for " + name);
        if (cs.S.count(name) && !rpo::s_subterm_ok(it->second, ch)) return fail("S-subterm property fails for " + name);
    }
    for (auto& k : cs.all()) {
        Term l = rpo::embed(k.lhs, c.pi, afs);
        Term r = rpo::embed(k.rhs, c.pi, afs);
        bool strict = k.pair > 0 && contains(c.strict, k.pair);
        bool ok = strict ? rpo::gt(l, r, prec) : rpo::geq(l, r, prec);
        if (!ok) return fail(std::string(strict ? "strict" : "weak") + " constraint fails, " + describe(k));
    }
    if (c.strict.empty()) return fail("no strict pair");
    for (int s : c.strict) {
        bool known = false;
        for (auto& k : cs.strict) known |= k.pair == s;
        if (!known) return fail("pair " + std::to_string(s) + " is not in the problem");
    }
    Verdict v;
    v.valid = true;
    v.strict = c.strict;
    return v;
}

}  // namespace

Verdict check_certificate(const std::vector<DependencyPair>& scc, const ConstraintSet& cs, const Certificate& c,
                          const AFS& afs)
{
    try {
        switch (c.kind) {
        case Certificate::Kind::Projection: return check_projection(scc, c);
        case Certificate::Kind::Poly: return check_poly(cs, c);
        case Certificate::Kind::Rpo: return check_rpo(cs, c, afs);
        }
    } catch (const Error& e) {
        return fail(e.what());
    }
    return fail("unknown certificate kind");
}

namespace {

// Candidate lowerings of one printed value: a number n becomes n - 1, an
// occurrence of a base parameter becomes 0.
std::vector<std::string> lowerings(const std::string& text)
{
    static const std::regex tok(R"(\b(\d+|x\d+)\b)");
    std::size_t dot = text.find(". ");
    std::size_t from = dot == std::string::npos ? 0 : dot + 2;
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(text.begin() + from, text.end(), tok); it != std::sregex_iterator(); ++it) {
        std::string m = (*it)[1];
        if (m == "0") continue;
        std::size_t pos = from + static_cast<std::size_t>(it->position(1));
        std::string rep = std::isdigit(static_cast<unsigned char>(m[0])) ? std::to_string(std::stoi(m) - 1) : "0";
        out.push_back(text.substr(0, pos) + rep + text.substr(pos + m.size()));
    }
    return out;
}

bool accepts(const std::vector<DependencyPair>& scc, const ConstraintSet& cs, const Certificate& c, const AFS& afs)
{
    Verdict v = check_certificate(scc, cs, c, afs);
    if (!v.valid) return false;
    auto a = v.strict, b = c.strict;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
}

}  // namespace

Certificate minimize_certificate(const std::vector<DependencyPair>& scc, const ConstraintSet& cs, Certificate c,
                                 const AFS& afs)
{
    switch (c.kind) {
    case Certificate::Kind::Projection: break;
    case Certificate::Kind::Poly:
        for (auto& entry : std::map<std::string, poly::Value>(c.J.J)) {
            const std::string& name = entry.first;
            for (bool changed = true; changed;) {
                changed = false;
                const poly::Value cur = c.J.J[name];
                for (auto& cand : lowerings(poly::print_value(cur))) {
                    Certificate t = c;
                    try {
                        t.J.J[name] = poly::parse_value(cand, cur.ptypes);
                    } catch (const Error&) {
                        continue;
                    }
                    if (!accepts(scc, cs, t, afs)) continue;
                    c = t;
                    changed = true;
                    break;
                }
            }
        }
        break;
    case Certificate::Kind::Rpo:
        for (std::size_t i = c.prec.size(); i-- > 0;) {
            Certificate t = c;
            t.prec.erase(t.prec.begin() + static_cast<long>(i));
            if (accepts(scc, cs, t, afs)) c = t;
        }
        for (auto it = c.pi.begin(); it != c.pi.end();) {
            Certificate t = c;
            t.pi.erase(it->first);
            if (accepts(scc, cs, t, afs)) {
                c = t;
                it = c.pi.begin();
            } else {
                ++it;
            }
        }
        break;
    }
    return c;
}

}  // namespace hodp
