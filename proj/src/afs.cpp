#include "hodp/afs.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace hodp {

Sym AFS::symbol(const std::string& name) const
{
    if (name.size() > 1 && (name.back() == '#' || name.back() == '-')) {
        auto it = symbols.find(name.substr(0, name.size() - 1));
        if (it == symbols.end()) return nullptr;
        return name.back() == '#' ? marked(it->second) : tagged(it->second);
    }
    auto it = symbols.find(name);
    return it == symbols.end() ? nullptr : it->second;
}

std::vector<Sym> AFS::constructors() const
{
    std::vector<Sym> out;
    for (auto& f : signature)
        if (!defined.count(f->name)) out.push_back(f);
    return out;
}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok { Ident, Fresh, LParen, RParen, LBrack, RBrack, Comma, Colon, Star, Arrow, DArrow, At, Lambda, Dot, End };

struct Token {
    Tok kind;
    std::string text;
    int col;
};

struct Lexer {
    std::string src;
    int line;
    int col0;

    [[noreturn]] void fail(int col, const std::string& msg) const
    {
        throw Error(Error::Kind::Syntax,
                    "line " + std::to_string(line) + ", column " + std::to_string(col0 + col + 1) + ": " + msg);
    }

    std::vector<Token> run()
    {
        std::vector<Token> out;
        std::size_t i = 0;
        auto ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
        auto ident_char = [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
        };
        while (i < src.size()) {
            char c = src[i];
            int col = static_cast<int>(i);
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (ident_start(c)) {
                std::size_t j = i + 1;
                while (j < src.size() && ident_char(src[j])) ++j;
                if (j < src.size() && src[j] == '#') ++j;
                else if (j < src.size() && src[j] == '-' && (j + 1 >= src.size() || src[j + 1] != '>')) ++j;
                out.push_back({Tok::Ident, src.substr(i, j - i), col});
                i = j;
                continue;
            }
            if (c == '!' && src.compare(i, 3, "!c{") == 0) {
                int depth = 0;
                std::size_t j = i + 2;
                for (; j < src.size(); ++j) {
                    if (src[j] == '{') ++depth;
                    if (src[j] == '}' && --depth == 0) break;
                }
                if (j >= src.size()) fail(col, "unterminated fresh constant");
                out.push_back({Tok::Fresh, src.substr(i + 3, j - i - 3), col});
                i = j + 1;
                continue;
            }
            if (src.compare(i, 2, "->") == 0) {
                out.push_back({Tok::Arrow, "->", col});
                i += 2;
                continue;
            }
            if (src.compare(i, 2, "=>") == 0) {
                out.push_back({Tok::DArrow, "=>", col});
                i += 2;
                continue;
            }
            Tok k;
            switch (c) {
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '[': k = Tok::LBrack; break;
            case ']': k = Tok::RBrack; break;
            case ',': k = Tok::Comma; break;
            case ':': k = Tok::Colon; break;
            case '*': k = Tok::Star; break;
            case '@': k = Tok::At; break;
            case '\\': k = Tok::Lambda; break;
            case '.': k = Tok::Dot; break;
            default: fail(col, std::string("unexpected character '") + c + "'");
            }
            out.push_back({k, std::string(1, c), col});
            ++i;
        }
        out.push_back({Tok::End, "", static_cast<int>(src.size())});
        return out;
    }
};

struct Parser {
    Lexer lex;
    std::vector<Token> toks;
    std::size_t pos = 0;
    const ParseEnv* env = nullptr;
    std::vector<std::pair<std::string, Term>> scope;  // bound names
    int counter = 0;

    Parser(const std::string& text, int line, int col0) : lex{text, line, col0} { toks = lex.run(); }

    const Token& peek() const { return toks[pos]; }
    bool at(Tok k) const { return toks[pos].kind == k; }
    [[noreturn]] void fail(const std::string& msg) const { lex.fail(toks[pos].col, msg); }
    Token expect(Tok k, const char* what)
    {
        if (!at(k)) fail(std::string("expected ") + what + (peek().text.empty() ? "" : ", found '" + peek().text + "'"));
        return toks[pos++];
    }

    Type type()
    {
        Type left;
        if (at(Tok::LParen)) {
            ++pos;
            left = type();
            expect(Tok::RParen, "')'");
        } else {
            Token t = expect(Tok::Ident, "a type");
            left = base_type(t.text);
        }
        if (at(Tok::Arrow)) {
            ++pos;
            return arrow(left, type());
        }
        return left;
    }

    std::pair<std::vector<Type>, Type> decl()
    {
        if (!at(Tok::LBrack)) return {{}, type()};
        ++pos;
        std::vector<Type> ins;
        if (!at(Tok::RBrack)) {
            ins.push_back(type());
            while (at(Tok::Star) || at(Tok::Comma)) {
                ++pos;
                ins.push_back(type());
            }
        }
        expect(Tok::RBrack, "']'");
        expect(Tok::Arrow, "'->'");
        return {ins, type()};
    }

    template <class F>
    Term typed(F&& f)
    {
        int col = peek().col;
        try {
            return f();
        } catch (const Error& e) {
            if (e.kind != Error::Kind::IllTyped || std::string(e.what()).rfind("line ", 0) == 0) throw;
            throw Error(Error::Kind::IllTyped, "line " + std::to_string(lex.line) + ", column " +
                                                    std::to_string(lex.col0 + col + 1) + ": " + e.what());
        }
    }

    Term term()
    {
        if (at(Tok::Lambda)) {
            ++pos;
            Token name = expect(Tok::Ident, "a bound variable");
            Type ty = nullptr;
            if (at(Tok::Colon)) {
                ++pos;
                ty = type();
            } else if (auto v = env->var(name.text)) {
                ty = *v;
            } else {
                lex.fail(name.col, "bound variable " + name.text + " has no declared type");
            }
            expect(Tok::Dot, "'.'");
            Term x = mk_var("%p" + std::to_string(++counter), ty);
            scope.push_back({name.text, x});
            Term body = term();
            scope.pop_back();
            Term l = mk_lam(x, body);
            return mk_abs_raw(name.text, ty, l->kids[0]);
        }
        Term t = atom();
        while (at(Tok::At)) {
            ++pos;
            Term a = at(Tok::Lambda) ? term() : atom();
            t = typed([&] { return mk_app(t, a); });
        }
        return t;
    }

    Term atom()
    {
        if (at(Tok::LParen)) {
            ++pos;
            Term t = term();
            expect(Tok::RParen, "')'");
            return t;
        }
        if (at(Tok::Fresh)) {
            Token t = toks[pos++];
            Parser sub(t.text, lex.line, lex.col0 + t.col + 3);
            Type ty = sub.type();
            if (!sub.at(Tok::End)) sub.fail("trailing input in fresh constant type");
            return mk_fun(fresh_constant(ty), {});
        }
        Token id = expect(Tok::Ident, "a term");
        if (at(Tok::LParen)) {
            Sym f = env->symbol(id.text);
            if (!f) lex.fail(id.col, "unknown function symbol " + id.text);
            ++pos;
            std::vector<Term> args;
            if (!at(Tok::RParen)) {
                args.push_back(term());
                while (at(Tok::Comma)) {
                    ++pos;
                    args.push_back(term());
                }
            }
            expect(Tok::RParen, "')'");
            return typed([&] { return mk_fun(f, args); });
        }
        for (auto it = scope.rbegin(); it != scope.rend(); ++it)
            if (it->first == id.text) return it->second;
        if (Sym f = env->symbol(id.text)) {
            if (f->arity() != 0)
                throw Error(Error::Kind::IllTyped, "line " + std::to_string(lex.line) + ", column " +
                                                       std::to_string(lex.col0 + id.col + 1) + ": symbol " +
                                                       f->name + " expects " + std::to_string(f->arity()) +
                                                       " arguments, got 0");
            return mk_fun(f, {});
        }
        if (auto v = env->var(id.text)) return mk_var(id.text, *v);
        lex.fail(id.col, "undeclared identifier " + id.text);
    }
};

std::string trim(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool is_identifier(const std::string& s)
{
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'')) return false;
    return true;
}

}  // namespace

Type parse_type(const std::string& text)
{
    Parser p(text, 1, 0);
    Type t = p.type();
    if (!p.at(Tok::End)) p.fail("trailing input after type");
    return t;
}

Term parse_term_with(const std::string& text, const ParseEnv& env)
{
    Parser p(text, 1, 0);
    p.env = &env;
    Term t = p.term();
    if (!p.at(Tok::End)) p.fail("trailing input after term");
    return t;
}

Term parse_term(const std::string& text, const AFS& afs, const std::map<std::string, Type>& extra_vars)
{
    ParseEnv env;
    env.symbol = [&](const std::string& n) { return afs.symbol(n); };
    env.var = [&](const std::string& n) -> std::optional<Type> {
        if (auto it = extra_vars.find(n); it != extra_vars.end()) return it->second;
        if (auto it = afs.var_types.find(n); it != afs.var_types.end()) return it->second;
        return std::nullopt;
    };
    return parse_term_with(text, env);
}

// ---------------------------------------------------------------- validation

void validate_rule(const Term& lhs, const Term& rhs)
{
    Term h = head(lhs);
    if (!h->is_fun())
        throw Error(Error::Kind::IllegalLhs, "left-hand side " + to_string(lhs) +
                                                 " must have the form f(l1, ..., ln) @ ... ; offending head " +
                                                 to_string(h));
    std::function<void(const Term&)> no_redex = [&](const Term& t) {
        if (t->is_app() && t->kids[0]->is_abs())
            throw Error(Error::Kind::IllegalLhs,
                        "left-hand side " + to_string(lhs) + " contains the beta-redex " + to_string(t));
        for (auto& k : t->kids) no_redex(k);
    };
    if (lhs->loose == 0) no_redex(lhs);
    if (lhs->type != rhs->type)
        throw Error(Error::Kind::IllTyped, "rule sides have different types: " + to_string(lhs->type) + " and " +
                                               to_string(rhs->type));
    auto lv = free_vars(lhs);
    for (auto& v : free_vars(rhs)) {
        bool found = false;
        for (auto& w : lv) found = found || (w->name == v->name && w->type == v->type);
        if (!found)
            throw Error(Error::Kind::IllegalLhs,
                        "variable " + v->name + " of the right-hand side does not occur in " + to_string(lhs));
    }
}

// ---------------------------------------------------------------- file parsing

AFS parse_afs(const std::string& text)
{
    AFS afs;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    enum class Sec { None, Sig, Vars, Rules } sec = Sec::None;
    struct PendingRule {
        std::string lhs, rhs;
        int line, lcol, rcol;
    };
    std::vector<PendingRule> pending;
    while (std::getline(in, raw)) {
        ++line_no;
        // A '#' at the start of a line or after whitespace opens a comment; f# is a marked symbol.
        std::size_t cpos = std::string::npos;
        for (std::size_t i = 0; i < raw.size(); ++i)
            if (raw[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(raw[i - 1])))) {
                cpos = i;
                break;
            }
        if (cpos != std::string::npos) {
            std::string comment = trim(raw.substr(cpos + 1));
            if (comment.rfind("expect:", 0) == 0) afs.expect = trim(comment.substr(7));
            raw = raw.substr(0, cpos);
        }
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (line == "SIG") {
            sec = Sec::Sig;
            continue;
        }
        if (line == "VARS") {
            sec = Sec::Vars;
            continue;
        }
        if (line == "RULES") {
            sec = Sec::Rules;
            continue;
        }
        int indent = static_cast<int>(raw.find_first_not_of(" \t"));
        auto syntax = [&](const std::string& msg) {
            throw Error(Error::Kind::Syntax, "line " + std::to_string(line_no) + ": " + msg);
        };
        if (sec == Sec::None) syntax("expected SIG, VARS or RULES block");
        if (sec == Sec::Sig || sec == Sec::Vars) {
            auto colon = line.find(':');
            if (colon == std::string::npos) syntax("expected 'name : type'");
            std::string name = trim(line.substr(0, colon));
            if (!is_identifier(name)) syntax("invalid identifier '" + name + "'");
            Parser p(line.substr(colon + 1), line_no, indent + static_cast<int>(colon) + 1);
            if (sec == Sec::Sig) {
                auto [ins, out] = p.decl();
                if (!p.at(Tok::End)) p.fail("trailing input in declaration");
                if (afs.symbols.count(name)) syntax("symbol " + name + " declared twice");
                if (afs.var_types.count(name)) syntax(name + " declared both as symbol and variable");
                Sym f = make_symbol(name, ins, out);
                afs.symbols[name] = f;
                afs.signature.push_back(f);
            } else {
                Type t = p.type();
                if (!p.at(Tok::End)) p.fail("trailing input in variable declaration");
                if (afs.var_types.count(name)) syntax("variable " + name + " declared twice");
                if (afs.symbols.count(name)) syntax(name + " declared both as symbol and variable");
                afs.var_types[name] = t;
            }
            continue;
        }
        auto arrow_pos = line.find("=>");
        if (arrow_pos == std::string::npos) syntax("expected 'lhs => rhs'");
        pending.push_back({line.substr(0, arrow_pos), line.substr(arrow_pos + 2), line_no, indent,
                           indent + static_cast<int>(arrow_pos) + 2});
    }
    ParseEnv env;
    env.symbol = [&](const std::string& n) -> Sym {
        // User input may only mention plain symbols.
        auto it = afs.symbols.find(n);
        return it == afs.symbols.end() ? nullptr : it->second;
    };
    env.var = [&](const std::string& n) -> std::optional<Type> {
        auto it = afs.var_types.find(n);
        if (it == afs.var_types.end()) return std::nullopt;
        return it->second;
    };
    int idx = 0;
    for (auto& pr : pending) {
        Parser pl(pr.lhs, pr.line, pr.lcol);
        pl.env = &env;
        Term l = pl.term();
        if (!pl.at(Tok::End)) pl.fail("trailing input in left-hand side");
        Parser prr(pr.rhs, pr.line, pr.rcol);
        prr.env = &env;
        Term r = prr.term();
        if (!prr.at(Tok::End)) prr.fail("trailing input in right-hand side");
        try {
            validate_rule(l, r);
        } catch (const Error& e) {
            throw Error(e.kind, "line " + std::to_string(pr.line) + ": " + e.what());
        }
        afs.rules.push_back({l, r, RuleOrigin::User, std::to_string(++idx)});
        afs.defined.insert(head(l)->sym->name);
    }
    return afs;
}

AFS load_afs(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw Error(Error::Kind::Usage, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_afs(ss.str());
}

// ---------------------------------------------------------------- completion

namespace {

std::set<std::string> names_in_use(const AFS& afs)
{
    std::set<std::string> used;
    for (auto& [n, t] : afs.var_types) used.insert(n);
    for (auto& [n, f] : afs.symbols) used.insert(n);
    for (auto& r : afs.rules) {
        collect_var_names(r.lhs, used);
        collect_var_names(r.rhs, used);
    }
    return used;
}

}  // namespace

AFS complete(const AFS& afs)
{
    AFS out = afs;
    auto used = names_in_use(afs);
    int next = static_cast<int>(out.rules.size());
    for (std::size_t i = 0; i < out.rules.size(); ++i) {
        Rule r = out.rules[i];
        if (!r.rhs->is_abs()) continue;
        std::string n = fresh_name(r.rhs->name.empty() || r.rhs->name[0] == '%' ? "x" : r.rhs->name, used);
        used.insert(n);
        Term x = mk_var(n, r.rhs->binder);
        Rule added{mk_app(r.lhs, x), instantiate(r.rhs->kids[0], x), RuleOrigin::Completion, ""};
        bool present = false;
        for (auto& q : out.rules) present = present || rule_equal(q, added);
        if (present) continue;
        added.label = std::to_string(++next);
        out.rules.push_back(added);
    }
    return out;
}

// ---------------------------------------------------------------- classification

std::set<std::string> lhs_variables_repeated(const Term& lhs)
{
    std::map<std::string, int> count;
    std::function<void(const Term&)> go = [&](const Term& t) {
        if (t->is_var()) ++count[t->name];
        for (auto& k : t->kids) go(k);
    };
    go(lhs);
    std::set<std::string> out;
    for (auto& [n, c] : count)
        if (c > 1) out.insert(n);
    return out;
}

namespace {

bool var_below_abs(const Term& t, bool under)
{
    if (t->is_var()) return under;
    for (auto& k : t->kids)
        if (var_below_abs(k, under || t->is_abs())) return true;
    return false;
}

bool defined_below_binder(const Term& t, const AFS& afs)
{
    if (t->is_fun() && afs.is_defined(t->sym) && t->loose > 0) return true;
    for (auto& k : t->kids)
        if (defined_below_binder(k, afs)) return true;
    return false;
}

}  // namespace

AFS classify(AFS afs)
{
    afs.defined.clear();
    for (auto& r : afs.rules) afs.defined.insert(head(r.lhs)->sym->name);
    afs.left_linear = afs.fully_extended = afs.base_output = afs.pfp = true;
    for (auto& f : afs.signature)
        if (!f->output->is_base()) afs.base_output = false;
    bool no_defined_under_binder = true;
    for (auto& r : afs.rules) {
        if (!lhs_variables_repeated(r.lhs).empty()) afs.left_linear = false;
        if (var_below_abs(r.lhs, false)) afs.fully_extended = false;
        std::vector<Term> ls = head(r.lhs)->kids;
        for (auto& a : app_args(r.lhs)) ls.push_back(a);
        for (auto& v : free_vars(r.rhs)) {
            if (v->type->is_base()) continue;
            bool direct = false;
            for (auto& li : ls) direct = direct || alpha_equal(li, v);
            if (!direct) afs.pfp = false;
        }
        if (defined_below_binder(r.rhs, afs)) no_defined_under_binder = false;
    }
    afs.local = afs.left_linear && afs.fully_extended;
    afs.spfp = afs.pfp && afs.base_output && no_defined_under_binder;
    return afs;
}

std::vector<Rule> build_rplus(const AFS& afs)
{
    std::vector<Rule> out = afs.rules;
    auto used = names_in_use(afs);
    for (auto& r : afs.rules) {
        if (r.rhs->is_abs() || r.lhs->type->is_base()) continue;
        Term l = r.lhs, rr = r.rhs;
        int k = 0;
        for (Type t : arg_types(r.lhs->type)) {
            std::string n = fresh_name("x", used);
            used.insert(n);
            Term x = mk_var(n, t);
            l = mk_app(l, x);
            rr = mk_app(rr, x);
            ++k;
            out.push_back({l, rr, RuleOrigin::RPlus, r.label + "+" + std::to_string(k)});
        }
    }
    return out;
}

}  // namespace hodp
