#include "hodp/engine.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <regex>
#include <sstream>

#include "hodp/poly.hpp"
#include "hodp/rpo.hpp"
#include "hodp/selection.hpp"
#include "hodp/subterm.hpp"

namespace hodp {

namespace {

double now_seconds()
{
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::string join(const std::vector<int>& v, const std::string& sep = " ")
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i]);
    return out;
}

std::string join(const std::vector<std::string>& v, const std::string& sep = ", ")
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
    return out;
}

std::vector<DependencyPair> pairs_of(const DPGraph& g, const std::vector<int>& nodes)
{
    std::vector<DependencyPair> out;
    for (int v : nodes) out.push_back(g.nodes[v]);
    return out;
}

std::vector<int> indices_of(const DPGraph& g, const std::vector<int>& nodes)
{
    std::vector<int> out;
    for (int v : nodes) out.push_back(g.nodes[v].index);
    return out;
}

std::vector<int> positions_of(const DPGraph& g, const std::vector<int>& indices)
{
    std::vector<int> out;
    for (int i : indices)
        for (int v = 0; v < g.size(); ++v)
            if (g.nodes[v].index == i) out.push_back(v);
    return out;
}

int edge_count(const DPGraph& g)
{
    int n = 0;
    for (auto& s : g.succ) n += static_cast<int>(s.size());
    return n;
}

std::vector<int> removed_by_prune(const DPGraph& before, const DPGraph& after)
{
    std::vector<int> out;
    for (int v = 0; v < before.size(); ++v)
        if (before.alive[v] && !after.alive[v]) out.push_back(before.nodes[v].index);
    return out;
}

std::string constraint_line(const Constraint& c, bool strict)
{
    return c.origin + ": " + to_string(c.lhs) + (strict ? " > " : " >= ") + to_string(c.rhs);
}

std::vector<std::string> labels(const std::vector<Rule>& rs)
{
    std::vector<std::string> out;
    for (auto& r : rs) out.push_back(rule_ref(r.label));
    return out;
}

}  // namespace

std::string rule_ref(const std::string& label)
{
    if (label.empty() || !std::all_of(label.begin(), label.end(), ::isdigit)) return label;
    int k = std::stoi(label);
    if (k < 1 || k > 26) return label;
    return label + " (" + std::string(1, static_cast<char>('A' + k - 1)) + ")";
}

Prepared prepare(const AFS& input)
{
    Prepared p;
    p.afs = classify(complete(input));
    p.dps = dependency_pairs(p.afs);
    p.graph = approximate_graph(p.dps, p.afs);
    return p;
}

Proof prove(const AFS& input, const Config& cfg)
{
    const double start = now_seconds();
    const double deadline = start + cfg.timeout;
    Prepared prep = prepare(input);

    Proof proof;
    proof.afs = prep.afs;
    proof.dps = prep.dps;
    proof.graph = prep.graph;

    ProofStep pre;
    pre.kind = ProofStep::Kind::Preparation;
    pre.local = prep.afs.local;
    pre.spfp = prep.afs.spfp;
    pre.static_mode = prep.dps.static_mode;
    pre.pair_count = static_cast<int>(prep.dps.pairs.size());
    pre.edge_count = edge_count(prep.graph);
    proof.steps.push_back(pre);

    DPGraph g = prep.graph;
    for (;;) {
        DPGraph pruned = prune(g);
        auto gone = removed_by_prune(g, pruned);
        if (!gone.empty()) {
            ProofStep st;
            st.kind = ProofStep::Kind::Prune;
            st.removed = gone;
            proof.steps.push_back(st);
        }
        g = pruned;
        auto comps = sccs(g);
        if (comps.empty()) {
            proof.verdict = Proof::Verdict::Yes;
            break;
        }
        const auto& comp = comps.front();
        auto scc = pairs_of(g, comp);
        auto idx = indices_of(g, comp);

        ProofStep give;
        give.kind = ProofStep::Kind::GiveUp;
        give.scc = idx;
        if (now_seconds() > deadline) {
            give.timeout = true;
            proof.steps.push_back(give);
            proof.blocking = idx;
            break;
        }
        const double scc_deadline = std::min(deadline, now_seconds() + cfg.per_scc);

        std::optional<ProofStep> done;
        if (cfg.use_subterm) {
            give.tried.push_back("subterm");
            if (auto pr = subterm_criterion(scc)) {
                ProofStep st;
                st.kind = ProofStep::Kind::Subterm;
                st.scc = idx;
                Certificate c;
                c.kind = Certificate::Kind::Projection;
                c.nu = pr->nu;
                c.strict = pr->strict;
                st.cert = c;
                st.removed = pr->strict;
                done = st;
            }
        }
        if (!done && (cfg.use_poly || cfg.use_rpo)) {
            ConstraintSet cs = build_constraints(scc, prep.afs);
            ProofStep st;
            st.kind = ProofStep::Kind::ReductionPair;
            st.scc = idx;
            st.mode = cs.mode;
            st.formative = labels(cs.formative);
            st.usable = labels(cs.usable);
            st.usable_all = cs.usable_all;
            st.usable_applied = cs.usable_applied;
            st.S.assign(cs.S.begin(), cs.S.end());
            for (auto& c : cs.strict) st.constraints.push_back(constraint_line(c, true));
            for (auto& c : cs.weak) st.constraints.push_back(constraint_line(c, false));

            if (cfg.use_poly) {
                give.tried.push_back("poly");
                poly::SearchOptions opt;
                opt.coef_bound = cfg.coef_bound;
                opt.deadline = cfg.use_rpo ? std::min(scc_deadline, now_seconds() + cfg.per_scc / 2) : scc_deadline;
                if (auto r = poly::search(cs, opt)) {
                    Certificate c;
                    c.kind = Certificate::Kind::Poly;
                    c.J = r->I;
                    c.strict = r->strict;
                    c = minimize_certificate(scc, cs, c, prep.afs);
                    st.cert = c;
                    st.removed = r->strict;
                    done = st;
                }
            }
            if (!done && cfg.use_rpo) {
                give.tried.push_back("rpo");
                rpo::RpoOptions opt;
                opt.deadline = scc_deadline;
                if (auto r = rpo::search(cs, prep.afs, opt)) {
                    Certificate c;
                    c.kind = Certificate::Kind::Rpo;
                    c.pi = r->pi;
                    c.prec = r->prec;
                    c.strict = r->strict;
                    c = minimize_certificate(scc, cs, c, prep.afs);
                    st.cert = c;
                    st.removed = r->strict;
                    done = st;
                }
            }
        }
        if (!done) {
            give.timeout = now_seconds() > scc_deadline;
            proof.steps.push_back(give);
            proof.blocking = idx;
            break;
        }
        proof.steps.push_back(*done);
        g = remove_nodes(g, positions_of(g, done->removed));
    }

    auto check = check_proof(input, print_proof(proof, 0));
    if (!check.valid) throw Error(Error::Kind::Internal, "proof failed its self-check: " + check.reason);
    return proof;
}

std::string print_proof(const Proof& p, int verbosity)
{
    std::ostringstream os;
    os << (p.verdict == Proof::Verdict::Yes ? "YES" : "MAYBE") << "\n";
    for (auto& st : p.steps) {
        switch (st.kind) {
        case ProofStep::Kind::Preparation:
            os << "PREPARATION\n";
            os << "  local: " << (st.local ? "yes" : "no") << "\n";
            os << "  spfp: " << (st.spfp ? "yes" : "no") << "\n";
            os << "  static: " << (st.static_mode ? "yes" : "no") << "\n";
            os << "  rules:\n";
            for (auto& r : p.afs.rules) os << "    " << rule_ref(r.label) << ": " << to_string(r) << "\n";
            os << "  dependency pairs: " << st.pair_count << "\n";
            for (auto& d : p.dps.pairs) os << "    " << d.index << ": " << to_string(d) << "\n";
            os << "  graph: " << st.pair_count << " nodes, " << st.edge_count << " edges\n";
            break;
        case ProofStep::Kind::Prune:
            os << "PRUNE " << join(st.removed) << "\n";
            break;
        case ProofStep::Kind::Subterm:
        case ProofStep::Kind::ReductionPair: {
            os << "SCC " << join(st.scc) << "\n";
            if (st.kind == ProofStep::Kind::Subterm) {
                std::vector<std::string> parts;
                for (auto& [f, i] : st.cert->nu) parts.push_back("nu(" + f + ") = " + std::to_string(i + 1));
                os << "  SUBTERM CRITERION " << join(parts) << "\n";
            } else {
                os << "  REDUCTION PAIR mode " << to_string(st.mode) << "\n";
                if (st.mode != Mode::Basic) os << "  formative rules: " << (st.formative.empty() ? "none" : join(st.formative)) << "\n";
                if (st.usable_applied)
                    os << "  usable rules: " << (st.usable_all ? "all" : st.usable.empty() ? "none" : join(st.usable)) << "\n";
                if (!st.S.empty()) os << "  S: " << join(st.S) << "\n";
                if (verbosity >= 1) {
                    os << "  constraints:\n";
                    for (auto& c : st.constraints) os << "    " << c << "\n";
                }
            }
            os << "  " << kind_name(st.cert->kind) << "\n";
            for (auto& l : certificate_lines(*st.cert, p.afs)) os << "    " << l << "\n";
            os << "  removed: " << join(st.removed) << "\n";
            break;
        }
        case ProofStep::Kind::GiveUp:
            os << "SCC " << join(st.scc) << "\n";
            os << "  GIVE UP " << (st.timeout ? "timeout" : "no ordering found");
            if (!st.tried.empty()) os << " (tried " << join(st.tried) << ")";
            os << "\n";
            break;
        }
    }
    return os.str();
}

namespace {

std::vector<int> parse_ints(const std::string& s)
{
    std::istringstream is(s);
    std::vector<int> out;
    int i;
    while (is >> i) out.push_back(i);
    if (!is.eof()) throw Error(Error::Kind::Syntax, "numbers expected in '" + s + "'");
    return out;
}

int indent_of(const std::string& l)
{
    std::size_t i = l.find_first_not_of(' ');
    return i == std::string::npos ? -1 : static_cast<int>(i);
}

std::optional<Certificate::Kind> cert_kind(const std::string& s)
{
    if (s == "PROJECTION") return Certificate::Kind::Projection;
    if (s == "POLY") return Certificate::Kind::Poly;
    if (s == "ARGFUN+RPO") return Certificate::Kind::Rpo;
    return std::nullopt;
}

ProofCheck invalid(const std::string& why) { return {false, why}; }

}  // namespace

ProofCheck check_proof(const AFS& input, const std::string& text)
{
    try {
        Prepared prep = prepare(input);
        std::vector<std::string> lines;
        {
            std::istringstream is(text);
            std::string l;
            while (std::getline(is, l)) {
                if (!l.empty() && l.back() == '\r') l.pop_back();
                if (indent_of(l) >= 0) lines.push_back(l);
            }
        }
        if (lines.empty()) return invalid("empty proof");
        bool yes;
        if (lines[0] == "YES") yes = true;
        else if (lines[0] == "MAYBE") yes = false;
        else return invalid("first line must be YES or MAYBE");

        DPGraph g = prep.graph;
        bool gave_up = false;
        std::size_t i = 1;
        while (i < lines.size()) {
            const std::string& l = lines[i];
            if (indent_of(l) != 0) return invalid("unexpected line '" + l + "'");
            if (gave_up) return invalid("steps after GIVE UP");
            if (l == "PREPARATION") {
                for (++i; i < lines.size() && indent_of(lines[i]) > 0; ++i) {
                    const std::string t = lines[i].substr(2);
                    if (t.rfind("dependency pairs: ", 0) == 0 &&
                        std::stoi(t.substr(18)) != static_cast<int>(prep.dps.pairs.size()))
                        return invalid("dependency pair count differs");
                }
                continue;
            }
            DPGraph pruned = prune(g);
            auto gone = removed_by_prune(g, pruned);
            g = pruned;
            if (l.rfind("PRUNE", 0) == 0) {
                if (parse_ints(l.substr(5)) != gone) return invalid("PRUNE does not match the graph");
                ++i;
                continue;
            }
            if (l.rfind("SCC ", 0) != 0) return invalid("unexpected line '" + l + "'");
            auto idx = parse_ints(l.substr(4));
            auto pos = positions_of(g, idx);
            auto comps = sccs(g);
            if (std::find(comps.begin(), comps.end(), pos) == comps.end() || pos.size() != idx.size())
                return invalid("SCC " + join(idx) + " is not a strongly connected component of the graph");
            auto scc = pairs_of(g, pos);

            std::optional<Certificate::Kind> kind;
            std::vector<std::string> cert_lines;
            std::optional<std::vector<int>> removed;
            for (++i; i < lines.size() && indent_of(lines[i]) > 0; ++i) {
                const std::string& t = lines[i];
                if (indent_of(t) != 2) continue;  // listings
                std::string body = t.substr(2);
                if (body.rfind("GIVE UP", 0) == 0) {
                    gave_up = true;
                } else if (auto k = cert_kind(body)) {
                    if (kind) return invalid("two certificates for SCC " + join(idx));
                    kind = k;
                    for (; i + 1 < lines.size() && indent_of(lines[i + 1]) >= 4; ++i)
                        cert_lines.push_back(lines[i + 1].substr(4));
                } else if (body.rfind("removed:", 0) == 0) {
                    removed = parse_ints(body.substr(8));
                }
            }
            if (gave_up) {
                if (yes) return invalid("YES proof gives up");
                continue;
            }
            if (!kind) return invalid("SCC " + join(idx) + " has no certificate");
            if (!removed) return invalid("SCC " + join(idx) + " has no removed line");
            Certificate cert = parse_certificate(*kind, cert_lines, prep.afs);
            ConstraintSet cs;
            if (*kind != Certificate::Kind::Projection) cs = build_constraints(scc, prep.afs);
            Verdict v = check_certificate(scc, cs, cert, prep.afs);
            if (!v.valid) return invalid("SCC " + join(idx) + ": " + v.reason);
            auto claimed = *removed, got = v.strict;
            std::sort(claimed.begin(), claimed.end());
            std::sort(got.begin(), got.end());
            if (claimed != got) return invalid("SCC " + join(idx) + ": removed pairs differ from the certificate");
            for (int r : claimed)
                if (std::find(idx.begin(), idx.end(), r) == idx.end())
                    return invalid("pair " + std::to_string(r) + " is not in SCC " + join(idx));
            g = remove_nodes(g, positions_of(g, claimed));
        }
        if (yes && !sccs(prune(g)).empty()) return invalid("YES but the graph still has cycles");
        return {true, ""};
    } catch (const std::exception& e) {
        return invalid(e.what());
    }
}

bool CorpusSummary::ok() const
{
    return std::all_of(entries.begin(), entries.end(), [](const CorpusEntry& e) { return e.ok; });
}

CorpusSummary run_corpus(const std::string& dir, const Config& cfg)
{
    namespace fs = std::filesystem;
    CorpusSummary s;
    const double start = now_seconds();
    std::vector<fs::path> files;
    for (auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".afs") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    static const std::regex expect_re(R"(^#\s*expect:\s*(\S+))");
    for (auto& f : files) {
        CorpusEntry e;
        e.file = f.filename().string();
        std::ifstream in(f);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        {
            std::istringstream is(text);
            std::string l;
            std::smatch m;
            while (std::getline(is, l))
                if (std::regex_search(l, m, expect_re)) {
                    e.expect = m[1].str();
                    break;
                }
        }
        const double t0 = now_seconds();
        try {
            Proof p = prove(parse_afs(text), cfg);
            e.verdict = p.verdict == Proof::Verdict::Yes ? "YES" : "MAYBE";
            e.steps = static_cast<int>(p.steps.size());
            e.ok = !e.expect || *e.expect == e.verdict;
        } catch (const std::exception& ex) {
            e.verdict = "ERROR";
            e.error = ex.what();
            e.ok = !e.expect;
        }
        e.seconds = now_seconds() - t0;
        s.entries.push_back(e);
    }
    s.seconds = now_seconds() - start;
    return s;
}

std::string print_summary(const CorpusSummary& s)
{
    std::ostringstream os;
    os << std::left << std::setw(24) << "file" << std::setw(8) << "expect" << std::setw(8) << "verdict"
       << std::setw(7) << "steps" << std::setw(9) << "seconds" << "status\n";
    for (auto& e : s.entries) {
        os << std::left << std::setw(24) << e.file << std::setw(8) << e.expect.value_or("-") << std::setw(8)
           << e.verdict << std::setw(7) << e.steps << std::setw(9) << std::fixed << std::setprecision(3)
           << e.seconds << (e.ok ? "ok" : "FAIL");
        if (!e.error.empty()) os << "  " << e.error;
        os << "\n";
    }
    int bad = static_cast<int>(std::count_if(s.entries.begin(), s.entries.end(), [](auto& e) { return !e.ok; }));
    os << s.entries.size() << " systems, " << bad << " failed, " << std::fixed << std::setprecision(2) << s.seconds
       << " s\n";
    return os.str();
}

}  // namespace hodp
