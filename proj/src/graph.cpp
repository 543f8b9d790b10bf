#include "hodp/graph.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace hodp {

int DPGraph::live_count() const
{
    return static_cast<int>(std::count(alive.begin(), alive.end(), true));
}

std::vector<int> DPGraph::live() const
{
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (alive[i]) out.push_back(i);
    return out;
}

namespace {

// s is an argument of a pair's right-hand side (arbitrary instance, then
// arbitrary reductions); l an argument of a left-hand side (arbitrary instance).
bool cap_unifiable(const Term& s, const Term& l, const AFS& afs)
{
    if (l->is_var() || l->is_abs()) return true;
    Term lh = head(l);
    if (!lh->is_fun()) return true;
    if (s->is_abs()) return false;
    Term sh = head(s);
    if (!sh->is_fun()) return true;
    if (sh->sym->kind != SymKind::Fresh && afs.is_defined(sh->sym)) return true;
    if (sh->sym->name != lh->sym->name) return false;
    auto sa = spine_args(s), la = spine_args(l);
    if (sa.size() != la.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (!cap_unifiable(sa[i], la[i], afs)) return false;
    return true;
}

}  // namespace

bool may_follow(const DependencyPair& a, const DependencyPair& b, const AFS& afs)
{
    if (a.collapsing) return true;
    Term ph = head(a.rhs), lh = head(b.lhs);
    if (!ph->is_fun() || !lh->is_fun()) return true;
    if (ph->sym->name != lh->sym->name) return false;
    if (a.rhs->type != b.lhs->type) return false;
    auto sa = spine_args(a.rhs), la = spine_args(b.lhs);
    if (sa.size() != la.size()) return false;
    for (std::size_t i = 0; i < sa.size(); ++i)
        if (!cap_unifiable(sa[i], la[i], afs)) return false;
    return true;
}

DPGraph approximate_graph(const DPProblem& p, const AFS& afs)
{
    DPGraph g;
    g.nodes = p.pairs;
    int n = g.size();
    g.alive.assign(n, true);
    g.succ.assign(n, {});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (may_follow(g.nodes[i], g.nodes[j], afs)) g.succ[i].insert(j);
    return g;
}

DPGraph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges)
{
    DPGraph g;
    g.nodes.resize(n);
    g.alive.assign(n, true);
    g.succ.assign(n, {});
    for (int i = 0; i < n; ++i) g.nodes[i].index = i + 1;
    for (auto [a, b] : edges) g.succ[a].insert(b);
    return g;
}

std::vector<std::vector<int>> sccs(const DPGraph& g)
{
    int n = g.size();
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> out;
    int counter = 0;
    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = true;
        for (int w : g.succ[v]) {
            if (!g.alive[w]) continue;
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] != index[v]) return;
        std::vector<int> comp;
        int w;
        do {
            w = stack.back();
            stack.pop_back();
            on[w] = false;
            comp.push_back(w);
        } while (w != v);
        if (comp.size() == 1 && !g.succ[v].count(v)) return;
        std::sort(comp.begin(), comp.end());
        out.push_back(comp);
    };
    for (int v = 0; v < n; ++v)
        if (g.alive[v] && index[v] < 0) visit(v);
    std::sort(out.begin(), out.end());
    return out;
}

DPGraph remove_nodes(const DPGraph& g, const std::vector<int>& nodes)
{
    DPGraph out = g;
    for (int v : nodes) {
        out.alive[v] = false;
        out.succ[v].clear();
    }
    for (auto& s : out.succ)
        for (int v : nodes) s.erase(v);
    return out;
}

DPGraph prune(const DPGraph& g)
{
    std::vector<bool> keep(g.size(), false);
    for (auto& c : sccs(g))
        for (int v : c) keep[v] = true;
    std::vector<int> drop;
    for (int v = 0; v < g.size(); ++v)
        if (g.alive[v] && !keep[v]) drop.push_back(v);
    DPGraph out = remove_nodes(g, drop);
    // Edges between different components never lie on a cycle.
    std::vector<int> comp(g.size(), -1);
    auto cs = sccs(out);
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (int v : cs[i]) comp[v] = static_cast<int>(i);
    for (int v = 0; v < out.size(); ++v) {
        std::set<int> s;
        for (int w : out.succ[v])
            if (comp[w] == comp[v]) s.insert(w);
        out.succ[v] = s;
    }
    return out;
}

std::string to_dot(const DPGraph& g)
{
    std::ostringstream os;
    os << "digraph dp {\n";
    for (int v = 0; v < g.size(); ++v) {
        if (!g.alive[v]) continue;
        std::string label = g.nodes[v].lhs ? to_string(g.nodes[v]) : "";
        std::string esc;
        for (char c : label) {
            if (c == '"' || c == '\\') esc += '\\';
            esc += c;
        }
        os << "  n" << v << " [label=\"" << g.nodes[v].index << ": " << esc << "\"];\n";
    }
    for (int v = 0; v < g.size(); ++v)
        for (int w : g.succ[v]) os << "  n" << v << " -> n" << w << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace hodp
