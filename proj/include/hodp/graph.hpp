#pragma once

#include <set>
#include <string>
#include <vector>

#include "hodp/dp.hpp"

namespace hodp {

// Node indices are positions in `nodes`; removed nodes stay in place with
// alive[i] == false and no edges.
struct DPGraph {
    std::vector<DependencyPair> nodes;
    std::vector<bool> alive;
    std::vector<std::set<int>> succ;

    int size() const { return static_cast<int>(nodes.size()); }
    int live_count() const;
    std::vector<int> live() const;
};

// Whether an instance of b can follow an instance of a in a chain.  Besides the
// head-symbol test, rigid constructor structure in the arguments of rhs(a) must
// be compatible with lhs(b).
bool may_follow(const DependencyPair& a, const DependencyPair& b, const AFS& afs);

DPGraph approximate_graph(const DPProblem& p, const AFS& afs);
DPGraph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges);

// Strongly connected components containing at least one edge, each sorted,
// ordered by smallest member.
std::vector<std::vector<int>> sccs(const DPGraph& g);
DPGraph prune(const DPGraph& g);
DPGraph remove_nodes(const DPGraph& g, const std::vector<int>& nodes);

std::string to_dot(const DPGraph& g);

}  // namespace hodp
