#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hodp/dp.hpp"

namespace hodp {

struct Projection {
    std::map<std::string, int> nu;  // head symbol name -> 0-based spine argument
    std::vector<int> strict;        // pair indices with a strict decrease
};

// Head symbol name of a pair side (f or f#), empty when the head is not a symbol.
std::string head_name(const Term& t);

// 0 = not oriented, 1 = equal, 2 = strict subterm.
int projection_status(const DependencyPair& p, const std::map<std::string, int>& nu);

std::optional<Projection> subterm_criterion(const std::vector<DependencyPair>& scc);

}  // namespace hodp
