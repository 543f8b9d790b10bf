#pragma once

#include <set>
#include <string>
#include <vector>

#include "hodp/afs.hpp"

namespace hodp {

enum class PairKind { Candidate, AppliedHead };

struct DependencyPair {
    Term lhs;
    Term rhs;
    PairKind kind = PairKind::Candidate;
    bool collapsing = false;
    std::string rule_label;  // label of the originating rule
    int index = 0;           // 1-based position in the generated list
};

struct DPProblem {
    std::vector<DependencyPair> pairs;
    bool collapsing_set = false;
    bool static_mode = false;  // collapsing pairs dropped because the system is SPFP
};

std::string to_string(const DependencyPair& p);

// Closed candidate terms of a right-hand side, pre-order, deduplicated modulo α.
std::vector<Term> candidate_terms(const Term& r, const AFS& afs);

// Expects a completed, classified AFS.
// With allow_static, collapsing pairs are dropped when the system is SPFP.
DPProblem dependency_pairs(const AFS& afs, bool allow_static = true);

bool is_collapsing(const std::vector<DependencyPair>& ps);

// tag_Z: bound variables of t always count as members of Z.
Term tag(const Term& t, const std::set<std::string>& z = {});
Term untag(const Term& t);
// {l ⇒ tag(r)} plus untag rules for the tagged symbols that actually occur.
std::vector<Rule> build_rtag(const std::vector<Rule>& rules);
Rule untag_rule(const Sym& tagged_sym);

// The arguments of the head: f(l1..ln)·l(n+1)···lm gives l1..lm.
std::vector<Term> spine_args(const Term& t);

}  // namespace hodp
