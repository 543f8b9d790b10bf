#pragma once

#include <string>
#include <vector>

#include "hodp/poly.hpp"
#include "hodp/rpo.hpp"
#include "hodp/subterm.hpp"

namespace hodp {

struct Certificate {
    enum class Kind { Projection, Poly, Rpo } kind = Kind::Projection;
    std::map<std::string, int> nu;                          // Projection
    poly::Interpretation J;                                 // Poly
    rpo::Pi pi;                                             // Rpo
    std::vector<std::pair<std::string, std::string>> prec;  // Rpo
    std::vector<int> strict;                                // removed pairs
};

std::string kind_name(Certificate::Kind k);  // PROJECTION, POLY, ARGFUN+RPO

// One line per entry, no header line.  `parse_certificate` reads the same lines back.
std::vector<std::string> certificate_lines(const Certificate& c, const AFS& afs);
Certificate parse_certificate(Certificate::Kind kind, const std::vector<std::string>& lines, const AFS& afs);

struct Verdict {
    bool valid = false;
    std::vector<int> strict;
    std::string reason;  // first failure
};

// Projection certificates are checked against the pairs; the others against
// the constraint set built for them.
Verdict check_certificate(const std::vector<DependencyPair>& scc, const ConstraintSet& cs, const Certificate& c,
                          const AFS& afs);

// Random valuations of every J_f: raising one argument never lowers the value.
bool sample_monotone(const Sym& f, const poly::Value& v, int samples, unsigned seed);

// Evaluates every constraint under random valuations; false if one is violated.
bool sample_constraints(const ConstraintSet& cs, const poly::Interpretation& I, const std::vector<int>& strict,
                        int samples, unsigned seed);

}  // namespace hodp

namespace hodp {

// Greedy tightening of a valid certificate: lowers single polynomial
// coefficients, drops precedence facts and argument functions, as long as
// check_certificate still accepts with the same strict set.
Certificate minimize_certificate(const std::vector<DependencyPair>& scc, const ConstraintSet& cs, Certificate c,
                                 const AFS& afs);

}  // namespace hodp
