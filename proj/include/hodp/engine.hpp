#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hodp/afs.hpp"
#include "hodp/certificate.hpp"
#include "hodp/constraints.hpp"
#include "hodp/dp.hpp"
#include "hodp/graph.hpp"

namespace hodp {

struct Config {
    double timeout = 60;   // wall seconds for the whole proof
    double per_scc = 10;   // wall seconds per SCC attempt
    bool use_subterm = true;
    bool use_poly = true;
    bool use_rpo = true;
    int coef_bound = 3;
    int verbosity = 0;
};

struct ProofStep {
    enum class Kind { Preparation, Prune, Subterm, ReductionPair, GiveUp };
    Kind kind = Kind::Preparation;
    std::vector<int> scc;      // pair indices (1-based)
    std::vector<int> removed;  // pair indices

    // Preparation
    bool local = false, spfp = false, static_mode = false;
    int pair_count = 0, edge_count = 0;

    // ReductionPair
    Mode mode = Mode::NonCollapsing;
    std::vector<std::string> formative;  // rule labels
    std::vector<std::string> usable;
    bool usable_all = false, usable_applied = false;
    std::vector<std::string> S;
    std::vector<std::string> constraints;  // printed only at verbosity >= 1

    std::optional<Certificate> cert;  // Subterm and ReductionPair

    // GiveUp
    std::vector<std::string> tried;
    bool timeout = false;
};

struct Proof {
    enum class Verdict { Yes, Maybe } verdict = Verdict::Maybe;
    std::vector<ProofStep> steps;
    AFS afs;                       // completed and classified
    DPProblem dps;
    DPGraph graph;                 // initial graph
    std::vector<int> blocking;     // pair indices of the SCC on MAYBE
};

// The completed, classified system with its pairs and graph; shared by
// prove() and check_proof() so both see the same numbering.
struct Prepared {
    AFS afs;
    DPProblem dps;
    DPGraph graph;
};
Prepared prepare(const AFS& afs);

// Throws Error(Internal) if the proof it found does not pass check_proof.
Proof prove(const AFS& afs, const Config& cfg = {});

std::string print_proof(const Proof& p, int verbosity = 0);

struct ProofCheck {
    bool valid = false;
    std::string reason;
};
// Re-reads a printed proof and re-validates every step against `afs`.
ProofCheck check_proof(const AFS& afs, const std::string& text);

// Rule label with its letter alias: "2 (B)".
std::string rule_ref(const std::string& label);

struct CorpusEntry {
    std::string file;
    std::optional<std::string> expect;
    std::string verdict;  // YES, MAYBE or ERROR
    std::string error;
    double seconds = 0;
    int steps = 0;
    bool ok = true;       // expectation met (or none given)
};

struct CorpusSummary {
    std::vector<CorpusEntry> entries;
    double seconds = 0;
    bool ok() const;
};

CorpusSummary run_corpus(const std::string& dir, const Config& cfg = {});
std::string print_summary(const CorpusSummary& s);

}  // namespace hodp
