#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "hodp/engine.hpp"

using namespace hodp;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Error::Kind::Usage, "cannot read " + path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

bool parse_engines(const std::string& list, Config& cfg)
{
    cfg.use_subterm = cfg.use_poly = cfg.use_rpo = false;
    std::istringstream is(list);
    std::string e;
    while (std::getline(is, e, ',')) {
        if (e == "subterm") cfg.use_subterm = true;
        else if (e == "poly") cfg.use_poly = true;
        else if (e == "rpo") cfg.use_rpo = true;
        else return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Termination prover for algebraic functional systems"};
    app.require_subcommand(1);

    Config cfg;
    std::string file, proof_file, dir, engines, dot;
    bool verbose = false;

    auto* prove_cmd = app.add_subcommand("prove", "Prove termination of an AFS");
    prove_cmd->add_option("FILE", file, "AFS file")->required();
    prove_cmd->add_option("--timeout", cfg.timeout, "Wall-clock budget in seconds")->check(CLI::PositiveNumber);
    prove_cmd->add_option("--engines", engines, "Comma-separated subset of subterm,poly,rpo");
    prove_cmd->add_option("--coef-bound", cfg.coef_bound, "Largest polynomial coefficient")->check(CLI::Range(0, 9));
    prove_cmd->add_option("--dot", dot, "Write the dependency graph in DOT format");
    prove_cmd->add_flag("-v", verbose, "List the constraints of every SCC");

    auto* check_cmd = app.add_subcommand("check", "Re-validate a saved proof");
    check_cmd->add_option("FILE", file, "AFS file")->required();
    check_cmd->add_option("PROOF", proof_file, "Proof text")->required();

    auto* corpus_cmd = app.add_subcommand("corpus", "Run every .afs file of a directory");
    corpus_cmd->add_option("DIR", dir, "Directory")->required();
    corpus_cmd->add_option("--timeout", cfg.timeout, "Budget per system in seconds")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*prove_cmd) {
            if (!engines.empty() && !parse_engines(engines, cfg)) {
                std::cerr << "error: unknown engine in '" << engines << "'\n";
                return 2;
            }
            cfg.verbosity = verbose ? 1 : 0;
            cfg.per_scc = std::min(cfg.per_scc, cfg.timeout);
            AFS afs = load_afs(file);
            Proof p = prove(afs, cfg);
            std::cout << print_proof(p, cfg.verbosity);
            if (!dot.empty()) {
                std::ofstream out(dot);
                if (!out) {
                    std::cerr << "error: cannot write " << dot << "\n";
                    return 2;
                }
                out << to_dot(p.graph);
            }
            return 0;
        }
        if (*check_cmd) {
            AFS afs = load_afs(file);
            ProofCheck c = check_proof(afs, read_file(proof_file));
            if (c.valid) {
                std::cout << "VALID\n";
                return 0;
            }
            std::cout << "INVALID: " << c.reason << "\n";
            return 1;
        }
        if (*corpus_cmd) {
            CorpusSummary s = run_corpus(dir, cfg);
            std::cout << print_summary(s);
            return s.ok() ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind == Error::Kind::Internal || e.kind == Error::Kind::Budget ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
