#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hodp/engine.hpp"

namespace py = pybind11;
using namespace hodp;

namespace {

Config make_config(double timeout, const std::vector<std::string>& engines, int coef_bound)
{
    Config cfg;
    cfg.timeout = timeout;
    cfg.per_scc = std::min(cfg.per_scc, timeout);
    cfg.coef_bound = coef_bound;
    cfg.use_subterm = cfg.use_poly = cfg.use_rpo = false;
    for (auto& e : engines) {
        if (e == "subterm") cfg.use_subterm = true;
        else if (e == "poly") cfg.use_poly = true;
        else if (e == "rpo") cfg.use_rpo = true;
        else throw py::value_error("unknown engine: " + e);
    }
    return cfg;
}

py::dict prove_text(const std::string& source, double timeout, const std::vector<std::string>& engines,
                    int coef_bound, bool verbose)
{
    Config cfg = make_config(timeout, engines, coef_bound);
    Proof p;
    {
        py::gil_scoped_release release;
        p = prove(parse_afs(source), cfg);
    }
    py::dict d;
    d["verdict"] = p.verdict == Proof::Verdict::Yes ? "YES" : "MAYBE";
    d["proof"] = print_proof(p, verbose ? 1 : 0);
    d["pairs"] = static_cast<int>(p.dps.pairs.size());
    return d;
}

}  // namespace

PYBIND11_MODULE(_hodp, m)
{
    m.doc() = "Termination prover for algebraic functional systems";

    py::register_exception<Error>(m, "HodpError", PyExc_ValueError);

    m.def("prove", &prove_text, py::arg("source"), py::arg("timeout") = 60.0,
          py::arg("engines") = std::vector<std::string>{"subterm", "poly", "rpo"}, py::arg("coef_bound") = 3,
          py::arg("verbose") = false, "Prove termination of the AFS given as text.");

    m.def(
        "check",
        [](const std::string& source, const std::string& proof) {
            ProofCheck c = check_proof(parse_afs(source), proof);
            return py::make_tuple(c.valid, c.reason);
        },
        py::arg("source"), py::arg("proof"), "Re-validate a printed proof; returns (valid, reason).");

    m.def(
        "dependency_pairs",
        [](const std::string& source) {
            Prepared p = prepare(parse_afs(source));
            std::vector<std::string> out;
            for (auto& d : p.dps.pairs) out.push_back(to_string(d));
            return out;
        },
        py::arg("source"));

    m.def(
        "run_corpus",
        [](const std::string& dir, double timeout) {
            Config cfg;
            cfg.timeout = timeout;
            cfg.per_scc = std::min(cfg.per_scc, timeout);
            CorpusSummary s;
            {
                py::gil_scoped_release release;
                s = run_corpus(dir, cfg);
            }
            py::list out;
            for (auto& e : s.entries) {
                py::dict d;
                d["file"] = e.file;
                d["expect"] = e.expect ? py::cast(*e.expect) : py::none();
                d["verdict"] = e.verdict;
                d["ok"] = e.ok;
                d["seconds"] = e.seconds;
                d["error"] = e.error;
                out.append(d);
            }
            return out;
        },
        py::arg("dir"), py::arg("timeout") = 60.0);
}
