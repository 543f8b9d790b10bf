"""Termination prover for algebraic functional systems."""

from ._hodp import HodpError, check, dependency_pairs, prove, run_corpus

__all__ = ["HodpError", "check", "dependency_pairs", "prove", "run_corpus", "prove_file"]


def prove_file(path, **kwargs):
    with open(path, encoding="utf-8") as f:
        return prove(f.read(), **kwargs)
