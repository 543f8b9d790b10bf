import pathlib

import pytest

import hodp

CORPUS = pathlib.Path(__file__).resolve().parents[2] / "corpus"


def read(name):
    return (CORPUS / name).read_text()


def test_twice_is_proved():
    r = hodp.prove(read("twice.afs"))
    assert r["verdict"] == "YES"
    assert r["proof"].splitlines()[0] == "YES"
    assert "formative rules: 2 (B), 4 (D)" in r["proof"]
    assert r["pairs"] == 7


def test_fga_is_maybe():
    assert hodp.prove(read("fga.afs"))["verdict"] == "MAYBE"


def test_check_round_trip():
    src = read("eval.afs")
    proof = hodp.prove(src)["proof"]
    assert hodp.check(src, proof) == (True, "")
    valid, reason = hodp.check(src, proof.replace("strict: 3", "strict: 1"))
    assert not valid and reason


def test_engines_and_errors():
    r = hodp.prove(read("eval.afs"), engines=["subterm", "rpo"])
    assert "ARGFUN+RPO" in r["proof"]
    with pytest.raises(ValueError):
        hodp.prove(read("eval.afs"), engines=["magic"])
    with pytest.raises(hodp.HodpError):
        hodp.prove("SIG\n  o : nat\nRULES\n  o => p\n")


def test_dependency_pairs_and_corpus():
    assert len(hodp.dependency_pairs(read("twice.afs"))) == 7
    rows = hodp.run_corpus(str(CORPUS))
    assert len(rows) == 12
    assert all(r["ok"] for r in rows)
    assert hodp.prove_file(str(CORPUS / "map.afs"))["verdict"] == "YES"
