import pytest

from vertexlab.fields import heisenberg_mode
from vertexlab.fock import BETA, BasisState, LatticeVector, StateVector, ZERO_VECTOR
from vertexlab.scalar import param
from vertexlab.suites import DEFAULT_LEVELS, SUITES, Batch, Check, RunReport, default_level, run_suite


def test_every_suite_has_a_default_level():
    assert set(SUITES) == set(DEFAULT_LEVELS)


@pytest.mark.parametrize("name", ["fermion", "screening", "singular", "sugawara"])
def test_cheap_suites_pass_at_small_levels(name):
    report = run_suite(name, 2)
    assert report.passed, report.to_text()
    assert report.checks


@pytest.mark.parametrize("name", ["weyl", "virasoro", "gl11", "automorphism"])
def test_expensive_suites_pass_at_level_one(name):
    report = run_suite(name, 1, modes=1)
    assert report.passed, report.to_text()


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_injected_failure_reports_the_offending_state():
    """beta(0) kills only charge-zero states, so the identity fails on the second state alone."""
    lam = param("lam")
    states = [
        BasisState(ZERO_VECTOR, [(0, 1)]),
        BasisState(LatticeVector(lam, lam + 1, 0), [(1, 2)]),
        BasisState(ZERO_VECTOR, [(2, 1)]),
    ]
    batch = Batch("probe", states, {"beta": (lambda n, v: heisenberg_mode(BETA, n, v), 0)})
    check = batch.check("beta(0) v = 0", batch.act("beta", 0))
    assert not check.passed
    assert check.witness["state"] == str(states[1])
    single = heisenberg_mode(BETA, 0, StateVector.basis(states[1]))
    assert check.witness["residual_text"] == str(single)
    assert batch.check("beta(1) v = 0 on level one", batch.act("beta", 1) - batch.act("beta", 1)).passed


def test_report_serialisation():
    report = RunReport("demo", {"level": 1}, [Check("x = x", True), Check("y = 0", False, {"state": "s", "residual_text": "r"})])
    data = report.to_json()
    assert data["status"] == "fail" and data["passed"] == 1 and data["failed"] == 1
    assert data["checks"][1]["witness"]["state"] == "s"
    text = report.to_text()
    assert "FAIL y = 0" in text and "witness state: s" in text


def test_default_level_environment(monkeypatch):
    monkeypatch.delenv("VERTEXLAB_LEVEL_DEFAULT", raising=False)
    assert default_level("weyl") == DEFAULT_LEVELS["weyl"]
    monkeypatch.setenv("VERTEXLAB_LEVEL_DEFAULT", "2")
    assert default_level("weyl") == 2
    monkeypatch.setenv("VERTEXLAB_LEVEL_DEFAULT", "two")
    with pytest.raises(ValueError):
        default_level("weyl")
