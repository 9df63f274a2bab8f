import json

import pytest

from vertexlab import cli
from vertexlab.suites import Check, RunReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fuse_text_and_json(capsys):
    code, out, _ = run(capsys, "fuse", "W(0,a) * W(0,b)")
    assert code == 0
    assert out.strip() == "W(0,a+b) + W(-1,a+b)"
    code, out, _ = run(capsys, "fuse", "SC(1)*SC(-1)", "--format", "json")
    assert json.loads(out)["result"] == [{"label": "SC(0)", "multiplicity": 1}]


def test_fuse_outside_regime_is_a_domain_error(capsys):
    code, _, err = run(capsys, "fuse", "W(0,a) * W(0,-a)")
    assert code == 2
    assert "outside classified regime" in err


def test_parse_error_reports_position(capsys):
    code, _, err = run(capsys, "fuse", "W(0,a")
    assert code == 2
    assert "position 5" in err


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "nope"])
    assert info.value.code == 2
    assert run(capsys, "verify", "weyl", "--level", "0")[0] == 2
    assert run(capsys, "verify", "weyl", "--r", "1")[0] == 2
    assert run(capsys, "character", "M", "--max-level", "-1")[0] == 2
    assert run(capsys, "commutator", "b", "0", "a", "0")[0] == 2


def test_verify_pass_and_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "sugawara", "--format", "json", "--out", str(target))
    assert code == 0
    data = json.loads(target.read_text())
    assert data == json.loads(out)
    assert data["status"] == "pass"


def test_verify_singular_restricted(capsys):
    code, out, _ = run(capsys, "verify", "singular", "--level", "1", "--r", "1", "--n", "0")
    assert code == 0
    assert "r=1 n=0: N(0) = (lam+2)/2, E(0) = -lam, L(0) = -lam/2" in out


def test_verify_failure_exits_one(capsys, monkeypatch):
    failing = RunReport("weyl", {"level": 1}, [Check("a(0) 1 = 0", False, {"state": "1", "residual_text": "e^(...)"})])
    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: failing)
    code, out, _ = run(capsys, "verify", "weyl", "--level", "1")
    assert code == 1
    assert "FAIL a(0) 1 = 0" in out


def test_environment_default_level(capsys, monkeypatch):
    seen = {}

    def fake(name, level, **options):
        seen["level"] = level
        return RunReport(name, {"level": level}, [Check("ok", True)])

    monkeypatch.setattr(cli, "run_suite", fake)
    monkeypatch.setenv("VERTEXLAB_LEVEL_DEFAULT", "3")
    assert run(capsys, "verify", "gl11")[0] == 0
    assert seen["level"] == 3
    monkeypatch.setenv("VERTEXLAB_LEVEL_DEFAULT", "x")
    assert run(capsys, "verify", "gl11")[0] == 2


def test_character_tables(capsys):
    code, out, _ = run(capsys, "character", "Pi(1,a)", "--max-level", "0", "--format", "json")
    assert code == 0
    assert {row["dimension"] for row in json.loads(out)["table"]} == {1}
    code, out, _ = run(capsys, "character", "SPi(1,a)", "--max-level", "2")
    assert code == 0
    assert out.count("match") == 5 and "MISMATCH" not in out


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "V(a,b)", "V(c,-b)")
    assert code == 0
    assert out.strip().endswith("= P(a+c)")
    code, out, _ = run(capsys, "decompose", "V(a,b)", "V(c,d)", "--format", "json")
    assert [p["text"] for p in json.loads(out)["constituents"]] == ["V(a+c,b+d)", "V(a+c-1,b+d)'"]
    assert run(capsys, "decompose", "V(a,0)", "V(c,0)")[0] == 2
    assert run(capsys, "decompose", "X(1)", "A(1)")[0] == 2


def test_commutator(capsys):
    code, out, _ = run(capsys, "commutator", "a", "0", "a_star", "0")
    assert code == 0
    assert out.strip().endswith("= e^{0}")
    code, out, _ = run(capsys, "commutator", "N", "1", "E", "-1", "--format", "json")
    assert json.loads(out)["result"]
    assert run(capsys, "commutator", "a", "0", "a", "0", "--state", "e(a,0,0)")[0] == 2
