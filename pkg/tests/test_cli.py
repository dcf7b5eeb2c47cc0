from __future__ import annotations

import json

import pytest

from liphase.cli import main


def run(capsys, *argv: str) -> tuple[int, list[dict], str]:
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, [json.loads(line) for line in out.splitlines() if line.startswith("{")], err


def test_index_example(capsys):
    assert run(capsys, "index", "--x", "1,0;0,-1", "--h", "1,0;0,1")[:2] == (0, [{"index": 1}])


def test_phase_example(capsys):
    code, out, _ = run(capsys, "phase", "--n", "1", "--graph", "0", "--omega", "re=0;im=1", "--z", "0")
    assert (code, out) == (0, [{"phase": -0.5}])


def test_negative_entries_and_surface(capsys):
    code, out, _ = run(capsys, "charge", "--graph", "-1,0;0,-1", "--omega", "re=0,0;0,0;im=1,0;0,1")
    assert code == 0 and out[0]["charge_im"] == pytest.approx(-2)
    code, out, _ = run(capsys, "surface-check", "--graph", "-1,0;0,-1", "--omega", "re=0,0;0,0;im=1,0;0,1")
    assert code == 0 and out[0]["bridgeland_phase"] == pytest.approx(-0.5) and out[0]["ok"]


def test_group_commands(capsys):
    assert run(capsys, "q", "--g", "1/2,0;0,2")[1] == [{"q": 4}]
    assert run(capsys, "N", "--g1", "1/2,0;0,2", "--g2", "2,0;0,1/2")[1] == [{"N": 4}]
    assert run(capsys, "lambda", "--g1", "0,1;-1,0", "--g2", "0,1;-1,0")[1] == [{"lambda": -1}]
    out = run(capsys, "lambda", "--g1", "1,1;0,1", "--g2", "0,1;-1,0")[1][0]
    assert out["lambda"] == out["lambda_exact"]
    out = run(capsys, "meta-mul", "--g1", "0,1;-1,0", "--g2", "0,1;-1,0")[1][0]
    assert out["g"] == "-1,0;0,-1" and out["central"] == -1
    out = run(capsys, "delta", "--g", "0,1;-1,0", "--omega", "re=0;im=2")[1][0]
    assert (out["re"], out["im"]) == pytest.approx((-4, 0))
    out = run(capsys, "sp-act", "--g", "0,1;-1,0", "--omega", "re=0;im=2")[1][0]
    assert out["im"] == [[0.5]]


def test_lattice_commands(capsys):
    out = run(capsys, "lift-graph", "--phi", "1", "--deck", "2")[1][0]
    assert out["deck"] == 2 and out["lattice"] == "1;1"
    out = run(capsys, "complete-basis", "--lagrangian", "x=1,0;0,2;y=0,2;1,0")[1][0]
    assert out["verified"]
    code, out, _ = run(capsys, "mirror-check", "--lagrangian", "x=1,0;0,0;y=0,0;0,1", "--deck", "1",
                       "--omega", "re=1/2,0;0,0;im=2,1;1,1")
    assert code == 0 and out[0]["ok"]


def test_csv(capsys):
    code = main(["q", "--g", "1/2,0;0,2", "--format", "csv"])
    assert code == 0 and capsys.readouterr().out == "q\n4\n"


def test_usage_errors(capsys):
    assert run(capsys, "index", "--x", "1,2;3,4")[0] == 2
    assert run(capsys, "index", "--x", "1,a")[0] == 2
    assert run(capsys, "phase", "--graph", "0")[0] == 2
    assert run(capsys, "q", "--g", "2,0;0,2")[0] == 2
    code, _, err = run(capsys, "nonsense")
    assert code == 2 and "usage" in err


def test_selftest_deterministic(capsys):
    a = run(capsys, "selftest", "--suite", "elliptic", "--seed", "3")
    b = run(capsys, "selftest", "--suite", "elliptic", "--seed", "3")
    assert a == b and a[0] == 0 and a[1][0]["failures"] == 0


def test_selftest_reports_failure(capsys, monkeypatch):
    from liphase import selftest
    res = selftest.SuiteResult("nq", 5, None)

    def broken(seed, samples):
        res.failures.append("forced [replay: liphase selftest --suite nq --seed 5]")
        return res

    monkeypatch.setitem(selftest.SUITES, "nq", broken)
    code, out, err = run(capsys, "selftest", "--suite", "nq", "--seed", "5")
    assert code == 1 and out[0]["failures"] == 1 and "liphase selftest --suite nq --seed 5" in err
