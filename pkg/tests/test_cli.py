import csv
import json

import pytest

from sensorsched import Schedule, evaluate_cost, load_fixture
from sensorsched.cli import CSV_HEADER, main
from sensorsched.config import fixture_path, load_config

SMALL = str(fixture_path("small_network"))


def _scalar_pair(tmp_path, R=1.0, A_rows=1):
    sys = {"A": {"rows": A_rows, "cols": 1, "data": [2.0] * A_rows}, "C": {"rows": 1, "cols": 1, "data": [1.0]},
           "Q": {"rows": 1, "cols": 1, "data": [1.0]}, "R": {"rows": 1, "cols": 1, "data": [R]}}
    path = tmp_path / "pair.json"
    path.write_text(json.dumps({"systems": [dict(sys, id=1), dict(sys, id=2)]}))
    return str(path)


def test_load_fixture_config():
    assert len(load_config(SMALL).systems) == 3


def test_solve_mdp_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert main(["solve", "--method", "mdp", SMALL, "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == CSV_HEADER
    method, cost, period, sched, states, _ = rows[1]
    assert method == "mdp" and period == "8" and states == "747"
    assert float(cost) == pytest.approx(144.0, abs=0.05)
    # round trip through evaluate
    systems = load_fixture("small_network").systems
    assert evaluate_cost(systems, Schedule.parse(sched)).total == pytest.approx(float(cost), abs=1e-9)
    assert '"3,1,2,3,1,3,2,1"' in out.read_text()


def test_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["solve", "--method", "rh", "--window", "2", SMALL, "--csv", str(a)])
    main(["solve", "--method", "rh", "--window", "2", SMALL, "--csv", str(b)])
    strip = lambda p: [r[:-1] for r in csv.reader(p.open())]
    assert strip(a) == strip(b)


def test_evaluate_scalar_pair(tmp_path, capsys):
    assert main(["evaluate", _scalar_pair(tmp_path), "--schedule", "1,2"]) == 0
    assert "5.045085" in capsys.readouterr().out


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"systems": [\n  oops ]}')
    assert main(["steady", str(bad)]) == 2
    assert ":2:" in capsys.readouterr().err
    assert main(["steady", _scalar_pair(tmp_path, R=0.0)]) == 2
    assert "R must be positive definite" in capsys.readouterr().err
    assert main(["steady", _scalar_pair(tmp_path, A_rows=2)]) == 2
    assert main(["evaluate", SMALL, "--schedule", "1,2"]) == 3
    assert main(["construct", SMALL]) == 4
    assert main(["steady", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("cmd", [["steady"], ["bounds"], ["lower-bound"], ["solve", "--method", "mef"],
                                 ["solve", "--method", "brute", "--max-period", "6"],
                                 ["bounds", "--bound-mode", "linear"]])
def test_commands_succeed(cmd, capsys):
    assert main(cmd + [SMALL]) == 0
    assert capsys.readouterr().out


def test_construct_duty_cycle_fixture(capsys):
    assert main(["construct", str(fixture_path("duty_cycle"))]) == 0
    assert "1,2,1,3" in capsys.readouterr().out
