from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turretguard.errors import ScenarioError
from turretguard.geometry import GameState
from turretguard.report import SolutionReport, round_sig
from turretguard.scenario import MAX_SWEEP_CELLS, SweepAxis, SweepSpec, load_scenario, parse_scenario
from turretguard.scenarios import COLLINEAR_STATE, REFERENCE_PARAMS, SOLO_TURRET_STATE
from turretguard.solver import classify
from turretguard.sweep import cell_state, rows_to_csv, run_sweep, sweep_scenario

from conftest import SCENARIO_DIR

VALID = '{"nu":0.7,"mu":1,"omega":1,"attacker":[1.91,0.59],"defender":[2.6,1.2],"turret_angle":0}'


def _problems(text):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text)
    return dict(info.value.problems)


def test_parse_valid():
    sc = parse_scenario(VALID)
    assert sc.params.nu == 0.7 and sc.params.mu == 1 and sc.params.omega == 1
    assert sc.state.attacker == (1.91, 0.59)
    assert sc.state.defender == (2.6, 1.2)
    assert sc.sim is None and sc.sweep is None


def test_parse_rejects_fast_attacker():
    assert "nu" in _problems(VALID.replace('"nu":0.7', '"nu":1.2'))


def test_parse_rejects_attacker_inside_target():
    assert "attacker" in _problems(VALID.replace("[1.91,0.59]", "[0.5,0]"))


def test_parse_reports_every_problem_with_paths():
    raw = json.loads(VALID)
    raw["extra"] = 1
    raw["defender"] = [1, "x"]
    raw["sim"] = {"dt": -1, "resolve_period": 1.5, "bogus": 2}
    raw["sweep"] = {"axes": [{"name": "speed", "min": 0, "max": 1, "num": 0}]}
    del raw["omega"]
    probs = _problems(json.dumps(raw))
    for key in ("extra", "defender[1]", "sim.dt", "sim.resolve_period", "sim.bogus",
                "sweep.axes[0].name", "sweep.axes[0].num", "omega"):
        assert key in probs, key


def test_parse_malformed():
    assert "<root>" in _problems("{not json")
    assert "<root>" in _problems("[1, 2]")


def test_parse_oversize_sweep():
    raw = json.loads(VALID)
    raw["sweep"] = {"axes": [{"name": "defender_x", "min": 0, "max": 1, "num": 10_000},
                             {"name": "defender_y", "min": 0, "max": 1, "num": 10_000}]}
    assert "sweep.axes" in _problems(json.dumps(raw))
    assert 10_000 * 10_000 > MAX_SWEEP_CELLS


finite = st.floats(-50, 50, allow_nan=False)


@settings(max_examples=100)
@given(st.floats(0.05, 0.95), st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.floats(1.01, 20),
       st.floats(-math.pi, math.pi), finite, finite, finite,
       st.floats(1e-5, 1e-2), st.integers(0, 500), st.integers(1, 50))
def test_scenario_round_trip(nu, dmu, dom, r, th, dx, dy, tt, dt, period, num):
    raw = {"nu": nu, "mu": nu + 0.01 + dmu, "omega": nu + 0.01 + dom,
           "attacker": [r * math.cos(th), r * math.sin(th)], "defender": [dx, dy], "turret_angle": tt,
           "sim": {"dt": dt, "capture_tol_dist": 1e-3, "capture_tol_angle": 2e-3, "max_time": 10.0,
                   "resolve_period": period},
           "sweep": {"axes": [{"name": "attacker_r", "min": 1.5, "max": 3.0, "num": num}]}}
    if math.hypot(*raw["attacker"]) <= 1.0:
        return
    sc = parse_scenario(json.dumps(raw))
    assert parse_scenario(sc.to_json()) == sc


def test_report_round_trip(params):
    for state in (SOLO_TURRET_STATE, COLLINEAR_STATE,
                  GameState(defender=(10, 10), attacker=(1.05, 0), theta_T=math.pi)):
        rep = SolutionReport.from_status(classify(state, params))
        text = rep.to_json()
        back = SolutionReport.from_json(text)
        assert back == rep
        assert back.to_json() == text


def test_round_sig():
    assert round_sig(0.1234567890123456) == 0.123456789012
    assert round_sig(0.0) == 0.0
    assert round_sig(123456789.0123456) == 123456789.012


def test_sweep_cardinality_and_order(params):
    base = SOLO_TURRET_STATE
    spec = SweepSpec((SweepAxis("defender_x", -3, -2, 2), SweepAxis("defender_y", -3, -2, 2)))
    rows = run_sweep(params, base, spec, workers=1)
    assert [r[0] for r in rows] == [(-3, -3), (-3, -2), (-2, -3), (-2, -2)]
    text = rows_to_csv(["defender_x", "defender_y"], rows)
    lines = text.splitlines()
    assert lines[0] == "defender_x,defender_y,case,value,direction"
    assert len(lines) == 5


def test_sweep_parallel_matches_serial(params):
    sc = load_scenario(SCENARIO_DIR / "sweep_defender.json")
    serial = sweep_scenario(sc, workers=1)
    parallel = sweep_scenario(sc, workers=2)
    assert serial == parallel


def test_sweep_continuity():
    # the grid crosses solo-Defender, simultaneous and solo-Turret cells
    sc = load_scenario(SCENARIO_DIR / "sweep_defender.json")
    rows = run_sweep(sc.params, sc.state, sc.sweep, workers=1)
    cases = {r[1] for r in rows}
    assert {"SoloDefender", "Simultaneous", "SoloTurret"} <= cases
    V = np.array([np.nan if r[2] is None else r[2] for r in rows]).reshape(31, 31)
    assert not np.isnan(V).any()
    for grid in (V, V.T):
        for line in grid:
            d = np.abs(np.diff(line))
            for i in range(1, len(d) - 1):
                assert d[i] <= 10 * max(d[i - 1], d[i + 1], 1e-9)


def test_sweep_attacker_wins_strip(params):
    base = GameState(defender=(10, 10), attacker=(-1.5, 0), theta_T=0)
    spec = SweepSpec((SweepAxis("attacker_r", 1.02, 1.08, 4),))
    rows = run_sweep(params, base, spec, workers=1)
    assert all(r[1] == "AttackerWins" for r in rows)
    for line in rows_to_csv(["attacker_r"], rows).splitlines()[1:]:
        assert line.endswith(",AttackerWins,,")


def test_cell_state_polar_axes():
    base = GameState(defender=(0, 5), attacker=(2, 0), theta_T=0.5)
    s = cell_state(base, ["attacker_r", "attacker_theta"], [3.0, math.pi / 2])
    assert np.allclose(s.attacker, (0, 3), atol=1e-15)
    assert s.theta_T == 0.5 and s.defender == (0, 5)
