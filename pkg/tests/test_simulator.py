from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turretguard.geometry import GameState
from turretguard.scenarios import (
    COLLINEAR_STATE,
    REFERENCE_PARAMS,
    SOLO_TURRET_STATE,
    random_team_win_state,
)
from turretguard.simulator import (
    CSV_HEADER,
    Outcome,
    SimConfig,
    detect_capture,
    read_csv,
    run_feedback,
    run_open_loop,
    simulate,
    step,
    trajectory_to_csv,
    write_csv,
)
from turretguard.solver import TurnDirection, solve, solve_direction

CFG = SimConfig()


def test_simconfig_validation():
    with pytest.raises(ValueError):
        SimConfig(dt=0)
    with pytest.raises(ValueError):
        SimConfig(capture_tol_dist=-1)
    with pytest.raises(ValueError):
        SimConfig(resolve_period=-1)
    assert CFG == SimConfig(1e-4, 5e-4, 5e-4, 50.0, 100)


def test_step_examples(params):
    s = GameState(defender=(5, 5), attacker=(2, 0), theta_T=0.3)
    n = step(s, (math.pi / 2, 0.0, 0.0), params, 0.1)
    assert math.isclose(n.attacker[0], 2.07) and n.attacker[1] == 0
    assert math.isclose(n.defender[1], 5.1) and math.isclose(n.defender[0], 5, abs_tol=1e-15)
    assert n.theta_T == 0.3
    n = step(s, (0.0, 0.0, 1.0), params, 0.01)
    assert math.isclose(n.theta_T, 0.31)
    n = step(s, (1.0, 2.0, -1.0), params, 0.0)
    assert (n.defender, n.attacker, n.theta_T) == (s.defender, s.attacker, s.theta_T)
    with pytest.raises(ValueError):
        step(s, (0, 0, 1.5), params, 0.1)


def test_detect_capture_examples(params):
    assert detect_capture(GameState.unchecked((0, 2), (0, 2), 0.0), params, CFG) is Outcome.DEFENDER_CAPTURE
    assert detect_capture(GameState.unchecked((2, 0), (2, 0), 0.0), params, CFG) is Outcome.SIMULTANEOUS_CAPTURE
    assert detect_capture(GameState(defender=(5, 5), attacker=(1.5, 0), theta_T=0), params, CFG) \
        is Outcome.TURRET_CAPTURE
    assert detect_capture(GameState.unchecked((5, 5), (0.99, 0), 2.0), params, CFG) \
        is Outcome.ATTACKER_REACHED_TARGET
    assert detect_capture(GameState(defender=(5, 5), attacker=(0, 2), theta_T=0), params, CFG) is None


@settings(max_examples=30, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.floats(-1, 1))
def test_speed_conservation(u_d, u_a, u_t):
    params = REFERENCE_PARAMS
    dt = 1e-3
    s = GameState(defender=(-8, 8), attacker=(6, 6), theta_T=0.1)
    tr = simulate(s, params, SimConfig(dt=dt, max_time=0.5), lambda t, x: (u_d, u_a, u_t), 50)
    d = np.diff(tr.states, axis=0)
    assert np.allclose(np.hypot(d[:, 0], d[:, 1]), params.mu * dt, rtol=1e-9, atol=1e-14)
    assert np.allclose(np.hypot(d[:, 2], d[:, 3]), params.nu * dt, rtol=1e-9, atol=1e-14)
    assert np.all(np.abs(d[:, 4]) <= params.omega * dt * (1 + 1e-9))
    assert np.all(np.diff(tr.times) > 0)
    assert np.allclose(np.diff(tr.times), dt, rtol=1e-9)


def test_open_loop_solo_turret(params):
    sol = solve_direction(SOLO_TURRET_STATE, params, TurnDirection.CCW)
    tr = run_open_loop(SOLO_TURRET_STATE, params, sol, CFG)
    assert tr.outcome is Outcome.TURRET_CAPTURE
    assert math.isclose(tr.terminal_distance, 1.7739, abs_tol=1e-3)
    # the event fires at the angle tolerance, slightly before exact alignment
    assert abs(tr.terminal_distance - (sol.value + 1)) <= 1e-4


def test_open_loop_collinear(params):
    full = solve(COLLINEAR_STATE, params)
    tr = run_open_loop(COLLINEAR_STATE, params, full.best, CFG)
    assert tr.outcome is Outcome.DEFENDER_CAPTURE
    assert np.allclose(tr.terminal_state.attacker, (1.8333, 0), atol=1e-3)


def test_open_loop_attacker_reaches_target(params):
    s = GameState(defender=(10, 10), attacker=(1.05, 0), theta_T=math.pi)
    tr = simulate(s, params, CFG, lambda t, x: (math.pi / 4, math.pi, 1.0), 5000)
    assert tr.outcome is Outcome.ATTACKER_REACHED_TARGET
    assert math.isclose(tr.terminal_distance, 1.0, abs_tol=1e-9)
    assert math.isclose(tr.terminal_time, 0.05 / 0.7, rel_tol=1e-9)


def test_timeout(params):
    s = GameState(defender=(-9, -9), attacker=(0, 3), theta_T=0)
    tr = simulate(s, params, SimConfig(dt=1e-2, max_time=1.0), lambda t, x: (math.pi, math.pi / 2, 0.0), 10)
    assert tr.outcome is Outcome.TIMEOUT
    assert len(tr.times) == 101


def test_solver_agreement_small_batch(params):
    rng = np.random.default_rng(21)
    tol = 5 * CFG.dt * (params.nu + params.mu + params.omega)
    for _ in range(10):
        s, full = random_team_win_state(rng, params)
        tr = run_open_loop(s, params, full.best, CFG)
        assert tr.outcome is not Outcome.TIMEOUT
        assert abs(tr.terminal_distance - (full.value + 1)) <= tol


def test_first_order_convergence(params):
    # measured at the last dt-grid sample, before event refinement
    rng = np.random.default_rng(2)
    cases = [random_team_win_state(rng, params) for _ in range(10)]
    dts = np.array([4e-3, 2e-3, 1e-3, 5e-4, 2.5e-4])
    totals = []
    for dt in dts:
        cfg = SimConfig(dt=dt, capture_tol_dist=0.1 * dt, capture_tol_angle=0.1 * dt)
        err = 0.0
        for s, full in cases:
            tr = run_open_loop(s, params, full.best, cfg)
            err += abs(math.hypot(*tr.states[-1, 2:4]) - (full.value + 1))
        totals.append(err)
    slope = np.polyfit(np.log(dts), np.log(totals), 1)[0]
    assert 0.7 <= slope <= 1.3


def test_feedback_matches_open_loop(params):
    full = solve(SOLO_TURRET_STATE, params)
    assert not full.dispersal
    open_loop = run_open_loop(SOLO_TURRET_STATE, params, full.best, CFG)
    fb = run_feedback(SOLO_TURRET_STATE, params, CFG, full.chosen)
    assert fb.outcome is open_loop.outcome
    assert abs(fb.terminal_distance - open_loop.terminal_distance) <= 1e-3


def test_feedback_requires_period(params):
    with pytest.raises(ValueError):
        run_feedback(SOLO_TURRET_STATE, params, SimConfig(resolve_period=0))


def test_csv_format_and_round_trip(tmp_path, params):
    full = solve(SOLO_TURRET_STATE, params)
    tr = run_open_loop(SOLO_TURRET_STATE, params, full.best, SimConfig(dt=1e-2))
    text = trajectory_to_csv(tr)
    lines = text.splitlines()
    assert lines[0] == "t,x_D,y_D,x_A,y_A,theta_T"
    assert lines[-1].startswith(f"# outcome={tr.outcome.value},terminal_distance=")
    assert len(lines) == len(tr.times) + 2
    path = tmp_path / "run.csv"
    write_csv(tr, path)
    back = read_csv(path)
    assert np.array_equal(back.times, tr.times)
    assert np.array_equal(back.states, tr.states)
    assert back.outcome is tr.outcome
    assert back.terminal_distance == tr.terminal_distance
    assert CSV_HEADER == lines[0].split(",")


def test_read_csv_rejects_other_files(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_csv(p)
