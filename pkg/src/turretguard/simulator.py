"""Forward simulation of the game kinematics with capture detection.

Controls are piecewise constant, so a hold period is integrated exactly
as ``x_n = x_0 + n*dt*v`` in one vectorized block. Each step is scanned
for capture events: the Defender's closest approach within the step,
the Turret's line of sight crossing the Attacker, and the Attacker
crossing the target circle. The earliest event ends the run. Its instant
is refined by interpolating the triggering quantity, and the terminal
state is taken at that instant. Recorded samples stay on the ``dt`` grid.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import AttackerWinsError, TurretGuardError
from .geometry import GameParams, GameState, wrap_angle
from .solver import CaptureSolution, TurnDirection, attacker_breach_point, solve, solve_direction

Controls = Tuple[float, float, float]  # (u_D, u_A, u_T)
Policy = Callable[[float, GameState], Controls]

CSV_HEADER = ["t", "x_D", "y_D", "x_A", "y_A", "theta_T"]
OPEN_LOOP_BLOCK = 20000


class Outcome(str, Enum):
    DEFENDER_CAPTURE = "DefenderCapture"
    TURRET_CAPTURE = "TurretCapture"
    SIMULTANEOUS_CAPTURE = "SimultaneousCapture"
    ATTACKER_REACHED_TARGET = "AttackerReachedTarget"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-4
    capture_tol_dist: float = 5e-4
    capture_tol_angle: float = 5e-4
    max_time: float = 50.0
    resolve_period: int = 100  # steps between feedback re-solves; 0 means open loop

    def __post_init__(self):
        for name in ("dt", "capture_tol_dist", "capture_tol_angle", "max_time"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive, got {v!r}")
        if int(self.resolve_period) != self.resolve_period or self.resolve_period < 0:
            raise ValueError("resolve_period must be a non-negative integer")


def _pack(state: GameState) -> np.ndarray:
    return np.array([*state.defender, *state.attacker, state.theta_T], dtype=float)


def _unpack(x) -> GameState:
    return GameState.unchecked((x[0], x[1]), (x[2], x[3]), x[4])


@dataclass
class Trajectory:
    """Sampled run. ``states`` rows are ``(x_D, y_D, x_A, y_A, theta_T)``.

    ``terminal_state`` / ``terminal_time`` are at the refined event
    instant, which can fall between the last two samples or slightly past
    the last one.
    """

    times: np.ndarray
    states: np.ndarray
    outcome: Outcome
    terminal_distance: float
    terminal_time: float
    terminal_state: GameState = field(repr=False)

    @property
    def samples(self) -> List[Tuple[float, GameState]]:
        return [(float(t), _unpack(x)) for t, x in zip(self.times, self.states)]

    @property
    def final_state(self) -> GameState:
        return _unpack(self.states[-1])


def step(state: GameState, controls: Controls, params: GameParams, dt: float) -> GameState:
    """One Euler step of the kinematics."""
    u_d, u_a, u_t = controls
    if abs(u_t) > 1:
        raise ValueError("|u_T| must not exceed 1")
    dx, dy = state.defender
    ax, ay = state.attacker
    return GameState.unchecked(
        (dx + params.mu * dt * math.cos(u_d), dy + params.mu * dt * math.sin(u_d)),
        (ax + params.nu * dt * math.cos(u_a), ay + params.nu * dt * math.sin(u_a)),
        state.theta_T + params.omega * u_t * dt,
    )


def detect_capture(state: GameState, params: GameParams, config: SimConfig) -> Optional[Outcome]:
    """Capture status of a single state, using the distance and angle tolerances."""
    r_a = state.r_A
    if r_a <= 1.0:
        return Outcome.ATTACKER_REACHED_TARGET
    sep = math.hypot(state.defender[0] - state.attacker[0], state.defender[1] - state.attacker[1])
    by_d = sep <= config.capture_tol_dist
    by_t = abs(state.theta_A) <= config.capture_tol_angle
    if by_d and by_t:
        return Outcome.SIMULTANEOUS_CAPTURE
    if by_d:
        return Outcome.DEFENDER_CAPTURE
    if by_t:
        return Outcome.TURRET_CAPTURE
    return None


def _velocity(controls: Controls, params: GameParams) -> np.ndarray:
    u_d, u_a, u_t = controls
    if abs(u_t) > 1:
        raise ValueError("|u_T| must not exceed 1")
    return np.array([
        params.mu * math.cos(u_d), params.mu * math.sin(u_d),
        params.nu * math.cos(u_a), params.nu * math.sin(u_a),
        params.omega * u_t,
    ])


def _rel_angle(x):
    return wrap_angle(np.arctan2(x[..., 3], x[..., 2]) - x[..., 4])


def _first(mask) -> Optional[int]:
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def _scan(prev: np.ndarray, cur: np.ndarray, v: np.ndarray, params: GameParams,
          config: SimConfig, dt: float):
    """Earliest event among the steps ``prev[i] -> cur[i]``.

    Returns ``(i, outcome, frac)`` with the event at ``prev[i] + frac*dt*v``,
    or ``None``.
    """
    r_prev = np.hypot(prev[:, 2], prev[:, 3])
    r_cur = np.hypot(cur[:, 2], cur[:, 3])
    hit_target = r_cur <= 1.0

    a_prev, a_cur = _rel_angle(prev), _rel_angle(cur)
    crossed = (a_prev * a_cur <= 0) & (np.abs(a_prev - a_cur) < math.pi)
    hit_turret = (crossed | (np.abs(a_cur) <= config.capture_tol_angle)) & (r_cur > 1.0)

    rel = prev[:, 2:4] - prev[:, 0:2]
    w = v[2:4] - v[0:2]
    w2 = float(w @ w)
    if w2 > 0:
        tau = -(rel @ w) / w2 / dt  # closest approach, in steps from prev
    else:
        tau = np.zeros(len(prev))
    tau_in = np.clip(tau, 0.0, 1.0)
    closest = np.hypot(rel[:, 0] + tau_in * dt * w[0], rel[:, 1] + tau_in * dt * w[1])
    hit_defender = (closest <= config.capture_tol_dist) & (r_cur > 1.0)

    cands = [i for i in (_first(hit_target), _first(hit_turret), _first(hit_defender)) if i is not None]
    if not cands:
        return None
    i = min(cands)
    # refined event instants, in steps from prev[i]
    events = {}
    if hit_target[i]:
        events[Outcome.ATTACKER_REACHED_TARGET] = (r_prev[i] - 1.0) / (r_prev[i] - r_cur[i])
    if hit_turret[i]:
        d = a_prev[i] - a_cur[i]
        frac = a_prev[i] / d if d != 0 else 1.0
        if not frac >= 0:
            frac = 1.0
        # the tolerance can trigger a few steps early; extrapolate, but not far
        rate = params.omega * dt + params.nu * dt / max(r_cur[i], 1e-12)
        events[Outcome.TURRET_CAPTURE] = min(frac, 1.0 + config.capture_tol_angle / rate + 1.0)
    if hit_defender[i]:
        limit = 1.0 + config.capture_tol_dist / max(math.sqrt(w2) * dt, 1e-300) + 1.0
        events[Outcome.DEFENDER_CAPTURE] = float(min(max(tau[i], 0.0), limit))
    outcome = min(events, key=events.get)
    frac = events[outcome]
    if Outcome.TURRET_CAPTURE in events and Outcome.DEFENDER_CAPTURE in events:
        if outcome is not Outcome.ATTACKER_REACHED_TARGET:
            outcome = Outcome.SIMULTANEOUS_CAPTURE
    return i, outcome, float(frac)


def _finalize(outcome: Outcome, x: np.ndarray, params: GameParams, config: SimConfig) -> Outcome:
    """Upgrade a solo capture to simultaneous when the other condition also holds."""
    s = _unpack(x)
    sep = math.hypot(x[0] - x[2], x[1] - x[3])
    if outcome is Outcome.DEFENDER_CAPTURE and abs(s.theta_A) <= config.capture_tol_angle:
        return Outcome.SIMULTANEOUS_CAPTURE
    if outcome is Outcome.TURRET_CAPTURE and sep <= config.capture_tol_dist:
        return Outcome.SIMULTANEOUS_CAPTURE
    return outcome


def simulate(state: GameState, params: GameParams, config: SimConfig, policy: Policy,
             hold: int) -> Trajectory:
    """Integrate from ``state``, asking ``policy`` for controls every ``hold`` steps."""
    dt = config.dt
    n_max = int(math.ceil(config.max_time / dt - 1e-9))
    x = _pack(state)
    blocks = [x[None, :]]
    t_blocks = [np.zeros(1)]

    def finish(outcome, x_end, t_end):
        times = np.concatenate(t_blocks)
        states = np.concatenate(blocks)
        return Trajectory(times, states, outcome, float(math.hypot(x_end[2], x_end[3])),
                          float(t_end), _unpack(x_end))

    start = detect_capture(state, params, config)
    if start is not None:
        return finish(start, x, 0.0)
    k = 0
    while k < n_max:
        m = min(hold, n_max - k)
        v = _velocity(policy(k * dt, _unpack(x)), params)
        n = np.arange(1, m + 1, dtype=float)
        chunk = x + (n * dt)[:, None] * v
        prev = np.vstack([x[None, :], chunk[:-1]])
        hit = _scan(prev, chunk, v, params, config, dt)
        if hit is not None:
            i, outcome, frac = hit
            blocks.append(chunk[: i + 1])
            t_blocks.append((k + n[: i + 1]) * dt)
            x_end = prev[i] + frac * dt * v
            return finish(_finalize(outcome, x_end, params, config), x_end, (k + i + frac) * dt)
        blocks.append(chunk)
        t_blocks.append((k + n) * dt)
        x = chunk[-1]
        k += m
    return finish(Outcome.TIMEOUT, x, k * dt)


def run_open_loop(state: GameState, params: GameParams, solution: CaptureSolution,
                  config: SimConfig = SimConfig()) -> Trajectory:
    """Every agent holds the constant control of ``solution``."""
    controls = (solution.heading_D, solution.heading_A, solution.u_T)
    return simulate(state, params, config, lambda t, s: controls, OPEN_LOOP_BLOCK)


def _toward(src, dst) -> float:
    return math.atan2(dst[1] - src[1], dst[0] - src[0])


def _rush_heading(state: GameState, params: GameParams, direction: TurnDirection) -> float:
    """Heading toward a target point the Attacker can reach, or straight in."""
    try:
        q = attacker_breach_point(state, params, direction)
    except TurretGuardError:
        q = None
    if q is None:
        return _toward(state.attacker, (0.0, 0.0))
    return _toward(state.attacker, q)


class FeedbackPolicy:
    """Both sides re-solve from the current state.

    The team plays the direction its full solution prefers. The Attacker
    plays the equilibrium against its guess of the Turret's direction until
    it has seen the Turret move, then against the observed direction. When
    a re-solve fails each side keeps the previous control, or falls back
    to pure pursuit / rushing the target if it has none.
    """

    def __init__(self, params: GameParams, attacker_guess: TurnDirection):
        self.params = params
        self.guess = attacker_guess
        self.observed: Optional[TurnDirection] = None
        self.team: Optional[Tuple[float, float]] = None
        self.attacker: Optional[float] = None

    def __call__(self, t: float, state: GameState) -> Controls:
        params = self.params
        try:
            full = solve(state, params)
            self.team = (full.best.heading_D, full.best.u_T)
        except AttackerWinsError:
            if self.team is None:
                self.team = (_toward(state.defender, state.attacker),
                             1.0 if state.theta_A >= 0 else -1.0)
        except TurretGuardError:
            if self.team is None:
                self.team = (_toward(state.defender, state.attacker), 1.0)
        belief = self.observed or self.guess
        try:
            self.attacker = solve_direction(state, params, belief).heading_A
        except AttackerWinsError:
            self.attacker = _rush_heading(state, params, belief)
        except TurretGuardError:
            if self.attacker is None:
                self.attacker = _toward(state.attacker, (0.0, 0.0))
        u_d, u_t = self.team
        self.observed = TurnDirection.CCW if u_t >= 0 else TurnDirection.CW
        return (u_d, self.attacker, u_t)


def run_feedback(state: GameState, params: GameParams, config: SimConfig = SimConfig(),
                 attacker_guess: TurnDirection = TurnDirection.CCW) -> Trajectory:
    if config.resolve_period <= 0:
        raise ValueError("feedback play needs resolve_period > 0")
    return simulate(state, params, config, FeedbackPolicy(params, attacker_guess), config.resolve_period)


# -- CSV -------------------------------------------------------------------------


def trajectory_to_csv(traj: Trajectory) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for t, x in zip(traj.times, traj.states):
        w.writerow([repr(float(t))] + [repr(float(v)) for v in x])
    buf.write(f"# outcome={traj.outcome.value},terminal_distance={traj.terminal_distance!r}\n")
    return buf.getvalue()


def write_csv(traj: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(trajectory_to_csv(traj))


def read_csv(path) -> Trajectory:
    """Load a trajectory written by :func:`write_csv`.

    The terminal state is not stored in the file; the last sample stands in.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split(",") != CSV_HEADER:
        raise ValueError(f"not a trajectory file: expected header {','.join(CSV_HEADER)}")
    rows, meta = [], {}
    for ln in lines[1:]:
        if ln.startswith("#"):
            for item in ln[1:].strip().split(","):
                key, _, val = item.partition("=")
                meta[key.strip()] = val.strip()
        elif ln.strip():
            rows.append([float(v) for v in ln.split(",")])
    if not rows or "outcome" not in meta:
        raise ValueError("trajectory file has no samples or no outcome line")
    data = np.array(rows)
    return Trajectory(data[:, 0], data[:, 1:], Outcome(meta["outcome"]),
                      float(meta["terminal_distance"]), float(data[-1, 0]), _unpack(data[-1, 1:]))
