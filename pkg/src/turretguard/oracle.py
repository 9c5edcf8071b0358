"""Slow, independent checks of the solver.

Everything here works from raw time-to-go comparisons on dense grids and
deliberately avoids the closed-form region boundaries and the solver's
frame transforms. Membership uses the same straight-line model as the
solver: the Attacker reaches ``p`` first when its travel time does not
exceed the time the line of sight needs to sweep from the Attacker to
``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AttackerWinsError, TurretGuardError
from .geometry import GameParams, GameState
from .simulator import SimConfig, simulate
from .solver import TurnDirection, attacker_breach_point, solve_direction, solve_solo_defender

FD_STEP = 1e-6


@dataclass(frozen=True)
class OracleGrid:
    """Polar search plan for :func:`brute_capture_point`.

    Each round samples ``angles`` rays across the current angular window
    and ``radii`` points along each ray; the next window spans ``keep``
    ray spacings on each side of the best ray.
    """

    angles: int = 401
    radii: int = 1200
    rounds: int = 3
    keep: int = 4
    bisections: int = 50

@dataclass(frozen=True)
class CostateVector:
    lambda_xA: float
    lambda_yA: float
    lambda_xD: float
    lambda_yD: float
    lambda_thetaT: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda_xA, self.lambda_yA, self.lambda_xD, self.lambda_yD, self.lambda_thetaT])

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("costates must be finite")


@dataclass(frozen=True)
class RegionMasks:
    xs: np.ndarray
    ys: np.ndarray
    defender: np.ndarray  # A reaches the cell no later than D
    turret: np.ndarray  # A reaches the cell no later than the line of sight
    shadow: np.ndarray


# -- raw time-to-go -----------------------------------------------------------


def _sweep_angle(X, Y, state: GameState, direction: TurnDirection):
    """Angle the line of sight sweeps, turning in ``direction``, before it points at (X, Y).

    Measured as the sweep to the Attacker plus the signed angle from the
    Attacker's bearing to the point's bearing.
    """
    sgn = 1.0 if direction is TurnDirection.CCW else -1.0
    lx, ly = math.cos(state.theta_T), math.sin(state.theta_T)
    ax, ay = state.attacker
    to_attacker = sgn * math.atan2(lx * ay - ly * ax, lx * ax + ly * ay)
    if to_attacker < 0:
        to_attacker += 2 * math.pi
    beyond = sgn * np.arctan2(ax * Y - ay * X, ax * X + ay * Y)
    return to_attacker + beyond


def _shadow_mask(X, Y, A):
    ax, ay = A
    dx, dy = X - ax, Y - ay
    len2 = dx * dx + dy * dy
    t = -(ax * dx + ay * dy) / np.maximum(len2, 1e-300)
    t = np.clip(t, 0.0, 1.0)
    nearest2 = (ax + t * dx) ** 2 + (ay + t * dy) ** 2
    return (X * X + Y * Y <= 1.0) | (nearest2 < 1.0)


def _masks(X, Y, state: GameState, params: GameParams, direction: TurnDirection):
    ax, ay = state.attacker
    dx, dy = state.defender
    t_a = np.hypot(X - ax, Y - ay) / params.nu
    t_d = np.hypot(X - dx, Y - dy) / params.mu
    t_t = _sweep_angle(X, Y, state, direction) / params.omega
    return t_a <= t_d, t_a <= t_t, _shadow_mask(X, Y, state.attacker)


def bounding_radius(state: GameState) -> float:
    ax, ay = state.attacker
    dx, dy = state.defender
    return math.hypot(ax, ay) + math.hypot(ax - dx, ay - dy) + 1.0


def region_membership_grid(state: GameState, params: GameParams, direction: TurnDirection,
                           resolution: int = 401, half_width: Optional[float] = None) -> RegionMasks:
    """Per-cell membership of both dominance regions on a square around the Turret."""
    R = bounding_radius(state) if half_width is None else half_width
    xs = np.linspace(-R, R, resolution)
    ys = np.linspace(-R, R, resolution)
    X, Y = np.meshgrid(xs, ys)
    d, t, s = _masks(X, Y, state, params, direction)
    return RegionMasks(xs, ys, d, t, s)


def _feasible(X, Y, state: GameState, params: GameParams, direction: TurnDirection, R: float):
    d, t, s = _masks(X, Y, state, params, direction)
    return d & t & ~s & (X * X + Y * Y <= R * R)


def _first_feasible_radius(phi, r_lo, r_hi, state, params, direction, grid: OracleGrid, R: float):
    """Smallest feasible radius along each ray in ``[r_lo, r_hi]``; ``inf`` where there is none."""
    rs = np.linspace(r_lo, r_hi, grid.radii)
    c, s = np.cos(phi)[:, None], np.sin(phi)[:, None]
    ok = _feasible(rs * c, rs * s, state, params, direction, R)
    hit = ok.any(axis=1)
    first = np.argmax(ok, axis=1)
    out = np.full(len(phi), np.inf)
    rows = np.flatnonzero(hit)
    hi = rs[first[rows]]
    lo = np.where(first[rows] > 0, rs[np.maximum(first[rows] - 1, 0)], hi)
    # rays feasible at the first sample keep it; the rest bisect the infeasible-to-feasible step
    need = first[rows] > 0
    c1, s1 = c[rows, 0], s[rows, 0]
    for _ in range(grid.bisections):
        mid = 0.5 * (lo + hi)
        f = _feasible(mid * c1, mid * s1, state, params, direction, R) | ~need
        hi = np.where(f, mid, hi)
        lo = np.where(f, lo, mid)
    out[rows] = hi
    return out


def brute_capture_point(state: GameState, params: GameParams, direction: TurnDirection,
                        grid: OracleGrid = OracleGrid()) -> np.ndarray:
    """Closest point to the Turret that the Attacker reaches no later than either captor.

    Searches rays from the Turret. Along each ray the first feasible radius
    is located by sampling and then bisection on the raw time-to-go tests,
    so the radius is exact per ray and the angular spacing of the final
    round sets the position error. The Attacker's own bearing is always
    sampled: its position is feasible, which seeds tiny feasible sets.

    Raises :class:`AttackerWinsError` when no ray is feasible or the
    feasible set touches the target.
    """
    R = bounding_radius(state)
    ax, ay = state.attacker
    phi_a = math.atan2(ay, ax)
    center, half = phi_a, math.pi
    r_lo, r_hi = 1.0, R  # r_lo stays at the target so each ray's first transition is found
    best_phi = best_r = None
    for _ in range(grid.rounds):
        phi = np.linspace(center - half, center + half, grid.angles)
        if best_phi is None:
            phi = np.sort(np.append(phi, phi_a))
        r = _first_feasible_radius(phi, r_lo, r_hi, state, params, direction, grid, R)
        k = int(np.argmin(r))
        if not np.isfinite(r[k]):
            if best_phi is None:
                raise AttackerWinsError("no feasible capture sample")
            break
        best_phi, best_r = float(phi[k]), float(r[k])
        spacing = 2 * half / (grid.angles - 1)
        dr = (r_hi - r_lo) / (grid.radii - 1)
        center, half = best_phi, grid.keep * spacing
        # rays whose first feasible radius lies far above the best one cannot win
        r_hi = min(R, best_r + grid.keep * (dr + R * 2 * half))
    if best_r - 1.0 <= 1e-9 * R:
        raise AttackerWinsError("feasible samples reach the target")
    return np.array([best_r * math.cos(best_phi), best_r * math.sin(best_phi)])


# -- Hamiltonian / costates ----------------------------------------------------


def _solo_defender_value(xA, yA, xD, yD, params: GameParams) -> float:
    state = GameState.unchecked((xD, yD), (xA, yA), 0.0)
    return solve_solo_defender(state, params).value


def finite_difference_costates(state: GameState, params: GameParams, step: float = FD_STEP) -> CostateVector:
    """Central-difference gradient of the solo-Defender value."""
    x = np.array([*state.attacker, *state.defender], dtype=float)
    grad = np.empty(4)
    for i in range(4):
        up, dn = x.copy(), x.copy()
        up[i] += step
        dn[i] -= step
        grad[i] = (_solo_defender_value(*up, params) - _solo_defender_value(*dn, params)) / (2 * step)
    return CostateVector(*grad)


def analytic_costates(state: GameState, params: GameParams) -> CostateVector:
    """Closed-form gradient of the solo-Defender value."""
    a = params.alpha
    k = params.mu * a / params.nu
    xA, yA = state.attacker
    xD, yD = state.defender
    cx, cy = (1 + a) * xA - a * xD, (1 + a) * yA - a * yD
    nc = math.hypot(cx, cy)
    sep = math.hypot(xD - xA, yD - yA)
    ex, ey = (xA - xD) / sep, (yA - yD) / sep
    return CostateVector(
        cx * (1 + a) / nc - k * ex,
        cy * (1 + a) / nc - k * ey,
        -cx * a / nc + k * ex,
        -cy * a / nc + k * ey,
    )


def hamiltonian(costates: CostateVector, params: GameParams) -> float:
    """Hamiltonian with both mobile agents on their optimal headings and a passive Turret."""
    lam = costates
    return -params.nu * math.hypot(lam.lambda_xA, lam.lambda_yA) + params.mu * math.hypot(lam.lambda_xD, lam.lambda_yD)


def hamiltonian_residual(state: GameState, params: GameParams, step: float = FD_STEP) -> float:
    return abs(hamiltonian(finite_difference_costates(state, params, step), params))


def costate_mismatch(state: GameState, params: GameParams, step: float = FD_STEP) -> float:
    """Largest component difference between analytic and finite-difference costates."""
    fd = finite_difference_costates(state, params, step).as_array()
    an = analytic_costates(state, params).as_array()
    return float(np.max(np.abs(fd - an)))


# -- monotonicity of the turret region under CCW play -------------------------


@dataclass(frozen=True)
class MonotonicityReport:
    checked_shrink: int  # points tested for the CCW-region inclusion
    violations_shrink: int
    checked_grow: int  # points tested for the CW-region inclusion
    violations_grow: int

    @property
    def violations(self) -> int:
        return self.violations_shrink + self.violations_grow


def _barrier(r: float, params: GameParams) -> float:
    w = params.omega * r / params.nu
    return math.sqrt(w * w - 1) - math.acos(1 / w)


def _turret_membership(X, Y, state: GameState, params: GameParams, direction: TurnDirection):
    ax, ay = state.attacker
    sweep = _sweep_angle(X, Y, state, direction)
    return (sweep >= 0) & (np.hypot(X - ax, Y - ay) / params.nu <= sweep / params.omega)


def _ccw_bearing(state: GameState) -> float:
    lx, ly = math.cos(state.theta_T), math.sin(state.theta_T)
    ax, ay = state.attacker
    a = math.atan2(lx * ay - ly * ax, lx * ax + ly * ay)
    return a + 2 * math.pi if a < 0 else a


def attacker_path(state: GameState, params: GameParams, horizon: float, rng: np.random.Generator,
                  motion: str = "straight", steps: int = 200):
    """Attacker motion with the Turret turning CCW, cut off before any capture event."""
    dt = horizon / steps
    heading = rng.uniform(-math.pi, math.pi)
    states = [state]
    ax, ay = state.attacker
    th = state.theta_T
    for _ in range(steps):
        if motion == "random_walk":
            heading = rng.uniform(-math.pi, math.pi)
        ax += params.nu * dt * math.cos(heading)
        ay += params.nu * dt * math.sin(heading)
        th += params.omega * dt
        nxt = GameState.unchecked(state.defender, (ax, ay), th)
        if math.hypot(ax, ay) <= max(1.0, params.rate_radius):
            break
        prev_b, b = _ccw_bearing(states[-1]), _ccw_bearing(nxt)
        if b > prev_b + math.pi:  # the line of sight swept past the Attacker
            break
        states.append(nxt)
    return states


def monotonicity_check(state: GameState, params: GameParams, horizon: float, samples: int,
                       seed: int = 0, motion: str = "straight", pairs: int = 4) -> MonotonicityReport:
    """Sample-based check that the CCW turret region shrinks and the CW one grows.

    For random ``t1 < t2`` along an Attacker path with the Turret turning
    CCW, every sampled point in the CCW region at ``t2`` must be in it at
    ``t1``, and every point in the CW region at ``t1`` must be in it at
    ``t2``. Points shadowed by the target at either time are skipped. Each
    inclusion is tested only when its premise on the Attacker's angle
    holds at ``t1``.
    """
    rng = np.random.default_rng(seed)
    path = attacker_path(state, params, horizon, rng, motion)
    cs = cg = vs = vg = 0
    if len(path) < 2:
        return MonotonicityReport(0, 0, 0, 0)
    per_pair = max(1, samples // pairs)
    reach = params.nu * 2 * math.pi / params.omega
    for _ in range(pairs):
        i, j = sorted(rng.choice(len(path), size=2, replace=len(path) < 2))
        s1, s2 = path[i], path[j]
        a1 = np.asarray(s1.attacker)
        rad = reach * np.sqrt(rng.uniform(0, 1, per_pair))
        ang = rng.uniform(-math.pi, math.pi, per_pair)
        X = a1[0] + rad * np.cos(ang)
        Y = a1[1] + rad * np.sin(ang)
        keep = ~_shadow_mask(X, Y, s1.attacker) & ~_shadow_mask(X, Y, s2.attacker)
        X, Y = X[keep], Y[keep]
        r1 = math.hypot(*s1.attacker)
        theta1 = _ccw_bearing(s1)
        barrier = _barrier(r1, params)
        if theta1 < barrier:
            later = _turret_membership(X, Y, s2, params, TurnDirection.CCW)
            earlier = _turret_membership(X, Y, s1, params, TurnDirection.CCW)
            cs += int(later.sum())
            vs += int((later & ~earlier).sum())
        if 2 * math.pi - theta1 < barrier:
            earlier = _turret_membership(X, Y, s1, params, TurnDirection.CW)
            later = _turret_membership(X, Y, s2, params, TurnDirection.CW)
            cg += int(earlier.sum())
            vg += int((earlier & ~later).sum())
    return MonotonicityReport(cs, vs, cg, vg)


# -- unilateral deviations (saddle property) ---------------------------------

SADDLE_CONFIG = SimConfig(dt=1e-3, max_time=30.0, resolve_period=5)


def _toward(src, dst) -> float:
    return math.atan2(dst[1] - src[1], dst[0] - src[0])


def _defender_reply(state: GameState, params: GameParams, direction: TurnDirection, last):
    try:
        return solve_direction(state, params, direction).heading_D
    except TurretGuardError:
        return _toward(state.defender, state.attacker) if last is None else last


def _attacker_reply(state: GameState, params: GameParams, direction: TurnDirection, last):
    try:
        return solve_direction(state, params, direction).heading_A
    except AttackerWinsError:
        q = attacker_breach_point(state, params, direction)
        return _toward(state.attacker, (0.0, 0.0) if q is None else q)
    except TurretGuardError:
        return _toward(state.attacker, (0.0, 0.0)) if last is None else last


def attacker_deviation_distances(state: GameState, params: GameParams, direction: TurnDirection,
                                 headings, config: SimConfig = SADDLE_CONFIG) -> np.ndarray:
    """Terminal distances when the Attacker holds each constant heading.

    The Turret keeps turning in ``direction`` and the Defender re-solves
    every ``config.resolve_period`` steps.
    """
    out = []
    for h in headings:
        last = [None]

        def policy(t, s, h=h, last=last):
            last[0] = _defender_reply(s, params, direction, last[0])
            return (last[0], h, direction.u_T)

        out.append(simulate(state, params, config, policy, config.resolve_period).terminal_distance)
    return np.array(out)


def team_deviation_distances(state: GameState, params: GameParams, direction: TurnDirection,
                             headings, config: SimConfig = SADDLE_CONFIG) -> np.ndarray:
    """Terminal distances when the team deviates and the Attacker re-solves.

    One run per constant Defender heading with the Turret turning in
    ``direction``, then one run with the Turret turning the other way and
    the Defender replying to that. The Attacker always plays against the
    direction it sees the Turret turn.
    """
    out = []
    for h in headings:
        last = [None]

        def policy(t, s, h=h, last=last):
            last[0] = _attacker_reply(s, params, direction, last[0])
            return (h, last[0], direction.u_T)

        out.append(simulate(state, params, config, policy, config.resolve_period).terminal_distance)
    other = direction.opposite()
    last_a, last_d = [None], [None]

    def flipped(t, s):
        last_d[0] = _defender_reply(s, params, other, last_d[0])
        last_a[0] = _attacker_reply(s, params, other, last_a[0])
        return (last_d[0], last_a[0], other.u_T)

    out.append(simulate(state, params, config, flipped, config.resolve_period).terminal_distance)
    return np.array(out)
