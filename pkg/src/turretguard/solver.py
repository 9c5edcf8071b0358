"""Equilibrium solution of the turret / defender / attacker game.

For a fixed Turret turn direction the game ends in one of three ways:
the Defender captures alone, the Turret captures alone, or both at the
same instant. :func:`solve_direction` decides which and returns the
capture point; :func:`solve` takes the better of the two turn directions
for the team.

Internally every direction is solved as a counter-clockwise problem in the
Turret frame (look angle along +x). A clockwise Turret is handled by
mirroring the agents across the look axis first.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import (
    AttackerWinsError,
    CoincidentAgentsError,
    DomainError,
    NoIntersectionError,
    TurretGuardError,
)
from .geometry import (
    GameParams,
    GameState,
    Point,
    apollonius_circle,
    ccw_angle,
    ccw_turn_angle,
    g,
    g_inverse,
    in_shadow,
    rotate,
    theta_barrier,
    to_polar,
    turret_region_bounds,
    wrap_angle,
)
from .numerics import Bracket, GridSpec, find_root, grid_argmin

log = logging.getLogger(__name__)

DISPERSAL_TOL = 1e-9
SIMULTANEOUS_SAMPLES = 1024
ROOT_TOL = 1e-14


class TurnDirection(Enum):
    CCW = 1
    CW = -1

    @property
    def u_T(self) -> float:
        return float(self.value)

    def opposite(self) -> "TurnDirection":
        return TurnDirection.CW if self is TurnDirection.CCW else TurnDirection.CCW


class TerminationCase(str, Enum):
    SOLO_DEFENDER = "SoloDefender"
    SOLO_TURRET = "SoloTurret"
    SIMULTANEOUS = "Simultaneous"
    FALLBACK_POINT = "FallbackPoint"
    ATTACKER_WINS = "AttackerWins"


@dataclass(frozen=True)
class CaptureSolution:
    """Equilibrium outcome for one Turret turn direction.

    Headings are fixed-frame angles; every agent holds its heading until
    capture at ``capture_point`` after time ``t_f``.
    """

    value: float
    capture_point: Point
    case: TerminationCase
    direction: TurnDirection
    heading_A: float
    heading_D: float
    u_T: float
    t_f: float


@dataclass(frozen=True)
class FullSolution:
    value: float
    chosen: TurnDirection
    ccw: Optional[CaptureSolution]
    cw: Optional[CaptureSolution]
    dispersal: bool

    @property
    def best(self) -> CaptureSolution:
        return self.ccw if self.chosen is TurnDirection.CCW else self.cw

    def for_direction(self, direction: TurnDirection) -> Optional[CaptureSolution]:
        return self.ccw if direction is TurnDirection.CCW else self.cw


@dataclass(frozen=True)
class GameStatus:
    kind: str  # "TeamWins" | "AttackerWins" | "Unresolved"
    solution: Optional[FullSolution] = None
    reason: str = ""


@dataclass(frozen=True)
class _Frame:
    """Turret frame, mirrored for a clockwise Turret."""

    A: Point
    D: Point
    theta_T: float
    direction: TurnDirection

    def to_fixed(self, p: Point) -> Point:
        if self.direction is TurnDirection.CW:
            p = (p[0], -p[1])
        return rotate(p, self.theta_T)


def _frame(state: GameState, direction: TurnDirection) -> _Frame:
    A = rotate(state.attacker, -state.theta_T)
    D = rotate(state.defender, -state.theta_T)
    if direction is TurnDirection.CW:
        A, D = (A[0], -A[1]), (D[0], -D[1])
    return _Frame(A, D, state.theta_T, direction)


@dataclass(frozen=True)
class _Capture:
    value: float
    point: Point  # turret frame
    case: TerminationCase


def _attacker_angle(A: Point) -> float:
    return ccw_angle(math.atan2(A[1], A[0]))


def _reaches_first(A: Point, p: Point, theta_a: float, params: GameParams) -> bool:
    """Straight-line time-to-go test of the Attacker against a CCW Turret."""
    turn = ccw_turn_angle(math.atan2(p[1], p[0]), theta_a)
    return math.hypot(p[0] - A[0], p[1] - A[1]) / params.nu <= turn / params.omega


# -- the three capture geometries (turret frame, CCW) -----------------------


def _nearest_point(circle) -> Point:
    r = circle.r_c - circle.radius
    return (circle.center[0] / circle.r_c * r, circle.center[1] / circle.r_c * r)


def _solo_defender(A: Point, D: Point, params: GameParams) -> _Capture:
    circle = apollonius_circle(A, D, params)
    if circle.contains_origin:
        raise AttackerWinsError("the Turret is inside the Attacker's region w.r.t. the Defender")
    r = circle.r_c - circle.radius
    if r <= 1.0:
        raise AttackerWinsError(f"Defender capture point lies inside the target (r={r:.6g})")
    c = circle.center
    return _Capture(r - 1.0, (c[0] / circle.r_c * r, c[1] / circle.r_c * r), TerminationCase.SOLO_DEFENDER)


def _solo_turret(A: Point, params: GameParams) -> _Capture:
    r_a = math.hypot(*A)
    theta_a = _attacker_angle(A)
    if theta_a == 0.0:
        return _Capture(r_a - 1.0, A, TerminationCase.SOLO_TURRET)
    y = g(r_a, params) - theta_a
    if y < math.pi / 2:
        raise DomainError("the Attacker can reach the nu/omega disk; 1v1 solution does not apply")
    r_f = g_inverse(y, params)
    k = params.rate_radius
    # the path is tangent to the nu/omega circle; travel = difference of tangent lengths
    travel = math.sqrt(r_a * r_a - k * k) - math.sqrt(max(r_f * r_f - k * k, 0.0))
    heading = theta_a + math.pi - math.asin(k / r_a)
    p = (A[0] + travel * math.cos(heading), A[1] + travel * math.sin(heading))
    printed = params.omega * (r_a - r_f) / params.nu
    actual = params.omega * travel / params.nu
    if abs(printed - actual) > 1e-6:
        log.debug("solo-turret capture angle: radial formula %.9g vs propagated %.9g", printed, actual)
    if r_f <= 1.0:
        raise AttackerWinsError(f"Turret capture point lies inside the target (r={r_f:.6g})")
    return _Capture(r_f - 1.0, p, TerminationCase.SOLO_TURRET)


def _p_dagger(A: Point, D: Point, params: GameParams) -> Point:
    r_a = math.hypot(*A)
    theta_a = _attacker_angle(A)
    heading = theta_a - math.pi - math.asin(params.rate_radius / r_a)
    psi = heading - math.atan2(A[1] - D[1], A[0] - D[0])
    sep = math.hypot(A[0] - D[0], A[1] - D[1])
    ratio2 = (params.mu / params.nu) ** 2
    dist = params.alpha * sep * (math.cos(psi) + math.sqrt(ratio2 - math.sin(psi) ** 2))
    return (A[0] + dist * math.cos(heading), A[1] + dist * math.sin(heading))


def _pd_in_turret_region(A: Point, p_d: Point, params: GameParams) -> bool:
    return math.hypot(*p_d) > params.rate_radius and _reaches_first(A, p_d, _attacker_angle(A), params)


def _pt_in_defender_region(A: Point, D: Point, params: GameParams) -> bool:
    p = _p_dagger(A, D, params)
    if not math.hypot(*p) > params.rate_radius:
        return False
    turn = ccw_turn_angle(math.atan2(p[1], p[0]), _attacker_angle(A))
    return math.hypot(p[0] - A[0], p[1] - A[1]) / params.nu > turn / params.omega


def _simultaneous(A: Point, D: Point, params: GameParams) -> _Capture:
    a_polar = to_polar(A, 0.0)
    r_a = a_polar.r
    theta_a = _attacker_angle(A)
    bounds = turret_region_bounds(a_polar, params)
    circle = apollonius_circle(A, D, params)
    (cx, cy), rho = circle.center, circle.radius
    lo, width = bounds.theta_lo, bounds.theta_hi - bounds.theta_lo
    k = params.rate_radius

    # walk the closed turret-region boundary: near branch out, far branch back
    def boundary(s):
        upper = s > 1.0
        th = np.where(upper, lo + (2.0 - s) * width, lo + s * width)
        disc = np.sqrt(np.maximum((k * th) ** 2 - (r_a * np.sin(th - theta_a)) ** 2, 0.0))
        r = r_a * np.cos(th - theta_a) + np.where(upper, disc, -disc)
        return th, r

    def excess(s):
        th, r = boundary(s)
        return float(np.hypot(r * np.cos(th) - cx, r * np.sin(th) - cy) - rho)

    s_grid = np.linspace(0.0, 2.0, SIMULTANEOUS_SAMPLES + 1)
    th, r = boundary(s_grid)
    f = np.hypot(r * np.cos(th) - cx, r * np.sin(th) - cy) - rho
    candidates = []
    for i in np.flatnonzero(np.sign(f[:-1]) * np.sign(f[1:]) <= 0):
        s_root = find_root(excess, Bracket(s_grid[i], s_grid[i + 1], f[i], f[i + 1]), ROOT_TOL)
        th_root, r_root = boundary(np.float64(s_root))
        candidates.append((float(r_root), float(th_root)))
    if not candidates:
        raise NoIntersectionError("turret and Apollonius boundaries do not intersect")
    r_best, th_best = min(candidates)
    p = (r_best * math.cos(th_best), r_best * math.sin(th_best))
    if r_best <= 1.0 or in_shadow(p, A):
        raise AttackerWinsError(f"simultaneous capture point is not outside the target (r={r_best:.6g})")
    return _Capture(r_best - 1.0, p, TerminationCase.SIMULTANEOUS)


def _target_breach(A: Point, D: Point, params: GameParams, samples: int = 2048) -> Optional[Point]:
    """Point on the target circle the Attacker reaches uncaptured, if any (turret frame)."""
    r_a = math.hypot(*A)
    phi_a = math.atan2(A[1], A[0])
    theta_a = _attacker_angle(A)
    half = math.acos(1.0 / r_a)
    phi = np.linspace(phi_a - half, phi_a + half, samples)
    qx, qy = np.cos(phi), np.sin(phi)
    t_a = np.hypot(qx - A[0], qy - A[1]) / params.nu
    t_d = np.hypot(qx - D[0], qy - D[1]) / params.mu
    turn = ccw_turn_angle(phi, theta_a)
    ok = (t_a < t_d) & (t_a < turn / params.omega)
    if not ok.any():
        return None
    i = int(np.argmin(np.where(ok, t_a, np.inf)))
    return (float(qx[i]), float(qy[i]))


def _fallback(A: Point, D: Point, params: GameParams, grid: GridSpec) -> _Capture:
    circle = apollonius_circle(A, D, params)
    theta_a = _attacker_angle(A)
    if not circle.contains_origin:
        r = circle.r_c - circle.radius
        c = circle.center
        p_d = (c[0] / circle.r_c * r, c[1] / circle.r_c * r)
        if r > 1.0 and not in_shadow(p_d, A) and _reaches_first(A, p_d, theta_a, params):
            return _Capture(r - 1.0, p_d, TerminationCase.SOLO_DEFENDER)
    breach = _target_breach(A, D, params)
    if breach is not None:
        raise AttackerWinsError("the Attacker reaches the target uncaptured")
    (cx, cy), rho = circle.center, circle.radius

    def feasible(X, Y):
        ok = (X - cx) ** 2 + (Y - cy) ** 2 <= rho * rho
        x, y = X[ok], Y[ok]
        turn = ccw_turn_angle(np.arctan2(y, x), theta_a)
        keep = np.hypot(x - A[0], y - A[1]) / params.nu <= turn / params.omega
        keep[keep] = ~in_shadow((x[keep], y[keep]), A)
        ok[ok] = keep
        return ok

    domain = ((cx - rho, cx + rho), (cy - rho, cy + rho))
    p = grid_argmin(lambda X, Y: np.hypot(X, Y), feasible, domain, grid)
    if p is None:
        raise AttackerWinsError("no feasible capture point")
    r = math.hypot(p[0], p[1])
    if r <= 1.0:
        raise AttackerWinsError("feasible set reaches the target")
    return _Capture(r - 1.0, (float(p[0]), float(p[1])), TerminationCase.FALLBACK_POINT)


# -- assembly -----------------------------------------------------------------


def _finish(state: GameState, fr: _Frame, cap: _Capture, params: GameParams) -> CaptureSolution:
    p = fr.to_fixed(cap.point)
    ax, ay = state.attacker
    dx, dy = state.defender
    t_f = math.hypot(p[0] - ax, p[1] - ay) / params.nu
    if t_f > 0:
        heading_a = math.atan2(p[1] - ay, p[0] - ax)
    else:
        heading_a = wrap_angle(state.theta_T + math.atan2(-fr.A[1], -fr.A[0]) * fr.direction.value)
    heading_d = math.atan2(p[1] - dy, p[0] - dx)
    return CaptureSolution(
        value=cap.value,
        capture_point=p,
        case=cap.case,
        direction=fr.direction,
        heading_A=heading_a,
        heading_D=heading_d,
        u_T=fr.direction.u_T,
        t_f=t_f,
    )


def _checked_frame(state: GameState, direction: TurnDirection) -> _Frame:
    fr = _frame(state, direction)
    if fr.A == fr.D or math.hypot(fr.A[0] - fr.D[0], fr.A[1] - fr.D[1]) == 0:
        raise CoincidentAgentsError("Attacker and Defender coincide")
    return fr


def solve_solo_defender(state: GameState, params: GameParams,
                        direction: TurnDirection = TurnDirection.CCW) -> CaptureSolution:
    """Capture by the Defender alone at the point of the Apollonius circle nearest the Turret."""
    fr = _checked_frame(state, direction)
    return _finish(state, fr, _solo_defender(fr.A, fr.D, params), params)


def solve_solo_turret(state: GameState, params: GameParams,
                      direction: TurnDirection = TurnDirection.CCW) -> CaptureSolution:
    """The 1-vs-1 Turret game, ignoring the Defender."""
    fr = _frame(state, direction)
    return _finish(state, fr, _solo_turret(fr.A, params), params)


def solve_simultaneous(state: GameState, params: GameParams,
                       direction: TurnDirection = TurnDirection.CCW) -> CaptureSolution:
    fr = _checked_frame(state, direction)
    return _finish(state, fr, _simultaneous(fr.A, fr.D, params), params)


def solve_fallback(state: GameState, params: GameParams,
                   direction: TurnDirection = TurnDirection.CCW,
                   grid: GridSpec = GridSpec()) -> CaptureSolution:
    """Closest feasible capture point found by grid search (Attacker beyond the barrier)."""
    fr = _checked_frame(state, direction)
    return _finish(state, fr, _fallback(fr.A, fr.D, params, grid), params)


def p_dagger(state: GameState, params: GameParams,
             direction: TurnDirection = TurnDirection.CCW) -> Point:
    """Where the Attacker's 1v1 heading against the Turret meets the Apollonius circle."""
    fr = _checked_frame(state, direction)
    return fr.to_fixed(_p_dagger(fr.A, fr.D, params))


def check_pD_in_RAT(state: GameState, params: GameParams,
                    direction: TurnDirection = TurnDirection.CCW) -> bool:
    """Whether the Defender's capture point lies in the Attacker's region against the Turret.

    False when the Turret sits inside the Apollonius circle, since no such point exists.
    """
    fr = _checked_frame(state, direction)
    circle = apollonius_circle(fr.A, fr.D, params)
    if circle.contains_origin:
        return False
    return _pd_in_turret_region(fr.A, _nearest_point(circle), params)


def check_pT_in_RAD(state: GameState, params: GameParams,
                    direction: TurnDirection = TurnDirection.CCW) -> bool:
    fr = _checked_frame(state, direction)
    return _pt_in_defender_region(fr.A, fr.D, params)


def solve_direction(state: GameState, params: GameParams, direction: TurnDirection,
                    grid: GridSpec = GridSpec()) -> CaptureSolution:
    """Equilibrium outcome when the Turret turns in ``direction``.

    Raises :class:`AttackerWinsError` when the Attacker reaches the target.
    """
    fr = _checked_frame(state, direction)
    A, D = fr.A, fr.D
    r_a = math.hypot(*A)
    theta_a = _attacker_angle(A)
    if theta_a == 0.0:
        return _finish(state, fr, _solo_turret(A, params), params)
    if theta_a > theta_barrier(r_a, params):
        return _finish(state, fr, _fallback(A, D, params, grid), params)

    circle = apollonius_circle(A, D, params)
    defender_ok = not circle.contains_origin and _pd_in_turret_region(A, _nearest_point(circle), params)
    turret_ok = _pt_in_defender_region(A, D, params)

    if defender_ok and turret_ok:
        caps = []
        for solver in (lambda: _solo_defender(A, D, params), lambda: _solo_turret(A, params)):
            try:
                caps.append(solver())
            except AttackerWinsError:
                pass
        if not caps:
            raise AttackerWinsError("both solo capture points lie inside the target")
        cap = max(caps, key=lambda c: c.value)
    elif defender_ok:
        cap = _solo_defender(A, D, params)
    elif turret_ok:
        cap = _solo_turret(A, params)
    else:
        cap = _simultaneous(A, D, params)
    return _finish(state, fr, cap, params)


def solve(state: GameState, params: GameParams, grid: GridSpec = GridSpec()) -> FullSolution:
    """Solve both turn directions and keep the one the team prefers."""
    results = {}
    for direction in TurnDirection:
        try:
            results[direction] = solve_direction(state, params, direction, grid)
        except AttackerWinsError:
            results[direction] = None
    ccw, cw = results[TurnDirection.CCW], results[TurnDirection.CW]
    if ccw is None and cw is None:
        raise AttackerWinsError("the Attacker wins against either turn direction")
    if cw is None or (ccw is not None and ccw.value >= cw.value):
        chosen = TurnDirection.CCW
    else:
        chosen = TurnDirection.CW
    dispersal = ccw is not None and cw is not None and abs(ccw.value - cw.value) <= DISPERSAL_TOL
    value = max(s.value for s in (ccw, cw) if s is not None)
    return FullSolution(value, chosen, ccw, cw, dispersal)


def classify(state: GameState, params: GameParams, grid: GridSpec = GridSpec()) -> GameStatus:
    """Status-typed wrapper around :func:`solve`; never raises for game outcomes."""
    try:
        return GameStatus("TeamWins", solve(state, params, grid))
    except AttackerWinsError as exc:
        return GameStatus("AttackerWins", reason=str(exc))
    except TurretGuardError as exc:
        return GameStatus("Unresolved", reason=f"{type(exc).__name__}: {exc}")


def attacker_breach_point(state: GameState, params: GameParams,
                          direction: TurnDirection) -> Optional[Point]:
    """A point of the target circle the Attacker can reach uncaptured (fixed frame)."""
    fr = _checked_frame(state, direction)
    q = _target_breach(fr.A, fr.D, params)
    return None if q is None else fr.to_fixed(q)
