"""Geometric primitives of the turret / defender / attacker game.

Conventions
-----------
The Turret sits at the origin. Relative angles are measured from the
Turret's look angle and wrapped to ``(-pi, pi]``. For a Turret turning
counter-clockwise the Attacker's angle is re-expressed in ``[0, 2*pi)``
(:func:`ccw_angle`), and the turn the Turret needs to reach a point ``p``
is measured continuously from the Attacker's own angle
(:func:`ccw_turn_angle`): that is the angle the line of sight has to sweep
while the Attacker travels in a straight line to ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import CoincidentAgentsError, DomainError, OriginInsideError, PremiseError
from .numerics import Bracket, find_root

Point = Tuple[float, float]

TWO_PI = 2.0 * math.pi
ROOT_TOL = 1e-13
BOUNDARY_SLACK = 1e-12

__all__ = [
    "GameParams",
    "GameState",
    "PolarPoint",
    "ApolloniusCircle",
    "TurretRegionBounds",
    "wrap_angle",
    "ccw_angle",
    "ccw_turn_angle",
    "rotate",
    "to_polar",
    "apollonius_circle",
    "apollonius_radius_at",
    "g",
    "g_inverse",
    "theta_barrier",
    "in_turret_region",
    "turret_region_radius_at",
    "turret_region_bounds",
    "turret_region_boundary",
    "in_shadow",
]


def wrap_angle(theta):
    """Wrap an angle (or array of angles) to ``(-pi, pi]``."""
    return math.pi - (math.pi - theta) % TWO_PI


def ccw_angle(theta: float) -> float:
    """Counter-clockwise turn from the look angle to relative angle ``theta``, in ``[0, 2*pi)``."""
    return theta % TWO_PI


def ccw_turn_angle(point_theta, attacker_theta_ccw):
    """Turn a CCW Turret needs to point at ``point_theta``.

    ``attacker_theta_ccw`` is the Attacker's angle in ``[0, 2*pi)``; the
    result lies in ``(attacker_theta_ccw - pi, attacker_theta_ccw + pi]``.
    Negative values mean the line of sight would sweep over the Attacker
    before it could get there.
    """
    return attacker_theta_ccw + wrap_angle(point_theta - attacker_theta_ccw)


def rotate(p: Point, angle: float) -> Point:
    c, s = math.cos(angle), math.sin(angle)
    return (c * p[0] - s * p[1], s * p[0] + c * p[1])


@dataclass(frozen=True)
class GameParams:
    """Attacker speed ``nu``, Defender speed ``mu`` and Turret turn rate ``omega``."""

    nu: float
    mu: float
    omega: float
    target_radius: float = 1.0

    def __post_init__(self):
        for name in ("nu", "mu", "omega"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v!r}")
        if self.target_radius != 1.0:
            raise ValueError("target_radius is fixed at 1")
        if not self.nu < self.mu:
            raise ValueError("the Attacker must be slower than the Defender (nu < mu)")
        if not self.nu < self.omega * self.target_radius:
            raise ValueError("the Attacker must be slower than the Turret (nu < omega)")

    @property
    def alpha(self) -> float:
        return self.nu**2 / (self.mu**2 - self.nu**2)

    @property
    def rate_radius(self) -> float:
        """Radius ``nu/omega`` inside which the Attacker out-turns the Turret."""
        return self.nu / self.omega


@dataclass(frozen=True)
class GameState:
    """Defender and Attacker positions (fixed frame) and the Turret look angle."""

    defender: Point
    attacker: Point
    theta_T: float

    def __post_init__(self):
        d = (float(self.defender[0]), float(self.defender[1]))
        a = (float(self.attacker[0]), float(self.attacker[1]))
        object.__setattr__(self, "defender", d)
        object.__setattr__(self, "attacker", a)
        object.__setattr__(self, "theta_T", float(self.theta_T))
        if not all(math.isfinite(v) for v in (*d, *a, self.theta_T)):
            raise ValueError("state coordinates must be finite")
        if math.hypot(*a) <= 1.0:
            raise DomainError("the Attacker must start outside the target (r_A > 1)")

    @classmethod
    def unchecked(cls, defender: Point, attacker: Point, theta_T: float) -> "GameState":
        """Build a state without the start-of-game checks (e.g. a terminal sample)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "defender", (float(defender[0]), float(defender[1])))
        object.__setattr__(obj, "attacker", (float(attacker[0]), float(attacker[1])))
        object.__setattr__(obj, "theta_T", float(theta_T))
        return obj

    @property
    def r_A(self) -> float:
        return math.hypot(*self.attacker)

    @property
    def theta_A(self) -> float:
        return to_polar(self.attacker, self.theta_T).theta

    def mirrored(self) -> "GameState":
        """Reflect both agents across the Turret's look axis."""
        return GameState.unchecked(
            _reflect(self.defender, self.theta_T),
            _reflect(self.attacker, self.theta_T),
            self.theta_T,
        )


def _reflect(p: Point, axis: float) -> Point:
    c, s = math.cos(2 * axis), math.sin(2 * axis)
    return (c * p[0] + s * p[1], s * p[0] - c * p[1])


@dataclass(frozen=True)
class PolarPoint:
    """Distance to the Turret and angle relative to its look angle."""

    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("polar radius must be non-negative")
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))

    def to_cartesian(self, theta_T: float = 0.0) -> Point:
        a = self.theta + theta_T
        return (self.r * math.cos(a), self.r * math.sin(a))


def to_polar(p: Point, theta_T: float) -> PolarPoint:
    return PolarPoint(math.hypot(p[0], p[1]), math.atan2(p[1], p[0]) - theta_T)


@dataclass(frozen=True)
class ApolloniusCircle:
    """Boundary of the set of points the Attacker reaches before the Defender."""

    center: Point
    radius: float
    r_c: float
    theta_c: float
    alpha: float

    @property
    def contains_origin(self) -> bool:
        return self.r_c <= self.radius


def apollonius_circle(A: Point, D: Point, params: GameParams, theta_T: float = 0.0) -> ApolloniusCircle:
    """Apollonius circle of Attacker ``A`` and Defender ``D``.

    ``theta_c`` is measured from the look angle ``theta_T``.
    """
    dist = math.hypot(D[0] - A[0], D[1] - A[1])
    if dist == 0:
        raise CoincidentAgentsError("Attacker and Defender coincide")
    alpha = params.alpha
    c = ((1 + alpha) * A[0] - alpha * D[0], (1 + alpha) * A[1] - alpha * D[1])
    rho = params.mu * alpha / params.nu * dist
    polar = to_polar(c, theta_T)
    return ApolloniusCircle(c, rho, polar.r, polar.theta, alpha)


def _branch_sign(branch: str) -> float:
    if branch == "lower":
        return -1.0
    if branch == "upper":
        return 1.0
    raise ValueError(f"branch must be 'lower' or 'upper', got {branch!r}")


def apollonius_radius_at(circle: ApolloniusCircle, theta: float, branch: str) -> Optional[float]:
    """Distance from the Turret to the circle along relative angle ``theta``.

    Returns ``None`` when the ray misses the circle.
    """
    sign = _branch_sign(branch)
    if circle.contains_origin:
        raise OriginInsideError("the Turret lies inside the Apollonius circle")
    half_width = math.asin(circle.radius / circle.r_c)
    delta = wrap_angle(theta - circle.theta_c)
    # a few ulps of slack so an exact tangent ray still hits
    if abs(delta) > half_width + 4 * ROOT_TOL:
        return None
    disc = circle.radius**2 - (circle.r_c * math.sin(delta)) ** 2
    return circle.r_c * math.cos(delta) + sign * math.sqrt(max(disc, 0.0))


def g(r: float, params: GameParams) -> float:
    """Level function of the 1-vs-1 Turret game; strictly increasing in ``r``."""
    w = params.omega * r / params.nu
    if w < 1:
        raise DomainError(f"g is defined for r >= nu/omega, got r={r}")
    return math.sqrt(w * w - 1) + math.asin(1 / w)


def g_inverse(y: float, params: GameParams) -> float:
    """Radius ``r >= nu/omega`` with ``g(r) == y``."""
    if y < math.pi / 2:
        raise DomainError(f"g takes values >= pi/2, got {y}")
    lo = params.rate_radius
    if y == math.pi / 2:
        return lo
    # sqrt(w^2-1) >= w-1, so g(r) >= y once omega*r/nu >= y+1
    hi = params.rate_radius * (y + 1)
    return find_root(lambda r: g(r, params) - y, Bracket.around(lambda r: g(r, params) - y, lo, hi), ROOT_TOL)


def theta_barrier(r: float, params: GameParams) -> float:
    """Largest Attacker angle from which it cannot reach the ``nu/omega`` disk uncaptured."""
    w = params.omega * r / params.nu
    if w < 1:
        raise DomainError(f"theta_barrier is defined for r >= nu/omega, got r={r}")
    return math.sqrt(w * w - 1) - math.acos(1 / w)


def in_turret_region(p: PolarPoint, A: PolarPoint, params: GameParams) -> bool:
    """Whether the Attacker at ``A`` reaches ``p`` before a CCW Turret aligns with it."""
    theta_a = ccw_angle(A.theta)
    theta = ccw_turn_angle(p.theta, theta_a)
    if theta < 0:
        return False
    half = 0.5 * (p.theta - A.theta)
    # law of cosines, written to stay accurate near p == A
    dist2 = (p.r - A.r) ** 2 + 4 * p.r * A.r * math.sin(half) ** 2
    reach2 = (params.nu * theta / params.omega) ** 2
    # the region is closed; the slack absorbs rounding for points exactly on the boundary
    return dist2 - reach2 <= BOUNDARY_SLACK * max(1.0, reach2)


def _turret_disc(r_a: float, theta_a: float, theta: float, params: GameParams) -> float:
    reach = params.nu * theta / params.omega
    return reach * reach - (r_a * math.sin(theta - theta_a)) ** 2


def turret_region_radius_at(A: PolarPoint, theta: float, branch: str, params: GameParams) -> Optional[float]:
    """Distance from the Turret to the region boundary at CCW turn angle ``theta``.

    ``theta`` is a turn angle (same branch as ``ccw_angle(A.theta)``), not a
    wrapped relative angle. ``None`` when the ray misses the boundary.
    """
    sign = _branch_sign(branch)
    theta_a = ccw_angle(A.theta)
    disc = _turret_disc(A.r, theta_a, theta, params)
    if disc < 0:
        return None
    r = A.r * math.cos(theta - theta_a) + sign * math.sqrt(disc)
    if r < 0 or A.r * math.cos(theta - theta_a) - math.sqrt(disc) < 0:
        return None
    return r


@dataclass(frozen=True)
class TurretRegionBounds:
    """Angular extent ``[theta_lo, theta_hi]`` of the turret dominance region."""

    theta_lo: float
    theta_hi: float
    theta_u: float


def turret_region_bounds(A: PolarPoint, params: GameParams) -> TurretRegionBounds:
    theta_a = ccw_angle(A.theta)
    if theta_a <= 0:
        raise DomainError("the Attacker is on the line of sight (already captured)")
    k = params.rate_radius
    if A.r <= k:
        raise DomainError("the Attacker is inside the nu/omega disk")
    if theta_a > theta_barrier(A.r, params):
        raise PremiseError("Attacker angle exceeds the barrier; region not well defined")

    def h(th):
        return k * th - A.r * abs(math.sin(th - theta_a))

    theta_u = math.acos(k / A.r) + theta_a
    theta_min = max(0.0, theta_a - math.pi / 2)
    lo = find_root(h, Bracket.around(h, theta_min, theta_a), ROOT_TOL)
    hi = find_root(h, Bracket.around(h, theta_a, theta_u), ROOT_TOL)
    return TurretRegionBounds(lo, hi, theta_u)


def turret_region_boundary(A: PolarPoint, params: GameParams, n: int = 400,
                           bounds: Optional[TurretRegionBounds] = None):
    """Closed boundary curve of the turret dominance region.

    Returns ``(theta, r)`` arrays: the near branch from ``theta_lo`` to
    ``theta_hi`` followed by the far branch back again.
    """
    b = bounds or turret_region_bounds(A, params)
    theta_a = ccw_angle(A.theta)
    th = np.linspace(b.theta_lo, b.theta_hi, n)
    reach = params.rate_radius * th
    disc = np.sqrt(np.maximum(reach**2 - (A.r * np.sin(th - theta_a)) ** 2, 0.0))
    base = A.r * np.cos(th - theta_a)
    theta = np.concatenate([th, th[::-1]])
    r = np.concatenate([base - disc, (base + disc)[::-1]])
    return theta, r


def in_shadow(p, A: Point):
    """Whether ``p`` is in the target or hidden behind it as seen from ``A``.

    A segment that only grazes the unit circle does not count. Accepts
    scalars or arrays for ``p``'s coordinates.
    """
    px, py = np.asarray(p[0], dtype=float), np.asarray(p[1], dtype=float)
    ax, ay = float(A[0]), float(A[1])
    dx, dy = px - ax, py - ay
    len2 = dx * dx + dy * dy
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(len2 > 0, -(ax * dx + ay * dy) / np.where(len2 > 0, len2, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    cx, cy = ax + t * dx, ay + t * dy
    inside = px * px + py * py <= 1.0
    crosses = cx * cx + cy * cy < 1.0
    out = inside | crosses
    return bool(out) if out.ndim == 0 else out
