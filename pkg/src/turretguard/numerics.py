"""Bracketed scalar root finding and constrained 2-D grid minimization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError

__all__ = ["Bracket", "GridSpec", "find_root", "grid_argmin"]


def _same_sign(a: float, b: float) -> bool:
    return (a > 0 and b > 0) or (a < 0 and b < 0)


@dataclass(frozen=True)
class Bracket:
    """Interval ``[lo, hi]`` over which ``f`` changes sign."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if math.isnan(self.f_lo) or math.isnan(self.f_hi):
            raise BracketError("function is NaN at a bracket endpoint")
        if _same_sign(self.f_lo, self.f_hi):
            raise BracketError(
                f"no sign change: f({self.lo})={self.f_lo}, f({self.hi})={self.f_hi}"
            )

    @classmethod
    def around(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, f(lo), f(hi))


@dataclass(frozen=True)
class GridSpec:
    """Sampling plan for :func:`grid_argmin`.

    Each refinement round re-grids a window ``shrink`` times narrower,
    centred on the incumbent.
    """

    resolution: int = 256
    refine_rounds: int = 3
    shrink: float = 8.0

    def __post_init__(self):
        if self.resolution < 16:
            raise ValueError("resolution must be >= 16")
        if self.refine_rounds < 1:
            raise ValueError("refine_rounds must be >= 1")
        if self.shrink <= 1:
            raise ValueError("shrink must be > 1")


def find_root(f: Callable[[float], float], bracket: Bracket, tol: float = 1e-12) -> float:
    """Return a root of ``f`` inside ``bracket``.

    Brent's method (bisection safeguarded by secant / inverse quadratic
    steps), so the iterate never leaves the bracket and the result is
    deterministic for a given input.
    """
    if bracket.f_lo == 0:
        return bracket.lo
    if bracket.f_hi == 0:
        return bracket.hi
    return brentq(f, bracket.lo, bracket.hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def grid_argmin(objective, feasible, domain, spec: GridSpec = GridSpec()):
    """Minimize ``objective`` over the feasible samples of a rectangle.

    ``objective(X, Y)`` and ``feasible(X, Y)`` are called with 2-D arrays of
    coordinates and must return arrays of the same shape. ``domain`` is
    ``((xmin, xmax), (ymin, ymax))``.

    Returns the best sample as a length-2 array, or ``None`` when no sample
    of the first (coarse) grid is feasible.
    """
    (xmin, xmax), (ymin, ymax) = domain
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    hx, hy = 0.5 * (xmax - xmin), 0.5 * (ymax - ymin)
    best = None
    best_val = math.inf
    for _ in range(spec.refine_rounds + 1):
        xs = np.linspace(max(xmin, cx - hx), min(xmax, cx + hx), spec.resolution)
        ys = np.linspace(max(ymin, cy - hy), min(ymax, cy + hy), spec.resolution)
        X, Y = np.meshgrid(xs, ys)
        mask = np.asarray(feasible(X, Y), dtype=bool)
        if mask.any():
            vals = np.where(mask, objective(X, Y), np.inf)
            k = np.unravel_index(np.argmin(vals), vals.shape)
            if vals[k] < best_val:
                best_val = float(vals[k])
                best = np.array([X[k], Y[k]])
        if best is None:
            return None
        cx, cy = best
        hx /= spec.shrink
        hy /= spec.shrink
    return best
