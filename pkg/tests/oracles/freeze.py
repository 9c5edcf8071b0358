"""Recompute the frozen expected values used by the test suite.

Run ``python tests/oracles/freeze.py`` to regenerate ``frozen.json``.
Nothing here imports the package: every value comes from plain bisection
or dense sampling written from the definitions.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

NU, MU, OMEGA = 0.7, 1.0, 1.0
OUT = Path(__file__).with_name("frozen.json")


def bisect(f, lo, hi, tol=1e-14):
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def g(r):
    w = OMEGA * r / NU
    return math.sqrt(w * w - 1) + math.asin(1 / w)


def solo_turret_radius(r_a, theta_a):
    y = g(r_a) - theta_a
    return bisect(lambda r: g(r) - y, NU / OMEGA, 100.0)


def region_bounds(r_a, theta_a):
    h = lambda th: NU * th / OMEGA - r_a * abs(math.sin(th - theta_a))
    theta_u = math.acos(NU / (OMEGA * r_a)) + theta_a
    lo = bisect(h, max(0.0, theta_a - math.pi / 2), theta_a)
    hi = bisect(h, theta_a, theta_u)
    return lo, hi, theta_u


def apollonius(A, D):
    a = NU**2 / (MU**2 - NU**2)
    c = np.array([(1 + a) * A[0] - a * D[0], (1 + a) * A[1] - a * D[1]])
    rho = MU * a / NU * math.hypot(A[0] - D[0], A[1] - D[1])
    return c, rho


def nearest_on_circle(A, D, samples=10_000):
    """Closest sampled point of the equal-arrival-time circle to the origin."""
    c, rho = apollonius(A, D)
    phi = np.linspace(-math.pi, math.pi, samples, endpoint=False)
    px, py = c[0] + rho * np.cos(phi), c[1] + rho * np.sin(phi)
    k = int(np.argmin(np.hypot(px, py)))
    t_a = math.hypot(px[k] - A[0], py[k] - A[1]) / NU
    t_d = math.hypot(px[k] - D[0], py[k] - D[1]) / MU
    return [float(px[k]), float(py[k])], float(math.hypot(px[k], py[k])), abs(t_a - t_d)


def simultaneous_sweep(A, D, samples=1_000_000):
    """Lowest crossing of the turret-region and Apollonius boundaries (look angle along +x, CCW)."""
    r_a, theta_a = math.hypot(*A), math.atan2(A[1], A[0]) % (2 * math.pi)
    lo, hi, _ = region_bounds(r_a, theta_a)
    c, rho = apollonius(A, D)
    r_c, th_c = math.hypot(*c), math.atan2(c[1], c[0])

    def turret(th, sgn):
        disc = (NU * th / OMEGA) ** 2 - (r_a * np.sin(th - theta_a)) ** 2
        return r_a * np.cos(th - theta_a) + sgn * np.sqrt(np.maximum(disc, 0.0))

    def circle(th, sgn):
        d = th - th_c
        disc = rho**2 - (r_c * np.sin(d)) ** 2
        out = r_c * np.cos(d) + sgn * np.sqrt(np.maximum(disc, 0.0))
        return np.where(disc >= 0, out, np.nan)

    th = np.linspace(lo, hi, samples)
    best = None
    for st in (-1.0, 1.0):
        for sc in (-1.0, 1.0):
            diff = turret(th, st) - circle(th, sc)
            idx = np.flatnonzero(np.isfinite(diff[:-1]) & np.isfinite(diff[1:]) & (diff[:-1] * diff[1:] <= 0))
            for i in idx:
                f = lambda t: float(turret(np.float64(t), st) - circle(np.float64(t), sc))
                t = bisect(f, th[i], th[i + 1], 1e-15)
                r = float(turret(np.float64(t), st))
                if best is None or r < best[0]:
                    best = (r, t)
    r, t = best
    return [r * math.cos(t), r * math.sin(t)], r, t


def main():
    s1 = (2 * math.cos(0.3), 2 * math.sin(0.3))
    lo, hi, theta_u = region_bounds(2.0, 0.3)
    sim_A = (3 * math.cos(1.0), 3 * math.sin(1.0))
    sim_point, sim_r, sim_theta = simultaneous_sweep(sim_A, (0.5, 2.0))
    sd_A = (3 * math.cos(2.0), 3 * math.sin(2.0))
    sd_point, sd_r, sd_gap = nearest_on_circle(sd_A, (-0.5, 1.2))
    col_point, col_r, col_gap = nearest_on_circle((3.0, 0.0), (3.5, 0.0))
    frozen = {
        "solo_turret_value_r2_th0.3": solo_turret_radius(2.0, 0.3) - 1.0,
        "g_inverse_2.733999": bisect(lambda r: g(r) - 2.733999, NU / OMEGA, 100.0),
        "bounds_r2_th0.3": {"theta_lo": lo, "theta_hi": hi, "theta_u": theta_u},
        "simultaneous_state": {"capture_point": sim_point, "value": sim_r - 1.0, "theta": sim_theta},
        "solo_defender_state": {"capture_point": sd_point, "value": sd_r - 1.0, "time_gap": sd_gap},
        "collinear_state": {"capture_point": col_point, "value": col_r - 1.0, "time_gap": col_gap},
        "s1_attacker": list(s1),
    }
    OUT.write_text(json.dumps(frozen, indent=2) + "\n")
    print(json.dumps(frozen, indent=2))


if __name__ == "__main__":
    main()
