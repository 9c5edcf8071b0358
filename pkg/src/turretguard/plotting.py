"""SVG figures of a solved scenario or a simulated trajectory.

Colour conventions: the Apollonius circle (boundary of the Attacker's
region against the Defender) is blue, the boundary of its region against
the Turret is green, and the Value is a dashed purple ring of radius
``value + 1``. Initial positions are filled circles and terminal positions
open circles. Key artists carry SVG ids (``target``, ``value-ring``,
``capture-point``, ...) so the output can be inspected programmatically.
"""

from __future__ import annotations

import io
import math

import numpy as np
from matplotlib import rc_context
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure
from matplotlib.patches import Circle

from .errors import TurretGuardError
from .geometry import GameParams, GameState, PolarPoint, theta_barrier, to_polar, turret_region_boundary
from .simulator import Outcome, Trajectory
from .solver import FullSolution, TurnDirection

FIG_INCHES = 6.0
SVG_RC = {"svg.hashsalt": "turretguard", "svg.fonttype": "none"}

BLUE = "#1f4fd1"
GREEN = "#1a9a3a"
PURPLE = "#8a2be2"
RED = "#c62828"


def turret_region_curve(state: GameState, params: GameParams, direction: TurnDirection, n: int = 400):
    """Fixed-frame ``(x, y)`` of the turret-region boundary, or ``None`` when it is not defined."""
    sgn = direction.value
    rel = to_polar(state.attacker, state.theta_T)
    a_frame = PolarPoint(rel.r, sgn * rel.theta)
    theta_a = a_frame.theta % (2 * math.pi)
    if theta_a == 0 or theta_a > theta_barrier(rel.r, params):
        return None
    try:
        th, r = turret_region_boundary(a_frame, params, n)
    except TurretGuardError:
        return None
    ang = sgn * th + state.theta_T
    return r * np.cos(ang), r * np.sin(ang)


def _new_axes(extent: float):
    fig = Figure(figsize=(FIG_INCHES, FIG_INCHES))
    FigureCanvasSVG(fig)
    ax = fig.add_axes([0.08, 0.08, 0.88, 0.88])
    ax.set_xlim(-extent, extent)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.grid(True, color="#dddddd", linewidth=0.5)
    ax.add_patch(Circle((0, 0), 1.0, fill=False, color="black", linewidth=1.2, gid="target"))
    return fig, ax


def _turret(ax, theta_T: float, extent: float) -> None:
    ax.plot([0], [0], marker="^", color="black", markersize=8, gid="turret")
    ax.plot([0, extent * math.cos(theta_T)], [0, extent * math.sin(theta_T)],
            color="black", linewidth=0.8, linestyle=":", gid="look-angle")


def _svg(fig) -> bytes:
    buf = io.BytesIO()
    with rc_context(SVG_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def render_solution(state: GameState, params: GameParams, full: FullSolution) -> bytes:
    """Figure of the preferred-direction equilibrium."""
    sol = full.best
    p = sol.capture_point
    A, D = state.attacker, state.defender
    alpha = params.alpha
    c = ((1 + alpha) * A[0] - alpha * D[0], (1 + alpha) * A[1] - alpha * D[1])
    rho = params.mu * alpha / params.nu * math.hypot(D[0] - A[0], D[1] - A[1])
    d_end = (D[0] + params.mu * sol.t_f * math.cos(sol.heading_D),
             D[1] + params.mu * sol.t_f * math.sin(sol.heading_D))
    extent = max(math.hypot(*A), math.hypot(*D), full.value + 1.0, 1.5)
    extent = 1.1 * min(max(extent, math.hypot(*c) + rho), 2 * extent)

    fig, ax = _new_axes(extent)
    ax.add_patch(Circle(c, rho, fill=False, color=BLUE, linewidth=1.5, gid="apollonius"))
    curve = turret_region_curve(state, params, sol.direction)
    if curve is not None:
        ax.plot(curve[0], curve[1], color=GREEN, linewidth=1.5, gid="turret-region")
    ax.add_patch(Circle((0, 0), full.value + 1.0, fill=False, color=PURPLE, linestyle="--",
                        linewidth=1.5, gid="value-ring"))
    _turret(ax, state.theta_T, extent)
    ax.plot([A[0], p[0]], [A[1], p[1]], color=RED, linewidth=1.0, gid="attacker-path")
    ax.plot([D[0], d_end[0]], [D[1], d_end[1]], color=BLUE, linewidth=1.0, gid="defender-path")
    ax.plot([A[0]], [A[1]], "o", color=RED, markersize=7, gid="attacker-initial")
    ax.plot([D[0]], [D[1]], "o", color=BLUE, markersize=7, gid="defender-initial")
    ax.plot([p[0]], [p[1]], "o", mfc="none", color=RED, markersize=9, gid="attacker-terminal")
    ax.plot([d_end[0]], [d_end[1]], "o", mfc="none", color=BLUE, markersize=11, gid="defender-terminal")
    ax.plot([p[0]], [p[1]], "x", color="black", markersize=6, gid="capture-point")
    ax.set_title(f"{sol.case.value}, turret {full.chosen.name}, value {full.value:.4f}")
    return _svg(fig)


def render_trajectory(traj: Trajectory) -> bytes:
    """Figure of simulated paths. Region boundaries need parameters, so they are not drawn."""
    s = traj.states
    extent = 1.15 * max(float(np.max(np.abs(s[:, :4]))), 1.5)
    fig, ax = _new_axes(extent)
    _turret(ax, float(s[0, 4]), extent)
    ax.plot(s[:, 2], s[:, 3], color=RED, linewidth=1.0, gid="attacker-path")
    ax.plot(s[:, 0], s[:, 1], color=BLUE, linewidth=1.0, gid="defender-path")
    ax.plot([s[0, 2]], [s[0, 3]], "o", color=RED, markersize=7, gid="attacker-initial")
    ax.plot([s[0, 0]], [s[0, 1]], "o", color=BLUE, markersize=7, gid="defender-initial")
    ax.plot([s[-1, 2]], [s[-1, 3]], "o", mfc="none", color=RED, markersize=9, gid="attacker-terminal")
    ax.plot([s[-1, 0]], [s[-1, 1]], "o", mfc="none", color=BLUE, markersize=11, gid="defender-terminal")
    if traj.outcome not in (Outcome.TIMEOUT, Outcome.ATTACKER_REACHED_TARGET):
        ax.add_patch(Circle((0, 0), traj.terminal_distance, fill=False, color=PURPLE, linestyle="--",
                            linewidth=1.5, gid="value-ring"))
        ax.plot([s[-1, 2]], [s[-1, 3]], "x", color="black", markersize=6, gid="capture-point")
    ax.set_title(f"{traj.outcome.value}, terminal distance {traj.terminal_distance:.4f}")
    return _svg(fig)


def write_svg(data: bytes, path) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


__all__ = ["render_solution", "render_trajectory", "turret_region_curve", "write_svg"]
