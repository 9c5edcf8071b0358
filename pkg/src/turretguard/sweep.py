"""Grid sweeps of a scenario over Attacker polar or Defender Cartesian coordinates."""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple

from .errors import TurretGuardError
from .geometry import GameParams, GameState
from .report import round_sig
from .scenario import ScenarioFile, SweepSpec
from .solver import classify

THREADS_ENV = "TURRETGUARD_THREADS"
CHUNK = 256

Row = Tuple[Tuple[float, ...], str, Optional[float], Optional[str]]


def cell_state(base: GameState, names: Sequence[str], coords: Sequence[float]) -> GameState:
    """``base`` with the swept coordinates replaced (angles in the fixed frame)."""
    ax, ay = base.attacker
    r, th = math.hypot(ax, ay), math.atan2(ay, ax)
    dx, dy = base.defender
    for name, v in zip(names, coords):
        if name == "attacker_r":
            r = v
        elif name == "attacker_theta":
            th = v
        elif name == "defender_x":
            dx = v
        elif name == "defender_y":
            dy = v
    if any(n in ("attacker_r", "attacker_theta") for n in names):
        ax, ay = r * math.cos(th), r * math.sin(th)
    return GameState(defender=(dx, dy), attacker=(ax, ay), theta_T=base.theta_T)


def _solve_cell(args) -> Tuple[str, Optional[float], Optional[str]]:
    params, base, names, coords = args
    try:
        state = cell_state(base, names, coords)
    except (TurretGuardError, ValueError):
        return ("Unresolved", None, None)
    status = classify(state, params)
    if status.kind == "TeamWins":
        full = status.solution
        return (full.best.case.value, full.value, full.chosen.name)
    return (status.kind, None, None)


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_sweep(params: GameParams, base: GameState, spec: SweepSpec,
              workers: Optional[int] = None) -> List[Row]:
    """Classify every grid cell. Rows come back in row-major order (last axis fastest)."""
    names = [a.name for a in spec.axes]
    cells = list(itertools.product(*(a.values() for a in spec.axes)))
    jobs = [(params, base, names, c) for c in cells]
    n = workers if workers is not None else _worker_count()
    if n <= 1 or len(jobs) < 2 * CHUNK:
        results = [_solve_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_solve_cell, jobs, chunksize=CHUNK))
    return [(tuple(c), *res) for c, res in zip(cells, results)]


def rows_to_csv(names: Sequence[str], rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([*names, "case", "value", "direction"])
    for coords, case, value, direction in rows:
        w.writerow([*(repr(round_sig(c)) for c in coords), case,
                    "" if value is None else repr(round_sig(value)), direction or ""])
    return buf.getvalue()


def sweep_scenario(scenario: ScenarioFile, workers: Optional[int] = None) -> str:
    if scenario.sweep is None:
        raise ValueError("scenario has no sweep block")
    rows = run_sweep(scenario.params, scenario.state, scenario.sweep, workers)
    return rows_to_csv([a.name for a in scenario.sweep.axes], rows)
