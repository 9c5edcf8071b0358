"""Scenario files: JSON in, validated parameters and state out."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .errors import ScenarioError
from .geometry import GameParams, GameState
from .simulator import SimConfig

SWEEP_AXES = ("attacker_r", "attacker_theta", "defender_x", "defender_y")
MAX_SWEEP_CELLS = 10_000_000

_TOP_KEYS = {"nu", "mu", "omega", "attacker", "defender", "turret_angle", "sim", "sweep"}
_SIM_KEYS = {"dt", "capture_tol_dist", "capture_tol_angle", "max_time", "resolve_period"}
_AXIS_KEYS = {"name", "min", "max", "num"}


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    num: int

    def values(self) -> List[float]:
        if self.num == 1:
            return [self.min]
        step = (self.max - self.min) / (self.num - 1)
        return [self.min + i * step for i in range(self.num)]


@dataclass(frozen=True)
class SweepSpec:
    axes: Tuple[SweepAxis, ...]

    @property
    def cells(self) -> int:
        return math.prod(a.num for a in self.axes)


@dataclass(frozen=True)
class ScenarioFile:
    params: GameParams
    state: GameState
    sim: Optional[SimConfig] = None
    sweep: Optional[SweepSpec] = None

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "nu": self.params.nu,
            "mu": self.params.mu,
            "omega": self.params.omega,
            "attacker": list(self.state.attacker),
            "defender": list(self.state.defender),
            "turret_angle": self.state.theta_T,
        }
        if self.sim is not None:
            out["sim"] = {k: getattr(self.sim, k) for k in sorted(_SIM_KEYS)}
        if self.sweep is not None:
            out["sweep"] = {"axes": [
                {"name": a.name, "min": a.min, "max": a.max, "num": a.num} for a in self.sweep.axes
            ]}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class _Collector:
    def __init__(self):
        self.problems: List[Tuple[str, str]] = []

    def add(self, path: str, msg: str) -> None:
        self.problems.append((path, msg))

    def number(self, obj: dict, key: str, path: str, required: bool = True) -> Optional[float]:
        if key not in obj:
            if required:
                self.add(path, "missing")
            return None
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.add(path, f"expected a number, got {type(v).__name__}")
            return None
        if not math.isfinite(v):
            self.add(path, "must be finite")
            return None
        return float(v)

    def point(self, obj: dict, key: str, path: str) -> Optional[Tuple[float, float]]:
        if key not in obj:
            self.add(path, "missing")
            return None
        v = obj[key]
        if not isinstance(v, list) or len(v) != 2:
            self.add(path, "expected [x, y]")
            return None
        out = []
        for i, c in enumerate(v):
            if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
                self.add(f"{path}[{i}]", "expected a finite number")
                return None
            out.append(float(c))
        return (out[0], out[1])

    def unknown(self, obj: dict, allowed, path: str) -> None:
        for k in obj:
            if k not in allowed:
                self.add(f"{path}.{k}" if path else k, "unknown field")


def _parse_sim(raw, col: _Collector) -> Optional[SimConfig]:
    if not isinstance(raw, dict):
        col.add("sim", "expected an object")
        return None
    col.unknown(raw, _SIM_KEYS, "sim")
    kwargs = {}
    for key in ("dt", "capture_tol_dist", "capture_tol_angle", "max_time"):
        v = col.number(raw, key, f"sim.{key}", required=False)
        if v is not None:
            if v <= 0:
                col.add(f"sim.{key}", "must be positive")
            else:
                kwargs[key] = v
    if "resolve_period" in raw:
        v = raw["resolve_period"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            col.add("sim.resolve_period", "expected a non-negative integer")
        else:
            kwargs["resolve_period"] = v
    try:
        return SimConfig(**kwargs)
    except ValueError as exc:
        col.add("sim", str(exc))
        return None


def _parse_sweep(raw, col: _Collector) -> Optional[SweepSpec]:
    if not isinstance(raw, dict):
        col.add("sweep", "expected an object")
        return None
    col.unknown(raw, {"axes"}, "sweep")
    axes_raw = raw.get("axes")
    if not isinstance(axes_raw, list) or not axes_raw:
        col.add("sweep.axes", "expected a non-empty list")
        return None
    axes, seen, ok = [], set(), True
    for i, a in enumerate(axes_raw):
        path = f"sweep.axes[{i}]"
        if not isinstance(a, dict):
            col.add(path, "expected an object")
            ok = False
            continue
        col.unknown(a, _AXIS_KEYS, path)
        name = a.get("name")
        if name not in SWEEP_AXES:
            col.add(f"{path}.name", f"must be one of {', '.join(SWEEP_AXES)}")
            ok = False
        elif name in seen:
            col.add(f"{path}.name", "duplicate axis")
            ok = False
        seen.add(name)
        lo = col.number(a, "min", f"{path}.min")
        hi = col.number(a, "max", f"{path}.max")
        num = a.get("num")
        if isinstance(num, bool) or not isinstance(num, int) or num < 1:
            col.add(f"{path}.num", "expected a positive integer")
            ok = False
        if lo is None or hi is None:
            ok = False
        elif lo > hi:
            col.add(path, "min must not exceed max")
            ok = False
        if ok:
            axes.append(SweepAxis(name, lo, hi, num))
    if not ok:
        return None
    spec = SweepSpec(tuple(axes))
    if spec.cells > MAX_SWEEP_CELLS:
        col.add("sweep.axes", f"{spec.cells} cells exceeds the limit of {MAX_SWEEP_CELLS}")
        return None
    return spec


def parse_scenario(text: str) -> ScenarioFile:
    """Parse and validate scenario JSON; every problem is reported with its field path."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([("<root>", f"malformed JSON: {exc}")]) from None
    if not isinstance(raw, dict):
        raise ScenarioError([("<root>", "expected a JSON object")])
    col = _Collector()
    col.unknown(raw, _TOP_KEYS, "")
    nu = col.number(raw, "nu", "nu")
    mu = col.number(raw, "mu", "mu")
    omega = col.number(raw, "omega", "omega")
    attacker = col.point(raw, "attacker", "attacker")
    defender = col.point(raw, "defender", "defender")
    theta_T = col.number(raw, "turret_angle", "turret_angle")

    params = None
    if None not in (nu, mu, omega):
        for name, v in (("nu", nu), ("mu", mu), ("omega", omega)):
            if v <= 0:
                col.add(name, "must be positive")
        if nu > 0 and mu > 0 and not nu < mu:
            col.add("nu", "the Attacker must be slower than the Defender (nu < mu)")
        if nu > 0 and omega > 0 and not nu < omega:
            col.add("nu", "the Attacker must be slower than the Turret (nu < omega)")
        if not col.problems:
            params = GameParams(nu, mu, omega)
    if attacker is not None and math.hypot(*attacker) <= 1.0:
        col.add("attacker", "must lie outside the unit target (r > 1)")

    sim = _parse_sim(raw["sim"], col) if "sim" in raw else None
    sweep = _parse_sweep(raw["sweep"], col) if "sweep" in raw else None
    if col.problems:
        raise ScenarioError(col.problems)
    state = GameState(defender=defender, attacker=attacker, theta_T=theta_T)
    return ScenarioFile(params, state, sim, sweep)


def load_scenario(path) -> ScenarioFile:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())
