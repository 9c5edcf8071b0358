"""JSON reports of solver results."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional

from .solver import CaptureSolution, GameStatus

SCHEMA_VERSION = 1
SIG_DIGITS = 12


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    """Round to ``digits`` significant digits (exactly representable in the JSON output)."""
    if x == 0 or not math.isfinite(x):
        return float(x)
    return float(f"{x:.{digits}g}")


def _pt(p) -> List[float]:
    return [round_sig(p[0]), round_sig(p[1])]


@dataclass(frozen=True)
class DirectionReport:
    direction: str
    status: str  # "TeamWins" | "AttackerWins"
    value: Optional[float] = None
    case: Optional[str] = None
    capture_point: Optional[List[float]] = None
    heading_attacker: Optional[float] = None
    heading_defender: Optional[float] = None
    turret_rate: Optional[float] = None
    t_f: Optional[float] = None

    @classmethod
    def from_solution(cls, direction: str, sol: Optional[CaptureSolution]) -> "DirectionReport":
        if sol is None:
            return cls(direction, "AttackerWins", case="AttackerWins")
        return cls(
            direction=direction,
            status="TeamWins",
            value=round_sig(sol.value),
            case=sol.case.value,
            capture_point=_pt(sol.capture_point),
            heading_attacker=round_sig(sol.heading_A),
            heading_defender=round_sig(sol.heading_D),
            turret_rate=round_sig(sol.u_T),
            t_f=round_sig(sol.t_f),
        )


@dataclass(frozen=True)
class SolutionReport:
    """Serializable result of solving one scenario.

    Numbers are rounded to 12 significant digits on construction, so the
    JSON form round-trips exactly.
    """

    status: str
    value: Optional[float] = None
    case: Optional[str] = None
    direction: Optional[str] = None
    dispersal: Optional[bool] = None
    capture_point: Optional[List[float]] = None
    headings: Optional[Dict[str, float]] = None
    t_f: Optional[float] = None
    ccw: Optional[DirectionReport] = None
    cw: Optional[DirectionReport] = None
    reason: str = ""
    schema_version: int = SCHEMA_VERSION

    @classmethod
    def from_status(cls, status: GameStatus) -> "SolutionReport":
        full = status.solution
        if full is None:
            case = "AttackerWins" if status.kind == "AttackerWins" else None
            return cls(status=status.kind, case=case, reason=status.reason)
        best = full.best
        return cls(
            status=status.kind,
            value=round_sig(full.value),
            case=best.case.value,
            direction=full.chosen.name,
            dispersal=full.dispersal,
            capture_point=_pt(best.capture_point),
            headings={
                "attacker": round_sig(best.heading_A),
                "defender": round_sig(best.heading_D),
                "turret_rate": round_sig(best.u_T),
            },
            t_f=round_sig(best.t_f),
            ccw=DirectionReport.from_solution("CCW", full.ccw),
            cw=DirectionReport.from_solution("CW", full.cw),
            reason=status.reason,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SolutionReport":
        d = dict(d)
        for key in ("ccw", "cw"):
            if d.get(key) is not None:
                d[key] = DirectionReport(**d[key])
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SolutionReport":
        return cls.from_dict(json.loads(text))
