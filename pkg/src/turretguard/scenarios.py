"""Reference states and random state generators.

The three documented states were picked so that each lands in a
different termination case with ``nu=0.7, mu=omega=1``. They are
representative of the case.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from .errors import TurretGuardError
from .geometry import GameParams, GameState, Point
from .solver import FullSolution, TerminationCase, solve

REFERENCE_PARAMS = GameParams(nu=0.7, mu=1.0, omega=1.0)


def polar(r: float, theta: float) -> Point:
    return (r * math.cos(theta), r * math.sin(theta))


SOLO_DEFENDER_STATE = GameState(defender=(-0.5, 1.2), attacker=polar(3.0, 2.0), theta_T=0.0)
SOLO_TURRET_STATE = GameState(defender=(-3.0, -3.0), attacker=polar(2.0, 0.3), theta_T=0.0)
SIMULTANEOUS_STATE = GameState(defender=(0.5, 2.0), attacker=polar(3.0, 1.0), theta_T=0.0)
# Attacker and Defender on one ray, Turret looking the other way
COLLINEAR_STATE = GameState(defender=(3.5, 0.0), attacker=(3.0, 0.0), theta_T=math.pi)

DOCUMENTED = {
    TerminationCase.SOLO_DEFENDER: SOLO_DEFENDER_STATE,
    TerminationCase.SOLO_TURRET: SOLO_TURRET_STATE,
    TerminationCase.SIMULTANEOUS: SIMULTANEOUS_STATE,
}


def dispersal_state(r_a: float, x_d: float, theta_T: float = 0.0) -> GameState:
    """Attacker straight behind the Turret and Defender on the look axis.

    Both turn directions face mirror-image games, so the two values tie.
    """
    c, s = math.cos(theta_T), math.sin(theta_T)
    return GameState(defender=(x_d * c, x_d * s), attacker=(-r_a * c, -r_a * s), theta_T=theta_T)


def random_state(rng: np.random.Generator, r_range=(1.5, 6.0), sep_range=(0.3, 4.0),
                 theta_T_range=(-math.pi, math.pi)) -> GameState:
    """Attacker uniform in angle at a random range; Defender at a random offset from it."""
    a = polar(rng.uniform(*r_range), rng.uniform(-math.pi, math.pi))
    off = polar(rng.uniform(*sep_range), rng.uniform(-math.pi, math.pi))
    return GameState(defender=(a[0] + off[0], a[1] + off[1]), attacker=a,
                     theta_T=rng.uniform(*theta_T_range))


def random_team_win_state(rng: np.random.Generator, params: GameParams = REFERENCE_PARAMS,
                          case: Optional[TerminationCase] = None,
                          max_tries: int = 200_000) -> Tuple[GameState, FullSolution]:
    """Rejection-sample a state the team wins, optionally with a given preferred-direction case."""
    for _ in range(max_tries):
        state = random_state(rng)
        try:
            full = solve(state, params)
        except TurretGuardError:
            continue
        if case is None or full.best.case is case:
            return state, full
    raise RuntimeError(f"no team-win state with case {case} in {max_tries} draws")
