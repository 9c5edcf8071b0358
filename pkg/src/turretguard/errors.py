"""Exception hierarchy shared by the solver, simulator and CLI."""


class TurretGuardError(Exception):
    """Base class for all package errors."""


class DomainError(TurretGuardError, ValueError):
    """A function was evaluated outside the set where it is defined."""


class CoincidentAgentsError(TurretGuardError, ValueError):
    """Attacker and Defender occupy the same point (capture already happened)."""


class OriginInsideError(TurretGuardError):
    """The Turret lies inside the Attacker's dominance region w.r.t. the Defender."""


class PremiseError(TurretGuardError):
    """The turret dominance region is not well defined for this Attacker state."""


class BracketError(TurretGuardError, ValueError):
    """Root bracket endpoints do not straddle a sign change."""


class AttackerWinsError(TurretGuardError):
    """The Attacker can reach the target before either captor stops it."""


class NoIntersectionError(TurretGuardError):
    """The two dominance-region boundaries do not intersect."""


class ScenarioError(TurretGuardError, ValueError):
    """A scenario file failed to parse or validate.

    ``problems`` holds ``(field_path, message)`` pairs.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in self.problems))
