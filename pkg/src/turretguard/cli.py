"""Command line interface: ``turretguard solve|simulate|sweep|render``.

Exit codes: 0 success (team wins), 1 usage or input error, 2 the Attacker
wins, 3 unresolved, 4 simulation timeout.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

from .errors import ScenarioError, TurretGuardError
from .geometry import GameParams, GameState
from .plotting import render_solution, render_trajectory, write_svg
from .report import SolutionReport, round_sig
from .scenario import ScenarioFile, load_scenario
from .simulator import (
    CSV_HEADER,
    Outcome,
    SimConfig,
    read_csv,
    run_feedback,
    run_open_loop,
    simulate,
    write_csv,
)
from .solver import TurnDirection, attacker_breach_point, classify
from .sweep import sweep_scenario

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ATTACKER_WINS = 2
EXIT_UNRESOLVED = 3
EXIT_TIMEOUT = 4

_STATUS_EXIT = {"TeamWins": EXIT_OK, "AttackerWins": EXIT_ATTACKER_WINS, "Unresolved": EXIT_UNRESOLVED}


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the input-error code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cmd_solve(scenario: ScenarioFile) -> int:
    status = classify(scenario.state, scenario.params)
    sys.stdout.write(SolutionReport.from_status(status).to_json() + "\n")
    if status.kind != "TeamWins":
        print(f"{status.kind}: {status.reason}", file=sys.stderr)
    return _STATUS_EXIT[status.kind]


def _rush(state: GameState, params: GameParams):
    """Controls when the Attacker wins: it heads for a reachable target point, the team chases."""
    q = None
    for direction in TurnDirection:
        try:
            q = attacker_breach_point(state, params, direction)
        except TurretGuardError:
            q = None
        if q is not None:
            break
    ax, ay = state.attacker
    u_a = math.atan2(-ay, -ax) if q is None else math.atan2(q[1] - ay, q[0] - ax)
    dx, dy = state.defender
    u_d = math.atan2(ay - dy, ax - dx)
    u_t = 1.0 if state.theta_A >= 0 else -1.0
    return (u_d, u_a, u_t)


def cmd_simulate(scenario: ScenarioFile, feedback: bool, guess: Optional[TurnDirection],
                 csv_path: Optional[str]) -> int:
    config = scenario.sim or SimConfig()
    state, params = scenario.state, scenario.params
    status = classify(state, params)
    if status.kind == "Unresolved":
        print(f"Unresolved: {status.reason}", file=sys.stderr)
        return EXIT_UNRESOLVED
    full = status.solution
    if feedback:
        if config.resolve_period <= 0:
            print("feedback simulation needs sim.resolve_period > 0", file=sys.stderr)
            return EXIT_USAGE
        g = guess or (full.chosen if full is not None else TurnDirection.CCW)
        traj = run_feedback(state, params, config, g)
        mode = "feedback"
    elif full is not None:
        traj = run_open_loop(state, params, full.best, config)
        mode = "open-loop"
    else:
        controls = _rush(state, params)
        traj = simulate(state, params, config, lambda t, s: controls, 20000)
        mode = "open-loop"
    if csv_path:
        write_csv(traj, csv_path)
    value = None if full is None else full.value
    summary = {
        "mode": mode,
        "status": status.kind,
        "outcome": traj.outcome.value,
        "terminal_distance": round_sig(traj.terminal_distance),
        "terminal_time": round_sig(traj.terminal_time),
        "value": None if value is None else round_sig(value),
        "residual": None if value is None else round_sig(abs(traj.terminal_distance - (value + 1.0))),
        "samples": int(len(traj.times)),
    }
    if feedback:
        summary["attacker_guess"] = g.name
    _emit(summary)
    if traj.outcome is Outcome.TIMEOUT:
        print("simulation timed out before any capture", file=sys.stderr)
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_sweep(scenario: ScenarioFile, out: str) -> int:
    if scenario.sweep is None:
        print("scenario has no sweep block", file=sys.stderr)
        return EXIT_USAGE
    text = sweep_scenario(scenario)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    _emit({"cells": scenario.sweep.cells, "out": out})
    return EXIT_OK


def _is_trajectory(path: str) -> bool:
    with open(path, encoding="utf-8") as fh:
        return fh.readline().strip() == ",".join(CSV_HEADER)


def cmd_render(path: str, svg: str) -> int:
    if _is_trajectory(path):
        write_svg(render_trajectory(read_csv(path)), svg)
        return EXIT_OK
    scenario = load_scenario(path)
    status = classify(scenario.state, scenario.params)
    if status.kind != "TeamWins":
        print(f"render skipped: {status.kind} ({status.reason})", file=sys.stderr)
        return _STATUS_EXIT[status.kind]
    write_svg(render_solution(scenario.state, scenario.params, status.solution), svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="turretguard", description="Turret and Defender versus Attacker game solver.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a scenario and print the JSON report")
    p.add_argument("file")

    p = sub.add_parser("simulate", help="simulate a scenario")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--open-loop", dest="feedback", action="store_false", help="hold equilibrium controls (default)")
    mode.add_argument("--feedback", dest="feedback", action="store_true", help="re-solve along the trajectory")
    p.add_argument("--guess", choices=["ccw", "cw"], help="Attacker's initial guess of the Turret direction")
    p.add_argument("--csv", metavar="PATH", help="write the trajectory as CSV")
    p.set_defaults(feedback=False)

    p = sub.add_parser("sweep", help="classify a grid of states")
    p.add_argument("file")
    p.add_argument("--out", required=True, metavar="PATH")

    p = sub.add_parser("render", help="draw a scenario or trajectory CSV as SVG")
    p.add_argument("file")
    p.add_argument("--svg", required=True, metavar="PATH")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "render":
            return cmd_render(args.file, args.svg)
        scenario = load_scenario(args.file)
        if args.command == "solve":
            return cmd_solve(scenario)
        if args.command == "simulate":
            guess = None if args.guess is None else TurnDirection[args.guess.upper()]
            return cmd_simulate(scenario, args.feedback, guess, args.csv)
        return cmd_sweep(scenario, args.out)
    except ScenarioError as exc:
        for path, msg in exc.problems:
            print(f"{path}: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
