from __future__ import annotations

import json
from pathlib import Path

import pytest

from turretguard.geometry import GameParams

FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def params() -> GameParams:
    return GameParams(nu=0.7, mu=1.0, omega=1.0)


@pytest.fixture
def frozen() -> dict:
    return FROZEN


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
