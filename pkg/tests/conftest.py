import numpy as np
import pytest

from thirring_walk import WalkParams

ACCEPTANCE_LINES = []


def record(number, name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {name}"
    if detail:
        line += f"  ({detail})"
    print(line)
    ACCEPTANCE_LINES.append((number, line))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture
def params06():
    return WalkParams(0.6)


@pytest.fixture
def params07():
    return WalkParams(0.7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
