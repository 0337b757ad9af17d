import math

import pytest

from beamdoppler.core import BeamGeometry, MotionState

THETA_V_GRID_DEG = list(range(0, 181, 5))
THETA_RX_GRID_DEG = [1, 5, 10, 30, 90, 360]


@pytest.fixture
def hst_motion():
    """500 km/h at 28 GHz."""
    return MotionState.from_kmh(500.0, 28e9)


def geom(theta_v_deg, theta_rx_deg):
    return BeamGeometry.from_degrees(theta_v_deg, theta_rx_deg)


def grid():
    for tv in THETA_V_GRID_DEG:
        for tr in THETA_RX_GRID_DEG:
            yield tv, tr


def rad(deg):
    return math.radians(deg)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record and print a one-line verdict, then assert it."""

    def check(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
