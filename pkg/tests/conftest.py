import math

import pytest

from wet_radsim.model import RadiusAssignment, fig1_scenario


@pytest.fixture
def fig1():
    return fig1_scenario()


@pytest.fixture
def optimal_radii():
    return RadiusAssignment((1.0, math.sqrt(2.0)))


@pytest.fixture
def equal_radii():
    return RadiusAssignment((1.0, 1.0))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        ok, text = RESULTS[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
