import os

import mpmath
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("capde", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("capde")

DEMOS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "demos")


@pytest.fixture
def mp50():
    """mpmath context at 50 significant digits."""
    with mpmath.workdps(50):
        yield mpmath.mp


@pytest.fixture
def demos_dir():
    return DEMOS



ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
