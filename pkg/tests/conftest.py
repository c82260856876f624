import math

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIG1_X0 = (1.0, math.sqrt(0.5), math.sqrt(0.1))


@pytest.fixture
def unit_params():
    from rieszwave import PhysicalParams
    return PhysicalParams(1.0, 1.0, 1.0)


# PASS/FAIL lines from test_acceptance.py, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
