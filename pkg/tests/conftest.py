from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from affchar.weights import Level

settings.register_profile("affchar", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("affchar")

LEVELS = (Level(2, 3), Level(3, 2))


@pytest.fixture(params=LEVELS, ids=lambda l: f"{l.p}_{l.pp}")
def level(request):
    return request.param


def F(x) -> Fraction:
    return Fraction(x)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
