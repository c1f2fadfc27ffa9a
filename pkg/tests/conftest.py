import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ymforms", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ymforms")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def points():
    from ymforms.yang_mills import sample_points

    return sample_points(40, seed=3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(LINES):
            terminalreporter.write_line(LINES[n])
