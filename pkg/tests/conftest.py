import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

from realdivisor.bergman import abel_jacobi_real_polyline  # noqa: E402
from realdivisor.curves import family_a_eps, make_m_curve  # noqa: E402
from realdivisor.periods import compute_periods  # noqa: E402


@pytest.fixture(scope="session")
def x025():
    curve = family_a_eps(0.25)
    return curve, compute_periods(curve)


@pytest.fixture(scope="session")
def mcurve6():
    curve = make_m_curve([0, 1, 2, 3, 4, 5])
    return curve, compute_periods(curve)


@pytest.fixture(scope="session")
def x025_polyline(x025):
    curve, periods = x025
    return abel_jacobi_real_polyline(curve, periods, 1024)[0]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
