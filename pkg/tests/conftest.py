import math

import pytest
from hypothesis import HealthCheck, settings

from casimir_xi.geometry import make_circle, make_fourier_curve, make_points_1d, make_set

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# Frozen references, computed once from closed forms or high-precision mpmath.
XI_TWO_CIRCLES_K1 = -0.00446653370409939611281058366426  # R1=R2=1, d=4, kappa=1 (30 digits)
PLATE_ENERGY = -math.pi**2 / 1440.0
POINT_ENERGY = -math.pi / 24.0


@pytest.fixture(scope="session")
def plates():
    return make_points_1d([0.0, 1.0])


@pytest.fixture(scope="session")
def two_circles():
    return make_set([make_circle((0.0, 0.0), 1.0, "A"), make_circle((4.0, 0.0), 1.0, "B")])


@pytest.fixture(scope="session")
def ellipse_and_circle():
    ellipse = make_fourier_curve([0.0, 1.2], [0.0], [0.0], [0.0, 0.7], center=(0.0, 0.0), label="E")
    return make_set([ellipse, make_circle((3.5, 0.5), 0.8, "C")])


def corpus():
    """Five configurations used by the invariance suites."""
    kite = make_fourier_curve([0.0, 1.0, 0.3], [0.0], [0.0], [0.0, 0.9], center=(0.0, 0.0), label="K")
    return {
        "plates": make_points_1d([0.0, 1.0]),
        "three_points": make_points_1d([0.0, 0.5, 2.0]),
        "two_circles": make_set([make_circle((0.0, 0.0), 1.0, "A"), make_circle((4.0, 0.0), 1.0, "B")]),
        "unequal_circles": make_set([make_circle((0.0, 0.0), 1.0, "A"), make_circle((2.0, 1.5), 0.5, "B")]),
        "kite_circle": make_set([kite, make_circle((3.2, 0.4), 0.7, "C")]),
    }


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
