import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from impspps import Grid, affine_impedance, exponential_impedance, unit_impedance

settings.register_profile(
    "default", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def unit_grid():
    """2001 nodes on [0, 1] anchored at 0."""
    return Grid.uniform_grid(0.0, 1.0, 2001)


@pytest.fixture(scope="session")
def sym_grid():
    """2001 nodes on [-1, 1] anchored at -1."""
    return Grid.uniform_grid(-1.0, 1.0, 2001)


CATALOG = {
    "unit": unit_impedance(),
    "affine": affine_impedance(),
    "exp:1": exponential_impedance(1.0),
}


@pytest.fixture(params=sorted(CATALOG), scope="session")
def catalog(request):
    return CATALOG[request.param]


def sup(x):
    return float(np.max(np.abs(x)))


PI = math.pi


def pytest_terminal_summary(terminalreporter):
    import sys

    for name, mod in list(sys.modules.items()):
        if name.endswith("test_acceptance") and getattr(mod, "RESULTS", None):
            terminalreporter.section("acceptance criteria")
            for line in sorted(mod.RESULTS):
                terminalreporter.write_line(line)
