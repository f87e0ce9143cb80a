import math

import numpy as np
import pytest

from fdesed.dataio import SedimentProfileDataset
from fdesed.profile import FdeModelParameters, FlowGeometry, concentration_profile
from fdesed.series import solve_multipliers


def synthetic_dataset(c_m=0.6, a=0.7, n=50, h=1.0, y_r=0.0, c_r=1.0, name="synthetic"):
    geometry = FlowGeometry(h=h, y_r=y_r, c_r=c_r)
    params = FdeModelParameters(solve_multipliers(c_m), a, c_m, geometry)
    y = np.linspace(y_r, h, n)
    c = np.asarray(concentration_profile(y, params)) * c_r
    c[-1] = 0.0
    return SedimentProfileDataset(name, y, c, geometry, surface_sample=True), params


@pytest.fixture
def synthetic():
    return synthetic_dataset()


E_HALF = math.exp(-0.5)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
