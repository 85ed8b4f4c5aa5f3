import math

import numpy as np
import pytest
from hypothesis import settings

from granflow.constitutive import MaterialParams, PouliquenParams

settings.register_profile("granflow", deadline=None, max_examples=200)
settings.load_profile("granflow")


@pytest.fixture
def beads():
    return MaterialParams(d=1e-3, rho_star=2500.0, phi_s=0.6, phi_int=math.radians(35), delta0=math.radians(30))


@pytest.fixture
def pouliquen():
    return PouliquenParams(theta1=math.radians(21), theta2=math.radians(31), beta=0.136, ell=1e-3)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for r in results.values():
        terminalreporter.write_line(r.line())
    n = sum(r.passed for r in results.values())
    terminalreporter.write_line(f"{n}/{len(results)} criteria passed")
