"""Both kernel backends implement the same arithmetic."""

import os
import subprocess
import sys

import numpy as np
import pytest

from granflow.solver import kernels_numpy as knp

kjit = pytest.importorskip("granflow.solver.kernels_numba")


def _random_state(rng, n, dry_frac=0.3):
    h = rng.uniform(0.0, 1.0, n)
    h[rng.random(n) < dry_frac] = 0.0
    hu = h * rng.normal(0.0, 1.0, n)
    hu[rng.random(n) < 0.2] = 0.0
    b = np.cumsum(rng.normal(0.0, 0.02, n))
    return h, hu, b


@pytest.mark.parametrize("bc", [0, 1, 2])
@pytest.mark.parametrize("seed", range(5))
def test_convective_update(bc, seed):
    rng = np.random.default_rng(seed)
    h, hu, b = _random_state(rng, 64)
    args = (h, hu, b, 0.01, 1e-3, bc, 1e-8, 9.0, 2.0, 1.1, 1.6, 2.3, 0.5)
    for x, y in zip(knp.convective_update(*args), kjit.convective_update(*args)):
        np.testing.assert_allclose(x, y, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_friction_and_projection(seed):
    rng = np.random.default_rng(seed)
    h, hu, _ = _random_state(rng, 64)
    u = knp.velocities(h, hu, 1e-8)
    np.testing.assert_array_equal(u, kjit.velocities(h, hu, 1e-8))
    args = (h, u, 9.81, 0.9, 0.38, 0.6, 0.136, 1e-3, 1e-8)
    mu = knp.basal_mu_mui(*args)
    np.testing.assert_allclose(mu, kjit.basal_mu_mui(*args), rtol=1e-14)
    held = rng.random(64) < 0.1
    np.testing.assert_allclose(knp.coulomb_project(h, hu, mu, held, 1e-3, 9.0, 1e-8),
                               kjit.coulomb_project(h, hu, mu, held, 1e-3, 9.0, 1e-8), rtol=1e-14)
    assert knp.max_wave_speed(h, hu, 9.0, 1.2, 2.0, 1e-8) == pytest.approx(
        kjit.max_wave_speed(h, hu, 9.0, 1.2, 2.0, 1e-8), rel=1e-14)


@pytest.mark.parametrize("solver", ["thomas", "cyclic_thomas"])
def test_tridiagonal(solver):
    rng = np.random.default_rng(7)
    n = 40
    a, c = rng.uniform(-1, 0, n), rng.uniform(-1, 0, n)
    b = 3.0 + rng.random(n)
    d = rng.normal(size=n)
    A = np.diag(b) + np.diag(a[1:], -1) + np.diag(c[:-1], 1)
    if solver == "cyclic_thomas":
        A[0, -1], A[-1, 0] = a[0], c[-1]
    x = np.linalg.solve(A, d)
    np.testing.assert_allclose(getattr(knp, solver)(a, b, c, d), x, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(getattr(kjit, solver)(a, b, c, d), x, rtol=1e-12, atol=1e-14)


def test_numpy_backend_selected_by_env():
    code = ("import granflow, granflow.solver.core as c; "
            "print(granflow.BACKEND, c.K.__name__.rsplit('.', 1)[-1])")
    env = dict(os.environ, GRANFLOW_BACKEND="numpy")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "kernels_numpy"]


def test_backends_agree_on_a_run():
    code = """
import math, numpy as np
from granflow.constitutive import PouliquenParams
from granflow.models import MuIRheology
from granflow.solver import Grid1D, SimState, SolverConfig, run
p = PouliquenParams(math.radians(21), math.radians(31), 0.136, 1e-3)
cfg = MuIRheology(math.radians(26), p)
g = Grid1D.uniform(100, 0.0, 1.0)
s = SimState(0.0, 0.05 * np.exp(-((g.x - 0.3) / 0.05) ** 2), np.zeros(100))
for s, _ in run(s, g, cfg, SolverConfig(t_end=0.2, bc="open")):
    pass
print(repr(float(s.h.sum())), repr(float(s.hu.sum())))
"""
    res = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, GRANFLOW_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        res[backend] = [float(v) for v in out.stdout.split()]
    np.testing.assert_allclose(res["numba"], res["numpy"], rtol=1e-10)
