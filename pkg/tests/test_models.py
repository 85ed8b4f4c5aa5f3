import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from granflow.constitutive import MaterialParams, PouliquenParams, mu_basal
from granflow.errors import InvalidInput, SlopeOutOfRange
from granflow.models import (
    MuIRheology,
    SavageHutter,
    flux_mui,
    flux_sh,
    source_mui,
    source_sh,
    steady_froude,
    steady_velocity,
    wave_speeds,
    yield_threshold,
)

deg = math.radians
FLAT = MaterialParams(1e-3, 2500.0, 0.6, deg(30), deg(30))


@pytest.fixture
def sh0():
    return SavageHutter(0.0, FLAT)


class TestConfigs:
    def test_sh_active_passive(self, beads):
        cfg = SavageHutter(deg(20), beads, k_policy="active_passive")
        assert cfg.K_act == pytest.approx(1.6667, abs=1e-4)
        assert cfg.K_pas == pytest.approx(2.2945, abs=1e-4)
        assert cfg.K_max == cfg.K_pas

    def test_sh_rejects_bad_policy(self, beads):
        with pytest.raises(InvalidInput):
            SavageHutter(0.1, beads, k_policy="sometimes")

    def test_mui_formula_needs_slope_window(self, pouliquen):
        with pytest.raises(SlopeOutOfRange):
            MuIRheology(deg(35), pouliquen)
        assert MuIRheology(deg(35), pouliquen, viscosity="off").nu() == 0.0

    def test_mui_rejects_small_chi(self, pouliquen):
        with pytest.raises(InvalidInput):
            MuIRheology(deg(26), pouliquen, chi=0.9)

    def test_theta_range(self, beads):
        with pytest.raises(InvalidInput):
            SavageHutter(math.pi / 2, beads)


class TestFlux:
    def test_dry(self, sh0, pouliquen):
        assert flux_sh(0.0, 0.0, 1.0, sh0) == (0.0, 0.0)
        assert flux_mui(0.0, 0.0, MuIRheology(0.0, pouliquen, viscosity="off")) == (0.0, 0.0)

    def test_hydrostatic(self, sh0):
        assert flux_sh(1.0, 0.0, 1.0, sh0) == pytest.approx((0.0, 4.905))

    def test_moving(self, sh0):
        assert flux_sh(1.0, 2.0, 1.0, sh0) == pytest.approx((2.0, 8.905))

    def test_shape_factor(self, pouliquen):
        cfg = MuIRheology(0.0, pouliquen, chi=1.25, viscosity="off")
        assert flux_mui(1.0, 2.0, cfg) == pytest.approx((2.0, 9.905))

    def test_negative_depth(self, sh0):
        with pytest.raises(InvalidInput):
            flux_sh(-1.0, 0.0, 1.0, sh0)

    @given(st.floats(0, 10), st.floats(-10, 10), st.floats(0, 1.4))
    def test_models_coincide_at_unit_chi(self, h, hu, theta):
        mat = MaterialParams(1e-3, 2500.0, 0.6, deg(30), deg(30))
        p = PouliquenParams(deg(21), deg(31), 0.136, 1e-3)
        sh = SavageHutter(theta, mat)
        mui = MuIRheology(theta, p, viscosity="off")
        assert flux_sh(h, hu, 1.0, sh) == flux_mui(h, hu, mui)


class TestSources:
    def test_threshold(self, sh0):
        assert yield_threshold(0.0, sh0) == 0.0
        assert yield_threshold(1.0, sh0) == pytest.approx(9.81 * math.tan(deg(30)))
        assert yield_threshold(1.0, sh0) == pytest.approx(5.6638, abs=1e-4)

    def test_held_below_threshold(self, beads):
        cfg = SavageHutter(deg(15), beads)
        r = source_sh(1.0, 0.0, 0.0, cfg)
        assert r.held_static and r.s_hu == 0.0

    def test_moving_example(self):
        mat = MaterialParams(1e-3, 2500.0, 0.6, deg(35), deg(20))
        cfg = SavageHutter(deg(30), mat)
        r = source_sh(1.0, 0.5, 0.0, cfg)
        expected = 9.81 * (math.sin(deg(30)) - math.cos(deg(30)) * math.tan(deg(20)))
        assert r.s_hu == pytest.approx(expected, rel=1e-12)
        assert r.s_hu == pytest.approx(1.8128, abs=1e-4)
        assert not r.held_static

    def test_friction_sign_flips(self, beads):
        cfg = SavageHutter(deg(30), beads)
        gravity = 9.81 * math.sin(deg(30))
        fwd = source_sh(1.0, 0.5, 0.0, cfg).s_hu - gravity
        back = source_sh(1.0, -0.5, 0.0, cfg).s_hu - gravity
        assert fwd == pytest.approx(-back, rel=1e-14)
        assert fwd < 0

    def test_yielded_at_rest(self, beads):
        cfg = SavageHutter(deg(40), MaterialParams(1e-3, 2500.0, 0.6, deg(45), deg(20)))
        r = source_sh(1.0, 0.0, 0.0, cfg)
        assert not r.held_static and r.s_hu > 0

    @given(st.floats(0, 1.2), st.floats(0.01, 1.0))
    def test_hold_monotone_in_delta(self, theta, h):
        # if a cell is held at some delta0 it is held at every larger one
        held = [source_sh(h, 0.0, 0.0, SavageHutter(theta, MaterialParams(1e-3, 2500.0, 0.6, 1.5, d))).held_static
                for d in np.linspace(0.0, 1.45, 30)]
        first = held.index(True) if True in held else len(held)
        assert all(held[first:])

    def test_mui_steady_root(self, pouliquen):
        cfg = MuIRheology(deg(26), pouliquen)
        for h in (0.005, 0.01, 0.05):
            u = float(steady_velocity(h, cfg))
            assert abs(source_mui(h, h * u, 0.0, cfg).s_hu) < 1e-12
            fr = float(steady_froude(h, cfg))
            assert mu_basal(fr, h, pouliquen) == pytest.approx(math.tan(deg(26)), rel=1e-13)

    def test_mui_held_on_gentle_slope(self, pouliquen):
        cfg = MuIRheology(deg(15), pouliquen, viscosity="off")
        assert source_mui(0.1, 0.0, 0.0, cfg).held_static

    def test_steady_out_of_window(self, pouliquen):
        with pytest.raises(SlopeOutOfRange):
            steady_froude(0.01, MuIRheology(deg(35), pouliquen, viscosity="off"))


class TestWaveSpeeds:
    def test_still_water(self, sh0):
        lo, hi = wave_speeds(1.0, 0.0, sh0)
        assert hi == pytest.approx(3.1321, abs=1e-4) and lo == -hi

    def test_dry(self, sh0):
        assert wave_speeds(0.0, 0.0, sh0) == (0.0, 0.0)

    def test_k_scaling(self, sh0):
        _, hi1 = wave_speeds(1.0, 0.0, sh0, K=1.0)
        _, hi4 = wave_speeds(1.0, 0.0, sh0, K=4.0)
        assert hi4 == pytest.approx(2 * hi1)

    @given(st.floats(0.01, 5), st.floats(-5, 5), st.floats(1.0, 2.0))
    def test_eigenvalues_of_jacobian(self, h, u, chi):
        p = PouliquenParams(deg(21), deg(31), 0.136, 1e-3)
        cfg = MuIRheology(0.0, p, chi=chi, viscosity="off")
        gh = 9.81 * h
        jac = np.array([[0.0, 1.0], [gh - chi * u * u, 2 * chi * u]])
        eig = np.sort(np.linalg.eigvals(jac).real)
        np.testing.assert_allclose(wave_speeds(h, h * u, cfg), eig, rtol=1e-9, atol=1e-9)
