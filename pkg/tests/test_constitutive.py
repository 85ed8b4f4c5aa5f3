import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from granflow import constitutive as cl
from granflow.constitutive import MaterialParams, PouliquenParams, SymTensor2
from granflow.errors import (
    DegenerateStrainRate,
    InvalidInput,
    InvalidMaterial,
    NonPositivePressure,
    SlopeOutOfRange,
)

deg = math.radians
finite = st.floats(-1e3, 1e3, allow_nan=False)
positive = st.floats(1e-4, 1e2)


class TestParams:
    def test_material_rejects_delta_above_phi(self):
        with pytest.raises(InvalidMaterial):
            MaterialParams(1e-3, 2500.0, 0.6, deg(20), deg(30))

    def test_material_rejects_bad_fraction(self):
        with pytest.raises(InvalidMaterial):
            MaterialParams(1e-3, 2500.0, 1.5, deg(30), deg(20))

    def test_bulk_density(self, beads):
        assert beads.rho == pytest.approx(1500.0)

    def test_pouliquen_equal_angles_allowed(self):
        p = PouliquenParams(deg(25), deg(25), 0.136, 1e-3)
        assert p.mu1 == p.mu2

    def test_pouliquen_rejects_reversed_angles(self):
        with pytest.raises(InvalidInput):
            PouliquenParams(deg(31), deg(21), 0.136, 1e-3)


class TestKinematics:
    def test_zero_gradient(self):
        D = cl.strain_rate(np.zeros((2, 2)))
        assert (D.dxx, D.dxz, D.dzz) == (0.0, 0.0, 0.0)

    def test_pure_shear(self):
        D = cl.strain_rate([[0.0, 4.0], [0.0, 0.0]])
        assert (D.dxx, D.dxz, D.dzz) == (0.0, 2.0, 0.0)
        assert cl.second_invariant(D) == pytest.approx(2.0)

    def test_symmetric_fixed_point(self):
        D = cl.strain_rate([[3.0, 0.0], [0.0, -3.0]])
        assert (D.dxx, D.dxz, D.dzz) == (3.0, 0.0, -3.0)
        assert cl.second_invariant(D) == pytest.approx(3.0)

    def test_nonfinite_gradient(self):
        with pytest.raises(InvalidInput):
            cl.strain_rate([[np.nan, 0], [0, 0]])

    @given(finite, finite, finite, finite)
    def test_strain_rate_symmetric_part(self, a, b, c, d):
        grad = np.array([[a, b], [c, d]])
        D = cl.strain_rate(grad)
        np.testing.assert_allclose(D.as_matrix(), 0.5 * (grad + grad.T), rtol=0, atol=1e-12)

    @given(finite, finite, finite, st.one_of(st.just(0.0), st.floats(1e-6, 1e3)))
    def test_invariant_homogeneous(self, a, b, c, s):
        D = SymTensor2(a, b, c)
        assert cl.second_invariant(D.scaled(s)) == pytest.approx(s * cl.second_invariant(D), rel=1e-12, abs=1e-300)


class TestInertialNumber:
    def test_example(self, beads):
        mat = MaterialParams(1e-3, 2500.0, 0.6, beads.phi_int, beads.delta0)
        assert cl.inertial_number(10.0, 100.0, mat) == pytest.approx(0.1, rel=1e-12)

    def test_zero_rate(self, beads):
        assert cl.inertial_number(0.0, 100.0, beads) == 0.0

    def test_nonpositive_pressure(self, beads):
        with pytest.raises(NonPositivePressure):
            cl.inertial_number(1.0, 0.0, beads)

    @given(st.floats(0, 1e3), st.floats(1e-2, 1e5), st.floats(1e-3, 1e3))
    def test_scaling(self, dn, p, c):
        mat = MaterialParams(1e-3, 2500.0, 0.6, deg(35), deg(30))
        base = cl.inertial_number(dn, p, mat)
        assert cl.inertial_number(c * dn, p, mat) == pytest.approx(c * base, rel=1e-12, abs=1e-300)
        assert cl.inertial_number(dn, c * c * p, mat) == pytest.approx(base / c, rel=1e-12, abs=1e-300)


class TestMuOfI:
    def test_limits_and_midpoint(self):
        assert cl.mu_of_I(0.0, 0.38, 0.64, 0.3) == 0.38
        assert cl.mu_of_I(0.3, 0.38, 0.64, 0.3) == pytest.approx(0.51)

    def test_example(self):
        assert cl.mu_of_I(0.9, 0.38, 0.64, 0.3) == pytest.approx(0.575, rel=1e-12)

    def test_rejects_negative(self):
        with pytest.raises(InvalidInput):
            cl.mu_of_I(-0.1, 0.38, 0.64, 0.3)
        with pytest.raises(InvalidInput):
            cl.mu_of_I(0.1, 0.38, 0.64, 0.0)

    @given(st.floats(0, 1e6), st.floats(0, 1e6), st.floats(1e-3, 10))
    def test_monotone_and_bounded(self, i1, i2, I0):
        lo, hi = sorted((i1, i2))
        m_lo, m_hi = cl.mu_of_I(lo, 0.38, 0.64, I0), cl.mu_of_I(hi, 0.38, 0.64, I0)
        assert 0.38 <= m_lo <= m_hi <= 0.64


class TestBasalFriction:
    def test_limits(self, pouliquen):
        assert cl.mu_basal(0.0, 0.01, pouliquen) == pouliquen.mu1
        assert cl.mu_basal(1e15, 0.01, pouliquen) == pytest.approx(pouliquen.mu2)

    def test_midpoint(self, pouliquen):
        h = 0.01
        fr = pouliquen.beta * h / pouliquen.ell
        assert cl.mu_basal(fr, h, pouliquen) == pytest.approx(0.5 * (pouliquen.mu1 + pouliquen.mu2))

    def test_example(self):
        # mu1 = 0.38, mu2 = 0.64, beta h / (ell Fr) = 3
        th1, th2 = math.atan(0.38), math.atan(0.64)
        p = PouliquenParams(th1, th2, beta=0.3, ell=1e-3)
        h = 0.01
        fr = p.beta * h / (3 * p.ell)
        assert cl.mu_basal(fr, h, p) == pytest.approx(0.445, rel=1e-12)

    def test_rejects_dry(self, pouliquen):
        with pytest.raises(InvalidInput):
            cl.mu_basal(1.0, 0.0, pouliquen)

    @given(st.floats(0, 100), st.floats(0, 100), st.floats(1e-4, 1.0))
    def test_increasing_in_froude(self, a, b, h):
        p = PouliquenParams(deg(21), deg(31), 0.136, 1e-3)
        lo, hi = sorted((a, b))
        assume(hi > lo)
        assert cl.mu_basal(lo, h, p) <= cl.mu_basal(hi, h, p)


class TestFroudeBagnold:
    def test_froude(self):
        assert cl.froude(0.0, 0.1, 0.0) == 0.0
        assert cl.froude(math.sqrt(9.81 * 0.1), 0.1, 0.0) == pytest.approx(1.0)
        assert cl.froude(1.0, 0.1, 0.0) == pytest.approx(1.0 / math.sqrt(0.981), rel=1e-12)
        assert cl.froude(1.0, 0.1, 0.0) == pytest.approx(1.0096, abs=1e-4)

    def test_froude_uses_speed(self):
        assert cl.froude(-2.0, 0.5, 0.3) == cl.froude(2.0, 0.5, 0.3)

    def test_bagnold(self, beads):
        assert cl.bagnold_mean_velocity(0.0, 0.01, 0.0, beads) == 0.0
        u = cl.bagnold_mean_velocity(0.1, 0.01, 0.0, beads)
        assert u == pytest.approx(40.0 * math.sqrt(0.0981) * 1e-3, rel=1e-12)
        assert u == pytest.approx(0.01253, abs=1e-5)

    def test_i_zero(self, beads, pouliquen):
        assert cl.i_zero(0.01, beads, pouliquen) == pytest.approx(3.4, rel=1e-12)
        assert cl.i_zero(0.04, beads, pouliquen) == pytest.approx(1.7, rel=1e-12)
        big = MaterialParams(2e-3, 2500.0, 0.6, beads.phi_int, beads.delta0)
        assert cl.i_zero(0.01, big, pouliquen) == pytest.approx(6.8, rel=1e-12)

    @given(st.floats(1e-3, 2.0), st.floats(1e-3, 1.0), st.floats(0, 1.2))
    def test_bagnold_substitution_identity(self, I, h, theta):
        mat = MaterialParams(1e-3, 2500.0, 0.6, deg(35), deg(30))
        p = PouliquenParams(deg(21), deg(31), 0.136, 1e-3)
        fr = cl.froude(cl.bagnold_mean_velocity(I, h, theta, mat), h, theta)
        rhs = cl.mu_of_I(I, p.mu1, p.mu2, cl.i_zero(h, mat, p))
        assert cl.mu_basal(fr, h, p) == pytest.approx(rhs, rel=1e-12)


class TestEarthPressure:
    def test_example_printed(self, beads):
        assert cl.earth_pressure_K(1, beads) == pytest.approx(1.6667, abs=1e-4)
        assert cl.earth_pressure_K(-1, beads) == pytest.approx(2.2945, abs=1e-4)

    @pytest.mark.parametrize("conv", ["printed", "sqrt"])
    def test_equal_angles(self, conv):
        phi = deg(30)
        m = MaterialParams(1e-3, 2500.0, 0.6, phi, phi)
        expected = 2 / math.cos(phi) ** 2 - 1
        assert cl.earth_pressure_K(1, m, conv) == pytest.approx(expected, rel=1e-12)
        assert cl.earth_pressure_K(-1, m, conv) == pytest.approx(expected, rel=1e-12)

    def test_isotropic(self):
        m = MaterialParams(1e-3, 2500.0, 0.6, 0.0, 0.0)
        assert cl.earth_pressure_K(1, m) == 1.0

    def test_bad_sign(self, beads):
        with pytest.raises(InvalidInput):
            cl.earth_pressure_K(0, beads)

    @given(st.floats(0, 1.4), st.floats(0, 1), st.sampled_from(["printed", "sqrt"]))
    def test_active_below_passive(self, phi, frac, conv):
        m = MaterialParams(1e-3, 2500.0, 0.6, phi, phi * frac)
        assert cl.earth_pressure_K(1, m, conv) <= cl.earth_pressure_K(-1, m, conv)

    @given(st.floats(0.05, 1.4), st.floats(0, 0.95), st.sampled_from(["printed", "sqrt"]))
    def test_strict_unless_equal_angles(self, phi, frac, conv):
        m = MaterialParams(1e-3, 2500.0, 0.6, phi, phi * frac)
        assert cl.earth_pressure_K(1, m, conv) < cl.earth_pressure_K(-1, m, conv)


class TestStress:
    def test_pure_shear(self, beads):
        # I0 large enough that mu stays at mu1 = mu2 = 0.5
        D = SymTensor2(0.0, 3.0, 0.0)
        tau = cl.mu_I_stress(100.0, D, 1.0, 0.5, 0.5, beads)
        assert tau.dxz == pytest.approx(50.0)
        assert tau.dxx == 0.0 and tau.dzz == 0.0

    def test_degenerate(self, beads):
        with pytest.raises(DegenerateStrainRate):
            cl.mu_I_stress(100.0, SymTensor2(0.0, 0.0, 0.0), 1.0, 0.4, 0.6, beads)

    @given(finite, finite, st.floats(1.0, 1e4), st.floats(0.05, 2.0))
    def test_norm_equals_mu_p(self, a, c, p, I0):
        assume(abs(a) + abs(c) > 1e-6)
        mat = MaterialParams(1e-3, 2500.0, 0.6, deg(35), deg(30))
        D = SymTensor2(a, c, -a)
        tau = cl.mu_I_stress(p, D, I0, 0.38, 0.64, mat)
        mu = cl.mu_of_I(cl.inertial_number(cl.second_invariant(D), p, mat), 0.38, 0.64, I0)
        assert cl.second_invariant(tau) == pytest.approx(mu * p, rel=1e-12)
        assert abs(tau.trace) <= 1e-12 * mu * p


class TestViscosity:
    def test_example(self, pouliquen):
        t = math.tan(deg(26))
        expected = (2 / 9 * 1e-3 * math.sqrt(9.81) / 0.136 * math.sin(deg(26)) / math.sqrt(math.cos(deg(26)))
                    * (math.tan(deg(31)) - t) / (t - math.tan(deg(21))))
        nu = cl.nu_viscosity(deg(26), pouliquen)
        assert nu == pytest.approx(expected, rel=1e-12)
        assert nu == pytest.approx(2.58e-3, rel=5e-3)

    def test_zero_at_theta2(self, pouliquen):
        assert cl.nu_viscosity(pouliquen.theta2, pouliquen) == pytest.approx(0.0, abs=1e-18)

    @pytest.mark.parametrize("theta", [deg(21), deg(10), deg(32)])
    def test_out_of_range(self, pouliquen, theta):
        with pytest.raises(SlopeOutOfRange):
            cl.nu_viscosity(theta, pouliquen)
