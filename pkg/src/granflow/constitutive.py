"""Closure laws for dense dry granular flow.

Strain-rate kinematics, the inertial number, the mu(I) and Pouliquen basal
friction laws, the Bagnold depth-averaged velocity, Savage-Hutter earth
pressure coefficients and the depth-averaged viscous coefficient.

All functions are pure and accept numpy arrays wherever the arguments are
scalars in the signature. Angles are in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import (
    DegenerateStrainRate,
    InvalidInput,
    InvalidMaterial,
    NonPositivePressure,
    SlopeOutOfRange,
)

__all__ = [
    "MaterialParams",
    "PouliquenParams",
    "SymTensor2",
    "strain_rate",
    "second_invariant",
    "inertial_number",
    "mu_of_I",
    "mu_basal",
    "froude",
    "bagnold_mean_velocity",
    "i_zero",
    "earth_pressure_K",
    "mu_I_stress",
    "nu_viscosity",
]

G_DEFAULT = 9.81


@dataclass(frozen=True)
class MaterialParams:
    """Grain and contact properties.

    Args:
        d: Grain diameter (m).
        rho_star: Intrinsic grain density (kg/m^3).
        phi_s: Solids volume fraction.
        phi_int: Internal friction angle (rad).
        delta0: Basal friction angle (rad).
    """

    d: float
    rho_star: float
    phi_s: float
    phi_int: float
    delta0: float

    def __post_init__(self):
        vals = (self.d, self.rho_star, self.phi_s, self.phi_int, self.delta0)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidMaterial("material parameters must be finite")
        if self.d <= 0 or self.rho_star <= 0:
            raise InvalidMaterial("grain diameter and intrinsic density must be positive")
        if not 0 < self.phi_s <= 1:
            raise InvalidMaterial(f"solids fraction must lie in (0, 1], got {self.phi_s}")
        if not 0 <= self.delta0 <= self.phi_int < math.pi / 2:
            raise InvalidMaterial(
                "angles must satisfy 0 <= delta0 <= phi_int < pi/2, "
                f"got delta0={self.delta0}, phi_int={self.phi_int}"
            )

    @property
    def rho(self) -> float:
        """Partial (bulk) density phi_s * rho_star."""
        return self.phi_s * self.rho_star

    @property
    def tan_delta0(self) -> float:
        return math.tan(self.delta0)


@dataclass(frozen=True)
class PouliquenParams:
    """Parameters of the Pouliquen basal friction law.

    ``theta1 == theta2`` is accepted and gives a rate-independent friction
    ``tan(theta1)``; every other use needs ``theta1 < theta2``.
    """

    theta1: float
    theta2: float
    beta: float
    ell: float

    def __post_init__(self):
        vals = (self.theta1, self.theta2, self.beta, self.ell)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidInput("Pouliquen parameters must be finite")
        if not 0 < self.theta1 <= self.theta2 < math.pi / 2:
            raise InvalidInput(
                f"need 0 < theta1 <= theta2 < pi/2, got theta1={self.theta1}, theta2={self.theta2}"
            )
        if self.beta <= 0 or self.ell <= 0:
            raise InvalidInput("beta and ell must be positive")

    @property
    def mu1(self) -> float:
        return math.tan(self.theta1)

    @property
    def mu2(self) -> float:
        return math.tan(self.theta2)


@dataclass(frozen=True)
class SymTensor2:
    """Symmetric 2x2 tensor stored as its three independent components."""

    dxx: ArrayLike
    dxz: ArrayLike
    dzz: ArrayLike

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.dxx, self.dxz], [self.dxz, self.dzz]], dtype=float)

    @property
    def trace(self):
        return self.dxx + self.dzz

    def scaled(self, c) -> "SymTensor2":
        return SymTensor2(c * self.dxx, c * self.dxz, c * self.dzz)


def _require_finite(*arrays) -> None:
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise InvalidInput("non-finite input")


def _scalar_or_array(x):
    x = np.asarray(x, dtype=float)
    return x[()] if x.ndim == 0 else x


def strain_rate(grad: ArrayLike) -> SymTensor2:
    """Symmetric part of a 2x2 velocity gradient ``grad[i, j] = du_i/dx_j``."""
    g = np.asarray(grad, dtype=float)
    if g.shape != (2, 2):
        raise InvalidInput(f"velocity gradient must be 2x2, got shape {g.shape}")
    _require_finite(g)
    return SymTensor2(float(g[0, 0]), 0.5 * float(g[0, 1] + g[1, 0]), float(g[1, 1]))


def second_invariant(D: SymTensor2):
    """``sqrt(tr(D^2) / 2)`` of a symmetric 2x2 tensor."""
    dxx, dxz, dzz = (np.asarray(c, dtype=float) for c in (D.dxx, D.dxz, D.dzz))
    return _scalar_or_array(np.sqrt(0.5 * (dxx * dxx + dzz * dzz) + dxz * dxz))


def inertial_number(d_norm: ArrayLike, p: ArrayLike, mat: MaterialParams):
    """Inertial number ``2 |D| d / sqrt(p / rho_star)``."""
    d_norm = np.asarray(d_norm, dtype=float)
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise NonPositivePressure("pressure must be positive")
    if np.any(d_norm < 0):
        raise InvalidInput("strain-rate norm must be non-negative")
    return _scalar_or_array(2.0 * d_norm * mat.d / np.sqrt(p / mat.rho_star))


def _mu_of_I_core(I, mu1, mu2, I0):
    # I / (I + I0) == 1 / (I0/I + 1), continuous at I = 0
    return mu1 + (mu2 - mu1) * I / (I + I0)


def mu_of_I(I: ArrayLike, mu1: float, mu2: float, I0: ArrayLike):
    """Friction coefficient ``mu1 + (mu2 - mu1) / (I0/I + 1)``; ``mu(0) = mu1``."""
    I = np.asarray(I, dtype=float)
    I0 = np.asarray(I0, dtype=float)
    if np.any(I < 0) or not np.all(np.isfinite(I)):
        raise InvalidInput("inertial number must be finite and non-negative")
    if np.any(I0 <= 0):
        raise InvalidInput("I0 must be positive")
    if not mu1 <= mu2:
        raise InvalidInput("need mu1 <= mu2")
    return _scalar_or_array(_mu_of_I_core(I, mu1, mu2, I0))


def mu_basal_core(fr, h, mu1, mu2, beta, ell):
    # (mu2 - mu1) / (beta h / (ell Fr) + 1), rewritten to stay finite at Fr = 0
    lf = ell * fr
    return mu1 + (mu2 - mu1) * lf / (beta * h + lf)


def mu_basal(Fr: ArrayLike, h: ArrayLike, params: PouliquenParams):
    """Pouliquen basal friction ``mu(Fr, h)``.

    The law is evaluated for every ``Fr >= 0`` and tends to ``mu1`` as
    ``Fr -> 0``. It is only calibrated for ``Fr`` above ``beta``; the
    low-Froude transition law is not modelled.
    """
    Fr = np.asarray(Fr, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise InvalidInput("flow depth must be positive")
    if np.any(Fr < 0):
        raise InvalidInput("Froude number must be non-negative")
    return _scalar_or_array(
        mu_basal_core(Fr, h, params.mu1, params.mu2, params.beta, params.ell)
    )


def froude(u_bar: ArrayLike, h: ArrayLike, theta: float, g: float = G_DEFAULT):
    """Froude number ``|u| / sqrt(g h cos(theta))``.

    Uses the speed magnitude; the direction of friction is applied separately.
    """
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise InvalidInput("flow depth must be positive")
    if not 0 <= theta < math.pi / 2:
        raise InvalidInput(f"theta must lie in [0, pi/2), got {theta}")
    return _scalar_or_array(np.abs(np.asarray(u_bar, dtype=float)) / np.sqrt(g * h * math.cos(theta)))


def bagnold_mean_velocity(I: ArrayLike, h: ArrayLike, theta: float, mat: MaterialParams,
                          g: float = G_DEFAULT):
    """Depth-averaged Bagnold velocity ``(2I / 5d) sqrt(g h cos theta) h^(3/2)``.

    The expression is kept in the form that pairs with :func:`i_zero`, so that
    substituting it into :func:`mu_basal` reproduces :func:`mu_of_I`.
    """
    I = np.asarray(I, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise InvalidInput("flow depth must be positive")
    if np.any(I < 0):
        raise InvalidInput("inertial number must be non-negative")
    return _scalar_or_array(2.0 * I / (5.0 * mat.d) * np.sqrt(g * h * math.cos(theta)) * h ** 1.5)


def i_zero(h: ArrayLike, mat: MaterialParams, params: PouliquenParams):
    """Reference inertial number ``5 beta d / (2 sqrt(h) ell)``."""
    h = np.asarray(h, dtype=float)
    if np.any(h <= 0):
        raise InvalidInput("flow depth must be positive")
    return _scalar_or_array(5.0 * params.beta * mat.d / (2.0 * np.sqrt(h) * params.ell))


def earth_pressure_K(dudx_sign: int, mat: MaterialParams, convention: str = "printed") -> float:
    """Active (``dudx_sign=+1``) or passive (``-1``) earth pressure coefficient.

    ``convention="printed"`` evaluates
    ``2/cos^2(phi) * (1 -+ (1 - cos^2(phi)/cos^2(delta0))) - 1``;
    ``convention="sqrt"`` takes the square root of the inner bracket, which is
    the classical Savage-Hutter form.
    """
    if dudx_sign not in (1, -1):
        raise InvalidInput(f"dudx_sign must be +1 or -1, got {dudx_sign!r}")
    if convention not in ("printed", "sqrt"):
        raise InvalidInput(f"unknown K convention {convention!r}")
    if mat.phi_int < mat.delta0:
        raise InvalidMaterial("internal friction angle must not be smaller than delta0")
    c2phi = math.cos(mat.phi_int) ** 2
    inner = 1.0 - c2phi / math.cos(mat.delta0) ** 2
    if convention == "sqrt":
        inner = math.sqrt(max(inner, 0.0))
    return 2.0 / c2phi * (1.0 - dudx_sign * inner) - 1.0


def mu_I_stress(p: float, D: SymTensor2, I0: float, mu1: float, mu2: float,
                mat: MaterialParams) -> SymTensor2:
    """Deviatoric stress ``mu(I) p D / |D|``.

    The inertial number is computed from ``|D|``, ``p`` and the grain
    properties in ``mat``.
    """
    if p <= 0:
        raise NonPositivePressure("pressure must be positive")
    norm = float(second_invariant(D))
    if norm == 0.0:
        raise DegenerateStrainRate("mu(I) stress is undefined for |D| = 0")
    mu = mu_of_I(inertial_number(norm, p, mat), mu1, mu2, I0)
    return D.scaled(mu * p / norm)


def nu_viscosity(theta: float, params: PouliquenParams, g: float = G_DEFAULT) -> float:
    """Coefficient of the depth-averaged viscous term.

    Defined on ``theta1 < theta <= theta2`` (zero at ``theta2``).
    """
    if theta <= params.theta1:
        raise SlopeOutOfRange(
            f"theta={theta} rad is not above theta1={params.theta1} rad; the viscous coefficient diverges"
        )
    if theta > params.theta2:
        raise SlopeOutOfRange(
            f"theta={theta} rad exceeds theta2={params.theta2} rad; the viscous coefficient is negative"
        )
    t = math.tan(theta)
    return (2.0 / 9.0 * params.ell * math.sqrt(g) / params.beta
            * math.sin(theta) / math.sqrt(math.cos(theta))
            * (params.mu2 - t) / (t - params.mu1))
