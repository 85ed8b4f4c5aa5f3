"""Depth-averaged Savage-Hutter and mu(I) systems as cell-local functions.

The state is ``(h, hu)`` with ``x`` pointing downslope along a reference
incline of angle ``theta``; gravity drives the flow with ``+g h sin(theta)``.
Cells thinner than ``h_eps`` are dry: zero velocity and zero flux.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from . import constitutive as cl
from .constitutive import MaterialParams, PouliquenParams
from .errors import InvalidInput, SlopeOutOfRange

H_EPS = 1e-8
G = cl.G_DEFAULT


@dataclass(frozen=True)
class SavageHutter:
    """Savage-Hutter model configuration.

    ``k_policy="constant"`` uses ``K`` everywhere; ``"active_passive"`` picks
    the active or passive coefficient from the local sign of du/dx.
    """

    theta: float
    material: MaterialParams
    g: float = G
    k_policy: str = "constant"
    K: float = 1.0
    k_convention: str = "printed"

    variant = "savage_hutter"
    chi = 1.0

    def __post_init__(self):
        _check_frame(self.theta, self.g)
        if self.k_policy not in ("constant", "active_passive"):
            raise InvalidInput(f"unknown K policy {self.k_policy!r}")
        if self.k_convention not in ("printed", "sqrt"):
            raise InvalidInput(f"unknown K convention {self.k_convention!r}")
        if not (math.isfinite(self.K) and self.K > 0):
            raise InvalidInput(f"K must be positive, got {self.K}")

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    @property
    def K_act(self) -> float:
        if self.k_policy == "constant":
            return self.K
        return cl.earth_pressure_K(1, self.material, self.k_convention)

    @property
    def K_pas(self) -> float:
        if self.k_policy == "constant":
            return self.K
        return cl.earth_pressure_K(-1, self.material, self.k_convention)

    @property
    def K_max(self) -> float:
        return max(self.K_act, self.K_pas)

    @property
    def mu_hold(self) -> float:
        """Friction coefficient bounding the arrested state."""
        return self.material.tan_delta0

    def nu(self) -> float:
        return 0.0


@dataclass(frozen=True)
class MuIRheology:
    """Depth-averaged mu(I) model configuration.

    ``viscosity`` is ``"formula"`` (coefficient from the Pouliquen
    parameters, needs ``theta1 < theta < theta2``), ``"constant"`` (use
    ``nu_const``) or ``"off"``.
    """

    theta: float
    pouliquen: PouliquenParams
    g: float = G
    chi: float = 1.0
    viscosity: str = "formula"
    nu_const: float = 0.0
    material: MaterialParams | None = None

    variant = "mu_i"
    K = 1.0
    K_act = 1.0
    K_pas = 1.0
    K_max = 1.0
    k_policy = "constant"

    def __post_init__(self):
        _check_frame(self.theta, self.g)
        if not (math.isfinite(self.chi) and self.chi >= 1.0):
            raise InvalidInput(f"shape factor chi must be >= 1, got {self.chi}")
        if self.viscosity not in ("formula", "constant", "off"):
            raise InvalidInput(f"unknown viscosity policy {self.viscosity!r}")
        if self.viscosity == "constant" and not (math.isfinite(self.nu_const) and self.nu_const >= 0):
            raise InvalidInput(f"constant viscosity must be non-negative, got {self.nu_const}")
        if self.viscosity == "formula":
            p = self.pouliquen
            if not p.theta1 < self.theta < p.theta2:
                raise SlopeOutOfRange(
                    "viscosity policy 'formula' needs theta1 < theta < theta2, got "
                    f"theta={self.theta}, theta1={p.theta1}, theta2={p.theta2}"
                )

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)

    @property
    def sin_theta(self) -> float:
        return math.sin(self.theta)

    @property
    def mu_hold(self) -> float:
        return self.pouliquen.mu1

    def nu(self) -> float:
        if self.viscosity == "formula":
            return cl.nu_viscosity(self.theta, self.pouliquen, self.g)
        if self.viscosity == "constant":
            return self.nu_const
        return 0.0


ModelConfig = Union[SavageHutter, MuIRheology]


def _check_frame(theta: float, g: float) -> None:
    if not (math.isfinite(g) and g > 0):
        raise InvalidInput(f"gravity must be positive, got {g}")
    if not 0 <= theta < math.pi / 2:
        raise InvalidInput(f"theta must lie in [0, pi/2), got {theta}")


class FluxVector(NamedTuple):
    f_h: float
    f_hu: float


class SourceResult(NamedTuple):
    s_hu: float
    held_static: bool


# Formula cores shared with the solver kernels. They must stay leaf functions
# (numpy/arithmetic only) so numba can compile them and numpy can vectorize them.

def flux_core(h, u, K, chi, gc):
    """Physical flux for a wet state; ``gc = g cos(theta)``."""
    return h * u, chi * h * u * u + 0.5 * gc * h * h * K


def speeds_core(h, u, K, chi, gc):
    """Characteristic speeds of the flux Jacobian; exact for any chi >= 1."""
    c = np.sqrt(chi * (chi - 1.0) * u * u + gc * h * K)
    return chi * u - c, chi * u + c


def velocity(h, hu, h_eps: float = H_EPS):
    """``hu / h`` on wet cells, 0 on dry cells."""
    h = np.asarray(h, dtype=float)
    hu = np.asarray(hu, dtype=float)
    wet = h >= h_eps
    u = np.where(wet, hu / np.where(wet, h, 1.0), 0.0)
    return u[()] if u.ndim == 0 else u


def _flux(h, hu, K, chi, cfg, h_eps):
    if h < 0:
        raise InvalidInput("depth must be non-negative")
    if h < h_eps:
        return FluxVector(0.0, 0.0)
    f_h, f_hu = flux_core(h, hu / h, K, chi, cfg.g * cfg.cos_theta)
    return FluxVector(float(f_h), float(f_hu))


def flux_sh(h: float, hu: float, K: float, cfg: ModelConfig, h_eps: float = H_EPS) -> FluxVector:
    """Savage-Hutter flux ``(h u, h u^2 + g cos(theta) h^2 K / 2)``."""
    return _flux(h, hu, K, 1.0, cfg, h_eps)


def flux_mui(h: float, hu: float, cfg: MuIRheology, h_eps: float = H_EPS) -> FluxVector:
    """mu(I) flux ``(h u, chi h u^2 + g cos(theta) h^2 / 2)``."""
    return _flux(h, hu, 1.0, cfg.chi, cfg, h_eps)


def yield_threshold(h, cfg: ModelConfig):
    """Coulomb threshold ``g h cos(theta) mu_hold``.

    ``mu_hold`` is ``tan(delta0)`` for Savage-Hutter and ``mu1`` for mu(I).
    """
    return cfg.g * h * cfg.cos_theta * cfg.mu_hold


def _source(h, hu, db_dx, mu_move, cfg, h_eps):
    g, c, s = cfg.g, cfg.cos_theta, cfg.sin_theta
    driving = -g * h * (c * db_dx - s)
    u = hu / h if h >= h_eps else 0.0
    if u != 0.0:
        return SourceResult(driving - g * h * c * mu_move * math.copysign(1.0, u), False)
    sigma = g * h * c * cfg.mu_hold
    if abs(driving) < sigma:
        return SourceResult(0.0, True)
    # at rest but yielded: friction saturates against the driving force
    return SourceResult(driving - sigma * math.copysign(1.0, driving), False)


def source_sh(h: float, hu: float, db_dx: float, cfg: SavageHutter,
              h_eps: float = H_EPS) -> SourceResult:
    """Gravity, topography and Coulomb friction ``-g h cos(theta) tan(delta0) sgn(u)``."""
    if h < 0:
        raise InvalidInput("depth must be non-negative")
    return _source(h, hu, db_dx, cfg.material.tan_delta0, cfg, h_eps)


def source_mui(h: float, hu: float, db_dx: float, cfg: MuIRheology,
               h_eps: float = H_EPS) -> SourceResult:
    """Gravity, topography and Pouliquen friction ``-g h mu(Fr, h) sgn(u) cos(theta)``."""
    if h < 0:
        raise InvalidInput("depth must be non-negative")
    mu = cfg.pouliquen.mu1
    if h >= h_eps and hu != 0.0:
        p = cfg.pouliquen
        fr = abs(hu / h) / math.sqrt(cfg.g * h * cfg.cos_theta)
        mu = cl.mu_basal_core(fr, h, p.mu1, p.mu2, p.beta, p.ell)
    return _source(h, hu, db_dx, mu, cfg, h_eps)


def wave_speeds(h: float, hu: float, cfg: ModelConfig, K: float | None = None,
                h_eps: float = H_EPS) -> tuple[float, float]:
    """Smallest and largest characteristic speed of the convective system.

    For Savage-Hutter ``K`` defaults to the largest coefficient the policy can
    select. For mu(I) the exact eigenvalues ``chi u +- sqrt(chi(chi-1)u^2 + g h cos)``
    are returned, which reduce to ``u +- sqrt(g h cos)`` at ``chi = 1``.
    """
    if h < h_eps:
        return 0.0, 0.0
    if K is None:
        K = cfg.K_max
    lo, hi = speeds_core(h, hu / h, K, cfg.chi, cfg.g * cfg.cos_theta)
    return float(lo), float(hi)


def steady_froude(h, cfg: MuIRheology):
    """Froude number of steady uniform flow, the root of ``mu(Fr, h) = tan(theta)``."""
    p = cfg.pouliquen
    t = math.tan(cfg.theta)
    if not p.mu1 < t < p.mu2:
        raise SlopeOutOfRange("steady uniform flow needs theta1 < theta < theta2")
    return p.beta * np.asarray(h, dtype=float) / p.ell * (t - p.mu1) / (p.mu2 - t)


def steady_velocity(h, cfg: MuIRheology):
    h = np.asarray(h, dtype=float)
    return steady_froude(h, cfg) * np.sqrt(cfg.g * h * cfg.cos_theta)
