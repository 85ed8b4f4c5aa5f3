"""Loop kernels compiled with numba.

Mirrors :mod:`granflow.solver.kernels_numpy` exactly in arithmetic order so
both backends agree to rounding.
"""

from __future__ import annotations

import math

import numpy as np

from .._jit import njit
from ..constitutive import mu_basal_core
from ..models import flux_core, speeds_core

BC_OPEN, BC_REFLECTIVE, BC_PERIODIC = 0, 1, 2

_flux = njit(flux_core)
_speeds = njit(speeds_core)
_mu_basal = njit(mu_basal_core)


@njit
def pad(h, hu, b, bc):
    n = h.shape[0]
    hp = np.empty(n + 2)
    hup = np.empty(n + 2)
    bp = np.empty(n + 2)
    hp[1:n + 1] = h
    hup[1:n + 1] = hu
    bp[1:n + 1] = b
    if bc == BC_PERIODIC:
        hp[0], hup[0], bp[0] = h[n - 1], hu[n - 1], b[n - 1]
        hp[n + 1], hup[n + 1], bp[n + 1] = h[0], hu[0], b[0]
    else:
        sgn = -1.0 if bc == BC_REFLECTIVE else 1.0
        hp[0], hup[0], bp[0] = h[0], sgn * hu[0], b[0]
        hp[n + 1], hup[n + 1], bp[n + 1] = h[n - 1], sgn * hu[n - 1], b[n - 1]
    return hp, hup, bp


@njit
def velocities(h, hu, h_eps):
    u = np.zeros(h.shape[0])
    for i in range(h.shape[0]):
        if h[i] >= h_eps:
            u[i] = hu[i] / h[i]
    return u


@njit
def interface_fluxes(hp, up, bp, gc, chi, K_act, K_pas, h_eps):
    """Well-balanced Rusanov fluxes on the ``n + 1`` interfaces of a padded row.

    Returns the mass flux and the momentum flux seen from the left and from
    the right cell (they differ by the hydrostatic topography correction).
    """
    m = hp.shape[0] - 1
    fh = np.empty(m)
    fm_left = np.empty(m)
    fm_right = np.empty(m)
    for j in range(m):
        hL, hR = hp[j], hp[j + 1]
        uL, uR = up[j], up[j + 1]
        bstar = max(bp[j], bp[j + 1])
        hLs = max(0.0, hL + bp[j] - bstar)
        hRs = max(0.0, hR + bp[j + 1] - bstar)
        K = K_act if uR - uL >= 0.0 else K_pas
        fLh = fLm = fRh = fRm = 0.0
        a = 0.0
        if hLs >= h_eps:
            fLh, fLm = _flux(hLs, uL, K, chi, gc)
            lo, hi = _speeds(hLs, uL, K, chi, gc)
            a = max(a, abs(lo), abs(hi))
        if hRs >= h_eps:
            fRh, fRm = _flux(hRs, uR, K, chi, gc)
            lo, hi = _speeds(hRs, uR, K, chi, gc)
            a = max(a, abs(lo), abs(hi))
        fh[j] = 0.5 * (fLh + fRh) - 0.5 * a * (hRs - hLs)
        fhu = 0.5 * (fLm + fRm) - 0.5 * a * (hRs * uR - hLs * uL)
        fm_left[j] = fhu + 0.5 * gc * (hL * hL - hLs * hLs)
        fm_right[j] = fhu + 0.5 * gc * (hR * hR - hRs * hRs)
    return fh, fm_left, fm_right


@njit
def convective_update(h, hu, b, dx, dt, bc, h_eps, gc, gs, chi, K_act, K_pas, mu_hold):
    """Conservative update plus gravity and the static-hold test.

    A cell is held when it is wet, at rest, and the net force from pressure,
    topography and gravity is below the Coulomb bound ``g h cos(theta) mu_hold``.
    Interfaces between held or dry cells carry no mass.
    """
    n = h.shape[0]
    hp, hup, bp = pad(h, hu, b, bc)
    up = velocities(hp, hup, h_eps)
    fh, fml, fmr = interface_fluxes(hp, up, bp, gc, chi, K_act, K_pas, h_eps)

    held = np.zeros(n, dtype=np.bool_)
    hu_new = np.empty(n)
    for i in range(n):
        r = -(fml[i + 1] - fmr[i]) / dx + gs * h[i]
        hu_new[i] = hu[i] + dt * r
        if h[i] >= h_eps and hu[i] == 0.0 and abs(r) < gc * h[i] * mu_hold:
            held[i] = True

    rest = np.empty(n + 2, dtype=np.bool_)
    for i in range(n):
        rest[i + 1] = held[i] or h[i] < h_eps
    if bc == BC_PERIODIC:
        rest[0], rest[n + 1] = rest[n], rest[1]
    else:
        rest[0], rest[n + 1] = rest[1], rest[n]
    for j in range(n + 1):
        if rest[j] and rest[j + 1]:
            fh[j] = 0.0

    h_new = np.empty(n)
    for i in range(n):
        h_new[i] = h[i] - dt / dx * (fh[i + 1] - fh[i])
        if held[i]:
            hu_new[i] = 0.0
    return h_new, hu_new, held


@njit
def basal_mu_mui(h, u, g, cos_theta, mu1, mu2, beta, ell, h_eps):
    """Pouliquen friction per cell from the given state; ``mu1`` on dry cells."""
    n = h.shape[0]
    mu = np.empty(n)
    for i in range(n):
        if h[i] >= h_eps:
            fr = abs(u[i]) / math.sqrt(g * h[i] * cos_theta)
            mu[i] = _mu_basal(fr, h[i], mu1, mu2, beta, ell)
        else:
            mu[i] = mu1
    return mu


@njit
def coulomb_project(h, hu, mu, held, dt, gc, h_eps):
    """Subtract the friction impulse ``dt g h cos(theta) mu``; arrest instead of reversing."""
    n = h.shape[0]
    out = np.empty(n)
    for i in range(n):
        if h[i] < h_eps or held[i]:
            out[i] = 0.0
            continue
        J = dt * gc * h[i] * mu[i]
        q = hu[i]
        if abs(q) <= J:
            out[i] = 0.0
        elif q > 0.0:
            out[i] = q - J
        else:
            out[i] = q + J
    return out


@njit
def max_wave_speed(h, hu, gc, chi, K, h_eps):
    amax = 0.0
    for i in range(h.shape[0]):
        if h[i] >= h_eps:
            lo, hi = _speeds(h[i], hu[i] / h[i], K, chi, gc)
            amax = max(amax, abs(lo), abs(hi))
    return amax


@njit
def thomas(a, b, c, d):
    """Solve a tridiagonal system; ``a[0]`` and ``c[-1]`` are ignored."""
    n = d.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    cp[0] = c[0] / b[0]
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        m = b[i] - a[i] * cp[i - 1]
        cp[i] = c[i] / m
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m
    x = np.empty(n)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


@njit
def cyclic_thomas(a, b, c, d):
    """Periodic tridiagonal solve; ``a[0]`` couples to the last unknown, ``c[-1]`` to the first."""
    n = d.shape[0]
    alpha = c[n - 1]
    beta = a[0]
    if alpha == 0.0 and beta == 0.0:
        return thomas(a, b, c, d)
    gamma = -b[0]
    bb = b.copy()
    bb[0] = b[0] - gamma
    bb[n - 1] = b[n - 1] - alpha * beta / gamma
    x = thomas(a, bb, c, d)
    v = np.zeros(n)
    v[0] = gamma
    v[n - 1] = alpha
    z = thomas(a, bb, c, v)
    fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma)
    return x - fact * z
