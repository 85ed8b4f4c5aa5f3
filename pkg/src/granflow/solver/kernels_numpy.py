"""Vectorized numpy kernels; same contract as :mod:`kernels_numba`."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from ..constitutive import mu_basal_core
from ..models import flux_core, speeds_core

BC_OPEN, BC_REFLECTIVE, BC_PERIODIC = 0, 1, 2


def pad(h, hu, b, bc):
    if bc == BC_PERIODIC:
        idx_l, idx_r, sgn = -1, 0, 1.0
    else:
        idx_l, idx_r = 0, -1
        sgn = -1.0 if bc == BC_REFLECTIVE else 1.0
    hp = np.concatenate(([h[idx_l]], h, [h[idx_r]]))
    hup = np.concatenate(([sgn * hu[idx_l]], hu, [sgn * hu[idx_r]]))
    bp = np.concatenate(([b[idx_l]], b, [b[idx_r]]))
    return hp, hup, bp


def velocities(h, hu, h_eps):
    wet = h >= h_eps
    return np.where(wet, hu / np.where(wet, h, 1.0), 0.0)


def interface_fluxes(hp, up, bp, gc, chi, K_act, K_pas, h_eps):
    hL, hR = hp[:-1], hp[1:]
    uL, uR = up[:-1], up[1:]
    bstar = np.maximum(bp[:-1], bp[1:])
    hLs = np.maximum(0.0, hL + bp[:-1] - bstar)
    hRs = np.maximum(0.0, hR + bp[1:] - bstar)
    K = np.where(uR - uL >= 0.0, K_act, K_pas)
    wetL = hLs >= h_eps
    wetR = hRs >= h_eps

    fLh, fLm = flux_core(hLs, uL, K, chi, gc)
    fRh, fRm = flux_core(hRs, uR, K, chi, gc)
    fLh, fLm = np.where(wetL, fLh, 0.0), np.where(wetL, fLm, 0.0)
    fRh, fRm = np.where(wetR, fRh, 0.0), np.where(wetR, fRm, 0.0)
    loL, hiL = speeds_core(hLs, uL, K, chi, gc)
    loR, hiR = speeds_core(hRs, uR, K, chi, gc)
    aL = np.where(wetL, np.maximum(np.abs(loL), np.abs(hiL)), 0.0)
    aR = np.where(wetR, np.maximum(np.abs(loR), np.abs(hiR)), 0.0)
    a = np.maximum(aL, aR)

    fh = 0.5 * (fLh + fRh) - 0.5 * a * (hRs - hLs)
    fhu = 0.5 * (fLm + fRm) - 0.5 * a * (hRs * uR - hLs * uL)
    fm_left = fhu + 0.5 * gc * (hL * hL - hLs * hLs)
    fm_right = fhu + 0.5 * gc * (hR * hR - hRs * hRs)
    return fh, fm_left, fm_right


def convective_update(h, hu, b, dx, dt, bc, h_eps, gc, gs, chi, K_act, K_pas, mu_hold):
    hp, hup, bp = pad(h, hu, b, bc)
    up = velocities(hp, hup, h_eps)
    fh, fml, fmr = interface_fluxes(hp, up, bp, gc, chi, K_act, K_pas, h_eps)

    r = -(fml[1:] - fmr[:-1]) / dx + gs * h
    hu_new = hu + dt * r
    held = (h >= h_eps) & (hu == 0.0) & (np.abs(r) < gc * h * mu_hold)

    rest = held | (h < h_eps)
    if bc == BC_PERIODIC:
        rest = np.concatenate(([rest[-1]], rest, [rest[0]]))
    else:
        rest = np.concatenate(([rest[0]], rest, [rest[-1]]))
    fh = np.where(rest[:-1] & rest[1:], 0.0, fh)

    h_new = h - dt / dx * (fh[1:] - fh[:-1])
    hu_new = np.where(held, 0.0, hu_new)
    return h_new, hu_new, held


def basal_mu_mui(h, u, g, cos_theta, mu1, mu2, beta, ell, h_eps):
    wet = h >= h_eps
    hs = np.where(wet, h, 1.0)
    fr = np.abs(u) / np.sqrt(g * hs * cos_theta)
    return np.where(wet, mu_basal_core(fr, hs, mu1, mu2, beta, ell), mu1)


def coulomb_project(h, hu, mu, held, dt, gc, h_eps):
    J = dt * gc * h * mu
    out = np.where(hu > 0.0, hu - J, hu + J)
    out = np.where(np.abs(hu) <= J, 0.0, out)
    return np.where((h < h_eps) | held, 0.0, out)


def max_wave_speed(h, hu, gc, chi, K, h_eps):
    wet = h >= h_eps
    if not wet.any():
        return 0.0
    lo, hi = speeds_core(h[wet], hu[wet] / h[wet], K, chi, gc)
    return float(max(np.abs(lo).max(), np.abs(hi).max()))


def thomas(a, b, c, d):
    n = d.shape[0]
    ab = np.zeros((3, n))
    ab[0, 1:] = c[:-1]
    ab[1] = b
    ab[2, :-1] = a[1:]
    return solve_banded((1, 1), ab, d)


def cyclic_thomas(a, b, c, d):
    n = d.shape[0]
    alpha, beta = c[-1], a[0]
    if alpha == 0.0 and beta == 0.0:
        return thomas(a, b, c, d)
    gamma = -b[0]
    bb = b.copy()
    bb[0] = b[0] - gamma
    bb[-1] = b[-1] - alpha * beta / gamma
    x = thomas(a, bb, c, d)
    v = np.zeros(n)
    v[0], v[-1] = gamma, alpha
    z = thomas(a, bb, c, v)
    fact = (x[0] + beta * x[-1] / gamma) / (1.0 + z[0] + beta * z[-1] / gamma)
    return x - fact * z
