"""Compiled inner loop of the factorised symmetry-adapted energy."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _field_terms(alpha, signs):
    n = signs.shape[1]
    f = np.empty(n)
    f[0] = 1.0
    for k in range(1, n):
        f[k] = f[k - 1] * alpha / math.sqrt(k)
    kept = 0.0
    for k in range(n):
        kept += f[k] * f[k]
    ident = np.zeros(4)
    num = np.zeros(4)
    quad = np.zeros(4)
    for k in range(n):
        xf = 0.0
        if k > 0:
            xf += math.sqrt(k) * f[k - 1]
        if k < n - 1:
            xf += math.sqrt(k + 1) * f[k + 1]
        q = f[k] * f[k] / kept
        xq = xf * f[k] / kept
        for g in range(4):
            s = signs[g, k]
            ident[g] += s * q
            num[g] += s * k * q
            quad[g] += s * xq
    return ident, num, quad, 1.0 - kept * math.exp(-alpha * alpha)


@njit(cache=True)
def group_terms(a1, a2, gamma, s1, s2, sm, atom_diag, xa, xb, sqrt_mult, occ, om1, om2, ca, cb):
    """<psi|g|psi>, <psi|H g|psi> for g in (1, Pi1, Pi2, Pi1 Pi2) and the two truncation losses.

    ``ca``/``cb`` are the couplings already divided by sqrt(N_a).
    """
    i1, n1, x1, loss1 = _field_terms(a1, s1)
    i2, n2, x2, loss2 = _field_terms(a2, s2)
    gn = math.sqrt(gamma[0] ** 2 + gamma[1] ** 2 + gamma[2] ** 2)
    d = occ.shape[0]
    m = np.empty(d)
    for i in range(d):
        v = sqrt_mult[i]
        for j in range(3):
            v *= (gamma[j] / gn) ** occ[i, j]
        m[i] = v
    xam = xa @ m
    xbm = xb @ m
    im = np.zeros(4)
    dm = np.zeros(4)
    am = np.zeros(4)
    bm = np.zeros(4)
    for i in range(d):
        q = m[i] * m[i]
        for g in range(4):
            s = sm[g, i]
            im[g] += s * q
            dm[g] += s * atom_diag[i] * q
            am[g] += s * xam[i] * m[i]
            bm[g] += s * xbm[i] * m[i]
    overlap = i1 * i2 * im
    h = om1 * n1 * i2 * im + om2 * i1 * n2 * im + i1 * i2 * dm - ca * x1 * i2 * am - cb * i1 * x2 * bm
    return overlap, h, loss1, loss2


@njit(cache=True)
def sector_energy(x, chi, n_atoms, s1, s2, sm, atom_diag, xa, xb, sqrt_mult, occ, om1, om2, ca, cb):
    """(projected weight, energy per atom, max truncation loss) at x = (r1, r2, theta, phi)."""
    st = math.sin(x[2])
    gamma = np.array([math.cos(x[2]), st * math.cos(x[3]), st * math.sin(x[3])])
    root = math.sqrt(n_atoms)
    overlap, h, l1, l2 = group_terms(root * x[0], root * x[1], gamma, s1, s2, sm, atom_diag, xa, xb,
                                     sqrt_mult, occ, om1, om2, ca, cb)
    w = 0.0
    num = 0.0
    for g in range(4):
        w += chi[g] * overlap[g]
        num += chi[g] * h[g]
    w *= 0.25
    num *= 0.25
    e = num / w / n_atoms if w > 0 else np.inf
    return w, e, max(l1, l2)
