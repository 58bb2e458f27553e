"""Coherent-state variational analysis in the large-N_a limit.

Everything here is closed form: the per-atom energy surface restricted to real
parameters, its critical points in each monochromatic region, the region
energies and the separatrix curves between regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .operators import ModelParams

REGIONS = {
    "Lambda": ("N", "S13", "S23"),
    "Xi": ("N", "S12", "S23"),
    "V": ("N", "S12", "S13"),
}

BOUNDARIES = {
    "Lambda": ("N-S13", "N-S23", "S13-S23"),
    "Xi": ("N-S12", "N-S23", "S12-S23"),
    "V": ("N-S12", "N-S13", "S12-S13"),
}


@dataclass(frozen=True)
class TrialConfiguration:
    """Real variational point: field amplitudes per sqrt(N_a) and the u(3) vector gamma.

    Signs are carried by the values themselves (critical phases 0 or pi).
    ``gamma`` need not be normalised; ``gamma[0] == 0`` is allowed so that
    states such as the S23 ground state (no atoms in level 1) are representable.
    """

    r1: float = 0.0
    r2: float = 0.0
    gamma: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        g = tuple(float(v) for v in self.gamma)
        if not any(g):
            raise ValueError("gamma must not vanish")
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "r1", float(self.r1))
        object.__setattr__(self, "r2", float(self.r2))

    @classmethod
    def from_rho(cls, r1, r2, rho2, rho3) -> "TrialConfiguration":
        return cls(r1, r2, (1.0, rho2, rho3))

    @classmethod
    def from_angles(cls, r1, r2, theta, phi) -> "TrialConfiguration":
        st = math.sin(theta)
        return cls(r1, r2, (math.cos(theta), st * math.cos(phi), st * math.sin(phi)))

    @property
    def rho2(self) -> float:
        return self.gamma[1] / self.gamma[0] if self.gamma[0] else math.inf

    @property
    def rho3(self) -> float:
        return self.gamma[2] / self.gamma[0] if self.gamma[0] else math.inf

    @property
    def unit_gamma(self) -> np.ndarray:
        g = np.asarray(self.gamma)
        return g / np.linalg.norm(g)

    def angles(self) -> tuple[float, float]:
        """(theta, phi) with gamma/|gamma| = (cos t, sin t cos p, sin t sin p); valid for gamma >= 0."""
        g = self.unit_gamma
        theta = math.acos(min(1.0, max(-1.0, g[0])))
        phi = math.atan2(g[2], g[1]) if (g[1] or g[2]) else 0.0
        return theta, phi

    def alphas(self, n_atoms: int) -> tuple[float, float]:
        s = math.sqrt(n_atoms)
        return s * self.r1, s * self.r2


@dataclass(frozen=True)
class MeanFieldSolution:
    region: str
    trial: TrialConfiguration
    energy_per_atom: float


def energy_surface(params: ModelParams, trial: TrialConfiguration) -> float:
    """Per-atom expectation of H in the product coherent state (real parameters)."""
    g = np.asarray(trial.gamma, dtype=float)
    norm2 = float(g @ g)
    r = (trial.r1, trial.r2)
    e = params.Omega[0] * r[0] ** 2 + params.Omega[1] * r[1] ** 2
    e += float(np.asarray(params.omega) @ (g * g)) / norm2
    for j, k, mode, mu in params.couplings():
        e -= 4.0 * mu * r[mode - 1] * g[j - 1] * g[k - 1] / norm2
    return e


def _region_point(params: ModelParams, j: int, k: int, mode: int, mu: float):
    """Table-1 critical point and Table-2 energy of region S_jk, or None if it does not exist."""
    Om = params.Omega[mode - 1]
    w = params.omega[k - 1] - params.omega[j - 1]
    if mu == 0.0 or 4.0 * mu * mu < Om * w:
        return None
    rho = math.sqrt((4.0 * mu * mu - Om * w) / (4.0 * mu * mu + Om * w))
    r = 2.0 * mu * rho / ((1.0 + rho * rho) * Om)
    gamma = [0.0, 0.0, 0.0]
    gamma[j - 1] = 1.0
    gamma[k - 1] = rho
    rs = [0.0, 0.0]
    rs[mode - 1] = r
    trial = TrialConfiguration(rs[0], rs[1], tuple(gamma))
    return trial, region_energy(params, f"S{j}{k}")


def region_energy(params: ModelParams, region: str) -> float:
    """Closed-form region energy; defined for any positive coupling (used on boundaries)."""
    if region == "N":
        return params.omega[0]
    for j, k, mode, mu in params.couplings():
        if region == f"S{j}{k}":
            Om = params.Omega[mode - 1]
            wj, wk = params.omega[j - 1], params.omega[k - 1]
            if mu == 0.0:
                return math.inf
            return -mu * mu / Om - Om * (wk - wj) ** 2 / (16.0 * mu * mu) + 0.5 * (wj + wk)
    raise ValueError(f"region {region!r} does not exist for {params.config}")


def critical_points(params: ModelParams) -> list[MeanFieldSolution]:
    """Critical points whose existence condition holds, N first."""
    out = [MeanFieldSolution("N", TrialConfiguration(), params.omega[0])]
    for j, k, mode, mu in params.couplings():
        pt = _region_point(params, j, k, mode, mu)
        if pt is not None:
            out.append(MeanFieldSolution(f"S{j}{k}", pt[0], pt[1]))
    return out


def ground_solution(params: ModelParams, tie_tol: float = 1e-12) -> MeanFieldSolution:
    """Lowest critical point; on exact ties a collective region beats N."""
    sols = critical_points(params)
    best = min(s.energy_per_atom for s in sols)
    tied = [s for s in sols if s.energy_per_atom <= best + tie_tol]
    collective = [s for s in tied if s.region != "N"]
    return (collective or tied)[0]


# ---------------------------------------------------------------------------
# separatrices


def triple_point(params: ModelParams) -> tuple[float, float]:
    """Dimensionless coupling where N and both collective regions coexist."""
    w1, w2, w3 = params.omega
    if params.config == "V":
        return 1.0, 1.0
    # Lambda and Xi: N-S23 line at mu23 = sqrt(Omega2) (sqrt(w31) + sqrt(w21)) / 2
    mu = 0.5 * math.sqrt(params.Omega[1]) * (math.sqrt(w3 - w1) + math.sqrt(w2 - w1))
    return 1.0, mu / params.critical_couplings()[1]


def collective_boundary(params: ModelParams, x_a) -> np.ndarray:
    """x_b on the first-order line between the two collective regions, for x_a >= 1."""
    x = np.asarray(x_a, dtype=float)
    if np.any(x < 1.0):
        raise ValueError("the collective-collective boundary needs x_a >= 1")
    w1, w2, w3 = params.omega
    w21, w31, w32 = w2 - w1, w3 - w1, w3 - w2
    x2 = x * x
    if params.config == "Lambda":
        f = np.sqrt((x2 + 1) ** 2 - 4 * x2 * w32 / w31)
        y2 = -1 + (w31 / w32) * (x2 + 1) / (2 * x2) * (x2 + 1 + f)
    elif params.config == "Xi":
        f = np.sqrt((x2 + 1) ** 2 + 4 * x2 * w32 / w21)
        y2 = 1 + (w21 / w32) * (x2 + 1) / (2 * x2) * (x2 + 1 + f)
    else:
        f = np.sqrt((x2 - 1) ** 2 + 4 * x2 * w31 / w21)
        y2 = 1 + (w21 / w31) * (x2 - 1) / (2 * x2) * (x2 - 1 + f)
    return np.sqrt(y2)


def separatrix(params: ModelParams, boundary: str, n: int = 512, x_max: float = 4.0) -> np.ndarray:
    """Sample a phase boundary as an (n, 2) array of (x_a, x_b)."""
    names = BOUNDARIES[params.config]
    if boundary not in names:
        raise ValueError(f"{params.config} has no boundary {boundary!r}; choose from {names}")
    xa_t, xb_t = triple_point(params)
    if boundary == names[0]:
        xb = np.linspace(0.0, xb_t, n)
        return np.column_stack([np.full(n, xa_t), xb])
    if boundary == names[1]:
        xa = np.linspace(0.0, xa_t, n)
        return np.column_stack([xa, np.full(n, xb_t)])
    xa = np.linspace(1.0, max(x_max, 1.0), n)
    return np.column_stack([xa, collective_boundary(params, xa)])


def boundary_energy_gap(params: ModelParams, boundary: str, x_a: float, x_b: float) -> float:
    """E(first region) - E(second region) at a point; zero on the separatrix."""
    p = params.with_dimensionless(x_a, x_b)
    left, right = boundary.split("-")
    return region_energy(p, left) - region_energy(p, right)


def separatrix_crossings(params: ModelParams, axis: str, value: float, lo: float, hi: float,
                         n: int = 400, tol: float = 1e-12) -> list[float]:
    """Positions along a sweep line where the mean-field ground region changes.

    ``axis='x_b'`` sweeps x_b at fixed x_a = value; ``axis='x_a'`` sweeps x_a at
    fixed x_b = value.  Found by bisection on the ground-region label.
    """
    def label(t):
        xa, xb = (value, t) if axis == "x_b" else (t, value)
        return ground_solution(params.with_dimensionless(xa, xb)).region

    ts = np.linspace(lo, hi, n)
    labels = [label(t) for t in ts]
    out = []
    for i in range(n - 1):
        if labels[i] == labels[i + 1]:
            continue
        a, b = ts[i], ts[i + 1]
        la = labels[i]
        while b - a > tol:
            mid = 0.5 * (a + b)
            if label(mid) == la:
                a = mid
            else:
                b = mid
        out.append(0.5 * (a + b))
    return out


def triple_point_oracle(params: ModelParams) -> tuple[float, float]:
    """Solve E_N = E_Sa = E_Sb numerically from the region energies.

    The N/S boundary of a second-order transition is a double root of
    E_S - E_N, so the signed square root of the gap is bracketed instead.
    """
    names = REGIONS[params.config]
    sa, sb = names[1], names[2]

    def gap(region, xa, xb):
        p = params.with_dimensionless(xa, xb)
        return region_energy(p, region) - region_energy(p, "N")

    if params.config == "V":
        def root_a(x):
            return math.copysign(math.sqrt(max(0.0, -gap(sa, x, 0.0))), x - 1.0) if x != 1.0 else 0.0

        def root_b(x):
            return math.copysign(math.sqrt(max(0.0, -gap(sb, 0.0, x))), x - 1.0) if x != 1.0 else 0.0

        return (brentq(root_a, 0.5, 3.0, xtol=1e-15, rtol=1e-15),
                brentq(root_b, 0.5, 3.0, xtol=1e-15, rtol=1e-15))

    xb = brentq(lambda x: gap(sb, 0.0, x), 1.0 + 1e-9, 20.0, xtol=1e-15, rtol=1e-15)

    def root_a(x):
        g = -(region_energy(params.with_dimensionless(x, xb), sa)
              - region_energy(params.with_dimensionless(x, xb), sb))
        return math.copysign(math.sqrt(max(0.0, g)), x - 1.0)

    xa = brentq(root_a, 0.5, 2.0, xtol=1e-15, rtol=1e-15)
    return xa, xb


# ---------------------------------------------------------------------------
# one-atom density matrix of coherent states


def coherent_one_atom_rdm(trial: TrialConfiguration) -> np.ndarray:
    """(1/N_a) <A_kj> for a product coherent state: the projector onto gamma/|gamma|."""
    g = trial.unit_gamma
    return np.outer(g, g)


PURITY_PAIRS = {
    "Lambda": ((0, 2), (1, 2)),
    "Xi": ((0, 1), (1, 2)),
    "V": ((0, 1), (0, 2)),
}


def purity_condition_residual(rho: np.ndarray, config: str | None = None) -> float:
    """|x|^2 + |y|^2 - (P1 P2 + P1 P3 + P2 P3) for a one-atom RDM.

    With ``config`` the off-diagonal pair (x, y) of that configuration is used,
    which is exact for the region ground states (one level is empty).  Without
    it all three off-diagonals enter, the general rank-one identity.
    """
    rho = np.asarray(rho)
    pairs = PURITY_PAIRS[config] if config else ((0, 1), (0, 2), (1, 2))
    off = sum(abs(rho[i, j]) ** 2 for i, j in pairs)
    p = np.real(np.diag(rho))
    return float(off - (p[0] * p[1] + p[0] * p[2] + p[1] * p[2]))
