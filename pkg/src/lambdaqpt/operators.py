"""Matrix representations: u(3) generators, photon ladders, parities and the Hamiltonian.

All operators are real (the Hamiltonian has real matrix elements in the Fock
basis) and stored as ``scipy.sparse.csr_matrix`` with float64 entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .hilbert import (
    CONFIGS,
    HilbertSpace,
    atom_dimension,
    atom_occupations,
    parity_signs,
)

# (level j, level k) driven by each mode, per configuration (levels 1-based).
TRANSITIONS = {
    "Lambda": ((1, 3), (2, 3)),
    "Xi": ((1, 2), (2, 3)),
    "V": ((1, 2), (1, 3)),
}

PRESETS = {
    # Fig.-2 caption parameter set; used as the default everywhere.
    "fig2": {"omega": (0.0, 0.2, 1.0), "Omega": (1.0, 0.8)},
    "text-s2": {"omega": (0.0, 0.1, 1.0), "Omega": (1.0, 0.9)},
}


@dataclass(frozen=True)
class ModelParams:
    """Frequencies, couplings and atom number.

    ``mu_a`` couples mode 1 and ``mu_b`` mode 2 to the transitions listed in
    ``TRANSITIONS[config]``; for Lambda that is (mu13, mu23).
    """

    omega: tuple[float, float, float] = PRESETS["fig2"]["omega"]
    Omega: tuple[float, float] = PRESETS["fig2"]["Omega"]
    mu_a: float = 0.0
    mu_b: float = 0.0
    config: str = "Lambda"
    n_atoms: int = 2

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(float(w) for w in self.omega))
        object.__setattr__(self, "Omega", tuple(float(w) for w in self.Omega))
        if self.config not in CONFIGS:
            raise ValueError(f"unknown configuration {self.config!r}")
        w1, w2, w3 = self.omega
        if not w1 < w2 < w3:
            raise ValueError(f"atomic frequencies must satisfy w1 < w2 < w3, got {self.omega}")
        if min(self.Omega) <= 0:
            raise ValueError(f"mode frequencies must be positive, got {self.Omega}")
        if self.mu_a < 0 or self.mu_b < 0:
            raise ValueError("couplings must be non-negative")
        if self.n_atoms < 1:
            raise ValueError("need at least one atom")

    @classmethod
    def preset(cls, name: str = "fig2", **kwargs) -> "ModelParams":
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return cls(**PRESETS[name], **kwargs)

    @property
    def transitions(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return TRANSITIONS[self.config]

    @property
    def mu(self) -> tuple[float, float]:
        return (self.mu_a, self.mu_b)

    def couplings(self):
        """Yield ``(j, k, mode, mu)`` for the two dipole terms (1-based levels and modes)."""
        for mode, ((j, k), mu) in enumerate(zip(self.transitions, self.mu), start=1):
            yield j, k, mode, mu

    def critical_couplings(self) -> tuple[float, float]:
        """Two-level critical strengths sqrt(Omega_s * omega_kj) / 2 for each mode."""
        out = []
        for mode, (j, k) in enumerate(self.transitions):
            out.append(0.5 * math.sqrt(self.Omega[mode] * (self.omega[k - 1] - self.omega[j - 1])))
        return tuple(out)

    def dimensionless(self) -> "DimensionlessCouplings":
        ca, cb = self.critical_couplings()
        return DimensionlessCouplings(self.mu_a / ca, self.mu_b / cb)

    def with_dimensionless(self, x_a: float, x_b: float) -> "ModelParams":
        ca, cb = self.critical_couplings()
        return replace(self, mu_a=float(x_a) * ca, mu_b=float(x_b) * cb)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class DimensionlessCouplings:
    x_a: float
    x_b: float

    def __post_init__(self):
        if self.x_a < 0 or self.x_b < 0:
            raise ValueError("dimensionless couplings must be non-negative")

    def __iter__(self):
        return iter((self.x_a, self.x_b))


# ---------------------------------------------------------------------------
# factor-space matrices


@lru_cache(maxsize=None)
def atom_generator(n_atoms: int, j: int, k: int) -> sp.csr_matrix:
    """A_jk = b_j^dagger b_k on the d_M-dimensional symmetric atomic space."""
    if j not in (1, 2, 3) or k not in (1, 2, 3):
        raise ValueError(f"level indices must be in 1..3, got ({j}, {k})")
    occ = atom_occupations(n_atoms)
    d = atom_dimension(n_atoms)
    lookup = {tuple(o): i for i, o in enumerate(occ.tolist())}
    rows, cols, vals = [], [], []
    for col, n in enumerate(occ.tolist()):
        if n[k - 1] == 0:
            continue
        if j == k:
            rows.append(col)
            cols.append(col)
            vals.append(float(n[k - 1]))
            continue
        m = list(n)
        m[k - 1] -= 1
        m[j - 1] += 1
        rows.append(lookup[tuple(m)])
        cols.append(col)
        vals.append(math.sqrt(n[k - 1] * (n[j - 1] + 1)))
    return sp.csr_matrix((vals, (rows, cols)), shape=(d, d))


@lru_cache(maxsize=None)
def annihilation(nmax: int) -> sp.csr_matrix:
    """Truncated a on photon numbers 0..nmax."""
    return sp.diags(np.sqrt(np.arange(1, nmax + 1, dtype=float)), 1, shape=(nmax + 1, nmax + 1), format="csr")


def _embed(space: HilbertSpace, mode1=None, mode2=None, atoms=None) -> sp.csr_matrix:
    n1, n2 = space.cutoffs.shape
    f1 = sp.identity(n1, format="csr") if mode1 is None else mode1
    f2 = sp.identity(n2, format="csr") if mode2 is None else mode2
    fa = sp.identity(space.d_atoms, format="csr") if atoms is None else atoms
    return sp.kron(sp.kron(f1, f2, format="csr"), fa, format="csr")


def collective_generator(space: HilbertSpace, j: int, k: int) -> sp.csr_matrix:
    """A_jk on the full space (identity on both photon modes)."""
    return _embed(space, atoms=atom_generator(space.n_atoms, j, k))


def boson_ops(space: HilbertSpace, mode: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """``(a_s, a_s^dagger)`` on the full space for mode 1 or 2."""
    if mode == 1:
        a = _embed(space, mode1=annihilation(space.cutoffs.nmax1))
    elif mode == 2:
        a = _embed(space, mode2=annihilation(space.cutoffs.nmax2))
    else:
        raise ValueError(f"mode must be 1 or 2, got {mode}")
    return a, a.T.tocsr()


def parity_operator(space: HilbertSpace, which: str = "Pi1") -> sp.csr_matrix:
    """Diagonal +-1 matrix of Pi1 = exp(i pi M) or Pi2 = exp(i pi K)."""
    key = {"Pi1": "M", "Pi2": "K", "M": "M", "K": "K"}.get(which)
    if key is None:
        raise ValueError(f"which must be 'Pi1' or 'Pi2', got {which!r}")
    s1, s2, sm = parity_signs(space.config, space.n_atoms, space.cutoffs, key)
    return sp.diags(np.kron(np.kron(s1, s2), sm), format="csr")


def build_hamiltonian(space: HilbertSpace, params: ModelParams) -> sp.csr_matrix:
    """Full (non-RWA) two-mode Hamiltonian on the truncated space."""
    if space.n_atoms != params.n_atoms:
        raise ValueError(f"space has N_a={space.n_atoms} but params have N_a={params.n_atoms}")
    if space.config != params.config:
        raise ValueError(f"space built for {space.config} but params are {params.config}")
    n1, n2 = space.cutoffs.shape
    d = space.d_atoms
    occ = atom_occupations(space.n_atoms)
    atom_diag = occ @ np.asarray(params.omega)
    diag = (
        params.Omega[0] * np.repeat(np.arange(n1), n2 * d)
        + params.Omega[1] * np.tile(np.repeat(np.arange(n2), d), n1)
        + np.tile(atom_diag, n1 * n2)
    )
    h = sp.diags(diag, format="csr")
    scale = 1.0 / math.sqrt(space.n_atoms)
    for j, k, mode, mu in params.couplings():
        if mu == 0.0:
            continue
        a = atom_generator(space.n_atoms, j, k)
        x_atom = a + a.T
        nmax = space.cutoffs.nmax1 if mode == 1 else space.cutoffs.nmax2
        ann = annihilation(nmax)
        x_field = ann + ann.T
        term = _embed(space, mode1=x_field, atoms=x_atom) if mode == 1 else _embed(space, mode2=x_field, atoms=x_atom)
        h = h - (mu * scale) * term
    h.sum_duplicates()
    h.sort_indices()
    return h.tocsr()


def casimir_check(space: HilbertSpace, n_atoms: int | None = None) -> tuple[float, float]:
    """Max deviations of C1 and C2 from N_a and N_a(N_a+2) on the atomic block."""
    n = space.n_atoms if n_atoms is None else n_atoms
    d = atom_dimension(space.n_atoms)
    eye = np.eye(d)
    c1 = sum(atom_generator(space.n_atoms, k, k).toarray() for k in (1, 2, 3))
    c2 = sum(
        (atom_generator(space.n_atoms, j, k) @ atom_generator(space.n_atoms, k, j)).toarray()
        for j in (1, 2, 3)
        for k in (1, 2, 3)
    )
    return float(np.abs(c1 - n * eye).max()), float(np.abs(c2 - n * (n + 2) * eye).max())


def commutator_residual(n_atoms: int) -> float:
    """Largest violation of [A_lm, A_kj] = d_mk A_lj - d_jl A_km over all 81 index sets."""
    worst = 0.0
    levels = (1, 2, 3)
    for l in levels:
        for m in levels:
            alm = atom_generator(n_atoms, l, m).toarray()
            for k in levels:
                for j in levels:
                    akj = atom_generator(n_atoms, k, j).toarray()
                    lhs = alm @ akj - akj @ alm
                    rhs = np.zeros_like(lhs)
                    if m == k:
                        rhs += atom_generator(n_atoms, l, j).toarray()
                    if j == l:
                        rhs -= atom_generator(n_atoms, k, m).toarray()
                    worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst
