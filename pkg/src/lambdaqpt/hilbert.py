"""Basis bookkeeping for N_a symmetric three-level atoms and two truncated field modes.

Flat index layout is row-major with the first mode outermost and the atomic
label innermost::

    index = (nu1 * (nmax2 + 1) + nu2) * d_M + atom_index

Atomic states are ordered lexicographically descending in n1, then n2, so the
bare ground state ``(N_a, 0, 0)`` is always atom index 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_DIMENSION = 10**7

CONFIGS = ("Lambda", "Xi", "V")

# Conserved parities exp(i*pi*M), exp(i*pi*K) written as integer weights on
# (nu1, nu2) and (n1, n2, n3).  Lambda is M = nu1+nu2+A33, K = nu2+A11+A33.
# For Xi and V the weights are the solutions of
#   c_s = d_j + d_k (mod 2) for every coupled transition (j, k) on mode s,
# i.e. the weighted number changes by an even amount under each term of the
# interaction.  Pure atom-number weights (1, 1, 1) are dropped since N_a is fixed.
PARITY_WEIGHTS: dict[str, dict[str, tuple[tuple[int, int], tuple[int, int, int]]]] = {
    "Lambda": {"M": ((1, 1), (0, 0, 1)), "K": ((0, 1), (1, 0, 1))},
    "Xi": {"M": ((1, 1), (0, 1, 0)), "K": ((0, 1), (0, 0, 1))},
    "V": {"M": ((1, 1), (1, 0, 0)), "K": ((0, 1), (0, 0, 1))},
}

SECTORS = ("ee", "eo", "oe", "oo")


@dataclass(frozen=True, order=True)
class AtomBasisState:
    n1: int
    n2: int
    n3: int

    def __iter__(self):
        return iter((self.n1, self.n2, self.n3))

    @property
    def total(self) -> int:
        return self.n1 + self.n2 + self.n3


def atom_dimension(n_atoms: int) -> int:
    """d_M = (N_a + 1)(N_a + 2)/2."""
    return (n_atoms + 1) * (n_atoms + 2) // 2


@lru_cache(maxsize=None)
def _atom_basis(n_atoms: int) -> tuple[AtomBasisState, ...]:
    states = []
    for n1 in range(n_atoms, -1, -1):
        for n2 in range(n_atoms - n1, -1, -1):
            states.append(AtomBasisState(n1, n2, n_atoms - n1 - n2))
    return tuple(states)


def enumerate_atom_basis(n_atoms: int) -> list[AtomBasisState]:
    """Totally symmetric occupation states of ``n_atoms`` three-level atoms."""
    if int(n_atoms) != n_atoms or n_atoms < 1:
        raise ValueError(f"need at least one atom, got N_a={n_atoms!r}")
    return list(_atom_basis(int(n_atoms)))


@lru_cache(maxsize=None)
def atom_occupations(n_atoms: int) -> np.ndarray:
    """(d_M, 3) integer array of occupations in basis order (read-only)."""
    occ = np.array([tuple(s) for s in _atom_basis(n_atoms)], dtype=np.int64)
    occ.setflags(write=False)
    return occ


@dataclass(frozen=True)
class FockCutoffs:
    nmax1: int
    nmax2: int

    def __post_init__(self):
        if self.nmax1 < 0 or self.nmax2 < 0:
            raise ValueError(f"photon cutoffs must be non-negative: {self}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nmax1 + 1, self.nmax2 + 1)

    def __iter__(self):
        return iter((self.nmax1, self.nmax2))


def default_cutoff(alpha: float, floor: int = 12) -> int:
    """Photon cutoff covering a coherent amplitude ``alpha`` with a wide Poisson tail."""
    a = abs(float(alpha))
    return max(floor, math.ceil(a * a + 6.0 * a + 10.0))


def parity_signs(config: str, n_atoms: int, cutoffs: FockCutoffs, which: str):
    """Per-factor +-1 diagonals of a parity operator.

    Returns ``(mode1, mode2, atoms)`` arrays; the full operator is their
    Kronecker product in basis order.
    """
    if config not in PARITY_WEIGHTS:
        raise ValueError(f"unknown configuration {config!r}")
    (c1, c2), d = PARITY_WEIGHTS[config][which]
    nu1 = np.arange(cutoffs.nmax1 + 1)
    nu2 = np.arange(cutoffs.nmax2 + 1)
    occ = atom_occupations(n_atoms)
    s1 = 1.0 - 2.0 * ((c1 * nu1) % 2)
    s2 = 1.0 - 2.0 * ((c2 * nu2) % 2)
    sm = 1.0 - 2.0 * ((occ @ np.asarray(d)) % 2)
    return s1, s2, sm


def _parse_parity(p) -> int:
    if p in (0, "e", "even", False):
        return 0
    if p in (1, "o", "odd", True):
        return 1
    raise ValueError(f"parity must be even/odd, got {p!r}")


def parse_sector(sector) -> tuple[int, int]:
    """Accept 'ee', ('e', 'o'), (0, 1) ... and return (par_M, par_K) as 0/1."""
    if isinstance(sector, str):
        if len(sector) != 2:
            raise ValueError(f"bad sector label {sector!r}")
        return _parse_parity(sector[0]), _parse_parity(sector[1])
    pm, pk = sector
    return _parse_parity(pm), _parse_parity(pk)


def sector_label(par_m: int, par_k: int) -> str:
    return "eo"[par_m] + "eo"[par_k]


@dataclass(frozen=True)
class HilbertSpace:
    n_atoms: int
    cutoffs: FockCutoffs
    config: str = "Lambda"
    par_m: np.ndarray = field(init=False, repr=False, compare=False)
    par_k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for which, attr in (("M", "par_m"), ("K", "par_k")):
            s1, s2, sm = parity_signs(self.config, self.n_atoms, self.cutoffs, which)
            labels = (np.kron(np.kron(s1, s2), sm) < 0).astype(np.int8)
            labels.setflags(write=False)
            object.__setattr__(self, attr, labels)

    @property
    def d_atoms(self) -> int:
        return atom_dimension(self.n_atoms)

    @property
    def dim(self) -> int:
        return self.d_atoms * (self.cutoffs.nmax1 + 1) * (self.cutoffs.nmax2 + 1)

    @property
    def atom_basis(self) -> list[AtomBasisState]:
        return list(_atom_basis(self.n_atoms))

    def index(self, nu1: int, nu2: int, atom) -> int:
        """Flat index of ``|nu1, nu2; n1, n2, n3>``."""
        n1, n2, n3 = atom
        if n1 + n2 + n3 != self.n_atoms or min(n1, n2, n3) < 0:
            raise ValueError(f"{atom} is not an N_a={self.n_atoms} occupation")
        if not (0 <= nu1 <= self.cutoffs.nmax1 and 0 <= nu2 <= self.cutoffs.nmax2):
            raise IndexError(f"photon numbers ({nu1}, {nu2}) beyond cutoffs {self.cutoffs}")
        a = _atom_position(self.n_atoms, n1, n2)
        return (nu1 * (self.cutoffs.nmax2 + 1) + nu2) * self.d_atoms + a

    def labels(self, index: int) -> tuple[int, int, AtomBasisState]:
        if not 0 <= index < self.dim:
            raise IndexError(index)
        photon, a = divmod(int(index), self.d_atoms)
        nu1, nu2 = divmod(photon, self.cutoffs.nmax2 + 1)
        return nu1, nu2, _atom_basis(self.n_atoms)[a]

    def bare_ground_index(self) -> int:
        return self.index(0, 0, (self.n_atoms, 0, 0))

    def sector_of(self, index: int) -> str:
        return sector_label(int(self.par_m[index]), int(self.par_k[index]))

    def photon_numbers(self) -> tuple[np.ndarray, np.ndarray]:
        """nu1 and nu2 for every flat index."""
        n1, n2 = self.cutoffs.shape
        nu1 = np.repeat(np.arange(n1), n2 * self.d_atoms)
        nu2 = np.tile(np.repeat(np.arange(n2), self.d_atoms), n1)
        return nu1, nu2


def _atom_position(n_atoms: int, n1: int, n2: int) -> int:
    # states with a larger n1 come first; within one n1 block n2 descends
    before = sum(n_atoms - m + 1 for m in range(n_atoms, n1, -1))
    return before + (n_atoms - n1 - n2)


def build_space(n_atoms: int, cutoffs, config: str = "Lambda") -> HilbertSpace:
    if not isinstance(cutoffs, FockCutoffs):
        cutoffs = FockCutoffs(*cutoffs)
    if n_atoms < 1:
        raise ValueError(f"need at least one atom, got N_a={n_atoms}")
    if config not in CONFIGS:
        raise ValueError(f"unknown configuration {config!r}; expected one of {CONFIGS}")
    dim = atom_dimension(n_atoms) * (cutoffs.nmax1 + 1) * (cutoffs.nmax2 + 1)
    if dim > MAX_DIMENSION:
        raise ValueError(f"basis dimension {dim} exceeds the guard {MAX_DIMENSION}")
    return HilbertSpace(int(n_atoms), cutoffs, config)


def sector_indices(space: HilbertSpace, par_m, par_k) -> np.ndarray:
    pm, pk = _parse_parity(par_m), _parse_parity(par_k)
    return np.flatnonzero((space.par_m == pm) & (space.par_k == pk))
