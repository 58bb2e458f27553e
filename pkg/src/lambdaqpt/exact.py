"""Numerically exact ground states of the truncated Hamiltonian."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .hilbert import MAX_DIMENSION, FockCutoffs, HilbertSpace, atom_dimension, build_space, default_cutoff, parse_sector, sector_indices, sector_label
from .meanfield import ground_solution
from .operators import ModelParams, build_hamiltonian

DENSE_LIMIT = 2000
# ARPACK loses an exactly-zero eigenvalue whose eigenvector is a zero row of H
# (e.g. the bare ground state when mu13 = 0); an irrational shift avoids that.
ARPACK_SHIFT = math.pi / 7.0


class ConvergenceError(RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


@dataclass
class GroundSolution:
    energy: float
    state: np.ndarray
    space: HilbertSpace
    sector: str | None
    residual: float
    cutoffs: FockCutoffs
    method: str = "iterative"

    @property
    def energy_per_atom(self) -> float:
        return self.energy / self.space.n_atoms


def seed_vector(space: HilbertSpace, indices: np.ndarray | None = None) -> np.ndarray:
    """Deterministic Lanczos seed: bare ground state plus a uniform component.

    All off-diagonal matrix elements of H are non-positive in the Fock basis, so
    the ground state of every sector has non-negative amplitudes and overlaps
    the uniform vector; the bare state alone can sit in an invariant subspace
    (e.g. level 1 decouples when mu13 = 0).
    """
    n = space.dim if indices is None else len(indices)
    v = np.full(n, 1.0 / math.sqrt(n))
    bare = space.bare_ground_index()
    if indices is None:
        v[bare] += 1.0
    else:
        pos = np.searchsorted(indices, bare)
        if pos < n and indices[pos] == bare:
            v[pos] += 1.0
    return v / np.linalg.norm(v)


def _lowest(h, method: str, v0: np.ndarray):
    n = h.shape[0]
    if method == "auto":
        method = "dense" if n <= 64 else "iterative"
    if method == "dense" or n < 3:
        w, v = np.linalg.eigh(h.toarray())
        return float(w[0]), v[:, 0], "dense"
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    shifted = h + ARPACK_SHIFT * sp.identity(n, format="csr")
    w, v = spla.eigsh(shifted, k=1, which="SA", v0=v0, tol=0.0, maxiter=max(1000, 20 * n))
    vec = v[:, 0]
    return float(vec @ (h @ vec)) / float(vec @ vec), vec, "iterative"


def ground_state(space: HilbertSpace, params: ModelParams, sector=None, method: str = "auto", hamiltonian=None) -> GroundSolution:
    """Lowest eigenpair of H on the full space or one parity sector.

    ``sector`` is None/'full', a label such as 'ee', or 'auto' (lowest of the
    four sectors, ties resolved toward 'ee').
    """
    h = build_hamiltonian(space, params) if hamiltonian is None else hamiltonian
    if sector == "auto":
        sols = [ground_state(space, params, s, method, h) for s in ("ee", "eo", "oe", "oo") if len(sector_indices(space, *parse_sector(s)))]
        best = min(s.energy for s in sols)
        return next(s for s in sols if s.energy <= best + 1e-10 * max(1.0, abs(best)))
    if sector in (None, "full"):
        idx = None
        hs = h
        label = None
    else:
        pm, pk = parse_sector(sector)
        idx = sector_indices(space, pm, pk)
        if len(idx) == 0:
            raise ValueError(f"sector {sector!r} is empty")
        hs = h[idx][:, idx]
        label = sector_label(pm, pk)
    if method == "dense" and hs.shape[0] > 4000:
        raise ValueError("dense solve requested above dimension 4000")
    try:
        e, vec, used = _lowest(hs, method, seed_vector(space, idx))
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceError(f"Lanczos did not converge at dim {hs.shape[0]}") from exc
    vec = vec / np.linalg.norm(vec)
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    resid = float(np.linalg.norm(hs @ vec - e * vec))
    if resid > 1e-9 * max(1.0, abs(e)):
        raise ConvergenceError(f"eigen-residual {resid:.3e} too large", best=(e, vec))
    if idx is None:
        full = vec
    else:
        full = np.zeros(space.dim)
        full[idx] = vec
    return GroundSolution(e, full, space, label, resid, space.cutoffs, used)


def _state_grid(space: HilbertSpace, state: np.ndarray) -> np.ndarray:
    n1, n2 = space.cutoffs.shape
    return np.asarray(state).reshape(n1, n2, space.d_atoms)


def matter_rdm(space: HilbertSpace, state: np.ndarray) -> np.ndarray:
    """Partial trace over both photon modes: a d_M x d_M density matrix."""
    x = np.asarray(state).reshape(-1, space.d_atoms)
    rho = x.T @ x.conj()
    return rho / np.trace(rho).real


def field_rdm(space: HilbertSpace, state: np.ndarray) -> np.ndarray:
    x = np.asarray(state).reshape(-1, space.d_atoms)
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def photon_distribution(space: HilbertSpace, state: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.abs(_state_grid(space, state)) ** 2
    return p.sum(axis=(1, 2)), p.sum(axis=(0, 2))


def edge_occupation(space: HilbertSpace, state: np.ndarray) -> float:
    """Largest probability sitting on a cutoff photon number."""
    p1, p2 = photon_distribution(space, state)
    return float(max(p1[-1], p2[-1]))


def mean_photons(space: HilbertSpace, state: np.ndarray) -> tuple[float, float]:
    p1, p2 = photon_distribution(space, state)
    return float(p1 @ np.arange(p1.size)), float(p2 @ np.arange(p2.size))


def initial_cutoffs(params: ModelParams, floor: int = 12) -> FockCutoffs:
    """Cutoff rule from the mean-field amplitudes at this coupling."""
    sol = ground_solution(params)
    a1, a2 = sol.trial.alphas(params.n_atoms)
    return FockCutoffs(default_cutoff(a1, floor), default_cutoff(a2, floor))


def _grow(n: int) -> int:
    return n + max(4, math.ceil(0.25 * n))


@dataclass
class ConvergedGround:
    cutoffs: FockCutoffs
    solution: GroundSolution
    delta_energy: float
    edge: float
    iterations: int


def converge_cutoffs(params: ModelParams, sector="ee", tol: float = 1e-8, edge_tol: float = 1e-8,
                     initial: FockCutoffs | None = None, max_dim: int = MAX_DIMENSION,
                     method: str = "auto") -> ConvergedGround:
    """Grow both photon cutoffs until the ground energy and edge weight settle."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    cut = initial or initial_cutoffs(params)
    space = build_space(params.n_atoms, cut, params.config)
    prev = ground_state(space, params, sector, method)
    it = 1
    while True:
        cut = FockCutoffs(_grow(cut.nmax1), _grow(cut.nmax2))
        if atom_dimension(params.n_atoms) * (cut.nmax1 + 1) * (cut.nmax2 + 1) > max_dim:
            raise ConvergenceError(f"cutoff ceiling reached at {cut}", best=prev)
        space = build_space(params.n_atoms, cut, params.config)
        sol = ground_state(space, params, sector, method)
        it += 1
        de = abs(sol.energy - prev.energy)
        edge = edge_occupation(space, sol.state)
        if de < tol and edge < edge_tol:
            return ConvergedGround(cut, sol, de, edge, it)
        prev = sol
