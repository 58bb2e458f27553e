"""Quantum-information measures on density matrices."""

from __future__ import annotations

import math

import numpy as np

from .hilbert import atom_dimension
from .operators import atom_generator

CLAMP_TOL = 1e-10


class InvalidDensityMatrix(ValueError):
    pass


def _eigh_clamped(rho: np.ndarray, tol: float = CLAMP_TOL):
    """Eigenpairs of the Hermitian part with negative eigenvalues clamped to 0.

    Eigenvalues below ``-tol`` are an error.  Positive values at the round-off
    floor (below dim * eps * lambda_max) are also set to 0: their square roots
    would otherwise inject errors of order sqrt(eps) into fidelities.
    """
    rho = np.asarray(rho)
    herm = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(herm)
    if w.size and w.min() < -tol:
        raise InvalidDensityMatrix(f"eigenvalue {w.min():.3e} below clamp tolerance {tol:g}")
    floor = 8.0 * w.size * np.finfo(float).eps * max(float(w.max(initial=0.0)), 0.0)
    w = np.where(w > floor, w, 0.0)
    return w, v


def validate_density_matrix(rho: np.ndarray, tol: float = CLAMP_TOL) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrix(f"expected a square matrix, got shape {rho.shape}")
    if np.abs(rho - rho.conj().T).max(initial=0.0) > 1e-8:
        raise InvalidDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise InvalidDensityMatrix(f"trace {np.trace(rho).real!r} differs from 1")
    _eigh_clamped(rho, tol)
    return rho


def sqrtm_psd(rho: np.ndarray) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix via eigendecomposition."""
    w, v = _eigh_clamped(rho)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))**2``.

    The trace is evaluated as the nuclear norm of sqrt(rho1) sqrt(rho2), the
    same quantity without a final square root of eigenvalues, so that
    round-off enters linearly rather than as its square root.
    """
    rho1 = np.asarray(rho1)
    rho2 = np.asarray(rho2)
    if rho1.shape != rho2.shape:
        raise ValueError(f"shape mismatch {rho1.shape} vs {rho2.shape}")
    s = np.linalg.svd(sqrtm_psd(rho1) @ sqrtm_psd(rho2), compute_uv=False)
    f = float(np.sum(s) ** 2)
    return min(1.0, max(0.0, f))


def fidelity_susceptibility(rho_x: np.ndarray, rho_dx: np.ndarray, step_norm: float) -> float:
    """chi = 2 (1 - F) / |dx|^2."""
    if not step_norm > 0:
        raise ValueError("step_norm must be positive")
    return susceptibility_from_fidelity(fidelity(rho_x, rho_dx), step_norm)


def susceptibility_from_fidelity(f: float, step_norm: float) -> float:
    if not step_norm > 0:
        raise ValueError("step_norm must be positive")
    return 2.0 * (1.0 - f) / step_norm**2


def bures_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    return bures_from_fidelity(fidelity(rho1, rho2))


def bures_from_fidelity(f: float) -> float:
    return math.sqrt(max(0.0, 2.0 - 2.0 * math.sqrt(max(0.0, f))))


def linear_entropy(rho: np.ndarray) -> float:
    """S_L = 1 - Tr rho^2, with round-off below zero clipped."""
    rho = np.asarray(rho)
    return max(0.0, float(1.0 - np.real(np.vdot(rho.conj().T, rho))))


def vn_entropy(rho: np.ndarray) -> float:
    """Natural-log von Neumann entropy, 0 ln 0 = 0."""
    w, _ = _eigh_clamped(rho)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))


def occupation_entropies(p) -> tuple[float, float]:
    """Closed forms for a diagonal one-atom RDM: S_L = 2 sum_{j<k} P_j P_k, S_VN = -sum P ln P."""
    p = np.asarray(p, dtype=float)
    sl = 2.0 * (p[0] * p[1] + p[0] * p[2] + p[1] * p[2])
    nz = p[p > 0]
    return float(sl), float(-np.sum(nz * np.log(nz)))


# ---------------------------------------------------------------------------
# one-atom reduction


def generator_expectations(rho_matter: np.ndarray, n_atoms: int) -> np.ndarray:
    """3x3 table T[j-1, k-1] = <A_jk> from a matter density matrix."""
    rho_matter = np.asarray(rho_matter)
    if rho_matter.shape != (atom_dimension(n_atoms),) * 2:
        raise ValueError("matter RDM has the wrong dimension for N_a")
    t = np.empty((3, 3), dtype=rho_matter.dtype)
    for j in (1, 2, 3):
        for k in (1, 2, 3):
            a = atom_generator(n_atoms, j, k)
            t[j - 1, k - 1] = np.sum(a.multiply(rho_matter.T))
    return t


def one_atom_rdm(expectations: np.ndarray, n_atoms: int, tol: float = 1e-8) -> np.ndarray:
    """rho^(1)_{kj} = <A_jk> / N_a."""
    t = np.asarray(expectations)
    rho = t.T / n_atoms
    if abs(np.trace(rho).real - 1.0) > tol:
        raise InvalidDensityMatrix(f"one-atom trace {np.trace(rho).real:.12g} != 1: inconsistent expectations")
    return rho


def one_atom_from_matter(rho_matter: np.ndarray, n_atoms: int) -> np.ndarray:
    return one_atom_rdm(generator_expectations(rho_matter, n_atoms), n_atoms)


def mutual_information_one_one(sl_one_atom: float, sl_matter: float) -> float:
    """I(rho_1 : rho_1) = 2 S_L^(1) - S_L(rho_M) for two atoms."""
    return 2.0 * sl_one_atom - sl_matter


def mutual_information_matter_field(rho_matter: np.ndarray) -> float:
    """For a pure global state S(rho_M) = S(rho_F), hence I(M:F) = 2 S(rho_M)."""
    return 2.0 * vn_entropy(rho_matter)


def two_body_reduction_check(phi, n_atoms: int, i: int, k: int, j: int, l: int) -> float:
    """|<O>^(N_a) - C(N_a, 2) <O>^(2)| for O(ik, jl) = A_ij A_kl - delta_jk A_il.

    Both sides are evaluated on the permutation-symmetric product state
    |phi>^N_a, built in the N_a-atom and the two-atom symmetric spaces.
    """
    from .sas import expand_matter_coherent

    if n_atoms < 2:
        raise ValueError("two-body reduction needs N_a >= 2")

    def expect(n):
        psi = expand_matter_coherent(phi, n)
        op = atom_generator(n, i, j) @ atom_generator(n, k, l)
        if j == k:
            op = op - atom_generator(n, i, l)
        return float(psi @ (op @ psi))

    return abs(expect(n_atoms) - math.comb(n_atoms, 2) * expect(2))


# ---------------------------------------------------------------------------
# simplex geometry

TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3.0) / 2.0]])


def simplex_embed(p) -> tuple[float, float]:
    """Barycentric (P1, P2, P3) -> plane, with P1, P2, P3 at (0,0), (1,0), (1/2, sqrt3/2)."""
    p = np.asarray(p, dtype=float)
    u, v = p @ TRIANGLE
    return float(u), float(v)


def inscribed_circle_test(p, tol: float = 1e-10) -> bool:
    p = np.asarray(p, dtype=float)
    return abs(float(np.sum((p - 1.0 / 3.0) ** 2)) - 1.0 / 6.0) <= tol


def inscribed_circle_points(n: int) -> np.ndarray:
    """n probability vectors on sum (P_k - 1/3)^2 = 1/6."""
    e1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    e2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)
    t = 2.0 * math.pi * np.arange(n) / n
    r = 1.0 / math.sqrt(6.0)
    return 1.0 / 3.0 + r * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
