"""Fast invariant suite behind ``lambdaqpt check``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import exact, meanfield, qinfo
from .hilbert import FockCutoffs, build_space
from .operators import ModelParams, build_hamiltonian, casimir_check, commutator_residual, parity_operator


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def check_algebra(sizes=(1, 2, 3, 4)) -> CheckResult:
    worst = 0.0
    for n in sizes:
        space = build_space(n, FockCutoffs(1, 1))
        c1, c2 = casimir_check(space)
        worst = max(worst, commutator_residual(n), c1, c2)
    return CheckResult("u(3) commutators and Casimirs", worst < 1e-12, f"max residual {worst:.2e}")


def check_separatrices(n: int = 100) -> CheckResult:
    worst = 0.0
    for config in ("Lambda", "Xi", "V"):
        p = ModelParams(config=config)
        for b in meanfield.BOUNDARIES[config]:
            pts = meanfield.separatrix(p, b, n=n, x_max=4.0)
            for xa, xb in pts:
                worst = max(worst, abs(meanfield.boundary_energy_gap(p, b, xa, xb)))
    return CheckResult("separatrix energy equality", worst < 1e-8, f"max |dE| {worst:.2e}")


def check_triple_point() -> CheckResult:
    p = ModelParams.preset("fig2")
    xa, xb = meanfield.triple_point_oracle(p)
    err = max(abs(xa - 1.0), abs(xb - 0.5 * (1.0 + math.sqrt(5.0))))
    return CheckResult("Lambda triple point (1, golden ratio)", err < 1e-8, f"({xa:.12f}, {xb:.12f})")


def check_fidelity(trials: int = 50, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for dim in (3, 6, 15):
        for _ in range(trials):
            a, b = random_density_matrix(dim, rng), random_density_matrix(dim, rng)
            u = random_unitary(dim, rng)
            f = qinfo.fidelity(a, b)
            worst = max(worst, abs(f - qinfo.fidelity(b, a)),
                        abs(f - qinfo.fidelity(u @ a @ u.conj().T, u @ b @ u.conj().T)),
                        max(0.0, -f, f - 1.0))
    return CheckResult("fidelity axioms", worst < 1e-9, f"max violation {worst:.2e}")


def check_solver(points: int = 4, seed: int = 1) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        p = ModelParams.preset(n_atoms=2).with_dimensionless(*rng.uniform(0.0, 3.0, 2))
        space = build_space(2, FockCutoffs(10, 10))
        a = exact.ground_state(space, p, "ee", "iterative").energy
        b = exact.ground_state(space, p, "ee", "dense").energy
        worst = max(worst, abs(a - b))
    return CheckResult("iterative vs dense ground energy", worst < 1e-10, f"max |dE| {worst:.2e}")


def check_parity() -> CheckResult:
    p = ModelParams.preset(n_atoms=3).with_dimensionless(1.7, 1.3)
    space = build_space(3, FockCutoffs(6, 5))
    h = build_hamiltonian(space, p)
    worst = 0.0
    for which in ("Pi1", "Pi2"):
        q = parity_operator(space, which)
        worst = max(worst, abs(h @ q - q @ h).max())
    return CheckResult("[H, Pi1] = [H, Pi2] = 0", worst < 1e-12, f"max |[H, Pi]| {worst:.2e}")


def check_circle(n: int = 64) -> CheckResult:
    pts = qinfo.inscribed_circle_points(n)
    worst = max(abs(qinfo.occupation_entropies(p)[0] - 0.5) for p in pts)
    return CheckResult("inscribed circle has S_L = 1/2", worst < 1e-10, f"max |S_L - 1/2| {worst:.2e}")


ALL_CHECKS = (check_algebra, check_separatrices, check_triple_point, check_fidelity, check_solver,
              check_parity, check_circle)


def run_checks() -> list[CheckResult]:
    out = []
    for fn in ALL_CHECKS:
        try:
            out.append(fn())
        except Exception as exc:  # noqa: BLE001 - reported as a failed check
            out.append(CheckResult(fn.__name__, False, f"{type(exc).__name__}: {exc}"))
    return out
