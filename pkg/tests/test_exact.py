import numpy as np
import pytest

from lambdaqpt import exact
from lambdaqpt.hilbert import FockCutoffs, build_space
from lambdaqpt.meanfield import ground_solution
from lambdaqpt.operators import ModelParams
from lambdaqpt.qinfo import linear_entropy, one_atom_from_matter

P2 = ModelParams.preset(n_atoms=2)


def test_zero_coupling_bare_ground():
    sp = build_space(2, FockCutoffs(4, 4))
    g = exact.ground_state(sp, P2, "ee")
    assert g.energy == pytest.approx(2 * P2.omega[0], abs=1e-12)
    assert abs(g.state[sp.bare_ground_index()]) == pytest.approx(1.0)


def test_zero_eigenvalue_on_decoupled_column():
    # mu13 = 0 leaves the bare state as an isolated zero-energy eigenvector
    sp = build_space(2, FockCutoffs(14, 14))
    p = P2.with_dimensionless(0.0, 1.5)
    it = exact.ground_state(sp, p, "ee", "iterative")
    de = exact.ground_state(sp, p, "ee", "dense")
    assert it.method == "iterative"
    assert it.energy == pytest.approx(de.energy, abs=1e-10)


def test_rabi_lowering():
    p = ModelParams(omega=(0.0, 0.4, 1.0), Omega=(1.0, 1.0), n_atoms=1)
    sp = build_space(1, FockCutoffs(20, 0))
    for mu in (0.05, 0.3, 0.8):
        g = exact.ground_state(sp, p.with_(mu_a=mu), "full", "dense")
        assert g.energy < p.omega[0]


@pytest.mark.parametrize("seed", range(10))
def test_iterative_matches_dense(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    p = ModelParams.preset(n_atoms=n).with_dimensionless(*rng.uniform(0, 3, 2))
    sp = build_space(n, FockCutoffs(int(rng.integers(6, 14)), int(rng.integers(6, 14))))
    assert sp.dim < 2000 * 4
    sector = ["ee", "eo", "oe", "oo"][seed % 4]
    a = exact.ground_state(sp, p, sector, "iterative")
    b = exact.ground_state(sp, p, sector, "dense")
    assert abs(a.energy - b.energy) < 1e-10
    assert a.residual < 1e-9 * max(1, abs(a.energy))
    assert abs(abs(a.state @ b.state) - 1) < 1e-8


def test_sectors_cover_full_ground():
    p = P2.with_dimensionless(1.3, 2.1)
    sp = build_space(2, FockCutoffs(18, 18))
    full = exact.ground_state(sp, p, "full")
    sectors = [exact.ground_state(sp, p, s).energy for s in ("ee", "eo", "oe", "oo")]
    assert min(sectors) == pytest.approx(full.energy, abs=1e-10)
    assert exact.ground_state(sp, p, "auto").energy == pytest.approx(full.energy, abs=1e-10)


def test_converge_zero_coupling_immediately():
    c = exact.converge_cutoffs(P2)
    assert c.iterations == 2
    assert c.delta_energy < 1e-8 and c.edge < 1e-8


def test_converge_photon_number_vs_mean_field():
    p = P2.with_dimensionless(3.0, 0.0)
    c = exact.converge_cutoffs(p, "ee")
    assert c.delta_energy < 1e-8 and c.edge < 1e-8
    nu1, _ = exact.mean_photons(c.solution.space, c.solution.state)
    r1 = ground_solution(p).trial.r1
    assert abs(nu1 - 2 * r1**2) < 0.1 * 2 * r1**2


def test_converge_bad_tol():
    with pytest.raises(ValueError):
        exact.converge_cutoffs(P2, tol=0.0)


def test_dimension_ceiling():
    with pytest.raises(exact.ConvergenceError):
        exact.converge_cutoffs(P2.with_dimensionless(2.5, 2.5), max_dim=3000)


def test_rdms():
    p = P2.with_dimensionless(1.6, 1.4)
    c = exact.converge_cutoffs(p, "ee")
    rho_m = exact.matter_rdm(c.solution.space, c.solution.state)
    rho_f = exact.field_rdm(c.solution.space, c.solution.state)
    assert np.trace(rho_m) == pytest.approx(1.0, abs=1e-12)
    assert linear_entropy(rho_m) == pytest.approx(linear_entropy(rho_f), abs=1e-10)
    one = one_atom_from_matter(rho_m, 2)
    assert np.abs(one - np.diag(np.diag(one))).max() < 1e-10


def test_random_bipartite_purity():
    rng = np.random.default_rng(3)
    sp = build_space(2, FockCutoffs(2, 1))
    psi = rng.standard_normal(sp.dim)
    psi /= np.linalg.norm(psi)
    a, b = exact.matter_rdm(sp, psi), exact.field_rdm(sp, psi)
    assert np.trace(a @ a) == pytest.approx(np.trace(b @ b), abs=1e-12)


def test_energy_monotone_in_coupling():
    es = [exact.converge_cutoffs(P2.with_dimensionless(x, 0.8), "ee").solution.energy for x in np.linspace(0, 2.5, 8)]
    assert np.all(np.diff(es) <= 1e-10)
