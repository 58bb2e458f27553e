import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaqpt import exact, sas
from lambdaqpt.hilbert import FockCutoffs, build_space, sector_indices
from lambdaqpt.meanfield import TrialConfiguration, ground_solution, region_energy
from lambdaqpt.operators import ModelParams, parity_operator

P2 = ModelParams.preset(n_atoms=2)
SPACE = build_space(2, FockCutoffs(20, 20))


def test_matter_coherent_examples():
    assert np.allclose(sas.expand_matter_coherent((1, 0, 0), 2), [1, 0, 0, 0, 0, 0])
    v = sas.expand_matter_coherent((1, 0, 1), 2)
    basis = [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    amp = dict(zip(basis, v))
    assert amp[(2, 0, 0)] ** 2 == pytest.approx(0.25)
    assert amp[(0, 0, 2)] ** 2 == pytest.approx(0.25)
    assert amp[(1, 0, 1)] == pytest.approx(1 / math.sqrt(2))
    assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        sas.expand_matter_coherent((0, 0, 0), 2)


gammas = st.tuples(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2)).filter(lambda g: np.dot(g, g) > 1e-2)


@given(g=gammas, h=gammas, n=st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_matter_overlap_power_law(g, h, n):
    g, h = np.array(g), np.array(h)
    lhs = sas.expand_matter_coherent(g, n) @ sas.expand_matter_coherent(h, n)
    rhs = (g @ h / (np.linalg.norm(g) * np.linalg.norm(h))) ** n
    assert abs(lhs - rhs) < 1e-12


@given(a=st.floats(-3, 3), b=st.floats(-3, 3))
@settings(max_examples=60, deadline=None)
def test_field_overlap_gaussian(a, b):
    lhs = sas.expand_field_coherent(a, 40) @ sas.expand_field_coherent(b, 40)
    assert abs(lhs - math.exp(-0.5 * (a - b) ** 2)) < 1e-8


def test_field_coherent_basics():
    assert np.allclose(sas.expand_field_coherent(0.0, 5), [1, 0, 0, 0, 0, 0])
    f = sas.expand_field_coherent(2.3, 40)
    assert (np.arange(41) * f * f).sum() == pytest.approx(2.3**2, abs=1e-8)
    with pytest.raises(ValueError):
        sas.expand_field_coherent(4.0, 10)


def test_bare_projection_and_vanishing():
    bare = TrialConfiguration()
    st_ = sas.build_sas_state(SPACE, bare, "ee")
    assert abs(st_.vector[SPACE.bare_ground_index()]) == pytest.approx(1.0)
    with pytest.raises(sas.VanishingProjectionError):
        sas.build_sas_state(SPACE, bare, "oo")


@given(r1=st.floats(0, 1.5), r2=st.floats(0, 1.5), th=st.floats(0.05, 1.5), ph=st.floats(0.05, 1.5),
       sector=st.sampled_from(["ee", "eo", "oe", "oo"]))
@settings(max_examples=30, deadline=None)
def test_sas_parity_eigenstates(r1, r2, th, ph, sector):
    sp = build_space(2, FockCutoffs(30, 30))
    trial = TrialConfiguration.from_angles(r1, r2, th, ph)
    s = sas.build_sas_state(sp, trial, sector)
    want = [1 - 2 * int(c == "o") for c in sector]
    for which, sign in zip(("Pi1", "Pi2"), want):
        assert np.linalg.norm(parity_operator(sp, which) @ s.vector - sign * s.vector) < 1e-10
    out = np.setdiff1d(np.arange(sp.dim), sector_indices(sp, *sector))
    assert np.linalg.norm(s.vector[out]) < 1e-10


def test_zero_coupling_energy():
    assert sas.sas_energy(SPACE, P2, TrialConfiguration(), "ee") == pytest.approx(P2.omega[0])
    m = sas.minimize_sas(P2, "ee")
    assert m.energy_per_atom == pytest.approx(P2.omega[0], abs=1e-12)
    assert m.trial.r1 == pytest.approx(0, abs=1e-4) and m.trial.r2 == pytest.approx(0, abs=1e-4)


@pytest.mark.parametrize("sector", ["ee", "eo", "oe", "oo"])
def test_factorised_matches_full_vector(sector):
    p = P2.with_dimensionless(1.7, 1.1)
    trial = TrialConfiguration.from_angles(0.6, 0.4, 0.8, 0.6)
    ev = sas.SasEvaluator(p, FockCutoffs(20, 20))
    full = sas.sas_energy(SPACE, p, trial, sector)
    assert ev.energy(trial, sector) == pytest.approx(full, abs=1e-12)
    rdm = sas.sas_matter_rdm(sas.build_sas_state(SPACE, trial, sector))
    assert np.abs(ev.matter_rdm(trial, sector) - rdm).max() < 1e-12
    x = sas.trial_to_vector(trial)
    fast = ev.objective(sector)(x)
    assert fast == pytest.approx(full, abs=1e-12)


def test_rdm_properties():
    s = sas.build_sas_state(SPACE, TrialConfiguration.from_angles(0.7, 0.5, 0.9, 0.4), "ee")
    rho = sas.sas_matter_rdm(s)
    assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(rho, rho.T)
    assert np.linalg.eigvalsh(rho).min() > -1e-12
    prod = exact.matter_rdm(SPACE, sas.product_state(SPACE, TrialConfiguration.from_angles(0.7, 0.5, 0.9, 0.4)))
    assert np.linalg.matrix_rank(prod, tol=1e-10) == 1


def test_minimiser_pure_s13_character():
    m = sas.minimize_sas(P2.with_dimensionless(2.0, 0.1), "ee")
    # finite-N projection leaves only a small admixture of the mode-2 / level-2 character
    assert m.trial.r2 < 0.1 * m.trial.r1
    assert abs(m.trial.unit_gamma[1]) < 0.1 * abs(m.trial.unit_gamma[2])


def test_deep_collective_near_mean_field():
    p = P2.with_dimensionless(3.0, 0.0)
    m = sas.minimize_sas(p, "ee")
    e = region_energy(p, "S13")
    assert abs(m.energy_per_atom - e) < 0.02 * abs(e)


@pytest.mark.parametrize("seed", range(6))
def test_variational_bounds(seed):
    rng = np.random.default_rng(100 + seed)
    p = P2.with_dimensionless(*rng.uniform(0, 3, 2))
    m = sas.minimize_sas(p, "ee")
    e_mf = ground_solution(p).energy_per_atom
    e_ex = exact.converge_cutoffs(p, "ee").solution.energy_per_atom
    assert e_ex <= m.energy_per_atom + 1e-10
    assert m.energy_per_atom <= e_mf + 1e-9


def test_best_sector_even_n_is_ee():
    for x in [(0.5, 0.5), (1.5, 1.2), (2.5, 0.5), (0.5, 2.5)]:
        assert sas.best_sector(P2.with_dimensionless(*x)).sector == "ee"


def test_other_configs_rejected():
    with pytest.raises(NotImplementedError):
        sas.SasEvaluator(ModelParams(config="Xi"))
    with pytest.raises(NotImplementedError):
        sas.build_sas_state(build_space(2, FockCutoffs(2, 2), "V"), TrialConfiguration(), "ee")


def test_characters():
    assert np.array_equal(sas.characters("ee"), [1, 1, 1, 1])
    assert np.array_equal(sas.characters("oe"), [1, -1, 1, -1])
