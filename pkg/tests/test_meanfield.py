import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaqpt import meanfield as mf
from lambdaqpt.operators import ModelParams
from lambdaqpt.qinfo import linear_entropy

UNIT = ModelParams(omega=(0.0, 0.2, 1.0), Omega=(1.0, 1.0), mu_a=1.0)


def test_normal_energy_is_omega1():
    p = ModelParams(omega=(-0.4, 0.2, 1.0)).with_dimensionless(0.3, 0.7)
    assert mf.energy_surface(p, mf.TrialConfiguration()) == pytest.approx(-0.4)


def test_s13_point_and_energy():
    pts = {s.region: s for s in mf.critical_points(UNIT)}
    s13 = pts["S13"]
    assert s13.trial.rho3 == pytest.approx(math.sqrt(3 / 5), abs=1e-12)
    assert s13.trial.r1 == pytest.approx(0.968246, abs=1e-6)
    assert s13.energy_per_atom == pytest.approx(-0.5625, abs=1e-12)
    assert mf.energy_surface(UNIT, s13.trial) == pytest.approx(-0.5625, abs=1e-12)


def test_continuous_onset():
    p = ModelParams.preset().with_dimensionless(1.0, 0.0)
    s13 = {s.region: s for s in mf.critical_points(p)}["S13"]
    assert s13.trial.rho3 == 0.0
    assert mf.ground_solution(p).region == "S13"


@pytest.mark.parametrize("config", ["Lambda", "Xi", "V"])
@pytest.mark.parametrize("x", [(1.5, 0.3), (0.4, 2.2), (2.5, 2.5)])
def test_critical_points_are_stationary(config, x):
    p = ModelParams(config=config).with_dimensionless(*x)
    for sol in mf.critical_points(p):
        t = sol.trial
        base = [t.r1, t.r2, *t.gamma]
        h = 1e-6
        for i in range(5):
            up, dn = list(base), list(base)
            up[i] += h
            dn[i] -= h
            g = (mf.energy_surface(p, mf.TrialConfiguration(up[0], up[1], tuple(up[2:])))
                 - mf.energy_surface(p, mf.TrialConfiguration(dn[0], dn[1], tuple(dn[2:])))) / (2 * h)
            assert abs(g) < 1e-8
        assert mf.energy_surface(p, t) == pytest.approx(sol.energy_per_atom, abs=1e-12)


@pytest.mark.parametrize("x, region", [((0.5, 0.5), "N"), ((0.99, 0.2), "N"), ((2.0, 0.0), "S13"), ((0.0, 3.0), "S23")])
def test_ground_regions(x, region):
    assert mf.ground_solution(ModelParams.preset().with_dimensionless(*x)).region == region


def test_triple_point_closed_form_and_oracle():
    p = ModelParams.preset("fig2")
    golden = (1 + math.sqrt(5)) / 2
    assert mf.triple_point(p) == pytest.approx((1.0, golden), abs=1e-12)
    xa, xb = mf.triple_point_oracle(p)
    assert abs(xa - 1.0) < 1e-8 and abs(xb - golden) < 1e-8
    q = p.with_dimensionless(1.0, golden)
    assert q.mu_a == pytest.approx(0.5)
    assert q.mu_b == pytest.approx((1 + math.sqrt(5)) / 5)
    # the collective-collective curve starts at the triple point
    assert mf.collective_boundary(p, 1.0) == pytest.approx(golden, abs=1e-12)


@pytest.mark.parametrize("config", ["Lambda", "Xi", "V"])
def test_separatrix_energy_equality(config):
    p = ModelParams(config=config)
    for b in mf.BOUNDARIES[config]:
        pts = mf.separatrix(p, b)
        assert pts.shape == (512, 2)
        worst = max(abs(mf.boundary_energy_gap(p, b, xa, xb)) for xa, xb in pts)
        assert worst < 1e-10


def test_separatrix_examples():
    p = ModelParams.preset()
    assert np.allclose(mf.separatrix(p, "N-S13")[:, 0], 1.0)
    v = ModelParams(config="V")
    xa = mf.separatrix(v, "N-S12")[0, 0]
    xb = mf.separatrix(v, "N-S13")[0, 1]
    assert v.with_dimensionless(xa, 0).mu_a == pytest.approx(0.5 * math.sqrt(v.Omega[0] * 0.2))
    assert v.with_dimensionless(0, xb).mu_b == pytest.approx(0.5 * math.sqrt(v.Omega[1] * 1.0))
    with pytest.raises(ValueError):
        mf.separatrix(p, "S12-S23")
    with pytest.raises(ValueError):
        mf.collective_boundary(p, 0.5)


def test_transition_orders():
    p = ModelParams.preset()

    def e(a, b):
        return mf.ground_solution(p.with_dimensionless(a, b)).energy_per_atom

    h = 1e-4
    # N -> S13 along x23 = 0.5: continuous first derivative, jump in the second
    d_lo = (e(1.0, 0.5) - e(1.0 - h, 0.5)) / h
    d_hi = (e(1.0 + h, 0.5) - e(1.0, 0.5)) / h
    assert abs(d_lo - d_hi) < 1e-3
    c_lo = (e(1 - 2 * h, 0.5) - 2 * e(1 - h, 0.5) + e(1.0, 0.5)) / h**2
    c_hi = (e(1 + 2 * h, 0.5) - 2 * e(1 + h, 0.5) + e(1.0, 0.5)) / h**2
    assert abs(c_hi - c_lo) > 0.1
    # S13 -> S23 across the collective line at x13 = 2: slope jumps
    xb = float(mf.collective_boundary(p, 2.0))
    s_lo = (e(2.0, xb - h) - e(2.0, xb - 2 * h)) / h
    s_hi = (e(2.0, xb + 2 * h) - e(2.0, xb + h)) / h
    assert abs(s_hi - s_lo) > 0.05


def test_rho3_monotone():
    vals = [{s.region: s for s in mf.critical_points(ModelParams.preset().with_dimensionless(x, 0))}["S13"].trial.rho3
            for x in np.linspace(1.0, 40.0, 50)]
    assert np.all(np.diff(vals) > 0) and vals[-1] < 1.0


def test_separatrix_crossings():
    p = ModelParams.preset()
    assert mf.separatrix_crossings(p, "x_a", 0.5, 0.0, 3.0) == pytest.approx([1.0], abs=1e-9)
    xs = mf.separatrix_crossings(p, "x_b", 2.0, 0.0, 3.0)
    assert xs == pytest.approx([float(mf.collective_boundary(p, 2.0))], abs=1e-9)


def test_coherent_rdm_examples():
    assert np.allclose(mf.coherent_one_atom_rdm(mf.TrialConfiguration.from_rho(0, 0, 0, 0)), np.diag([1, 0, 0]))
    rho = mf.coherent_one_atom_rdm(mf.TrialConfiguration.from_rho(0.3, 0, 0, 1))
    assert rho[0, 0] == pytest.approx(0.5) and rho[2, 2] == pytest.approx(0.5)
    assert abs(rho[0, 2]) == pytest.approx(0.5)
    assert np.trace(rho @ rho) == pytest.approx(1.0)


@given(g=st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3)).filter(lambda g: sum(v * v for v in g) > 1e-3))
@settings(max_examples=100, deadline=None)
def test_purity_condition(g):
    rho = mf.coherent_one_atom_rdm(mf.TrialConfiguration(0.0, 0.0, g))
    assert abs(mf.purity_condition_residual(rho)) < 1e-12
    assert linear_entropy(rho) < 1e-12


@pytest.mark.parametrize("config", ["Lambda", "Xi", "V"])
def test_region_ground_purity_pairs(config):
    p = ModelParams(config=config).with_dimensionless(2.0, 1.2)
    sol = mf.ground_solution(p)
    assert abs(mf.purity_condition_residual(mf.coherent_one_atom_rdm(sol.trial), config)) < 1e-12


def test_trial_angles_roundtrip():
    t = mf.TrialConfiguration.from_angles(0.4, 0.2, 1.1, 0.3)
    th, ph = t.angles()
    assert (th, ph) == pytest.approx((1.1, 0.3))
    assert t.alphas(4) == pytest.approx((0.8, 0.4))
    with pytest.raises(ValueError):
        mf.TrialConfiguration(0, 0, (0, 0, 0))
