import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambdaqpt.hilbert import (
    AtomBasisState,
    FockCutoffs,
    atom_dimension,
    build_space,
    default_cutoff,
    enumerate_atom_basis,
    sector_indices,
)


def test_single_atom_basis():
    assert enumerate_atom_basis(1) == [AtomBasisState(1, 0, 0), AtomBasisState(0, 1, 0), AtomBasisState(0, 0, 1)]


@pytest.mark.parametrize("n, d", [(2, 6), (4, 15)])
def test_basis_size(n, d):
    basis = enumerate_atom_basis(n)
    assert len(basis) == d
    assert all(s.total == n for s in basis)


@pytest.mark.parametrize("n", range(1, 9))
def test_dimension_closed_form(n):
    assert len(enumerate_atom_basis(n)) == atom_dimension(n) == (n + 1) * (n + 2) // 2


def test_basis_order_descending_n1():
    basis = [tuple(s) for s in enumerate_atom_basis(3)]
    assert basis == sorted(basis, reverse=True)
    assert basis[0] == (3, 0, 0)


def test_zero_atoms_rejected():
    with pytest.raises(ValueError):
        enumerate_atom_basis(0)
    with pytest.raises(ValueError):
        build_space(0, (1, 1))


def test_dimensions():
    assert build_space(2, FockCutoffs(0, 0)).dim == 6
    assert build_space(2, FockCutoffs(10, 10)).dim == 726


def test_negative_cutoff_rejected():
    with pytest.raises(ValueError):
        FockCutoffs(-1, 3)


def test_dimension_guard():
    with pytest.raises(ValueError):
        build_space(6, FockCutoffs(1000, 1000))


def test_bare_ground_parity():
    sp = build_space(2, FockCutoffs(3, 3))
    i = sp.index(0, 0, (2, 0, 0))
    assert i == sp.bare_ground_index() == 0
    assert sp.sector_of(i) == "ee"
    assert i in sector_indices(sp, "e", "e")


def test_sector_sizes_small():
    sp = build_space(2, FockCutoffs(1, 1))
    sizes = [len(sector_indices(sp, a, b)) for a, b in itertools.product("eo", "eo")]
    assert sum(sizes) == 24


@given(n=st.integers(1, 4), c1=st.integers(0, 4), c2=st.integers(0, 4))
@settings(max_examples=40, deadline=None)
def test_partition_and_roundtrip(n, c1, c2):
    sp = build_space(n, FockCutoffs(c1, c2))
    parts = np.concatenate([sector_indices(sp, a, b) for a, b in itertools.product("eo", "eo")])
    assert np.array_equal(np.sort(parts), np.arange(sp.dim))
    for i in range(sp.dim):
        nu1, nu2, atom = sp.labels(i)
        assert sp.index(nu1, nu2, atom) == i


@given(n=st.integers(1, 4), c1=st.integers(0, 3), c2=st.integers(0, 3))
@settings(max_examples=30, deadline=None)
def test_lambda_parity_formulas(n, c1, c2):
    sp = build_space(n, FockCutoffs(c1, c2))
    for i in range(sp.dim):
        nu1, nu2, (n1, n2, n3) = sp.labels(i)
        assert sp.par_m[i] == (nu1 + nu2 + n3) % 2
        assert sp.par_k[i] == (nu2 + n1 + n3) % 2


def test_default_cutoff_rule():
    assert default_cutoff(0.0) == 12
    assert default_cutoff(3.0) == 37
    assert default_cutoff(-3.0) == 37
