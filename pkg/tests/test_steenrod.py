import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from f2homalg.steenrod.ext import (
    d_squared_violations, exactness_violations, ext_chart, minimality_violations,
    product_action, product_action_by_lifting,
)
from f2homalg.steenrod.milnor import (
    ExteriorAlgebra, a1_algebra, milnor_degree, milnor_product, steenrod_algebra,
)
from f2homalg.steenrod.modules import (
    ModuleError, a1_free_module, a1_ij_module, c2_module, module_from_generator_action,
    trivial_module,
)
from f2homalg.steenrod.resolution import WindowError, minimal_resolution

A = steenrod_algebra()
IJ = [(0, 0), (0, 1), (1, 0), (1, 1)]


@pytest.fixture(scope="module")
def resolutions():
    return {ij: minimal_resolution(a1_ij_module(*ij, A), 16, 52) for ij in IJ}


def test_small_products():
    assert milnor_product((1,), (1,)) == frozenset()
    assert milnor_product((2,), (2,)) == frozenset([(1, 1)])
    assert milnor_product((1,), (2,)) == frozenset([(3,)])
    assert milnor_product((2,), (1,)) == frozenset([(3,), (0, 1)])


def test_tensor_matches_python_product():
    for i in range(10):
        for j in range(10):
            t = A.tensor(i, j)
            for a, x in enumerate(A.basis(i)):
                for b, y in enumerate(A.basis(j)):
                    got = {A.basis(i + j)[c] for c in np.flatnonzero(t[a, b])}
                    assert got == set(milnor_product(x, y))


def _elements(n=14):
    return [(d, x) for d in range(n + 1) for x in A.basis(d)]


_ELTS = _elements()


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(_ELTS), st.sampled_from(_ELTS), st.sampled_from(_ELTS))
def test_milnor_associative(x, y, z):
    def mul(us, v):
        out = set()
        for u in us:
            out ^= set(milnor_product(u, v))
        return out

    def lmul(u, vs):
        out = set()
        for v in vs:
            out ^= set(milnor_product(u, v))
        return out

    assert mul(milnor_product(x[1], y[1]), z[1]) == lmul(x[1], milnor_product(y[1], z[1]))
    for r in milnor_product(x[1], y[1]):
        assert milnor_degree(r) == x[0] + y[0]


def test_a1_basis():
    b = a1_algebra()
    assert [b.dim(n) for n in range(8)] == [1, 1, 1, 2, 1, 1, 1, 0]


def test_indecomposables_of_full_algebra():
    assert [d for d, _ in A.generators_up_to(9)] == [1, 2, 4, 8]


def test_koszul_tower():
    r = minimal_resolution(trivial_module(ExteriorAlgebra([1])), 6, 10)
    assert [[g.degree for g in stage] for stage in r.gens] == [[s] for s in range(7)]


def test_stage_one_generators_full_algebra():
    r = minimal_resolution(trivial_module(A), 2, 9)
    assert [g.degree for g in r.generators(1) if g.degree <= 8] == [1, 2, 4, 8]


def test_a1_modules_are_modules():
    for ij in IJ:
        m = a1_ij_module(*ij, A)
        assert m.check_associativity()
        assert m.total_dim() == 8


def test_sq4_parameters():
    m = a1_ij_module(1, 0, A)
    sq4 = A.index(4, (4,))
    assert m.act_tensor(4, 0)[sq4, 0, 0] == 1
    assert m.act_tensor(4, 2)[sq4, 0, 0] == 0
    assert a1_ij_module(0, 1, A).act_tensor(4, 2)[sq4, 0, 0] == 1


def test_inconsistent_action_rejected():
    # Sq1 Sq1 = 0 must hold; a chain x0 -> x1 -> x2 under Sq1 violates it
    with pytest.raises(ModuleError):
        module_from_generator_action(A, ["a", "b", "c"], [0, 1, 2],
                                     {(1,): {0: [1], 1: [2]}, (2,): {}})


@pytest.mark.parametrize("ij", IJ)
def test_adams_stem_totals(resolutions, ij):
    chart = ext_chart(resolutions[ij])
    totals = [chart.stem_total(n) for n in (12, 18, 19, 22, 23)]
    assert totals == ([1, 2, 2, 3, 4] if ij[0] == 0 else [1, 2, 2, 2, 3])
    assert chart.dim(0, 0) == 1


def test_resolution_timing():
    start = time.perf_counter()
    minimal_resolution(a1_ij_module(1, 1, A), 16, 52)
    assert time.perf_counter() - start < 60


def test_certified_window(resolutions):
    r = resolutions[(0, 0)]
    with pytest.raises(WindowError):
        r.ext_dim(16, 20)
    with pytest.raises(WindowError):
        r.ext_dim(2, 52)
    assert r.ext_dim(0, 0) == 1


def test_window_monotone():
    m = a1_ij_module(0, 0, A)
    small = ext_chart(minimal_resolution(m, 6, 24))
    big = ext_chart(minimal_resolution(m, 9, 32))
    for (n, s), d in small.dims.items():
        assert big.dim(n, s) == d
    for n in range(-1, 24):
        for s in range(6):
            if small.certified(n, s):
                assert small.dims.get((n, s), 0) == big.dims.get((n, s), 0)


def test_resolution_invariants():
    r = minimal_resolution(a1_ij_module(0, 1, A), 8, 30)
    assert d_squared_violations(r) == []
    assert minimality_violations(r) == []
    assert exactness_violations(r) == []


def test_c2_resolution():
    r = minimal_resolution(c2_module(A), 4, 12)
    chart = ext_chart(r)
    assert chart.dim(0, 0) == 1 and chart.dim(0, 1) == 0 and chart.dim(1, 1) == 1


def test_products_two_lifts_agree():
    r = minimal_resolution(a1_ij_module(0, 0, A), 8, 30)
    for i in (0, 1, 2):
        p = product_action(r, i)
        for seed in (1, 2):
            q = product_action_by_lifting(r, i, seed=seed)
            assert p.entries.keys() == q.entries.keys()
            for k in p.entries:
                assert np.array_equal(p.entries[k], q.entries[k])


def test_h0_kills_bottom_cell():
    r = minimal_resolution(a1_ij_module(1, 0, A), 4, 10)
    assert product_action(r, 0).entries[(0, 0)].size == 0


def test_h0_h1_zero_over_a1():
    r = minimal_resolution(trivial_module(a1_algebra()), 4, 10)
    h0 = product_action(r, 0)
    assert [g.degree for g in r.generators(1)] == [1, 2]
    assert not h0.entries[(1, 2)].any()
    assert h0.entries[(0, 0)].tolist() == [[1]]


def test_identity_lift():
    r = minimal_resolution(trivial_module(A), 3, 8)
    assert product_action(r, 1).entries[(0, 0)].tolist() == [[1]]


def test_a1_free_over_a1():
    r = minimal_resolution(a1_free_module(a1_algebra()), 4, 16)
    chart = ext_chart(r)
    assert chart.dims == {(0, 0): 1}
