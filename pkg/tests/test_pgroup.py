import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_files
from noether.cases5 import CATALOG
from noether.decomp import check_chain_identity
from noether.library import abelian, heisenberg, modular
from noether.oracle import rewrite
from noether.pgroup import (PGroup, PresentationError, abelian_basis, abelian_invariants,
                            conjugate_closure, is_normal, lower_central_series,
                            power_subgroup, subgroup_closure)
from noether.presfile import load_presentation


def test_collect_swaps_with_commutator(heis):
    # g2 g1 = g1 g2 [g2, g1] = g1 g2 g3
    assert heis.collect([(1, 1), (0, 1)]) == (1, 1, 1)
    assert rewrite(heis, [1, 0]) == (1, 1, 1)


def test_collect_rejects_bad_letters(heis):
    with pytest.raises(PresentationError):
        heis.collect([(3, 1)])
    with pytest.raises(PresentationError):
        heis.collect(["x"])


def test_lcs_heisenberg(heis):
    series = lower_central_series(heis)
    assert [S.order for S in series] == [27, 3, 1]
    assert series[1].same(subgroup_closure(heis, [(0, 0, 1)]))


def test_lcs_phi9_long():
    G, _ = next(e for e in CATALOG if e.name == "Phi9(1^5)").builder(3)
    assert len(lower_central_series(G)) - 1 >= 4


def test_closure_order(heis):
    assert subgroup_closure(heis, [(0, 1, 0), (0, 0, 1)]).order == 9


def test_power_subgroup_of_cyclic(mod27):
    C9 = subgroup_closure(mod27, [(0, 1, 0)])
    assert C9.order == 9
    P = power_subgroup(C9)
    assert P.order == 3 and (0, 0, 1) in P


def test_not_normal(heis):
    assert not is_normal(subgroup_closure(heis, [(0, 1, 0)]), heis)
    assert is_normal(subgroup_closure(heis, [(0, 1, 0), (0, 0, 1)]), heis)


def test_invariants(heis, mod27):
    assert abelian_invariants(subgroup_closure(heis, [(0, 1, 0), (0, 0, 1)])) == [3, 3]
    assert abelian_invariants(subgroup_closure(mod27, [(0, 1, 0)])) == [9]
    A = abelian(3, [2, 1, 1])
    assert abelian_invariants(A.whole) == [9, 3, 3]


def test_conjugate_closure(heis, mod27):
    assert conjugate_closure(heis, (0, 1, 0), (1, 0, 0)).order == 9
    assert conjugate_closure(heis, (0, 0, 1), (1, 0, 0)).order == 3
    assert conjugate_closure(mod27, (0, 1, 0), (1, 0, 0)).order == 9


def test_inconsistent_presentation_rejected():
    # g1^3 = g2 with g2 central of order 3 but [g2, g1] = g3 contradicts g1 commuting with itself
    with pytest.raises(PresentationError):
        PGroup.from_relations(3, 3, {0: (0, 1, 0)}, {(1, 0): (0, 0, 1)})


def _assoc_ok(G, triples):
    return all(G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c)) for a, b, c in triples)


@pytest.mark.parametrize("path", corpus_files(3)[:12], ids=lambda p: p.stem)
def test_collection_matches_rewriting(path):
    G = load_presentation(path).group
    els = G.elements()
    for x, y in itertools.islice(itertools.product(els[::7], els[::11]), 200):
        word = [i for i, e in enumerate(x) for _ in range(e)] + \
               [i for i, e in enumerate(y) for _ in range(e)]
        assert rewrite(G, word) == G.mul(x, y)


elem = st.lists(st.integers(0, 2), min_size=3, max_size=3).map(tuple)


@settings(max_examples=60, deadline=None)
@given(elem, elem, elem)
def test_heisenberg_group_axioms(a, b, c):
    G = heisenberg(3)
    assert _assoc_ok(G, [(a, b, c)])
    assert G.mul(a, G.inv(a)) == G.identity
    assert G.pow(a, 3) == G.identity


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 8), min_size=3, max_size=3).map(tuple),
       st.lists(st.integers(0, 8), min_size=3, max_size=3).map(tuple))
def test_modular_axioms(a, b):
    G = modular(3)
    a = tuple(x % 3 for x in a)
    b = tuple(x % 3 for x in b)
    assert G.element_order(a) in (1, 3, 9)
    assert G.mul(G.inv(b), G.mul(a, b)) == G.conj(a, b)


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_abelian_basis_is_direct(data):
    exps = data.draw(st.lists(st.integers(1, 2), min_size=1, max_size=3))
    A = abelian(3, exps)
    basis = abelian_basis(A.whole)
    orders = [A.element_order(b) for b in basis]
    assert sorted(orders, reverse=True) == abelian_invariants(A.whole)
    prod = 1
    for o in orders:
        prod *= o
    assert prod == A.order


@pytest.mark.parametrize("p", [3, 5])
def test_chain_identity_over_catalog(p):
    seen = 0
    for entry in CATALOG:
        if entry.builder is None:
            continue
        try:
            G, named = entry.builder(p)
        except ValueError:
            continue  # family inlined at p = 3 only
        alpha = named.get("alpha")
        if alpha is None:
            continue
        for b in G.elements():
            if b == G.identity:
                continue
            ok, _ = check_chain_identity(G, b, alpha)
            assert ok is not False, (entry.name, b)
            seen += 1
    assert seen > 0
