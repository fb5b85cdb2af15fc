import pytest

from conftest import corpus_files
from noether.cases5 import catalog_entry
from noether.decomp import (HypothesisRefusal, check_lcs_condition, check_power_condition,
                            decompose_H, find_beta_chain, verify_decomposition)
from noether.library import abelian, heisenberg, modular
from noether.pgroup import (PreconditionError, abelian_invariants, default_alpha, default_H,
                            is_normal, subgroup_closure)
from noether.presfile import load_presentation


def test_lcs_condition_examples(heis):
    assert check_lcs_condition(abelian(3, [2, 1]))
    assert check_lcs_condition(heis)
    G, _ = catalog_entry("Phi9(1^5)").builder(3)
    assert not check_lcs_condition(G)


def test_power_condition_exponent_p(heis):
    H = subgroup_closure(heis, [(0, 1, 0), (0, 0, 1)])
    assert check_power_condition(heis, H, (1, 0, 0)) == (True, [])


def test_power_condition_modular(mod27):
    H = subgroup_closure(mod27, [(0, 1, 0)])
    assert check_power_condition(mod27, H, (1, 0, 0)) == (True, [])


def test_power_condition_violator(cond2_violator):
    G, H, a = cond2_violator.group, cond2_violator.H(), cond2_violator.alpha
    ok, bad = check_power_condition(G, H, a)
    assert not ok and bad == [0, 1]
    with pytest.raises(HypothesisRefusal) as exc:
        decompose_H(G, H, a)
    assert exc.value.reason == "condition-(2)-failed"


def test_power_condition_preconditions(heis):
    with pytest.raises(PreconditionError):
        check_power_condition(heis, heis.whole, (1, 0, 0))
    H = subgroup_closure(heis, [(0, 1, 0), (0, 0, 1)])
    with pytest.raises(PreconditionError):
        check_power_condition(heis, H, (0, 1, 0))


def test_elementary_abelian_H():
    G = abelian(3, [1, 1, 1])
    H = subgroup_closure(G, G.gens[1:])
    res = decompose_H(G, H, G.gen(0))
    assert res.t == 0 and res.r >= 1
    assert all(f.kind == "N" for f in res.factors)
    assert verify_decomposition(res) == []


def test_heisenberg_decomposition(heis):
    res = decompose_H(heis, subgroup_closure(heis, [(0, 1, 0), (0, 0, 1)]), (1, 0, 0))
    assert res.s == 1
    (f,) = res.factors
    assert list(f.invariants) == [3, 3]
    assert res.i_j == [1] and res.k_j == [1]
    assert f.chain == ((0, 1, 0), (0, 0, 1))
    assert verify_decomposition(res) == []


def test_modular_decomposition(mod27):
    res = decompose_H(mod27, subgroup_closure(mod27, [(0, 1, 0)]), (1, 0, 0))
    assert res.t == 1 and res.k_j == [0]
    assert list(res.factors[0].invariants) == [9]


def test_beta_chain_examples(heis):
    assert find_beta_chain(heis, (0, 0, 1), (1, 0, 0)) == [(0, 0, 1)]
    assert find_beta_chain(heis, (0, 1, 0), (1, 0, 0)) == [(0, 1, 0), (0, 0, 1)]


def test_beta_chain_too_long():
    G, named = catalog_entry("Phi9(1^5)").builder(3)
    with pytest.raises(HypothesisRefusal) as exc:
        find_beta_chain(G, named["alpha1"], named["alpha"])
    assert exc.value.reason == "condition-(1)-violated"


def test_refusal_on_long_series():
    G, _ = catalog_entry("Phi9(1^5)").builder(3)
    H = default_H(G)
    with pytest.raises(HypothesisRefusal) as exc:
        decompose_H(G, H)
    assert exc.value.reason.startswith("condition-(1)")


def _check_result(res):
    G, p = res.group, res.group.p
    assert verify_decomposition(res) == []
    for f in res.factors:
        assert is_normal(f.subgroup, G)
        inv = abelian_invariants(f.subgroup)
        assert all(q == p for q in inv[1:])
        for b in f.chain[1:]:
            assert G.element_order(b) <= p


@pytest.mark.parametrize("path", corpus_files(3), ids=lambda p: p.stem)
def test_only_if_consistency(path):
    pres = load_presentation(path)
    G = pres.group
    try:
        H = pres.H() or default_H(G)
        a = pres.alpha if pres.alpha is not None else default_alpha(G, H)
    except PreconditionError:
        pytest.skip("no abelian subgroup of index p")
    c1 = check_lcs_condition(G)
    c2, _ = check_power_condition(G, H, a)
    try:
        res = decompose_H(G, H, a)
    except HypothesisRefusal:
        assert not (c1 and c2)
        return
    assert c1 and c2
    _check_result(res)


@pytest.mark.parametrize("G", [heisenberg(5), modular(5), abelian(5, [2, 1])],
                         ids=["heisenberg", "modular", "abelian"])
def test_decompose_p5(G):
    H = default_H(G)
    _check_result(decompose_H(G, H))
