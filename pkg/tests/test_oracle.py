import pytest

from noether.library import abelian, heisenberg, modular
from noether.oracle import (CHECKS, FULL_BOUND, OracleBoundExceeded, brute_force_oracle,
                            compare, rewrite)
from noether.pgroup import PGroup, default_alpha, default_H, subgroup_closure


def test_heisenberg_zero_diffs(heis):
    H = default_H(heis)
    res = compare(heis, H, default_alpha(heis, H))
    assert res.agree, res.mismatches
    assert set(res.brute) == {"order"} | {k for ks in CHECKS.values() for k in ks}
    assert res.brute["lcs_orders"] == [27, 3, 1]
    assert res.brute["kernel_order"] == 1


def test_modular_power_check(mod27):
    H = subgroup_closure(mod27, [(0, 1, 0)])
    res = compare(mod27, H, (1, 0, 0), checks=("power",))
    assert res.agree
    assert res.brute["Hj_orders"] == [9] and res.brute["condition_2"] is True


def test_trivial_group():
    G = PGroup.from_relations(3, 0)
    res = compare(G, G.trivial, G.identity, checks=("series", "subgroup"))
    assert res.agree
    assert res.brute["order"] == 1 and res.brute["lcs_orders"] == [1]


def test_bound_refusal():
    G = abelian(3, [1] * 6)
    with pytest.raises(OracleBoundExceeded) as exc:
        compare(G, subgroup_closure(G, G.gens[1:]), G.gen(0), checks=("series",))
    assert exc.value.bound == FULL_BOUND


def test_subgroup_checks_allow_5_4():
    G = abelian(5, [2, 1, 1])
    H = subgroup_closure(G, G.gens[1:])
    res = compare(G, H, G.gen(0), checks=("subgroup", "power"))
    assert res.agree


def test_unknown_check(heis):
    with pytest.raises(ValueError):
        compare(heis, default_H(heis), (1, 0, 0), checks=("nope",))


def test_violator_agrees(cond2_violator):
    pr = cond2_violator
    res = compare(pr.group, pr.H(), pr.alpha)
    assert res.agree
    assert res.brute["condition_2_some_basis"] is False and res.brute["kernel_order"] is None


def test_rewrite_matches_collect(heis):
    assert rewrite(heis, [1, 0, 1, 0]) == heis.collect([(1, 1), (0, 1), (1, 1), (0, 1)])


def test_brute_only_requested_keys(heis):
    out = brute_force_oracle(heis, [(0, 1, 0), (0, 0, 1)], (1, 0, 0), keys={"H_order"})
    assert "lcs_orders" not in out and out["H_order"] == 9


@pytest.mark.parametrize("G", [modular(5), heisenberg(5)], ids=["mod125", "heis125"])
def test_p5_small(G):
    H = default_H(G)
    assert compare(G, H, default_alpha(G, H)).agree
