import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_files
from noether import intlin
from noether.cycpoly import CycloField, Poly, RatFunc, verify_symbolic
from noether.decomp import HypothesisRefusal, decompose_H
from noether.library import abelian, heisenberg, modular
from noether.linearize import (LatticeModule, ZOmegaFailed, build_induced_action,
                               check_corrected_shape, check_phi_annihilation, choose_step2_convention,
                               corrected_block, eval_step2_identity, is_block_lower_triangular,
                               lemma24_checks, lemma24_substitution, step2_grid, step2_module,
                               step2_reduce, zomega_decompose)
from noether.monact import cyclic_form
from noether.pgroup import PreconditionError, default_alpha, default_H
from noether.presfile import load_presentation

PRIMES = [3, 5, 7, 11, 13]


def pipeline(G, H=None, alpha=None):
    dec = decompose_H(G, H or default_H(G), alpha)
    r = step2_reduce(build_induced_action(dec), dec)
    return r, step2_module(r, G.p)


@pytest.mark.parametrize("p", PRIMES)
def test_step2_identity_grid(p):
    assert all(eval_step2_identity(i, j, k, p) == 0 for i, j, k in step2_grid(p))
    assert choose_step2_convention(p) == "full"


def test_merged_tail_fails_somewhere():
    assert any(eval_step2_identity(i, j, k, 7, "merged-tail") for i, j, k in step2_grid(7))


def test_step2_identity_range_checked():
    with pytest.raises(ValueError):
        eval_step2_identity(1, 1, 3, 5)
    with pytest.raises(ValueError):
        eval_step2_identity(2, 2, 3, 5)


@pytest.mark.parametrize("p", PRIMES)
def test_phi_annihilates_cyclic_form(p):
    L = LatticeModule(cyclic_form(p), [list(range(p - 1))], p)
    assert check_phi_annihilation(L)
    B = corrected_block(p)
    assert check_phi_annihilation(LatticeModule(B, [list(range(p - 1))], p))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_permutation_module_not_annihilated(p):
    P = [[int(j == (i + 1) % p) for j in range(p)] for i in range(p)]
    L = LatticeModule(P, [list(range(p))], p)
    assert not check_phi_annihilation(L)
    with pytest.raises(ZOmegaFailed):
        zomega_decompose(L)


def _check_split(L):
    U, D = zomega_decompose(L)
    assert abs(intlin.det(U)) == 1
    assert intlin.matmul(U, L.A) == intlin.matmul(D, U)
    assert D == intlin.block_diag([cyclic_form(L.p)] * len(L.blocks))


@pytest.mark.parametrize("G", [heisenberg(3), heisenberg(5), modular(3), modular(5),
                               abelian(3, [1, 1]), abelian(5, [2, 1])],
                         ids=["heis3", "heis5", "mod27", "mod125", "c3c3", "c25c5"])
def test_zomega_split(G):
    r, L = pipeline(G)
    assert check_phi_annihilation(L) and is_block_lower_triangular(L)
    _check_split(L)
    if r.route == "chain":
        assert check_corrected_shape(r.action, r.layout, G.p) == []


def test_heisenberg_step2_shape():
    r, L = pipeline(heisenberg(3))
    assert r.route == "chain" and L.rank == 4
    assert not any(r.action.of("alpha")[1])
    for g in r.action.gens:
        if g != "alpha":
            A, c = r.action.of(g)
            assert not any(c)


@pytest.mark.parametrize("path", corpus_files(3)[:30], ids=lambda p: p.stem)
def test_zomega_on_corpus(path):
    pres = load_presentation(path)
    G = pres.group
    try:
        H = pres.H() or default_H(G)
        r, L = pipeline(G, H, pres.alpha if pres.alpha is not None else default_alpha(G, H))
    except (HypothesisRefusal, PreconditionError):
        pytest.skip("outside the decomposition hypotheses")
    _check_split(L)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_cyclic_linearization(n):
    checks = lemma24_checks(lemma24_substitution(n))
    assert checks and all(checks.values()), checks


def test_lemma_rejects_small_n():
    with pytest.raises(ValueError):
        lemma24_substitution(1)


def test_verify_symbolic_examples():
    K = CycloField(3)
    x = RatFunc(Poly.monomial(K, 1, [1]))
    one = RatFunc(Poly.const(K, 1, 1))
    assert verify_symbolic((x * x - one) / (x - one), x + one)
    assert not verify_symbolic(x / (x + one), one)
    z = K.xi(1)
    # 1 + zeta + zeta^2 = 0
    assert K.is_zero(K.add(K.add(K.const(1), z), K.xi(2)))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(1, 4))
def test_block_diag_of_cyclic_splits(p, k):
    A = intlin.block_diag([cyclic_form(p)] * k)
    blocks = [list(range(b * (p - 1), (b + 1) * (p - 1))) for b in range(k)]
    _check_split(LatticeModule(A, blocks, p))
