"""Induced faithful action, ratio and fixed-field reductions, splitting of
the resulting Z[alpha]-lattice, and the affine linearization of a cyclic
monomial block.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import intlin
from .cycpoly import CycloField, Poly, RatFunc, verify_symbolic
from .decomp import DecompositionResult
from .monact import (
    MonomialAction, Substitution, SubstitutionInvalid, apply_substitution,
    compose_actions, cyclic_form, element_word, kernel_size, normalize_alpha_twist,
    verify_relations,
)
from .pgroup import PGroup


class FaithfulnessError(RuntimeError):
    reason = "not-faithful"


class Step2CancellationFailed(RuntimeError):
    reason = "step2-cancellation-failed"


class ZOmegaFailed(RuntimeError):
    reason = "decomposition-failed"


# -- Step 1 ------------------------------------------------------------------

@dataclass
class InducedAction:
    action: MonomialAction          # pc generators g1..gn, then "alpha"
    layout: list                    # per factor: list of chain indices j -> [var indices]
    characters: list                # (factor, j, values on the H-basis)
    kernel: int


def h_coordinates(dec: DecompositionResult) -> tuple[list, dict]:
    """Basis of H from the chains and the coordinate map ``h -> exponents``."""
    G = dec.group
    basis = [b for f in dec.factors for b in f.basis]
    orders = [G.element_order(b) for b in basis]
    coords = {}
    for exps in itertools.product(*[range(o) for o in orders]):
        h = G.identity
        for b, e in zip(basis, exps):
            h = G.mul(h, G.pow(b, e))
        coords[h] = exps
    assert len(coords) == dec.H.order
    return basis, coords


def induced_from_characters(G: PGroup, H_elements, alpha, chars, coords, modulus,
                            names=None, elements=None, labels=None) -> MonomialAction:
    """Monomial action on ``x_{c,i} = alpha^i . Y_c`` for H-eigenvectors Y_c.

    ``chars[c]`` gives ``chi_c`` on the coordinate basis (values mod modulus).
    Every acting element (the pc generators and alpha unless ``elements`` and
    ``labels`` are given) ``g = alpha^a h`` acts by
    ``g . x_{c,i} = chi_c(alpha^-i h alpha^i) [* chi_c(alpha^p)] x_{c,(a+i) mod p}``.
    """
    p = G.p
    nv = len(chars) * p

    def chi(c, h):
        return sum(v * e for v, e in zip(chars[c], coords[h])) % modulus

    ap = G.pow(alpha, p)
    if elements is None:
        labels = [f"g{i + 1}" for i in range(G.ngens)] + ["alpha"]
        elements = G.gens + [alpha]
    mats, scal = [], []
    for g in elements:
        a = next(a for a in range(p) if G.mul(G.pow(alpha, -a), g) in H_elements)
        h = G.mul(G.pow(alpha, -a), g)
        A = intlin.zeros(nv, nv)
        sc = [0] * nv
        for c in range(len(chars)):
            hi = h
            for i in range(p):
                src = c * p + i
                tgt = c * p + (a + i) % p
                A[src][tgt] = 1
                s = chi(c, hi)
                if a + i >= p:
                    s += chi(c, ap)
                sc[src] = s % modulus
                hi = G.conj(hi, alpha)
        mats.append(A)
        scal.append(sc)
    names = names or [f"x{c}_{i}" for c in range(len(chars)) for i in range(p)]
    return MonomialAction(nv, modulus, tuple(labels), mats, scal, tuple(names))


def induced_data(dec: DecompositionResult):
    """Step-1 action (unchecked), block layout and characters on the chain basis."""
    G = dec.group
    p = G.p
    N = G.exponent
    basis, coords = h_coordinates(dec)
    chars = []
    layout = []
    names = []
    pos = 0
    for fi, f in enumerate(dec.factors):
        blocks = []
        for j, b in enumerate(f.basis):
            vals = [0] * len(basis)
            vals[pos + j] = N // G.element_order(b)
            chars.append(vals)
            blocks.append(list(range((len(chars) - 1) * p, len(chars) * p)))
            names.extend(f"x{fi + 1}.{j + 1}.{i}" for i in range(p))
        layout.append(blocks)
        pos += len(f.basis)
    act = induced_from_characters(G, dec.H.elements, dec.alpha, chars, coords, N, names)
    return act, layout, chars


def build_induced_action(dec: DecompositionResult) -> InducedAction:
    G = dec.group
    act, layout, chars = induced_data(dec)
    if not verify_relations(act.restrict_gens(act.gens[:G.ngens]), G):
        raise FaithfulnessError("induced action does not respect the relations")
    ker = kernel_size(act.restrict_gens(act.gens[:G.ngens]), G)
    if ker != 1:
        raise FaithfulnessError(f"induced action has kernel of order {ker}")
    return InducedAction(act, layout, chars, ker)


# -- Step 2 ------------------------------------------------------------------

def _binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


def step2_identity_terms(i: int, j: int, k: int, convention: str = "full") -> list[int]:
    """Signed terms of the alternating binomial sum for the v-substitution.

    ``full``: the character of ``u_{ki}`` under beta_j followed by the
    characters of the correcting factors ``y_{k-t,i}^((-1)^t)``,
    ``t = 1..k-j-1``.  ``merged-tail``: the last two terms folded into a
    single ``(-1)^(k-j) C(i-2, 1)`` (as printed for long chains).
    """
    d = k - j - 2
    terms = [_binom(i - 2, d)]
    if convention == "full":
        for t in range(1, d + 2):
            terms.append((-1) ** t * _binom(i - 1, d + 1 - t))
    elif convention == "merged-tail":
        for t in range(1, d):
            terms.append((-1) ** t * _binom(i - 1, d + 1 - t))
        terms.append((-1) ** d * _binom(i - 2, 1))
    else:
        raise ValueError(f"unknown convention {convention!r}")
    return terms


STEP2_CONVENTIONS = ("full", "merged-tail")


def step2_grid(p: int):
    """Valid ``(i, j, k)``: 2 <= i <= p-1, 1 <= j <= k-2, k <= p."""
    for k in range(3, p + 1):
        for j in range(1, k - 1):
            for i in range(2, p):
                yield i, j, k


def eval_step2_identity(i: int, j: int, k: int, p: int, convention: str = "full") -> int:
    if not (2 <= i <= p - 1 and 1 <= j <= k - 2 and k <= p):
        raise ValueError(f"(i, j, k) = ({i}, {j}, {k}) outside the valid range for p = {p}")
    return sum(step2_identity_terms(i, j, k, convention))


def choose_step2_convention(p: int) -> str:
    """The convention that vanishes on the whole grid (checked, not assumed)."""
    for conv in STEP2_CONVENTIONS:
        if all(eval_step2_identity(i, j, k, p, conv) == 0 for i, j, k in step2_grid(p)):
            return conv
    raise Step2CancellationFailed(f"no convention vanishes on the grid for p = {p}")


def v_correction_signs(m: int) -> list[tuple[int, int]]:
    """``(block, sign)`` factors multiplied into ``u_{mi}`` to form ``v_{mi}``.

    Each beta_j character left over after a factor is the previous leftover
    minus the next binomial, so the sign flips with every block going down;
    stops at block 2 (blocks are 1-based).
    """
    out = []
    sign = -1
    for blk in range(m - 1, 1, -1):
        out.append((blk, sign))
        sign = -sign
    return out


@dataclass
class Step2Result:
    action: MonomialAction
    substitutions: list            # [(rule, Substitution, resulting action)]
    layout: list                   # per factor: list of blocks (var index lists)
    convention: str
    route: str = "chain"           # "chain" (v-substitution) or "lattice" (generic fixed lattice)


def corrected_block(p: int) -> list[list[int]]:
    """alpha on ``v_1 -> v_1 v_2^p``, ``v_2 -> ... -> v_(p-1) -> (v_1 v_2^(p-1) ... v_(p-1)^2)^-1``."""
    m = p - 1
    B = intlin.zeros(m, m)
    B[0][0] = 1
    if m > 1:
        B[0][1] = p
    for i in range(1, m - 1):
        B[i][i + 1] = 1
    B[m - 1] = [-1] + [-(p - i) for i in range(1, m)]
    return B


def step2_reduce(ind: InducedAction, dec: DecompositionResult) -> Step2Result:
    G = dec.group
    p = G.p
    act = ind.action
    steps = []
    # ratios y_{ji} = x_{ji} / x_{j,i-1}; drop x_{j0}
    rows, names, dropped, blocks_y = [], [], [], []
    for f_blocks in ind.layout:
        fb = []
        for blk in f_blocks:
            dropped.append(blk[0])
            ids = []
            for i in range(1, p):
                r = [0] * act.nvars
                r[blk[i]] = 1
                r[blk[i - 1]] = -1
                ids.append(len(rows))
                rows.append(r)
                names.append(act.names[blk[i]].replace("x", "y", 1))
            fb.append(ids)
        blocks_y.append(fb)
    sub = Substitution(rows, kind="fibration", dropped=tuple(dropped), names=tuple(names))
    act = apply_substitution(act, sub)
    steps.append(("fibration-drop", sub, act))

    flat = [blk for fb in blocks_y for blk in fb]
    act, tw = normalize_alpha_twist(act, "alpha", p, flat)
    steps.append(("twist-normalize", tw, act))
    A, c = act.of("alpha")
    C = cyclic_form(p)
    for blk in flat:
        if [[A[i][j] for j in blk] for i in blk] != C or any(c[i] for i in blk):
            raise Step2CancellationFailed("alpha is not in cyclic form after twist normalization")

    conv = choose_step2_convention(p)
    h_words = [tuple(element_word(h)) for h in dec.H.gens]
    rows, names, layout = chain_v_rows(act, blocks_y, p)
    route = "chain"
    sub = Substitution(rows, kind="sublattice", fixed_by=tuple(h_words), names=tuple(names))
    try:
        new_act = apply_substitution(act, sub)
    except SubstitutionInvalid:
        # chains closing on a power of their first member: take the fixed lattice directly
        rows, layout = fixed_lattice_rows(act, h_words, blocks_y)
        names = [f"v{l + 1}" for l in range(len(rows))]
        sub = Substitution(rows, kind="sublattice", fixed_by=tuple(h_words), names=tuple(names))
        route = "lattice"
        try:
            new_act = apply_substitution(act, sub)
        except SubstitutionInvalid as exc:
            raise Step2CancellationFailed(str(exc)) from exc
    act = new_act
    steps.append(("monomial-substitution", sub, act))
    return Step2Result(act, steps, layout, conv, route)


def chain_v_rows(act: MonomialAction, blocks_y, p: int):
    """Rows of the y_{1i}, v_{m1} = y_{m1}^p, v_{mi} substitution per factor."""
    rows, names, layout = [], [], []
    for fi, fb in enumerate(blocks_y):
        out_blocks = []
        for m, blk in enumerate(fb, start=1):
            ids = []
            for i in range(1, p):
                r = [0] * act.nvars
                if m == 1:
                    r[blk[i - 1]] = 1
                    nm = act.names[blk[i - 1]]
                elif i == 1:
                    r[blk[0]] = p
                    nm = f"v{fi + 1}.{m}.1"
                else:
                    r[blk[i - 1]] += 1
                    r[blk[i - 2]] -= 1
                    for lower, sign in v_correction_signs(m):
                        r[fb[lower - 1][i - 1]] += sign
                    nm = f"v{fi + 1}.{m}.{i}"
                ids.append(len(rows))
                rows.append(r)
                names.append(nm)
            out_blocks.append(ids)
        layout.append(out_blocks)
    return rows, names, layout


def fixed_lattice_rows(act: MonomialAction, words, blocks_y):
    """Basis of ``{r : r . c_w = 0 mod N for all w}``, adapted to the block filtration.

    Columns are ordered characters first, then blocks from the top down, so
    the Hermite form lists lattice vectors of lower blocks last.
    """
    N = act.modulus
    chars = [compose_actions(act, w)[1] for w in words]
    flat = [blk for fb in blocks_y for blk in fb]
    order = [v for blk in reversed(flat) for v in blk]
    q, m = len(chars), act.nvars
    gens = []
    for v in order:
        gens.append([chars[w][v] for w in range(q)] + [int(u == v) for u in order])
    for w in range(q):
        gens.append([N * int(u == w) for u in range(q)] + [0] * m)
    H = intlin.hermite_rows(gens)
    lat = [r[q:] for r in H if not any(r[:q])]
    if len(lat) != m:
        raise Step2CancellationFailed("fixed lattice does not have full rank")
    owner = {v: b for b, blk in enumerate(flat) for v in blk}
    rows, layout_flat = [], [[] for _ in flat]
    for r in reversed(lat):
        full = [0] * m
        for v, x in zip(order, r):
            full[v] = x
        top = max(owner[v] for v in range(m) if full[v])
        layout_flat[top].append(len(rows))
        rows.append(full)
    if any(len(b) != len(flat[0]) for b in layout_flat):
        raise Step2CancellationFailed("fixed lattice is not adapted to the filtration")
    layout, k = [], 0
    for fb in blocks_y:
        layout.append(layout_flat[k:k + len(fb)])
        k += len(fb)
    return rows, layout


def check_corrected_shape(act: MonomialAction, layout, p: int) -> list[str]:
    """Diagonal blocks in cyclic / corrected form, corrections only from lower blocks."""
    A, c = act.of("alpha")
    problems = []
    C, B = cyclic_form(p), corrected_block(p)
    owner = {}
    for fi, blocks in enumerate(layout):
        for m, blk in enumerate(blocks):
            for v in blk:
                owner[v] = (fi, m)
    for fi, blocks in enumerate(layout):
        for m, blk in enumerate(blocks):
            want = C if m == 0 else B
            if [[A[i][j] for j in blk] for i in blk] != want:
                problems.append(f"factor {fi + 1} block {m + 1}: diagonal block not in standard form")
            for i in blk:
                if c[i]:
                    problems.append(f"factor {fi + 1} block {m + 1}: nonzero scalar")
                for j in range(act.nvars):
                    if A[i][j] and j not in blk:
                        if owner[j][0] != fi or owner[j][1] >= m or owner[j][1] == 0:
                            problems.append(
                                f"factor {fi + 1} block {m + 1}: correction outside lower v-blocks")
    return problems


# -- Step 3 ------------------------------------------------------------------

@dataclass
class LatticeModule:
    A: list            # alpha on row vectors
    blocks: list       # filtration blocks (lists of coordinate indices), lowest first
    p: int

    @property
    def rank(self) -> int:
        return len(self.A)


def step2_module(r: Step2Result, p: int) -> LatticeModule:
    """alpha's matrix after Step 2, filtered by the chain blocks."""
    A, _ = r.action.of("alpha")
    return LatticeModule(A, [b for fb in r.layout for b in fb], p)


def check_phi_annihilation(L: LatticeModule) -> bool:
    n = L.rank
    total = intlin.zeros(n, n)
    P = intlin.identity(n)
    for _ in range(L.p):
        total = intlin.matadd(total, P)
        P = intlin.matmul(P, L.A)
    return not any(any(row) for row in total)


def is_block_lower_triangular(L: LatticeModule) -> bool:
    level = {}
    for b, blk in enumerate(L.blocks):
        for v in blk:
            level[v] = b
    return all(not L.A[i][j] or level[j] <= level[i]
               for i in range(L.rank) for j in range(L.rank))


def _block_candidates(blk, n, bound: int = 2):
    """Unit vectors of the block first, then small combinations."""
    for v in blk:
        yield [int(i == v) for i in range(n)]
    rng = range(-bound, bound + 1)
    for coeffs in itertools.product(rng, repeat=len(blk)):
        if sum(map(abs, coeffs)) > 1:
            e = [0] * n
            for v, c in zip(blk, coeffs):
                e[v] = c
            yield e


def zomega_decompose(L: LatticeModule):
    """Unimodular U with ``U A U^-1 = diag(C, ..., C)``.

    For each filtration block, the alpha-orbit ``e, eA, ..., eA^(p-2)`` of a
    block basis vector whose projection to the block is unimodular; since
    ``Phi_p(A) = 0`` each orbit closes in companion form exactly.  Block
    generators are searched among small combinations when no unit vector
    works (each quotient is a principal ideal of Z[omega] for small p).
    """
    p = L.p
    if not check_phi_annihilation(L):
        raise ZOmegaFailed("Phi_p(alpha) does not annihilate the lattice")
    if not is_block_lower_triangular(L):
        raise ZOmegaFailed("alpha does not preserve the filtration")
    U = []
    for blk in L.blocks:
        if len(blk) != p - 1:
            raise ZOmegaFailed("filtration quotient of rank != p-1")
        for e in _block_candidates(blk, L.rank):
            orbit = [e]
            for _ in range(p - 2):
                orbit.append(intlin.vecmat(orbit[-1], L.A))
            proj = [[r[i] for i in blk] for r in orbit]
            if abs(intlin.det(proj)) == 1:
                U.extend(orbit)
                break
        else:
            raise ZOmegaFailed(f"no block generator found for block {blk}")
    if abs(intlin.det(U)) != 1:
        raise ZOmegaFailed("orbit basis is not unimodular")
    D = intlin.block_diag([cyclic_form(p)] * len(L.blocks))
    if intlin.matmul(U, L.A) != intlin.matmul(D, U):
        raise ZOmegaFailed("orbit basis does not close in companion form")
    return U, D


# -- cyclic linearization ----------------------------------------------------

@dataclass
class Lemma24Data:
    n: int
    K: CycloField
    w0: RatFunc
    w: list          # w_1..w_n
    s: list          # s_1..s_(n-1)
    tau: list        # monomial matrix of tau on v_1..v_(n-1)


def lemma24_substitution(n: int) -> Lemma24Data:
    if n < 2:
        raise ValueError("n must be at least 2")
    K = CycloField(n)
    nv = n - 1
    one = Poly.const(K, nv, 1)
    prefix = [Poly.monomial(K, nv, [0] * nv)]
    for i in range(1, n):
        prefix.append(Poly.monomial(K, nv, [1] * i + [0] * (nv - i)))
    w0p = prefix[0]
    for m in prefix[1:]:
        w0p = w0p + m
    w0 = RatFunc(w0p, one)
    inv_n = RatFunc(Poly.const(K, nv, Fraction(1, n)))
    w = [RatFunc(prefix[i], w0p) - inv_n for i in range(n)]
    s = []
    for i in range(1, n):
        acc = None
        for j in range(1, n + 1):
            term = w[j - 1].scale(K.xi(-i * j))
            acc = term if acc is None else acc + term
        s.append(acc)
    return Lemma24Data(n, K, w0, w, s, cyclic_form(n))


def lemma24_checks(data: Lemma24Data) -> dict:
    """Exact symbolic checks; every value must be True."""
    K, n, T = data.K, data.n, data.tau
    nv = n - 1
    zero = RatFunc(Poly(K, nv, {}))
    out = {}
    total = zero
    for x in data.w:
        total = total + x
    out["sum_w_zero"] = verify_symbolic(total, zero)
    out["tau_cycles_w"] = all(
        verify_symbolic(data.w[j].subst_monomial(T), data.w[(j + 1) % n]) for j in range(n))
    out["tau_eigen"] = all(
        verify_symbolic(data.s[i - 1].subst_monomial(T), data.s[i - 1].scale(K.xi(i)))
        for i in range(1, n))
    # generation: v from w, and w from s
    inv_n = RatFunc(Poly.const(K, nv, Fraction(1, n)))
    ok = True
    for i in range(1, n):
        v_i = RatFunc(Poly.monomial(K, nv, [int(k == i - 1) for k in range(nv)]))
        ok &= verify_symbolic((data.w[i] + inv_n) / (data.w[i - 1] + inv_n), v_i)
    out["v_from_w"] = bool(ok)
    ok = True
    for j in range(1, n + 1):
        acc = zero
        for i in range(1, n):
            acc = acc + data.s[i - 1].scale(K.xi(i * j))
        ok &= verify_symbolic(acc.scale(K.const(Fraction(1, n))),
                              data.w[j - 1])
    out["w_from_s"] = bool(ok)
    return out
