"""Brute-force enumeration oracles.

Nothing here uses the collector in :mod:`noether.pgroup`: words are reduced by
naive rewriting of adjacent pairs and p-th powers, the group is realized as
permutations of its normal forms, and every subgroup-level quantity is
recomputed from raw products.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .pgroup import (
    PGroup, Subgroup, abelian_invariants, conjugate_closure, frattini_subgroup,
    index_p_subgroups, lower_central_series, power_subgroup, subgroup_closure,
)


FULL_BOUND = 3 ** 5      # full table of quantities
SUBGROUP_BOUND = 5 ** 4  # subgroup-level checks only
CHECKS = {
    "series": ("order", "exponent", "lcs_orders", "centre_order", "frattini_order",
               "maximal_subgroups", "condition_1"),
    "subgroup": ("H_order", "H_normal", "H_abelian", "H_invariants", "Hp_order"),
    "power": ("Hj_orders", "condition_2", "condition_2_some_basis"),
    "decomp": ("decomposable",),
    "faithful": ("kernel_order",),
}


class OracleBoundExceeded(ValueError):
    def __init__(self, order: int, bound: int):
        super().__init__(f"group order {order} exceeds the enumeration bound {bound}")
        self.order = order
        self.bound = bound


def check_bound(G: PGroup, checks) -> None:
    """Refuse groups beyond the desk-scale bounds."""
    full = set(checks) & {"series"}
    bound = FULL_BOUND if full else max(FULL_BOUND, SUBGROUP_BOUND)
    if G.order > bound:
        raise OracleBoundExceeded(G.order, bound)


def _letters(vec) -> list[int]:
    return [i for i, e in enumerate(vec) for _ in range(e)]


def rewrite(G: PGroup, word: list[int], limit: int = 10 ** 6) -> tuple:
    """Normal form of a positive word by naive rewriting."""
    p = G.p
    w = list(word)
    steps = 0
    while True:
        steps += 1
        if steps > limit:
            raise RuntimeError("rewriting did not terminate")
        for k in range(len(w) - 1):
            if w[k] > w[k + 1]:
                j, i = w[k], w[k + 1]
                # g_j g_i = g_i g_j [g_j, g_i]
                w[k:k + 2] = [i, j] + _letters(G.comms[j][i])
                break
        else:
            for k in range(len(w) - p + 1):
                if all(x == w[k] for x in w[k:k + p]):
                    w[k:k + p] = _letters(G.powers[w[k]])
                    break
            else:
                vec = [0] * G.ngens
                for x in w:
                    vec[x] += 1
                return tuple(vec)


class PermGroup:
    """The right regular representation built from :func:`rewrite`."""

    def __init__(self, G: PGroup):
        self.G = G
        ident = (0,) * G.ngens
        index = {ident: 0}
        elems = [ident]
        k = 0
        while k < len(elems):
            x = elems[k]
            for i in range(G.ngens):
                y = rewrite(G, _letters(x) + [i])
                if y not in index:
                    index[y] = len(elems)
                    elems.append(y)
            k += 1
        self.elems = elems
        self.index = index
        self.gen_perm = [[index[rewrite(G, _letters(x) + [i])] for x in elems]
                         for i in range(G.ngens)]
        self._mul: dict = {}

    @property
    def order(self) -> int:
        return len(self.elems)

    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        hit = self._mul.get(key)
        if hit is None:
            hit = a
            for i in _letters(self.elems[b]):
                hit = self.gen_perm[i][hit]
            self._mul[key] = hit
        return hit

    def inv(self, a: int) -> int:
        x = a
        while True:
            y = self.mul(x, a)
            if y == 0:
                return x
            x = y

    def pow(self, a: int, k: int) -> int:
        x = 0
        for _ in range(k):
            x = self.mul(x, a)
        return x

    def order_of(self, a: int) -> int:
        n, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            n += 1
        return n

    def comm(self, a: int, b: int) -> int:
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def closure(self, gens) -> frozenset:
        seen = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def idx(self, x) -> int:
        return self.index[tuple(x)]


def _lcs_orders(P: PermGroup) -> list[int]:
    cur = frozenset(range(P.order))
    out = [len(cur)]
    while len(cur) > 1:
        nxt = P.closure({P.comm(x, y) for x in range(P.order) for y in cur})
        if len(nxt) == len(cur):
            break
        cur = nxt
        out.append(len(cur))
    return out


def _invariants(P: PermGroup, S: frozenset) -> list[int]:
    """Abelian invariants of an abelian subgroup from its cyclic-subgroup structure."""
    p = P.G.p
    # r_k = log_p |{x : x^(p^k) = 1}| ; number of factors of order >= p^k is r_k - r_(k-1)
    counts = []
    k = 0
    while True:
        q = p ** k
        c = sum(1 for x in S if P.pow(x, q) == 0)
        counts.append(c)
        if c == len(S):
            break
        k += 1
    logs = [_logp(c, p) for c in counts]
    ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
    out = []
    for k in range(len(ge), 0, -1):
        more = ge[k] if k < len(ge) else 0
        out.extend([p ** k] * (ge[k - 1] - more))
    return out


def _logp(n: int, p: int) -> int:
    e = 0
    while n > 1:
        n //= p
        e += 1
    return e


def _all_subgroups(P: PermGroup, H: frozenset) -> list[frozenset]:
    subs = {frozenset([0])}
    frontier = list(subs)
    while frontier:
        nxt = []
        for S in frontier:
            for x in H:
                if x not in S:
                    T = P.closure(set(S) | {x})
                    if T not in subs:
                        subs.add(T)
                        nxt.append(T)
        frontier = nxt
    return sorted(subs, key=lambda s: (len(s), sorted(s)))


def decomposable(P: PermGroup, H: frozenset, alpha: int) -> bool:
    """Is H a direct product of G-normal subgroups of type C_{p^b} x (C_p)^c?"""
    p = P.G.p
    a_inv = P.inv(alpha)
    parts = []
    for S in _all_subgroups(P, H):
        if len(S) == 1:
            continue
        if any(P.mul(P.mul(a_inv, x), alpha) not in S for x in S):
            continue
        inv = _invariants(P, S)
        if all(q == p for q in inv[1:]):
            parts.append(S)

    def cover(span: frozenset, start: int) -> bool:
        if len(span) == len(H):
            return True
        for k in range(start, len(parts)):
            S = parts[k]
            if len(H) % (len(span) * len(S)):
                continue
            if len(span & S) != 1:
                continue
            new = frozenset(P.mul(x, y) for x in span for y in S)
            if len(new) == len(span) * len(S) and cover(new, k + 1):
                return True
        return False

    return cover(frozenset([0]), 0)


def _some_good_basis(P: PermGroup, H: frozenset, a: int) -> bool:
    """Is there a basis of H whose generators of order > p all satisfy
    ``H_j & H^p == H_j^p``?"""
    p = P.G.p
    a_inv = P.inv(a)
    Hp = frozenset(P.pow(h, p) for h in H)

    def good(x):
        if P.order_of(x) <= p:
            return True
        conjs, y = [], x
        for _ in range(p):
            conjs.append(y)
            y = P.mul(P.mul(a_inv, y), a)
        Hj = P.closure(conjs)
        return (Hj & Hp) == frozenset(P.pow(z, p) for z in Hj)

    inv = _invariants(P, H)
    pool = {}
    for x in H:
        if x and good(x):
            pool.setdefault(P.order_of(x), []).append(x)

    def extend(span: frozenset, k: int) -> bool:
        if k == len(inv):
            return len(span) == len(H)
        for x in pool.get(inv[k], []):
            cyc = P.closure([x])
            if len(span & cyc) == 1:
                new = frozenset(P.mul(s, c) for s in span for c in cyc)
                if extend(new, k + 1):
                    return True
        return False

    return extend(frozenset([0]), 0)


def _count_maximal(P: PermGroup) -> int:
    """Distinct kernels of nonzero homomorphisms G -> Z/p, found by trying
    every assignment of the generators and checking additivity on all of G."""
    p, G = P.G.p, P.G
    kernels = set()
    for images in itertools.product(range(p), repeat=G.ngens):
        if not any(images):
            continue
        phi = [sum(images[i] * e for i, e in enumerate(x)) % p for x in P.elems]
        ok = all(phi[P.gen_perm[i][x]] == (phi[x] + images[i]) % p
                 for i in range(G.ngens) for x in range(P.order))
        if ok:
            kernels.add(frozenset(x for x in range(P.order) if phi[x] == 0))
    return len(kernels)


def _all_keys() -> set:
    return {k for ks in CHECKS.values() for k in ks}


def _brute_kernel(P: "PermGroup", H: frozenset, a: int, chain_basis) -> int | None:
    """Elements acting trivially on ``x_(k,i) = alpha^i Y_k``.

    ``Y_k`` is the H-eigenvector for the character taking the k-th chain
    basis element to a primitive root of its order and the others to 1.
    Outside H an element moves the blocks, so only H is scanned.
    """
    B = [P.idx(b) for b in chain_basis]
    orders = [P.order_of(b) for b in B]
    coords = {}
    for exps in itertools.product(*[range(o) for o in orders]):
        h = 0
        for b, e in zip(B, exps):
            h = P.mul(h, P.pow(b, e))
        coords[h] = exps
    if set(coords) != set(H):
        return None
    count = 0
    for h in H:
        y, trivial = h, True
        for _ in range(P.G.p):
            if any(coords[y]):
                trivial = False
                break
            y = P.mul(P.mul(P.inv(a), y), a)
        count += trivial
    return count


def brute_force_oracle(G: PGroup, H_gens, alpha, basis=None, keys=None,
                       chain_basis=None) -> dict:
    """Subgroup-level quantities by enumeration.

    ``basis`` (elements of H) selects which cyclic generators enter the
    ``H_j`` comparison; it must be the same basis handed to the algebraic side.
    ``keys`` restricts the computed quantities (default: all).
    """
    keys = _all_keys() if keys is None else set(keys)
    P = PermGroup(G)
    p = G.p
    everything = range(P.order)
    H = P.closure(P.idx(h) for h in H_gens)
    a = P.idx(alpha)
    out = {"order": P.order}
    if keys & (set(CHECKS["series"]) - {"order"}):
        centre = [x for x in everything if all(P.mul(x, g) == P.mul(g, x) for g in everything)]
        phi = P.closure({P.pow(x, p) for x in everything}
                        | {P.comm(x, y) for x in everything for y in everything})
        lcs = _lcs_orders(P)
        out.update({
            "exponent": max(P.order_of(x) for x in everything),
            "lcs_orders": lcs,
            "centre_order": len(centre),
            "frattini_order": len(phi),
            "maximal_subgroups": _count_maximal(P),
            "condition_1": len(lcs) - 1 <= p,
        })
    Hp = frozenset(P.pow(h, p) for h in H)
    if keys & set(CHECKS["subgroup"]):
        out.update({
            "H_order": len(H),
            "H_normal": all(P.mul(P.mul(P.inv(g), h), g) in H for g in everything for h in H),
            "H_abelian": all(P.mul(x, y) == P.mul(y, x) for x in H for y in H),
            "H_invariants": _invariants(P, H),
            "Hp_order": len(Hp),
        })
    if "Hj_orders" in keys and basis is not None:
        ok = True
        hj_orders = []
        for b in basis:
            bi = P.idx(b)
            if P.order_of(bi) <= p:
                continue
            conjs, y = [], bi
            for _ in range(p):
                conjs.append(y)
                y = P.mul(P.mul(P.inv(a), y), a)
            Hj = P.closure(conjs)
            hj_orders.append(len(Hj))
            if (Hj & Hp) != frozenset(P.pow(x, p) for x in Hj):
                ok = False
        out["Hj_orders"] = hj_orders
        out["condition_2"] = ok
    if "condition_2_some_basis" in keys:
        out["condition_2_some_basis"] = _some_good_basis(P, H, a)
    if "decomposable" in keys:
        out["decomposable"] = decomposable(P, H, a)
    if "kernel_order" in keys:
        out["kernel_order"] = _brute_kernel(P, H, a, chain_basis) if chain_basis else None
    return out


def algebraic_quantities(G: PGroup, H: Subgroup, alpha, basis=None, keys=None) -> dict:
    """The same quantities as :func:`brute_force_oracle`, via the pc machinery."""
    from .decomp import check_lcs_condition, check_power_condition, search_decomposition
    from .pgroup import is_normal
    keys = _all_keys() if keys is None else set(keys)
    p = G.p
    out = {"order": G.order}
    if keys & (set(CHECKS["series"]) - {"order"}):
        lcs = lower_central_series(G)
        centre = [x for x in G.elements() if all(G.mul(x, g) == G.mul(g, x) for g in G.gens)]
        out.update({
            "exponent": G.exponent,
            "lcs_orders": [S.order for S in lcs],
            "centre_order": len(centre),
            "frattini_order": frattini_subgroup(G).order,
            "maximal_subgroups": len(index_p_subgroups(G)),
            "condition_1": check_lcs_condition(G),
        })
    if keys & set(CHECKS["subgroup"]):
        out.update({
            "H_order": H.order,
            "H_normal": is_normal(H, G),
            "H_abelian": H.is_abelian(),
            "H_invariants": abelian_invariants(H),
            "Hp_order": power_subgroup(H).order if H.is_abelian() else None,
        })
    if "Hj_orders" in keys and basis is not None:
        out["Hj_orders"] = [conjugate_closure(G, b, alpha).order
                            for b in basis if G.element_order(b) > p]
        out["condition_2"] = check_power_condition(G, H, alpha, basis)[0]
    if "condition_2_some_basis" in keys:
        out["condition_2_some_basis"] = check_power_condition(G, H, alpha)[0]
    if "decomposable" in keys:
        out["decomposable"] = search_decomposition(G, H, alpha) is not None
    if "kernel_order" in keys:
        out["kernel_order"] = _step1_kernel(G, H, alpha)[0]
    return out


def _step1_kernel(G: PGroup, H: Subgroup, alpha):
    """Kernel order of the Step-1 action and the chain basis it is built on."""
    from .decomp import search_decomposition
    from .linearize import induced_data
    from .monact import kernel_size
    dec = search_decomposition(G, H, alpha)
    if dec is None:
        return None, None
    act, _, _ = induced_data(dec)
    basis = [b for f in dec.factors for b in f.basis]
    return kernel_size(act.restrict_gens(act.gens[:G.ngens]), G), basis


@dataclass
class OracleComparison:
    algebraic: dict
    brute: dict

    @property
    def mismatches(self) -> list[str]:
        return [k for k in self.brute if self.algebraic.get(k) != self.brute[k]]

    @property
    def agree(self) -> bool:
        return not self.mismatches


def compare(G: PGroup, H: Subgroup, alpha, basis=None, checks=("all",)) -> OracleComparison:
    """Diff the algebraic path against enumeration on the selected check groups."""
    from .pgroup import abelian_basis
    checks = tuple(CHECKS) if "all" in checks else tuple(checks)
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}; choose from {sorted(CHECKS)} or all")
    check_bound(G, checks)
    basis = basis if basis is not None else abelian_basis(H)
    keys = {"order"} | {k for c in checks for k in CHECKS[c]}
    chain_basis = _step1_kernel(G, H, alpha)[1] if "kernel_order" in keys else None
    return OracleComparison(algebraic_quantities(G, H, alpha, basis, keys),
                            brute_force_oracle(G, H.gens, alpha, basis, keys, chain_basis))
