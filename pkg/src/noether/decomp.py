"""Decomposition of an abelian index-p subgroup into G-normal factors.

A factor is preferably built from a *beta chain* ``b_1, b_2, ..., b_k`` with
``b_{j+1} = [b_j, alpha]``, stopping at the first member that is central or
falls into the span of the earlier ones.  The factor is the subgroup
generated by the chain and is accepted when the chain is a basis of it:
``b_1`` of order ``p^i`` and every later member of order exactly ``p``.
Such a factor is normal and has type ``C_{p^i} x (C_p)^(k-1)``.  When no
chain is a basis, any alpha-stable subgroup of that type is used with an
abelian basis instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .pgroup import (
    Element, PGroup, PreconditionError, Subgroup, abelian_basis,
    abelian_invariants, conjugate_closure, default_alpha, is_normal,
    lower_central_series, power_subgroup, subgroup_closure,
)


class HypothesisRefusal(Exception):
    """A structural hypothesis fails; ``reason`` is machine readable."""

    def __init__(self, reason: str, detail: str = "", violators=()):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason
        self.detail = detail
        self.violators = list(violators)


class DecompositionFailed(RuntimeError):
    reason = "decomposition-failed"


@dataclass(frozen=True)
class Factor:
    kind: str            # "N" for (C_p)^a, "H" for C_{p^b} x (C_p)^c
    chain: tuple         # beta_1, ..., beta_k; empty when no chain is a basis
    subgroup: Subgroup
    invariants: tuple
    basis: tuple = ()    # defaults to the chain

    def __post_init__(self):
        if not self.basis:
            object.__setattr__(self, "basis", tuple(self.chain))

    @property
    def top_exponent(self) -> int:
        """i_j: log_p of the order of beta_1."""
        q, e = self.invariants[0], 0
        p = self.subgroup.group.p
        while q > 1:
            q //= p
            e += 1
        return e

    @property
    def k(self) -> int:
        return len(self.basis)


@dataclass
class DecompositionResult:
    group: PGroup
    H: Subgroup
    alpha: Element
    factors: list = field(default_factory=list)

    @property
    def s(self) -> int:
        return len(self.factors)

    @property
    def t(self) -> int:
        return sum(f.kind == "H" for f in self.factors)

    @property
    def r(self) -> int:
        return sum(f.kind == "N" for f in self.factors)

    @property
    def i_j(self) -> list[int]:
        return [f.top_exponent for f in self.factors]

    @property
    def k_j(self) -> list[int]:
        return [f.k - 1 for f in self.factors]

    def summary(self) -> dict:
        return {
            "alpha": list(self.alpha),
            "s": self.s, "t": self.t, "r": self.r,
            "factors": [
                {"kind": f.kind, "invariants": list(f.invariants),
                 "chain": [list(b) for b in f.chain],
                 "basis": [list(b) for b in f.basis]}
                for f in self.factors
            ],
        }


def check_lcs_condition(G: PGroup) -> bool:
    """Condition (1): ``G_(p)`` is trivial."""
    return len(lower_central_series(G)) - 1 <= G.p


def _check_H(G: PGroup, H: Subgroup, alpha: Element):
    if not H.is_abelian():
        raise PreconditionError("H is not abelian")
    if H.order * G.p != G.order:
        raise PreconditionError("H does not have index p")
    if not is_normal(H, G):
        raise PreconditionError("H is not normal")
    if alpha in H:
        raise PreconditionError("alpha lies in H")


def _power_condition_holds(G: PGroup, a: Element, alpha: Element, Hp: Subgroup) -> bool:
    if G.element_order(a) <= G.p:
        return True
    Hj = conjugate_closure(G, a, alpha)
    return Hj.intersection(Hp).same(power_subgroup(Hj))


def check_power_condition(G: PGroup, H: Subgroup, alpha: Element,
                          basis: list | None = None) -> tuple[bool, list[int]]:
    """Condition (2): ``H_j & H^p == H_j^p`` for each basis element of order > p.

    With an explicit basis only that basis is tested.  Otherwise the verdict
    is whether *some* basis of H passes (the condition depends on the basis),
    and violators refer to the canonical ``abelian_basis(H)``.
    """
    _check_H(G, H, alpha)
    Hp = power_subgroup(H)
    canon = basis if basis is not None else abelian_basis(H)
    bad = [j for j, a in enumerate(canon) if not _power_condition_holds(G, a, alpha, Hp)]
    if basis is not None or not bad:
        return not bad, bad
    good = {x for x in H.elements if _power_condition_holds(G, x, alpha, Hp)}
    found = abelian_basis(H, allowed=good.__contains__)
    return found is not None, ([] if found is not None else bad)


def good_basis(G: PGroup, H: Subgroup, alpha: Element) -> list | None:
    """A basis of H passing condition (2), or None."""
    Hp = power_subgroup(H)
    good = {x for x in H.elements if _power_condition_holds(G, x, alpha, Hp)}
    return abelian_basis(H, allowed=good.__contains__)


def find_beta_chain(G: PGroup, beta1: Element, alpha: Element) -> list[Element]:
    """``beta_1, [beta_1, alpha], ...`` up to the last nontrivial member."""
    if beta1 == G.identity:
        raise PreconditionError("beta chain of the identity")
    chain = [beta1]
    while True:
        c = G.commutator(chain[-1], alpha)
        if c == G.identity:
            return chain
        chain.append(c)
        if len(chain) > G.p:
            raise HypothesisRefusal("condition-(1)-violated",
                                    f"beta chain longer than p starting at {beta1}")


def chain_factor(G: PGroup, beta1: Element, alpha: Element) -> Factor | None:
    """The factor spanned by the chain of ``beta1`` if the chain is a basis."""
    chain = find_beta_chain(G, beta1, alpha)
    p = G.p
    # cut where the chain falls back into its own span (e.g. [b, alpha] = b^p)
    for cut in range(1, len(chain)):
        if chain[cut] in subgroup_closure(G, chain[:cut]):
            chain = chain[:cut]
            break
    if any(G.element_order(b) != p for b in chain[1:]):
        return None
    top = G.element_order(beta1)
    S = subgroup_closure(G, chain)
    if S.order != top * p ** (len(chain) - 1):
        return None
    kind = "H" if top > p else "N"
    return Factor(kind, tuple(chain), S, tuple([top] + [p] * (len(chain) - 1)))


def search_decomposition(G: PGroup, H: Subgroup, alpha: Element,
                         budget: int = 200_000) -> DecompositionResult | None:
    """Exhaustive search for a direct decomposition of H into chain factors.

    Does not consult the two conditions; returns None when no decomposition
    exists.  Raises DecompositionFailed if the search budget runs out.
    """
    _check_H(G, H, alpha)
    p = G.p
    cands: dict[frozenset, Factor] = {}
    orders = {x: G.element_order(x) for x in H.elements}
    for b in sorted(H.elements, key=lambda x: (-orders[x], x)):
        if b == G.identity:
            continue
        try:
            f = chain_factor(G, b, alpha)
        except HypothesisRefusal:
            continue
        if f is not None and f.subgroup.elements not in cands:
            cands[f.subgroup.elements] = f
    # normal subgroups of the right type without a chain basis
    closures: dict[frozenset, Subgroup] = {}
    for b in H.elements:
        if b != G.identity:
            S = conjugate_closure(G, b, alpha)
            closures.setdefault(S.elements, S)
    for S in list(closures.values()):
        for y in H.elements:
            if y not in S:
                T = conjugate_closure(G, y, alpha, extra=S.gens)
                closures.setdefault(T.elements, T)
    for key, S in closures.items():
        if key in cands:
            continue
        inv = abelian_invariants(S)
        if any(q != p for q in inv[1:]):
            continue
        basis = tuple(abelian_basis(S))
        kind = "H" if inv[0] > p else "N"
        cands[key] = Factor(kind, (), S, tuple(inv), basis)
    facs = sorted(cands.values(), key=lambda f: (not f.chain, -f.invariants[0], -f.subgroup.order,
                                                 sorted(f.subgroup.elements)))
    nodes = 0

    def dfs(start: int, span: frozenset, chosen: list):
        nonlocal nodes
        if len(span) == H.order:
            return chosen
        rest = H.order // len(span)
        for idx in range(start, len(facs)):
            nodes += 1
            if nodes > budget:
                raise DecompositionFailed("decomposition search budget exhausted")
            f = facs[idx]
            if rest % f.subgroup.order:
                continue
            if len(span & f.subgroup.elements) != 1:
                continue
            new = frozenset(G.mul(x, y) for x in span for y in f.subgroup.elements)
            if len(new) != len(span) * f.subgroup.order:
                continue
            got = dfs(idx + 1, new, chosen + [f])
            if got is not None:
                return got
        return None

    found = dfs(0, frozenset([G.identity]), [])
    if found is None:
        return None
    found.sort(key=lambda f: (f.top_exponent, f.k, not f.chain, sorted(f.subgroup.elements)))
    return DecompositionResult(G, H, alpha, found)


def decompose_H(G: PGroup, H: Subgroup, alpha: Element | None = None) -> DecompositionResult:
    """Decompose H after checking both conditions; refuse if either fails."""
    alpha = alpha if alpha is not None else default_alpha(G, H)
    _check_H(G, H, alpha)
    if not check_lcs_condition(G):
        raise HypothesisRefusal("condition-(1)-failed", "G_(p) is not trivial")
    ok, bad = check_power_condition(G, H, alpha)
    if not ok:
        raise HypothesisRefusal("condition-(2)-failed",
                                "H_j & H^p != H_j^p for basis indices " + str(bad), bad)
    res = search_decomposition(G, H, alpha)
    if res is None:
        raise DecompositionFailed("conditions hold but no chain decomposition was found")
    problems = verify_decomposition(res)
    if problems:
        raise DecompositionFailed("; ".join(problems))
    return res


def _prod(xs) -> int:
    out = 1
    for x in xs:
        out *= x
    return out


def verify_decomposition(res: DecompositionResult) -> list[str]:
    """Recheck a decomposition from scratch; returns a list of problems."""
    G, H, alpha = res.group, res.H, res.alpha
    p = G.p
    problems = []
    span = frozenset([G.identity])
    for n, f in enumerate(res.factors):
        S = subgroup_closure(G, f.basis)
        if not S.same(f.subgroup):
            problems.append(f"factor {n}: stored elements differ from chain closure")
        if not S <= H:
            problems.append(f"factor {n}: not contained in H")
        if not is_normal(S, G):
            problems.append(f"factor {n}: not normal")
        inv = abelian_invariants(S)
        if sorted(inv, reverse=True) != sorted(f.invariants, reverse=True):
            problems.append(f"factor {n}: invariants {inv} != {list(f.invariants)}")
        if any(q != p for q in inv[1:]):
            problems.append(f"factor {n}: not of type C_(p^b) x (C_p)^c")
        for a, b in zip(f.chain, f.chain[1:]):
            if G.commutator(a, alpha) != b:
                problems.append(f"factor {n}: chain relation broken")
        if f.chain and G.commutator(f.chain[-1], alpha) not in S:
            problems.append(f"factor {n}: factor not stable under alpha")
        if any(G.element_order(b) > p for b in f.basis[1:]):
            problems.append(f"factor {n}: basis member past the first has order > p")
        if not f.basis or (f.chain and tuple(f.chain) != tuple(f.basis)):
            problems.append(f"factor {n}: missing or inconsistent basis")
        elif subgroup_closure(G, f.basis).order != _prod(G.element_order(b) for b in f.basis):
            problems.append(f"factor {n}: basis is not independent")
        new = frozenset(G.mul(x, y) for x in span for y in S.elements)
        if len(new) != len(span) * S.order:
            problems.append(f"factor {n}: product not direct")
        span = new
    if span != H.elements:
        problems.append("factors do not generate H")
    return problems


def _chain_with(G: PGroup, beta1: Element, alpha: Element, orientation: str, length: int):
    chain = [beta1]
    for _ in range(length):
        b = chain[-1]
        chain.append(G.commutator(b, alpha) if orientation == "[b,a]" else G.commutator(alpha, b))
    return chain


def chain_identity_holds(G: PGroup, beta1: Element, alpha: Element, orientation: str = "[b,a]") -> bool | None:
    """``alpha^-p b_1 alpha^p == b_1 b_2^C(p,1) ... b_p^C(p,p-1) b_(p+1)``.

    The chain is continued to p+1 members without truncation.  Returns None
    when the chain members do not commute pairwise (the identity is then
    not asserted).
    """
    p = G.p
    chain = _chain_with(G, beta1, alpha, orientation, p)
    for a in chain:
        for b in chain:
            if G.mul(a, b) != G.mul(b, a):
                return None
    lhs = G.conj(beta1, G.pow(alpha, p))
    rhs = G.identity
    for j, b in enumerate(chain):
        rhs = G.mul(rhs, G.pow(b, comb(p, j)))
    return lhs == rhs


def check_chain_identity(G: PGroup, beta1: Element, alpha: Element) -> tuple[bool | None, str]:
    """Binomial chain identity under the fixed orientation, retrying the opposite one on failure."""
    ok = chain_identity_holds(G, beta1, alpha, "[b,a]")
    if ok is False:
        if chain_identity_holds(G, beta1, alpha, "[a,b]"):
            return True, "[a,b]"
    return ok, "[b,a]"
