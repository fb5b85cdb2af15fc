"""Finite p-groups given by power-commutator presentations.

Elements are exponent vectors ``(e_1, ..., e_n)`` with ``0 <= e_i < p``,
read as the normal form ``g_1^e_1 g_2^e_2 ... g_n^e_n``.  Generator indices
are 0-based in code; the text format in :mod:`noether.presfile` is 1-based.

Commutators follow ``[a, b] = a^-1 b^-1 a b`` throughout, so that
``b^-1 a b = a [a, b]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Element = tuple  # exponent vector


class PresentationError(ValueError):
    """Malformed or inconsistent power-commutator presentation."""


class PreconditionError(ValueError):
    pass


def _letters(vec: Sequence[int]) -> list[int]:
    out = []
    for i, e in enumerate(vec):
        out.extend([i] * e)
    return out


@dataclass(frozen=True, eq=False)
class PGroup:
    """A consistent pc presentation with relative orders all equal to p.

    ``powers[i]`` is the normal form of ``g_i^p``; ``comms[(j, i)]`` for
    ``j > i`` is the normal form of ``[g_j, g_i]``.  Missing entries are
    trivial.  Consistency is checked on construction.
    """

    p: int
    ngens: int
    powers: tuple
    comms: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_relations(cls, p: int, ngens: int, powers: dict | None = None,
                       comms: dict | None = None, check: bool = True) -> "PGroup":
        powers = powers or {}
        comms = comms or {}
        zero = (0,) * ngens
        pw = []
        for i in range(ngens):
            pw.append(cls._normalize_rhs(p, ngens, powers.get(i, zero), i, f"power {i + 1}"))
        cm = []
        for j in range(ngens):
            row = []
            for i in range(j):
                row.append(cls._normalize_rhs(p, ngens, comms.get((j, i), zero), j,
                                              f"comm {j + 1} {i + 1}"))
            cm.append(tuple(row))
        for (j, i) in comms:
            if not (0 <= i < j < ngens):
                raise PresentationError(f"commutator index pair ({j + 1}, {i + 1}) must satisfy j > i")
        for i in powers:
            if not 0 <= i < ngens:
                raise PresentationError(f"power relation for unknown generator {i + 1}")
        G = cls(p, ngens, tuple(pw), tuple(cm))
        if check:
            bad = G.consistency_failure()
            if bad is not None:
                raise PresentationError(f"inconsistent presentation: {bad}")
        return G

    @staticmethod
    def _normalize_rhs(p, n, vec, floor, what):
        vec = tuple(int(v) for v in vec)
        if len(vec) != n:
            raise PresentationError(f"{what}: exponent vector has length {len(vec)}, expected {n}")
        for k, v in enumerate(vec):
            if not 0 <= v < p:
                raise PresentationError(f"{what}: exponent {v} outside [0, {p})")
            if v and k <= floor:
                raise PresentationError(
                    f"{what}: relation uses generator {k + 1}, must use only generators > {floor + 1}")
        return vec

    # -- basic arithmetic -------------------------------------------------

    @property
    def order(self) -> int:
        return self.p ** self.ngens

    @property
    def identity(self) -> Element:
        return (0,) * self.ngens

    def gen(self, i: int) -> Element:
        v = [0] * self.ngens
        v[i] = 1
        return tuple(v)

    @property
    def gens(self) -> list[Element]:
        return [self.gen(i) for i in range(self.ngens)]

    def comm_rel(self, j: int, i: int) -> Element:
        return self.comms[j][i]

    def mul_gen(self, x: Element, i: int) -> Element:
        """Right-multiply a normal form by ``g_i`` (collection from the left)."""
        memo = self._cache.setdefault("mulgen", {})
        key = (x, i)
        hit = memo.get(key)
        if hit is not None:
            return hit
        n, p = self.ngens, self.p
        head = list(x[:i + 1]) + [0] * (n - i - 1)
        head[i] += 1
        word: list[int] = []
        if head[i] == p:
            head[i] = 0
            word.extend(_letters(self.powers[i]))
        # g_i^-1 g_j g_i = g_j [g_j, g_i]
        for j in range(i + 1, n):
            if x[j]:
                word.extend(([j] + _letters(self.comms[j][i])) * x[j])
        y = tuple(head)
        for letter in word:
            y = self.mul_gen(y, letter)
        memo[key] = y
        return y

    def mul(self, x: Element, y: Element) -> Element:
        for i, e in enumerate(y):
            for _ in range(e):
                x = self.mul_gen(x, i)
        return x

    def inv_gen(self, i: int) -> Element:
        memo = self._cache.setdefault("invgen", {})
        if i not in memo:
            # g_i^-1 = g_i^(p-1) (g_i^p)^-1, and g_i^p lies in higher generators
            base = [0] * self.ngens
            base[i] = self.p - 1
            memo[i] = self.mul(tuple(base), self.inv(self.powers[i]))
        return memo[i]

    def inv(self, x: Element) -> Element:
        memo = self._cache.setdefault("inv", {})
        hit = memo.get(x)
        if hit is not None:
            return hit
        out = self.identity
        for i in reversed(range(self.ngens)):
            for _ in range(x[i]):
                out = self.mul(out, self.inv_gen(i))
        memo[x] = out
        return out

    def pow(self, x: Element, k: int) -> Element:
        if k < 0:
            x, k = self.inv(x), -k
        out = self.identity
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def conj(self, x: Element, g: Element) -> Element:
        """``g^-1 x g``."""
        return self.mul(self.mul(self.inv(g), x), g)

    def commutator(self, a: Element, b: Element) -> Element:
        """``[a, b] = a^-1 b^-1 a b``."""
        if len(a) != self.ngens or len(b) != self.ngens:
            raise PreconditionError("elements belong to a different group")
        return self.mul(self.inv(self.mul(b, a)), self.mul(a, b))

    def element_order(self, x: Element) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mul(y, x)
            k += 1
        return k

    def collect(self, word: Iterable[tuple[int, int]]) -> Element:
        """Normal form of a word given as ``(generator, power)`` pairs."""
        x = self.identity
        for item in word:
            try:
                g, e = item
            except (TypeError, ValueError):
                raise PresentationError(f"malformed word entry {item!r}") from None
            if not isinstance(g, int) or not 0 <= g < self.ngens:
                raise PresentationError(f"generator index {g!r} out of range")
            if e >= 0:
                for _ in range(e):
                    x = self.mul_gen(x, g)
            else:
                for _ in range(-e):
                    x = self.mul(x, self.inv_gen(g))
        return x

    def elements(self) -> list[Element]:
        return [tuple(v) for v in itertools.product(range(self.p), repeat=self.ngens)]

    @property
    def exponent(self) -> int:
        if "exponent" not in self._cache:
            self._cache["exponent"] = max(self.element_order(x) for x in self.elements())
        return self._cache["exponent"]

    @property
    def exponent_log(self) -> int:
        e, q = 0, 1
        while q < self.exponent:
            q *= self.p
            e += 1
        return e

    def consistency_failure(self) -> str | None:
        """Return a description of the first failing relation, or None.

        Each relation is checked as an identity of right multiplication on
        every normal form.  If all hold, the maps generate a group acting
        regularly on the p^n normal forms, which forces |G| = p^n.
        """
        n, p = self.ngens, self.p
        for x in self.elements():
            for i in range(n):
                lhs = x
                for _ in range(p):
                    lhs = self.mul_gen(lhs, i)
                rhs = x
                for letter in _letters(self.powers[i]):
                    rhs = self.mul_gen(rhs, letter)
                if lhs != rhs:
                    return f"g{i + 1}^{p} at element {x}"
            for j in range(n):
                for i in range(j):
                    lhs = self.mul_gen(self.mul_gen(x, j), i)
                    rhs = self.mul_gen(self.mul_gen(x, i), j)
                    for letter in _letters(self.comms[j][i]):
                        rhs = self.mul_gen(rhs, letter)
                    if lhs != rhs:
                        return f"g{j + 1} g{i + 1} at element {x}"
        return None

    def relation_words(self):
        """Yield ``(lhs, rhs)`` generator-index words for every relation."""
        for i in range(self.ngens):
            yield [i] * self.p, _letters(self.powers[i])
        for j in range(self.ngens):
            for i in range(j):
                yield [j, i], [i, j] + _letters(self.comms[j][i])

    # -- subgroups ----------------------------------------------------------

    def subgroup(self, gens: Iterable[Element]) -> "Subgroup":
        return subgroup_closure(self, gens)

    @property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(self.gens), frozenset(self.elements()))

    @property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, (), frozenset([self.identity]))

    def is_abelian(self) -> bool:
        return all(not any(self.comms[j][i]) for j in range(self.ngens) for i in range(j))


@dataclass(frozen=True)
class Subgroup:
    group: PGroup
    gens: tuple
    elements: frozenset

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __le__(self, other: "Subgroup") -> bool:
        return self.elements <= other.elements

    def same(self, other: "Subgroup") -> bool:
        return self.elements == other.elements

    def is_abelian(self) -> bool:
        G = self.group
        return all(G.mul(a, b) == G.mul(b, a) for a in self.gens for b in self.gens)

    def intersection(self, other: "Subgroup") -> "Subgroup":
        els = self.elements & other.elements
        return Subgroup(self.group, tuple(sorted(els)), frozenset(els))

    def sorted_elements(self) -> list[Element]:
        return sorted(self.elements)


def subgroup_closure(G: PGroup, gens: Iterable[Element]) -> Subgroup:
    gens = tuple(g for g in gens if g != G.identity)
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(G, gens, frozenset(seen))


def normal_closure(G: PGroup, gens: Iterable[Element]) -> Subgroup:
    S = subgroup_closure(G, gens)
    while True:
        extra = [G.conj(s, g) for s in S.gens for g in G.gens]
        extra = [x for x in extra if x not in S]
        if not extra:
            return S
        S = subgroup_closure(G, S.gens + tuple(extra))


def is_normal(S: Subgroup, G: PGroup | None = None) -> bool:
    G = G or S.group
    return all(G.conj(s, g) in S for s in S.gens for g in G.gens)


def commutator_subgroup(G: PGroup, A: Subgroup, B: Subgroup) -> Subgroup:
    """``[A, B]`` for A, B normal: normal closure of generator commutators."""
    return normal_closure(G, [G.commutator(a, b) for a in A.gens for b in B.gens])


def lower_central_series(G: PGroup) -> list[Subgroup]:
    """``[G_(0), G_(1), ...]`` ending with the trivial subgroup."""
    series = [G.whole]
    while series[-1].order > 1:
        nxt = commutator_subgroup(G, G.whole, series[-1])
        if nxt.order == series[-1].order:
            raise PresentationError("lower central series does not terminate")
        series.append(nxt)
    return series


def power_subgroup(H: Subgroup, p: int | None = None) -> Subgroup:
    """``H^p = {h^p}`` for abelian H."""
    G = H.group
    p = p or G.p
    if not H.is_abelian():
        raise PreconditionError("power subgroup is only formed for abelian H")
    els = frozenset(G.pow(h, p) for h in H.elements)
    return Subgroup(G, tuple(sorted(els)), els)


def abelian_invariants(S: Subgroup) -> list[int]:
    """Cyclic factor orders of an abelian p-subgroup, largest first."""
    if not S.is_abelian():
        raise PreconditionError("abelian invariants requested for a non-abelian subgroup")
    G = S.group
    p = G.p
    counts = [1]  # counts[k] = #{x : x^(p^k) = 1}
    k = 0
    while counts[-1] < S.order:
        k += 1
        q = p ** k
        counts.append(sum(1 for x in S.elements if G.pow(x, q) == G.identity))
    ranks = []  # ranks[k-1] = number of invariants >= p^k
    for k in range(1, len(counts)):
        r, c = 0, counts[k] // counts[k - 1]
        while c > 1:
            c //= p
            r += 1
        ranks.append(r)
    out = []
    for k in range(len(ranks), 0, -1):
        more = ranks[k] if k < len(ranks) else 0
        out.extend([p ** k] * (ranks[k - 1] - more))
    return out


def conjugate_closure(G: PGroup, x: Element, alpha: Element, extra=()) -> Subgroup:
    """``<alpha^-i x alpha^i : 0 <= i < p>``, joined with ``extra`` if given."""
    conjs = list(extra)
    y = x
    for _ in range(G.p):
        conjs.append(y)
        y = G.conj(y, alpha)
    return subgroup_closure(G, conjs)


def abelian_basis(S: Subgroup, allowed=None) -> list[Element] | None:
    """A basis of an abelian subgroup: elements whose cyclic groups form a
    direct decomposition, with orders equal to ``abelian_invariants(S)``.

    Deterministic: candidates are tried in sorted order, largest order first.
    With ``allowed`` (a predicate), only admitted elements are used and None
    is returned if no such basis exists.
    """
    G = S.group
    inv = abelian_invariants(S)
    orders = {x: G.element_order(x) for x in S.elements}
    by_order: dict[int, list] = {}
    for x in sorted(S.elements):
        if allowed is None or allowed(x):
            by_order.setdefault(orders[x], []).append(x)

    def extend(span: frozenset, chosen: list) -> list | None:
        if len(chosen) == len(inv):
            return chosen
        q = inv[len(chosen)]
        for x in by_order.get(q, []):
            new = _span_product(G, span, x, q)
            if new is not None:
                got = extend(new, chosen + [x])
                if got is not None:
                    return got
        return None

    basis = extend(frozenset([G.identity]), [])
    assert basis is not None or allowed is not None, "abelian basis search failed"
    return basis


def _span_product(G, span, x, q):
    """``span * <x>`` if the product is direct (x of order q), else None."""
    powers = [G.identity]
    for _ in range(q - 1):
        powers.append(G.mul(powers[-1], x))
    if any(y in span for y in powers[1:]):
        return None
    return frozenset(G.mul(s, y) for s in span for y in powers)


def frattini_subgroup(G: PGroup) -> Subgroup:
    gens = [G.pow(g, G.p) for g in G.gens]
    gens += [G.commutator(a, b) for a in G.gens for b in G.gens]
    return normal_closure(G, gens)


def index_p_subgroups(G: PGroup) -> list[Subgroup]:
    """All maximal subgroups, in a deterministic order."""
    p = G.p
    phi = frattini_subgroup(G)
    tops: list[Element] = []
    span = phi
    for g in G.gens:
        if g not in span:
            tops.append(g)
            span = subgroup_closure(G, span.gens + (g,))
    d = len(tops)
    out = []
    for c in itertools.product(range(p), repeat=d):
        nz = [k for k, v in enumerate(c) if v]
        if not nz or c[nz[0]] != 1:
            continue
        piv = nz[0]
        kgens = list(phi.gens)
        for i in range(d):
            if i != piv:
                kgens.append(G.mul(tops[i], G.pow(tops[piv], -c[i])))
        out.append(subgroup_closure(G, kgens))
    return out


def abelian_index_p_subgroups(G: PGroup) -> list[Subgroup]:
    return [H for H in index_p_subgroups(G) if H.is_abelian()]


def default_alpha(G: PGroup, H: Subgroup) -> Element:
    """Lowest-index pc generator outside H."""
    for g in G.gens:
        if g not in H:
            return g
    raise PreconditionError("H is the whole group")


def default_H(G: PGroup) -> Subgroup:
    """``<g_2, ..., g_n>`` when abelian, else the first abelian maximal subgroup."""
    tail = subgroup_closure(G, G.gens[1:])
    if tail.order * G.p == G.order and tail.is_abelian():
        return tail
    found = abelian_index_p_subgroups(G)
    if not found:
        raise PreconditionError("G has no abelian subgroup of index p")
    return found[0]
