"""Built-in groups used by tests, the catalog and the corpus scripts."""
from __future__ import annotations

from .pgroup import PGroup, PresentationError


def abelian(p: int, exps: list[int]) -> PGroup:
    """``C_{p^a1} x C_{p^a2} x ...``, generators of each factor adjacent."""
    n = sum(exps)
    powers = {}
    k = 0
    for a in exps:
        for l in range(a - 1):
            v = [0] * n
            v[k + l + 1] = 1
            powers[k + l] = tuple(v)
        k += a
    return PGroup.from_relations(p, n, powers)


def heisenberg(p: int = 3) -> PGroup:
    return PGroup.from_relations(p, 3, comms={(1, 0): (0, 0, 1)})


def modular(p: int = 3) -> PGroup:
    """``<a, b | a^(p^2) = b^p = 1, b^-1 a b = a^(1+p)>`` with g1 = b, g2 = a."""
    return PGroup.from_relations(p, 3, powers={1: (0, 0, 1)}, comms={(1, 0): (0, 0, 1)})


def semidirect(p: int, exps: list[int], M: list[list[int]], alpha_p: list[int] | None = None,
               check: bool = True) -> PGroup:
    """Pc presentation of ``H x| <alpha>`` for ``H = (+) Z/p^a_i``.

    Conjugation is ``alpha^-1 h alpha = M h`` (columns of M are images of the
    standard basis), and ``alpha^p = alpha_p`` (an element of H fixed by M).
    Generator 1 is alpha; the rest form an alpha-stable series of H whose
    factors are central of order p.
    """
    r = len(exps)
    mods = [p ** a for a in exps]
    alpha_p = alpha_p or [0] * r

    def red(v):
        return tuple(x % m for x, m in zip(v, mods))

    def add(u, v):
        return red([a + b for a, b in zip(u, v)])

    def scale(c, v):
        return red([c * a for a in v])

    def act(v):
        return red([sum(M[i][j] * v[j] for j in range(r)) for i in range(r)])

    zero = (0,) * r
    if act(tuple(alpha_p)) != red(alpha_p):
        raise PresentationError("alpha^p must be fixed by the action")

    def span(gens):
        seen = {zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    Lgens = [red([1 if i == j else 0 for j in range(r)]) for i in range(r)]
    L = span(Lgens)
    layers = [L]
    tops = []
    while len(L) > 1:
        Rgens = [add(act(v), scale(-1, v)) for v in Lgens] + [scale(p, v) for v in Lgens]
        cur_gens = list(Rgens)
        cur = span(cur_gens)
        if cur == L:
            raise PresentationError("action is not unipotent modulo p")
        basis = []
        for v in Lgens:
            if v not in cur:
                basis.append(v)
                cur_gens.append(v)
                cur = span(cur_gens)
        tops.append(basis[0])
        Lgens = Rgens + basis[1:]
        L = span(Lgens)
        layers.append(L)
    n = len(tops) + 1

    def sift(v, start):
        # express v in layers[start] via tops[start:]
        out = [0] * n
        for k in range(start, len(tops)):
            for c in range(p):
                w = add(v, scale(-c, tops[k]))
                if w in layers[k + 1]:
                    out[k + 1] = c
                    v = w
                    break
            else:
                raise PresentationError("sifting failed")
        assert v == zero
        return tuple(out)

    powers = {0: sift(red(alpha_p), 0)}
    comms = {}
    for k, t in enumerate(tops):
        powers[k + 1] = sift(scale(p, t), k + 1)
        comms[(k + 1, 0)] = sift(add(act(t), scale(-1, t)), k + 1)
    G = PGroup.from_relations(p, n, powers, comms, check=check)
    G._cache["semidirect"] = {"exps": list(exps), "M": [list(row) for row in M],
                              "tops": [list(t) for t in tops]}
    G._cache["semidirect_sift"] = lambda v: sift(red(v), 0)
    return G


def sd_element(G: PGroup, alpha_power: int, h: list[int]):
    """Normal form of ``alpha^a * h`` in a group built by :func:`semidirect`."""
    x = G.pow(G.gen(0), alpha_power)
    return G.mul(x, G._cache["semidirect_sift"](h))



def is_order_p_automorphism(p: int, exps: list[int], M: list[list[int]]) -> bool:
    """Does M define an endomorphism of H with M^p = 1?"""
    r = len(exps)
    mods = [p ** a for a in exps]
    for j in range(r):
        for i in range(r):
            if (M[i][j] * mods[j]) % mods[i]:
                return False

    def act(v):
        return tuple(sum(M[i][j] * v[j] for j in range(r)) % mods[i] for i in range(r))

    for j in range(r):
        v = tuple(int(i == j) for i in range(r))
        w = v
        for _ in range(p):
            w = act(w)
        if w != v:
            return False
    return True


def random_semidirect(rng, p: int, shapes, twisted: float = 0.0, tries: int = 10000):
    """Random ``H x| <alpha>`` with H of a shape drawn from ``shapes``.

    With probability ``twisted``, alpha^p is a random M-fixed element of H.
    Returns ``(group, exps, M, alpha_p)``.
    """
    for _ in range(tries):
        exps = list(rng.choice(shapes))
        r = len(exps)
        mods = [p ** a for a in exps]
        M = [[rng.randrange(mods[i]) for _ in range(r)] for i in range(r)]
        if not is_order_p_automorphism(p, exps, M):
            continue
        alpha_p = None
        if rng.random() < twisted:
            alpha_p = [rng.randrange(m) for m in mods]
        try:
            return semidirect(p, exps, M, alpha_p), exps, M, alpha_p
        except PresentationError:
            continue
    raise RuntimeError("no automorphism found; widen the shapes")


def random_pc_group(rng, p: int, n: int, density: float = 0.4, tries: int = 2000) -> PGroup:
    """Random consistent pc presentation on n generators (rejection sampling)."""
    for _ in range(tries):
        powers, comms = {}, {}
        for i in range(n):
            if rng.random() < density:
                powers[i] = tuple(rng.randrange(p) if k > i else 0 for k in range(n))
        for j in range(n):
            for i in range(j):
                if rng.random() < density:
                    comms[(j, i)] = tuple(rng.randrange(p) if k > j else 0 for k in range(n))
        try:
            return PGroup.from_relations(p, n, powers, comms)
        except PresentationError:
            continue
    raise RuntimeError("no consistent presentation found")
