"""Monomial actions with root-of-unity scalars, as exact integer data.

Row convention: for a generator g with matrix A and scalar vector c,

    g . x_i = zeta^(c_i) * prod_j x_j^(A[i][j])

where zeta is a fixed primitive root of unity of order ``modulus`` (= p^e).
Composition follows ``(gh) . f = g . (h . f)``, hence
``A_gh = A_h A_g`` and ``c_gh = c_h + A_h c_g``.

A substitution introduces new variables ``w_l = zeta^(shift_l) * x^(rows_l)``.
If ``g . w = zeta^c' * w^A'`` then ``rows A = A' rows`` and
``shift + rows c = c' + A' shift (mod modulus)``; the certificate verifier
checks exactly these identities.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import intlin
from .pgroup import PGroup, _letters


class SubstitutionInvalid(ValueError):
    reason = "substitution-invalid"

    def __init__(self, msg: str, var: int | None = None):
        super().__init__(msg)
        self.var = var


class InsufficientRoots(ValueError):
    reason = "insufficient-roots"


def _tup(M):
    return tuple(tuple(int(x) for x in row) for row in M)


@dataclass(frozen=True)
class MonomialAction:
    nvars: int
    modulus: int
    gens: tuple          # generator labels
    mats: tuple          # per generator, nvars x nvars
    scalars: tuple       # per generator, length nvars, reduced mod modulus
    names: tuple = ()    # variable names, for reporting only

    def __post_init__(self):
        object.__setattr__(self, "mats", tuple(_tup(A) for A in self.mats))
        object.__setattr__(self, "scalars",
                           tuple(tuple(int(c) % self.modulus for c in v) for v in self.scalars))
        if not self.names:
            object.__setattr__(self, "names", tuple(f"x{i}" for i in range(self.nvars)))

    def index(self, g) -> int:
        if isinstance(g, int):
            return g
        return self.gens.index(g)

    def of(self, g):
        k = self.index(g)
        return [list(r) for r in self.mats[k]], list(self.scalars[k])

    def restrict_gens(self, keep) -> "MonomialAction":
        idx = [self.index(g) for g in keep]
        return replace(self, gens=tuple(self.gens[k] for k in idx),
                       mats=tuple(self.mats[k] for k in idx),
                       scalars=tuple(self.scalars[k] for k in idx))

    def with_names(self, names) -> "MonomialAction":
        return replace(self, names=tuple(names))

    def to_json(self) -> dict:
        return {
            "nvars": self.nvars,
            "modulus": self.modulus,
            "gens": list(self.gens),
            "mats": [[list(r) for r in A] for A in self.mats],
            "scalars": [list(c) for c in self.scalars],
            "names": list(self.names),
        }

    @classmethod
    def from_json(cls, d: dict) -> "MonomialAction":
        return cls(d["nvars"], d["modulus"], tuple(d["gens"]), d["mats"], d["scalars"],
                   tuple(d.get("names", ())))

    def describe(self, g) -> list[str]:
        """Human-readable images of every variable under g."""
        A, c = self.of(g)
        out = []
        for i in range(self.nvars):
            mono = " ".join(f"{self.names[j]}^{e}" if e != 1 else self.names[j]
                            for j, e in enumerate(A[i]) if e)
            sc = f"z^{c[i]} " if c[i] else ""
            out.append(f"{self.names[i]} -> {sc}{mono or '1'}")
        return out


def compose_actions(act: MonomialAction, word) -> tuple[list, list]:
    """Matrix and scalars of the product ``w_1 w_2 ... w_r`` of generators."""
    n, N = act.nvars, act.modulus
    A = intlin.identity(n)
    c = [0] * n
    for g in word:
        Ag, cg = act.of(g)
        # u.g : A_ug = A_g A_u, c_ug = c_g + A_g c_u
        c = [(x + y) % N for x, y in zip(cg, intlin.matvec(Ag, c))]
        A = intlin.matmul(Ag, A)
    return A, c


def is_identity(A, c) -> bool:
    return A == intlin.identity(len(A)) and not any(c)


def verify_relations(act: MonomialAction, G: PGroup, gen_words=None) -> bool:
    """True iff every pc relation of G acts as the identity.

    ``gen_words[i]`` is the word in ``act``'s generators representing the
    i-th pc generator of G (defaults to generator i itself).
    """
    if gen_words is None:
        if len(act.gens) != G.ngens:
            return False
        gen_words = [[i] for i in range(G.ngens)]
    for lhs, rhs in G.relation_words():
        wl = [g for i in lhs for g in gen_words[i]]
        wr = [g for i in rhs for g in gen_words[i]]
        if compose_actions(act, wl) != compose_actions(act, wr):
            return False
    return True


def element_word(x) -> list[int]:
    return _letters(x)


def _then(u, g, N):
    """Pair for ``u`` followed by ``g`` (as in compose_actions)."""
    (Au, cu), (Ag, cg) = u, g
    return intlin.matmul(Ag, Au), [(x + y) % N for x, y in zip(cg, intlin.matvec(Ag, cu))]


def kernel_size(act: MonomialAction, G: PGroup, gen_words=None) -> int:
    """Number of elements of G acting trivially (1 means faithful).

    Walks the normal forms ``g_1^e_1 ... g_n^e_n`` depth first, so each
    element costs one composition.
    """
    if gen_words is None:
        gen_words = [[i] for i in range(G.ngens)]
    N = act.modulus
    powers = []
    for w in gen_words:
        g = compose_actions(act, w)
        pw = [(intlin.identity(act.nvars), [0] * act.nvars)]
        for _ in range(G.p - 1):
            pw.append(_then(pw[-1], g, N))
        powers.append(pw)

    def walk(i, pair):
        if i == G.ngens:
            return int(is_identity(*pair))
        total = walk(i + 1, pair)
        for e in range(1, G.p):
            total += walk(i + 1, _then(pair, powers[i][e], N))
        return total

    return walk(0, (intlin.identity(act.nvars), [0] * act.nvars))


@dataclass(frozen=True)
class Substitution:
    rows: tuple                  # m' x m integer matrix
    shift: tuple = ()            # per new variable, exponent of zeta (mod modulus)
    kind: str = "unimodular"     # "unimodular" | "sublattice" | "fibration"
    fixed_by: tuple = ()         # sublattice: words whose fixed field is taken
    dropped: tuple = ()          # fibration: old variables split off
    names: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", _tup(self.rows))
        if not self.shift:
            object.__setattr__(self, "shift", (0,) * len(self.rows))
        object.__setattr__(self, "shift", tuple(int(s) for s in self.shift))
        object.__setattr__(self, "fixed_by", tuple(tuple(w) for w in self.fixed_by))
        object.__setattr__(self, "dropped", tuple(self.dropped))
        object.__setattr__(self, "names", tuple(self.names))

    def to_json(self) -> dict:
        return {
            "rows": [list(r) for r in self.rows],
            "shift": list(self.shift),
            "kind": self.kind,
            "fixed_by": [list(w) for w in self.fixed_by],
            "dropped": list(self.dropped),
            "names": list(self.names),
        }

    @classmethod
    def from_json(cls, d) -> "Substitution":
        return cls(d["rows"], tuple(d["shift"]), d["kind"], tuple(map(tuple, d["fixed_by"])),
                   tuple(d["dropped"]), tuple(d["names"]))


def character_image_size(act: MonomialAction, words) -> int:
    """Order of the group of scalar vectors generated by the given words
    (which must act diagonally)."""
    N = act.modulus
    vecs = []
    for w in words:
        A, c = compose_actions(act, w)
        if A != intlin.identity(act.nvars):
            raise SubstitutionInvalid("fixed-field pass over a non-diagonal element")
        vecs.append(tuple(c))
    zero = (0,) * act.nvars
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for v in vecs:
                y = tuple((a + b) % N for a, b in zip(x, v))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def check_substitution(act: MonomialAction, sub: Substitution) -> None:
    """Raise SubstitutionInvalid unless the substitution's side conditions hold."""
    m = act.nvars
    S = [list(r) for r in sub.rows]
    if any(len(r) != m for r in S):
        raise SubstitutionInvalid("row length does not match variable count")
    for l, r in enumerate(S):
        if not any(r):
            raise SubstitutionInvalid("zero row", l)
    if len(sub.shift) != len(S):
        raise SubstitutionInvalid("shift length mismatch")
    if sub.kind == "unimodular":
        if len(S) != m or not intlin.is_unimodular(S):
            raise SubstitutionInvalid("substitution matrix is not unimodular")
    elif sub.kind == "sublattice":
        if len(S) != m:
            raise SubstitutionInvalid("sublattice pass must keep the rank")
        d = abs(intlin.det(S))
        if d == 0:
            raise SubstitutionInvalid("singular sublattice")
        N = act.modulus
        for w in sub.fixed_by:
            A, c = compose_actions(act, w)
            if A != intlin.identity(m):
                raise SubstitutionInvalid("fixed-field pass over a non-diagonal element")
            for l, r in enumerate(S):
                if sum(a * b for a, b in zip(r, c)) % N:
                    raise SubstitutionInvalid("new variable is not fixed", l)
        if d != character_image_size(act, sub.fixed_by):
            raise SubstitutionInvalid(
                f"sublattice index {d} differs from the order of the acting group")
    elif sub.kind == "fibration":
        full = S + [[int(j == d) for j in range(m)] for d in sub.dropped]
        if len(full) != m or not intlin.is_unimodular(full):
            raise SubstitutionInvalid("kept and dropped variables do not form a basis")
        for k in range(len(act.gens)):
            A, _ = act.of(k)
            for d in sub.dropped:
                diff = [a - int(j == d) for j, a in enumerate(A[d])]
                if intlin.solve_left_int(S, diff) is None:
                    raise SubstitutionInvalid(
                        f"image of dropped variable {act.names[d]} under {act.gens[k]} "
                        "is not (invariant monomial) * variable", d)
    else:
        raise SubstitutionInvalid(f"unknown substitution kind {sub.kind!r}")


def apply_substitution(act: MonomialAction, sub: Substitution, check: bool = True) -> MonomialAction:
    """The induced action on the new variables."""
    if check:
        check_substitution(act, sub)
    N = act.modulus
    S = [list(r) for r in sub.rows]
    mats, scal = [], []
    for k in range(len(act.gens)):
        A, c = act.of(k)
        newA, newc = [], []
        for l, r in enumerate(S):
            img = intlin.vecmat(r, A)
            t = intlin.solve_left_int(S, img)
            if t is None:
                raise SubstitutionInvalid(
                    f"image of new variable {l} under {act.gens[k]} leaves the new lattice", l)
            newA.append(t)
            cl = sub.shift[l] + sum(a * b for a, b in zip(r, c)) - sum(a * b for a, b in zip(t, sub.shift))
            newc.append(cl % N)
        mats.append(newA)
        scal.append(newc)
    names = sub.names or tuple(f"w{l}" for l in range(len(S)))
    return MonomialAction(len(S), N, act.gens, mats, scal, names)


def cyclic_form(n: int) -> list[list[int]]:
    """Matrix of ``v_1 -> v_2 -> ... -> v_(n-1) -> (v_1 ... v_(n-1))^-1`` on n-1 variables."""
    m = n - 1
    C = intlin.zeros(m, m)
    for i in range(m - 1):
        C[i][i + 1] = 1
    C[m - 1] = [-1] * m
    return C


def alpha_blocks(act: MonomialAction, alpha) -> list[list[int]]:
    """Connected components of the support graph of alpha's matrix."""
    A, _ = act.of(alpha)
    parent = list(range(act.nvars))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(act.nvars):
        for j in range(act.nvars):
            if A[i][j]:
                parent[find(i)] = find(j)
    comps: dict[int, list[int]] = {}
    for i in range(act.nvars):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values())


def normalize_alpha_twist(act: MonomialAction, alpha, p: int,
                          blocks: list[list[int]] | None = None):
    """Rescale cyclic blocks so that alpha's wrap-around scalar vanishes.

    Each block must carry alpha in the form ``y_1 -> ... -> y_(p-1) ->
    zeta^b (y_1...y_(p-1))^-1`` with no other scalars.  Dividing each y_i by
    a p-th root of ``zeta^b`` removes b and leaves diagonal generators alone.
    """
    A, c = act.of(alpha)
    N = act.modulus
    blocks = blocks if blocks is not None else alpha_blocks(act, alpha)
    shift = [0] * act.nvars
    C = cyclic_form(p)
    for blk in blocks:
        sub = [[A[i][j] for j in blk] for i in blk]
        if len(blk) != p - 1 or sub != C:
            raise SubstitutionInvalid(f"block {blk} is not in cyclic form")
        if any(c[i] for i in blk[:-1]):
            raise SubstitutionInvalid(f"block {blk} carries scalars before the wrap")
        b = c[blk[-1]]
        if b % p:
            raise InsufficientRoots(
                f"wrap scalar zeta^{b} has no p-th root among the {N}-th roots of unity")
        ell = (b // p) % N
        for i in blk:
            shift[i] = -ell % N
    sub = Substitution(intlin.identity(act.nvars), tuple(shift), "unimodular", names=act.names)
    return apply_substitution(act, sub), sub
