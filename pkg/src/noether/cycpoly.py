"""Sparse Laurent polynomials and rational functions over Q(xi_n).

Field elements are coefficient tuples of polynomials in ``xi`` reduced
modulo the n-th cyclotomic polynomial.  Rational functions are pairs of
polynomials with no normal form; equality is decided by cross-multiplying.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def cyclotomic_coeffs(n: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_n, lowest degree first."""
    # x^n - 1 = prod_{d | n} Phi_d
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, list(cyclotomic_coeffs(d)))
    return tuple(num)


def _polydiv_exact(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for k in range(len(out) - 1, -1, -1):
        q = a[k + len(b) - 1] // b[-1]
        out[k] = q
        for i, bi in enumerate(b):
            a[k + i] -= q * bi
    assert not any(a), "inexact cyclotomic division"
    return out


class CycloField:
    def __init__(self, n: int):
        self.n = n
        self.phi = cyclotomic_coeffs(n)
        self.deg = len(self.phi) - 1

    def reduce(self, coeffs) -> tuple:
        c = [Fraction(x) for x in coeffs]
        d = self.deg
        for k in range(len(c) - 1, d - 1, -1):
            q = c[k]
            if q:
                for i, pi in enumerate(self.phi):
                    c[k - d + i] -= q * pi
        c = c[:d] + [Fraction(0)] * max(0, d - len(c))
        return tuple(c)

    def const(self, q) -> tuple:
        return self.reduce([q])

    def xi(self, k: int = 1) -> tuple:
        k %= self.n
        return self.reduce([0] * k + [1])

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return self.reduce(out)

    def is_zero(self, a) -> bool:
        return not any(a)


class Poly:
    """Sparse Laurent polynomial: ``{exponent tuple: field element}``."""

    __slots__ = ("K", "nvars", "terms")

    def __init__(self, K: CycloField, nvars: int, terms=None):
        self.K = K
        self.nvars = nvars
        self.terms = {e: c for e, c in (terms or {}).items() if not K.is_zero(c)}

    @classmethod
    def const(cls, K, nvars, q):
        return cls(K, nvars, {(0,) * nvars: K.const(q)})

    @classmethod
    def monomial(cls, K, nvars, exps, coeff=None):
        return cls(K, nvars, {tuple(exps): coeff if coeff is not None else K.const(1)})

    def __add__(self, other: "Poly") -> "Poly":
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = self.K.add(t[e], c) if e in t else c
        return Poly(self.K, self.nvars, t)

    def __neg__(self):
        return Poly(self.K, self.nvars, {e: self.K.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        K = self.K
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = K.mul(c1, c2)
                t[e] = K.add(t[e], c) if e in t else c
        return Poly(K, self.nvars, t)

    def scale(self, c) -> "Poly":
        return Poly(self.K, self.nvars, {e: self.K.mul(c, x) for e, x in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def subst_monomial(self, T) -> "Poly":
        """Apply ``v_i -> prod_j v_j^T[i][j]``."""
        t: dict = {}
        for e, c in self.terms.items():
            ne = tuple(sum(e[i] * T[i][j] for i in range(self.nvars)) for j in range(len(T[0])))
            t[ne] = self.K.add(t[ne], c) if ne in t else c
        return Poly(self.K, len(T[0]), t)

    def __eq__(self, other):
        return isinstance(other, Poly) and (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms))


class RatFunc:
    """A cyclotomic rational function ``num / den``."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.const(num.K, num.nvars, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @property
    def K(self):
        return self.num.K

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def scale(self, c) -> "RatFunc":
        return RatFunc(self.num.scale(c), self.den)

    def subst_monomial(self, T) -> "RatFunc":
        return RatFunc(self.num.subst_monomial(T), self.den.subst_monomial(T))


def verify_symbolic(lhs: RatFunc, rhs: RatFunc) -> bool:
    """Exact equality: ``lhs.num * rhs.den - rhs.num * lhs.den == 0``."""
    if lhs.den.is_zero() or rhs.den.is_zero():
        raise ZeroDivisionError("zero denominator")
    return (lhs.num * rhs.den - rhs.num * lhs.den).is_zero()
