"""Exact integer matrix helpers on plain lists of lists (row-major)."""
from __future__ import annotations

from fractions import Fraction


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> list[list[int]]:
    return [[0] * c for _ in range(r)]


def matmul(A, B):
    if not A:
        return []
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        acc = [0] * cols
        for k, a in enumerate(row):
            if a:
                acc = [x + a * y for x, y in zip(acc, B[k])]
        out.append(acc)
    return out


def matvec(A, v):
    return [sum(a * b for a, b in zip(row, v)) for row in A]


def vecmat(v, A):
    cols = len(A[0]) if A else 0
    return [sum(v[k] * A[k][j] for k in range(len(v)) if v[k]) for j in range(cols)]


def matpow(A, k: int):
    out = identity(len(A))
    for _ in range(k):
        out = matmul(out, A)
    return out


def matadd(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def det(A) -> int:
    """Bareiss fraction-free determinant."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for r in range(k + 1, n):
                if M[r][k]:
                    M[k], M[r] = M[r], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def rank(A) -> int:
    M = [[Fraction(x) for x in row] for row in A]
    r = 0
    cols = len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def solve_left(S, b):
    """Rational t with ``t S = b`` for S of full row rank, or None."""
    m, n = len(S), len(b)
    # columns of S^T: solve S^T t^T = b^T
    aug = [[Fraction(S[i][j]) for i in range(m)] + [Fraction(b[j])] for j in range(n)]
    row = 0
    pivcols = []
    for c in range(m):
        piv = next((i for i in range(row, n) if aug[i][c] != 0), None)
        if piv is None:
            return None
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][c]
        aug[row] = [x / pv for x in aug[row]]
        for i in range(n):
            if i != row and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        pivcols.append(c)
        row += 1
    if any(aug[i][m] != 0 for i in range(row, n)):
        return None
    return [aug[i][m] for i in range(m)]


def solve_left_int(S, b):
    t = solve_left(S, b)
    if t is None or any(x.denominator != 1 for x in t):
        return None
    return [int(x) for x in t]


def inverse(A):
    """Rational inverse; returns integer entries when unimodular."""
    n = len(A)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    inv = [row[n:] for row in aug]
    if all(x.denominator == 1 for row in inv for x in row):
        return [[int(x) for x in row] for row in inv]
    return inv


def is_unimodular(A) -> bool:
    return len(A) == len(A[0]) and abs(det(A)) == 1


def block_diag(blocks):
    n = sum(len(b) for b in blocks)
    out = zeros(n, n)
    k = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[k + i][k + j] = x
        k += len(b)
    return out


def hermite_rows(rows):
    """Row-style Hermite normal form of an integer row basis (nonzero rows)."""
    M = [list(r) for r in rows]
    if not M:
        return []
    ncols = len(M[0])
    r = 0
    for c in range(ncols):
        while True:
            nz = [i for i in range(r, len(M)) if M[i][c] != 0]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(M[i][c]))
            M[r], M[piv] = M[piv], M[r]
            done = True
            for i in range(r + 1, len(M)):
                if M[i][c]:
                    q = M[i][c] // M[r][c]
                    M[i] = [a - q * b for a, b in zip(M[i], M[r])]
                    if M[i][c]:
                        done = False
            if done:
                break
        if r < len(M) and M[r][c] != 0:
            if M[r][c] < 0:
                M[r] = [-a for a in M[r]]
            for i in range(r):
                q = M[i][c] // M[r][c]
                M[i] = [a - q * b for a, b in zip(M[i], M[r])]
            r += 1
    return [row for row in M if any(row)]
