"""Small exact linear algebra over Fraction: row reduction, null spaces, ranks."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

Vector = tuple  # tuple[Fraction, ...]


def dot(u, v) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def add(u, v) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u, v) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def scale(k, u) -> Vector:
    return tuple(k * a for a in u)


def neg(u) -> Vector:
    return tuple(-a for a in u)


def zeros(n: int) -> Vector:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> Vector:
    return tuple(Fraction(int(j == i)) for j in range(n))


def is_zero(u) -> bool:
    return all(a == 0 for a in u)


def matvec(A, x) -> Vector:
    return tuple(dot(row, x) for row in A)


def transpose(A):
    return [tuple(col) for col in zip(*A)]


def rref(rows, ncols: int):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    M = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        piv = M[r][c]
        M[r] = [v / piv for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return [tuple(row) for row in M[:r]], pivots


def rank(rows, ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols: int) -> list[Vector]:
    """Basis of {x : row . x = 0 for every row}, one vector per free column."""
    R, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(R, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


def row_basis(vectors, ncols: int) -> list[Vector]:
    """Canonical (RREF) basis of the span of the given vectors."""
    return rref(vectors, ncols)[0]


def in_span(v, basis, ncols: int) -> bool:
    return rank(list(basis) + [v], ncols) == rank(basis, ncols)


def primitive(v) -> Vector:
    """Positive multiple of a nonzero rational vector with coprime integer entries."""
    den = 1
    for a in v:
        den = lcm(den, Fraction(a).denominator)
    ints = [int(Fraction(a) * den) for a in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(Fraction(a // g) for a in ints)


def solve_unique(A, b):
    """Solve a square-or-tall consistent system with a unique solution, else None."""
    n = len(A[0]) if A else 0
    aug = [tuple(row) + (rhs,) for row, rhs in zip(A, b)]
    R, pivots = rref(aug, n + 1)
    if n in pivots or len(pivots) < n:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(R, pivots):
        x[p] = row[n]
    return tuple(x)
