"""Sublinear operators into Q^m with the componentwise order.

A finite family of m x n matrices generates p(x) = sup{A x : A in family},
computed row by row.  The support hull of the family is the set of matrices
dominated by p; it factors into one polytope per row.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import linalg as la
from .core.geometry import MAX_ENUM_DIM, DimensionCapError, Polytope, hull_membership
from .core.geometry import hull_membership_lp, polytope_inequalities
from .core.lp import eq, lp_solve
from .core.scalars import qvec
from .generation import AffineFunctional, PolyFunc, minorizes, subdifferential_at_zero


def _matrix(rows):
    rows = tuple(qvec(r) for r in rows)
    if not rows:
        raise ValueError("a matrix needs at least one row")
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise ValueError("ragged matrix")
    return rows


@dataclass(frozen=True)
class MatrixOperator:
    """Linear map Q^n -> Q^m.  Positivity is read for the componentwise order on both sides."""

    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", _matrix(self.rows))

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    @property
    def is_positive(self) -> bool:
        return all(a >= 0 for r in self.rows for a in r)

    def __call__(self, x):
        x = qvec(x)
        if len(x) != self.shape[1]:
            raise ValueError(f"vector of dimension {len(x)} for a {self.shape} matrix")
        return la.matvec(self.rows, x)


@dataclass(frozen=True)
class BoundedMap:
    """A finite map label -> vector in Q^m, stored as ordered (label, value) pairs."""

    items: tuple

    def __post_init__(self):
        items = tuple((lbl, qvec(v)) for lbl, v in self.items)
        labels = [lbl for lbl, _ in items]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels")
        if len({len(v) for _, v in items}) > 1:
            raise ValueError("values of different dimensions")
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, mapping) -> "BoundedMap":
        return cls(tuple(mapping.items()))

    @property
    def labels(self):
        return tuple(lbl for lbl, _ in self.items)

    def __getitem__(self, label):
        for lbl, v in self.items:
            if lbl == label:
                return v
        raise KeyError(label)

    def __add__(self, other: "BoundedMap") -> "BoundedMap":
        if set(self.labels) != set(other.labels):
            raise ValueError("maps on different index sets")
        return BoundedMap(tuple((lbl, la.add(v, other[lbl])) for lbl, v in self.items))

    def scaled(self, lam) -> "BoundedMap":
        return BoundedMap(tuple((lbl, la.scale(lam, v)) for lbl, v in self.items))

    def leq(self, other: "BoundedMap") -> bool:
        return all(a <= b for lbl, v in self.items for a, b in zip(v, other[lbl]))


@dataclass(frozen=True)
class OperatorFamily:
    members: tuple

    def __post_init__(self):
        members = tuple(m if isinstance(m, MatrixOperator) else MatrixOperator(m)
                        for m in self.members)
        if not members:
            raise ValueError("an operator family needs a member")
        if len({m.shape for m in members}) > 1:
            raise ValueError("members of different shapes")
        object.__setattr__(self, "members", members)

    @property
    def shape(self):
        return self.members[0].shape

    def __len__(self):
        return len(self.members)

    def row_points(self, j):
        return [m.rows[j] for m in self.members]


def canonical_sublinear(f: BoundedMap):
    """Componentwise supremum of the values of f."""
    if not f.items:
        raise ValueError("the supremum over an empty index set is not a vector")
    vals = [v for _, v in f.items]
    return tuple(max(col) for col in zip(*vals))


def family_embed(family: OperatorFamily, x) -> BoundedMap:
    return BoundedMap(tuple((i, A(x)) for i, A in enumerate(family.members)))


def p_family(family: OperatorFamily, x, check=False):
    x = qvec(x)
    m, n = family.shape
    if len(x) != n:
        raise ValueError(f"vector of dimension {len(x)} for operators on Q^{n}")
    val = tuple(max(la.dot(A.rows[j], x) for A in family.members) for j in range(m))
    if check:
        assert val == canonical_sublinear(family_embed(family, x)), "factorization failed"
    return val


def row_functions(family: OperatorFamily):
    """p_family split into its m scalar coordinates."""
    return [PolyFunc.from_slopes(family.row_points(j)) for j in range(family.shape[0])]


def support_set(p: PolyFunc) -> Polytope:
    return subdifferential_at_zero(p)


@dataclass(frozen=True)
class SupportHull:
    """cop(family) as a product of row polytopes."""

    family: OperatorFamily
    rows: tuple

    def __contains__(self, T) -> bool:
        T = MatrixOperator(T) if not isinstance(T, MatrixOperator) else T
        if T.shape != self.family.shape:
            raise ValueError(f"matrix of shape {T.shape}, expected {self.family.shape}")
        return all(hull_membership(r, P)[0] for r, P in zip(T.rows, self.rows))

    def dominated(self, T) -> bool:
        """T x <= p(x) for all x, decided by one minorant LP per row."""
        T = MatrixOperator(T) if not isinstance(T, MatrixOperator) else T
        return all(minorizes(AffineFunctional(r, 0), f)
                   for r, f in zip(T.rows, row_functions(self.family)))

    def in_convex_hull(self, T) -> bool:
        """Membership in conv(family) taken as a set of matrices."""
        T = MatrixOperator(T) if not isinstance(T, MatrixOperator) else T
        flat = [tuple(a for r in A.rows for a in r) for A in self.family.members]
        return hull_membership_lp(tuple(a for r in T.rows for a in r), flat) is not None


def support_hull(family: OperatorFamily) -> SupportHull:
    m = family.shape[0]
    rows = tuple(Polytope.hull(family.row_points(j)) for j in range(m))
    return SupportHull(family, rows)


# ---------------------------------------------------------------- composition


def _check_composition(p1, p2):
    p1 = list(p1)
    if not p1:
        raise ValueError("p1 needs at least one coordinate")
    n = p1[0].dim
    for f in p1:
        if f.dim != n:
            raise ValueError("coordinates of p1 live in different dimensions")
        if not f.is_sublinear:
            raise ValueError("p1 must be sublinear")
    if p2.dim != len(p1):
        raise ValueError(f"p2 lives on Q^{p2.dim} but p1 has {len(p1)} coordinates")
    if not p2.is_sublinear:
        raise ValueError("p2 must be sublinear")
    if any(a < 0 for s in p2.slopes for a in s):
        raise ValueError("p2 must be increasing (nonnegative slopes)")
    return p1, n


def compose(p1, p2: PolyFunc) -> PolyFunc:
    """x -> p2(p1(x)) as a max of pieces; valid because p2 has nonnegative slopes."""
    p1, n = _check_composition(p1, p2)
    slopes = []
    for mu in p2.slopes:
        for choice in product(*(f.slopes for f in p1)):
            s = la.zeros(n)
            for mj, a in zip(mu, choice):
                if mj:
                    s = la.add(s, la.scale(mj, a))
            slopes.append(s)
    return PolyFunc.from_slopes(slopes)


@dataclass(frozen=True)
class CompositionSubdiff:
    p1: tuple
    p2: PolyFunc
    direct: Polytope

    @property
    def dim(self) -> int:
        return self.p1[0].dim

    def _formula_system(self):
        # Variables: w[a][j] >= 0 for padded member a and coordinate j, then
        # beta[k] >= 0 on the pieces of p2, then t (free).
        m, n = len(self.p1), self.dim
        padded = max(len(f.pieces) for f in self.p1)
        K = len(self.p2.pieces)
        nw = padded * m
        N = nw + K + n

        def w(a, j):
            return a * m + j

        cons = []
        # T o Delta = alpha o <A2>: sum_a w[a][j] equals the j-th coordinate of sum_k beta_k mu_k
        for j in range(m):
            row = [Fraction(0)] * N
            for a in range(padded):
                row[w(a, j)] += 1
            for k, mu in enumerate(self.p2.slopes):
                row[nw + k] -= mu[j]
            cons.append(eq(row, 0))
        simplex = [Fraction(0)] * N
        for k in range(K):
            simplex[nw + k] = Fraction(1)
        cons.append(eq(simplex, 1))
        # t = T o <A1>, member a has row j equal to slope min(a, k_j) of p1_j
        for i in range(n):
            row = [Fraction(0)] * N
            for j, f in enumerate(self.p1):
                sl = f.slopes
                for a in range(padded):
                    row[w(a, j)] += sl[min(a, len(sl) - 1)][i]
            row[nw + K + i] = Fraction(-1)
            cons.append(eq(row, 0))
        nonneg = [True] * (nw + K) + [False] * n
        return cons, nonneg, N, nw + K

    def formula_contains(self, t) -> bool:
        t = qvec(t)
        if len(t) != self.dim:
            raise ValueError(f"functional of dimension {len(t)} on Q^{self.dim}")
        cons, nonneg, N, off = self._formula_system()
        for i, v in enumerate(t):
            row = [Fraction(0)] * N
            row[off + i] = Fraction(1)
            cons.append(eq(row, v))
        res = lp_solve(None, cons, "feasibility", nonneg=nonneg, lexmin=False, certificate=False)
        return res.feasible

    def formula_max(self, g):
        """max <g, t> over the formula side."""
        cons, nonneg, N, off = self._formula_system()
        obj = [Fraction(0)] * N
        for i, gi in enumerate(qvec(g)):
            obj[off + i] = gi
        res = lp_solve(obj, cons, "max", nonneg=nonneg, lexmin=False, certificate=False)
        return res.value

    def __contains__(self, t) -> bool:
        return hull_membership(t, self.direct)[0]

    @property
    def formula_in_direct(self) -> bool:
        if self.dim + 1 > MAX_ENUM_DIM:
            raise DimensionCapError(self.dim, MAX_ENUM_DIM - 1, "composition enumeration")
        return all(self.formula_max(g) + g0 <= 0 for g, g0 in polytope_inequalities(self.direct))

    @property
    def direct_in_formula(self) -> bool:
        return all(self.formula_contains(v) for v in self.direct.vertices)

    @property
    def agree(self) -> bool:
        return self.direct_in_formula and self.formula_in_direct


def composition_subdifferential(p1, p2: PolyFunc) -> CompositionSubdiff:
    """Support set of p2 o p1, both by expansion and by the operator formula."""
    p1, _ = _check_composition(p1, p2)
    return CompositionSubdiff(tuple(p1), p2, support_set(compose(p1, p2)))


__all__ = [
    "BoundedMap", "CompositionSubdiff", "MatrixOperator", "OperatorFamily", "SupportHull",
    "canonical_sublinear", "compose", "composition_subdifferential", "family_embed",
    "p_family", "row_functions", "support_hull", "support_set",
]
