"""Cone separation: nonoblate pairs, general position, polars, sandwiches.

Openness at zero of the difference correspondence is replaced by its
finite-dimensional, polyhedral equivalent: K1 - K2 and K2 - K1 both fill
the linear span of K1 and K2.  The complemented-subspace condition holds
automatically in Q^n and is reported as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import linalg as la
from .core.geometry import (
    MAX_ENUM_DIM,
    DimensionCapError,
    PolyCone,
    cone_inequalities,
    cone_membership,
    cone_rays_from_inequalities,
    same_cone,
    span_basis,
)
from .core.lp import eq, leq, lp_solve
from .core.scalars import qvec
from .generation import PolyFunc

MAX_LIFT_DIM = 8


@dataclass(frozen=True)
class ConePair:
    K1: PolyCone
    K2: PolyCone

    def __post_init__(self):
        if self.K1.dim != self.K2.dim:
            raise ValueError(f"cones live in Q^{self.K1.dim} and Q^{self.K2.dim}")

    @property
    def dim(self) -> int:
        return self.K1.dim


def conic_correspondence(pair: ConePair, x):
    """(k1, k2) with x = k1 - k2, k1 in K1, k2 in K2, lexicographically smallest.

    Returns None when x is not representable.
    """
    x = qvec(x)
    n = pair.dim
    if len(x) != n:
        raise ValueError(f"vector of dimension {len(x)} for cones in Q^{n}")
    R, S = pair.K1.rays, pair.K2.rays
    r, s = len(R), len(S)
    nv = 2 * n + r + s
    cons = []
    for i in range(n):
        row = [Fraction(0)] * nv
        row[i] = Fraction(1)
        for j, ray in enumerate(R):
            row[2 * n + j] = -ray[i]
        cons.append(eq(row, 0))
        row = [Fraction(0)] * nv
        row[n + i] = Fraction(1)
        for j, ray in enumerate(S):
            row[2 * n + r + j] = -ray[i]
        cons.append(eq(row, 0))
        row = [Fraction(0)] * nv
        row[i], row[n + i] = Fraction(1), Fraction(-1)
        cons.append(eq(row, x[i]))
    nonneg = [False] * (2 * n) + [True] * (r + s)
    res = lp_solve(None, cons, "feasibility", nonneg=nonneg, num_vars=nv, certificate=False,
                   lex_vars=2 * n)
    if not res.feasible:
        return None
    return res.x[:n], res.x[n:2 * n]


# ---------------------------------------------------------------- nonoblateness


@dataclass(frozen=True)
class NonoblateReport:
    nonoblate: bool
    span: tuple
    k1_minus_k2_fills_span: bool
    k2_minus_k1_fills_span: bool
    radius: Fraction | None = None

    def __bool__(self):
        return self.nonoblate


def _difference_cone(A: PolyCone, B: PolyCone) -> PolyCone:
    return PolyCone(A.dim, A.rays + tuple(la.neg(r) for r in B.rays))


def _fills(cone: PolyCone, basis) -> bool:
    return all(cone_membership(b, cone) is not None and cone_membership(la.neg(b), cone) is not None
               for b in basis)


def _representation_cost(A: PolyCone, B: PolyCone, d):
    """min s with d = a - b, a in A, b in B, |a|_inf <= s, |b|_inf <= s."""
    n = A.dim
    R, S = A.rays, B.rays
    r, k = len(R), len(S)
    nv = r + k + 1
    cons = []
    for i in range(n):
        a_row = [ray[i] for ray in R] + [Fraction(0)] * k
        b_row = [Fraction(0)] * r + [ray[i] for ray in S]
        cons.append(eq([u - v for u, v in zip(a_row, b_row)] + [0], d[i]))
        for row in (a_row, b_row):
            cons.append(leq(row + [-1], 0))
            cons.append(leq([-u for u in row] + [-1], 0))
    res = lp_solve([0] * (r + k) + [1], cons, "min", nonneg=[True] * nv, lexmin=False,
                   certificate=False)
    return res.value if res.optimal else None


def nonoblate_check(pair: ConePair) -> NonoblateReport:
    """Do K1 - K2 and K2 - K1 both equal span(K1 u K2)?

    When they do, ``radius`` is a rational r > 0 such that, for V the unit
    box, (V n K1 - V n K2) n (V n K2 - V n K1) contains every point
    sum_j a_j b_j with sum_j |a_j| <= r, b_j the reported span basis.
    """
    basis = tuple(span_basis(pair.K1.rays + pair.K2.rays, pair.dim))
    d12 = _difference_cone(pair.K1, pair.K2)
    d21 = _difference_cone(pair.K2, pair.K1)
    f12, f21 = _fills(d12, basis), _fills(d21, basis)
    ok = f12 and f21
    radius = None
    if ok:
        radius = Fraction(1)
        for b in basis:
            for d in (b, la.neg(b)):
                for A, B in ((pair.K1, pair.K2), (pair.K2, pair.K1)):
                    cost = _representation_cost(A, B, d)
                    radius = min(radius, 1 / cost)
    return NonoblateReport(ok, basis, f12, f21, radius)


def _product_rays(cones):
    """Rays of K1 x ... x Kn in the product space."""
    dims = [K.dim for K in cones]
    total = sum(dims)
    rays = []
    off = 0
    for K in cones:
        for r in K.rays:
            v = [Fraction(0)] * total
            v[off:off + K.dim] = r
            rays.append(tuple(v))
        off += K.dim
    return PolyCone(total, tuple(rays))


def diagonal_cone(dim: int, copies: int) -> PolyCone:
    """The diagonal {(x, ..., x)} as a cone."""
    rays = []
    for i in range(dim):
        e = la.unit(dim, i)
        rays.append(e * copies)
        rays.append(la.neg(e) * copies)
    return PolyCone(dim * copies, tuple(rays))


@dataclass(frozen=True)
class DiagonalReport:
    direct: bool
    lifted: bool

    @property
    def agree(self) -> bool:
        return self.direct == self.lifted

    def __bool__(self):
        return self.lifted


def nonoblate_diagonal_equivalence(pair: ConePair, max_dim=MAX_ENUM_DIM) -> DiagonalReport:
    """Nonoblateness of (K1 x K2, diagonal of X^2), next to the direct check."""
    if pair.dim > max_dim:
        raise DimensionCapError(pair.dim, max_dim, "diagonal lifting")
    lifted = ConePair(_product_rays([pair.K1, pair.K2]), diagonal_cone(pair.dim, 2))
    return DiagonalReport(nonoblate_check(pair).nonoblate, nonoblate_check(lifted).nonoblate)


# ---------------------------------------------------------------- general position


@dataclass(frozen=True)
class GeneralPositionReport:
    span_condition: bool
    complemented: str
    nonoblate: bool
    reduced: bool = False

    @property
    def holds(self) -> bool:
        return self.span_condition and self.nonoblate

    def __bool__(self):
        return self.holds


def general_position_check(cones, max_dim=MAX_LIFT_DIM) -> GeneralPositionReport:
    """General position of two or more cones.

    Two cones: the span condition and nonoblateness within the span.  More
    cones: the pair (K1 x ... x Kn, diagonal) in X^n.
    """
    cones = list(cones)
    if len(cones) < 2:
        raise ValueError("general position needs at least two cones")
    dim = cones[0].dim
    if any(K.dim != dim for K in cones):
        raise ValueError("cones must share one ambient dimension")
    reduced = len(cones) > 2
    if reduced:
        if len(cones) * dim > max_dim:
            raise DimensionCapError(len(cones) * dim, max_dim, "n-ary general position")
        pair = ConePair(_product_rays(cones), diagonal_cone(dim, len(cones)))
    else:
        pair = ConePair(cones[0], cones[1])
    rep = nonoblate_check(pair)
    span_ok = rep.k1_minus_k2_fills_span and rep.k2_minus_k1_fills_span
    return GeneralPositionReport(span_ok, "automatic", rep.nonoblate, reduced)


def epigraph_cone(p: PolyFunc, domain: PolyCone | None = None, max_dim=MAX_ENUM_DIM) -> PolyCone:
    """{(x, t) : x in domain, p(x) <= t} for sublinear p."""
    if not p.is_sublinear:
        raise ValueError("epigraph cones need a sublinear function")
    rows = [tuple(q.slope) + (Fraction(-1),) for q in p.pieces]
    if domain is not None:
        if domain.dim != p.dim:
            raise ValueError("domain cone dimension mismatch")
        rows += [tuple(g) + (Fraction(0),) for g in cone_inequalities(domain, max_dim)]
    return cone_rays_from_inequalities(rows, p.dim + 1, max_dim)


def sublinear_cones(ops, domains=None, max_dim=MAX_LIFT_DIM):
    """The cone pair (diag(X^n) x E^n, sigma_n(epi P1 x ... x epi Pn)), E = Q."""
    ops = list(ops)
    n = len(ops)
    d = ops[0].dim
    if any(p.dim != d for p in ops):
        raise ValueError("operators must share one domain dimension")
    if n * (d + 1) > max_dim:
        raise DimensionCapError(n * (d + 1), max_dim, "sublinear general position")
    domains = domains or [None] * n
    total = n * d + n
    rays = []
    for i, (p, dom) in enumerate(zip(ops, domains)):
        for r in epigraph_cone(p, dom).rays:
            v = [Fraction(0)] * total
            v[i * d:(i + 1) * d] = r[:d]
            v[n * d + i] = r[d]
            rays.append(tuple(v))
    epis = PolyCone(total, tuple(rays))
    diag = []
    for r in diagonal_cone(d, n).rays:
        diag.append(tuple(r) + (Fraction(0),) * n)
    for i in range(n):
        e = la.unit(n, i)
        diag += [(Fraction(0),) * (n * d) + e, (Fraction(0),) * (n * d) + la.neg(e)]
    return PolyCone(total, tuple(diag)), epis


def sublinear_general_position(ops, domains=None, max_dim=MAX_LIFT_DIM) -> GeneralPositionReport:
    """General position of sublinear operators through their epigraph cones.

    ``domains`` optionally restricts operator i to a cone (value TOP outside).
    """
    ops = list(ops)
    for p in ops:
        if not p.is_sublinear:
            raise ValueError("general position of sublinear operators needs zero offsets")
    diag, epis = sublinear_cones(ops, domains, max_dim)
    return general_position_check([diag, epis])


# ---------------------------------------------------------------- polars


def polar(K: PolyCone, max_dim=MAX_ENUM_DIM) -> PolyCone:
    """Generators of {t : <t, k> <= 0 for all k in K}."""
    return cone_rays_from_inequalities(K.rays, K.dim, max_dim)


def in_polar(t, K: PolyCone) -> bool:
    t = qvec(t)
    return all(la.dot(t, r) <= 0 for r in K.rays)


def intersect(cones, max_dim=MAX_ENUM_DIM) -> PolyCone:
    cones = list(cones)
    rows = []
    for K in cones:
        rows += list(cone_inequalities(K, max_dim))
    return cone_rays_from_inequalities(rows, cones[0].dim, max_dim)


@dataclass(frozen=True)
class DecompositionReport:
    hypothesis: GeneralPositionReport
    lhs_rays: tuple
    rhs_rays: tuple
    equal: bool

    @property
    def hypothesis_violated(self) -> bool:
        return not self.hypothesis.holds


def polar_decomposition_check(cones, max_dim=MAX_ENUM_DIM) -> DecompositionReport:
    """Compare the polar of the intersection with the sum of the polars."""
    cones = list(cones)
    hyp = general_position_check(cones)
    lhs = polar(intersect(cones, max_dim), max_dim)
    rhs_rays = []
    for K in cones:
        rhs_rays += list(polar(K, max_dim).rays)
    rhs = PolyCone(cones[0].dim, tuple(rhs_rays))
    return DecompositionReport(hyp, lhs.rays, rhs.rays, same_cone(lhs, rhs))


# ---------------------------------------------------------------- sandwich


@dataclass(frozen=True)
class SandwichWitness:
    t: tuple | None = None
    violation: tuple | None = None
    gap: Fraction | None = None
    certificate: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if (self.t is None) == (self.violation is None):
            raise ValueError("exactly one of witness and violation must be present")

    @property
    def found(self) -> bool:
        return self.t is not None


def _check_sublinear_pair(P, Q):
    for f in (P, Q):
        if not f.is_sublinear:
            raise ValueError("sandwich needs sublinear P and Q (zero offsets)")
    if P.dim != Q.dim:
        raise ValueError("P and Q must share one domain dimension")


def sandwich(P: PolyFunc, Q: PolyFunc) -> SandwichWitness:
    """A functional t with -Q <= t <= P, or a point x with P(x) + Q(x) < 0.

    t is the lexicographically smallest point of dP n (-dQ).  A violation
    is read off the Farkas certificate of the empty intersection and scaled
    to sup-norm one.
    """
    _check_sublinear_pair(P, Q)
    n = P.dim
    A, B = P.slopes, Q.slopes
    ka, kb = len(A), len(B)
    nv = n + ka + kb
    cons = []
    for i in range(n):
        row = [Fraction(0)] * nv
        row[i] = Fraction(1)
        for j, a in enumerate(A):
            row[n + j] = -a[i]
        cons.append(eq(row, 0))
    for i in range(n):
        row = [Fraction(0)] * nv
        row[i] = Fraction(1)
        for j, b in enumerate(B):
            row[n + ka + j] = b[i]
        cons.append(eq(row, 0))
    cons.append(eq([0] * n + [1] * ka + [0] * kb, 1))
    cons.append(eq([0] * (n + ka) + [1] * kb, 1))
    nonneg = [False] * n + [True] * (ka + kb)
    res = lp_solve(None, cons, "feasibility", nonneg=nonneg, num_vars=nv, lex_vars=n)
    if res.feasible:
        return SandwichWitness(t=res.x[:n])
    y = res.certificate
    x = y[:n]
    scale = max(abs(v) for v in x)
    x = tuple(v / scale for v in x)
    gap = P(x) + Q(x)
    if gap >= 0:  # pragma: no cover - guaranteed by the certificate
        raise ArithmeticError("certificate did not yield a violation")
    return SandwichWitness(violation=x, gap=gap, certificate=y)


def verify_sandwich(P: PolyFunc, Q: PolyFunc, t, points=()) -> bool:
    """-Q(x) <= <t, x> <= P(x) at +/- unit directions, piece slopes and ``points``."""
    n = P.dim
    dirs = [la.unit(n, i) for i in range(n)] + [la.neg(la.unit(n, i)) for i in range(n)]
    dirs += P.slopes + Q.slopes + [la.neg(s) for s in P.slopes + Q.slopes]
    dirs += [qvec(p) for p in points]
    return all(-Q(x) <= la.dot(t, x) <= P(x) for x in dirs)


__all__ = [
    "ConePair", "DecompositionReport", "DiagonalReport", "GeneralPositionReport",
    "NonoblateReport", "SandwichWitness", "conic_correspondence", "diagonal_cone",
    "epigraph_cone", "general_position_check", "in_polar", "intersect",
    "nonoblate_check", "nonoblate_diagonal_equivalence", "polar",
    "polar_decomposition_check", "sandwich", "sublinear_cones", "sublinear_general_position",
    "verify_sandwich",
]
