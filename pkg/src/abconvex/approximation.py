"""Approximate and infinitesimal subdifferentials, infimal convolution, chain rule.

The monad is modelled by ``LexScalar``: a value (a, b) stands for a + b*d
with d a fixed positive infinitesimal.  Infinite proximity is equality of
standard parts.

Relations between functionals follow one sign convention throughout:
(t, s) belongs to the relation of f at (u, v) iff (t, -s) is a subgradient
of f there.  With it the chain rule is plain relation composition through
the shared middle functional.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import linalg as la
from .core.geometry import (
    EmptyPolytope,
    EmptySetError,
    PolyCone,
    Polytope,
    hull_membership,
    polytope_inequalities,
    polytope_vertices_from_inequalities,
    same_polytope,
)
from .core.scalars import BOTTOM, ExtScalar, LexScalar, Q, qvec
from .generation import PolyConjugate, PolyFunc, conjugate_sup_direct
from .separation import epigraph_cone, general_position_check

# ---------------------------------------------------------------- epsilon-subdifferentials


@dataclass(frozen=True)
class EpsSubdiff:
    """{y : f(xbar) + f*(y) <= <y, xbar> + eps} for a PolyFunc f."""

    f: PolyFunc
    point: tuple
    eps: Fraction

    @property
    def gaps(self):
        """f(xbar) minus each piece at xbar; all nonnegative."""
        top = self.f(self.point)
        return [top - p(self.point) for p in self.f.pieces]

    @property
    def signature(self):
        """Index structure of the candidate vertices: (i,) for e_i, (i, j) for an edge point."""
        gaps, eps = self.gaps, self.eps
        sig = [(i,) for i, g in enumerate(gaps) if g <= eps]
        sig += [(i, j) for i, gi in enumerate(gaps) for j, gj in enumerate(gaps) if gi < eps < gj]
        return tuple(sig)

    def points_at(self, eps):
        """Candidate vertices of this signature evaluated at another eps."""
        slopes, gaps = self.f.slopes, self.gaps
        pts = []
        for key in self.signature:
            if len(key) == 1:
                pts.append(slopes[key[0]])
            else:
                i, j = key
                wi = (gaps[j] - eps) / (gaps[j] - gaps[i])
                pts.append(la.add(la.scale(wi, slopes[i]), la.scale(1 - wi, slopes[j])))
        return pts

    @property
    def polytope(self) -> Polytope:
        # image of {lambda in the simplex : sum lambda_i gap_i <= eps} under the slopes
        return Polytope.hull(self.points_at(self.eps), self.f.dim)

    def _slack(self, conj: ExtScalar, y) -> bool:
        if conj.is_top:
            return False
        return self.f(self.point) + conj.value <= la.dot(y, self.point) + self.eps

    def __contains__(self, y) -> bool:
        y = qvec(y)
        return self._slack(PolyConjugate(self.f)(y), y)

    def direct_contains(self, y) -> bool:
        """The defining inequality checked by maximizing <y, x> - f(x) over x."""
        y = qvec(y)
        return self._slack(conjugate_sup_direct(self.f, y), y)

    def interval(self):
        return self.polytope.interval()


def eps_subdifferential(f: PolyFunc, point, eps) -> EpsSubdiff:
    eps = Q(eps)
    if eps < 0:
        raise ValueError(f"eps must be nonnegative, got {eps}")
    point = qvec(point)
    if len(point) != f.dim:
        raise ValueError(f"point of dimension {len(point)} for a function on Q^{f.dim}")
    return EpsSubdiff(f, point, eps)


@dataclass(frozen=True)
class EpsLimitReport:
    """The eps-subdifferentials along eps = 2^-k, k = 0..steps.

    ``stable_from`` is the first k after which the vertex signature no longer
    changes; ``limit`` is that stable parametrization evaluated at eps = 0.
    """

    nested: bool
    contains_exact: bool
    stable_from: int | None
    limit: Polytope
    exact: Polytope

    @property
    def holds(self) -> bool:
        return (self.nested and self.contains_exact and self.stable_from is not None
                and same_polytope(self.limit, self.exact))


def eps_limit(f: PolyFunc, point, steps=10) -> EpsLimitReport:
    sets = [eps_subdifferential(f, point, Fraction(1, 2 ** k)) for k in range(steps + 1)]
    polys = [E.polytope for E in sets]
    nested = all(v in big for small, big in zip(polys[1:], polys) for v in small.vertices)
    exact = f.subgradients(point)
    contains = all(v in P for P in polys for v in exact.vertices)
    sigs = [E.signature for E in sets]
    stable = steps
    while stable > 0 and sigs[stable - 1] == sigs[-1]:
        stable -= 1
    # a signature still changing at the last step is not known to be stable
    positive = [g for g in sets[-1].gaps if g > 0]
    settled = not positive or sets[-1].eps < min(positive)
    limit = Polytope.hull(sets[-1].points_at(Fraction(0)), f.dim)
    return EpsLimitReport(nested, contains, stable if settled else None, limit, exact)


# ---------------------------------------------------------------- infinitesimal data


def _lex(v) -> LexScalar:
    return v if isinstance(v, LexScalar) else LexScalar(Q(v))


@dataclass(frozen=True)
class LexPolyFunc:
    """Max of affine pieces whose slopes and offsets may carry infinitesimal parts.

    ``pieces`` holds (slope, offset) pairs; rational entries are promoted.
    """

    dim: int
    pieces: tuple

    def __post_init__(self):
        pieces = []
        for slope, offset in self.pieces:
            slope = tuple(_lex(a) for a in slope)
            if len(slope) != self.dim:
                raise ValueError(f"slope {slope} does not live in dimension {self.dim}")
            pieces.append((slope, _lex(offset)))
        if not pieces:
            raise ValueError("a LexPolyFunc needs at least one piece")
        object.__setattr__(self, "pieces", tuple(pieces))

    @classmethod
    def lift(cls, f: PolyFunc, offset_inf=0, slope_inf=None) -> "LexPolyFunc":
        """f with every offset shifted by offset_inf*d and every slope by slope_inf*d."""
        dk = qvec(slope_inf) if slope_inf is not None else la.zeros(f.dim)
        return cls(f.dim, tuple(
            (tuple(LexScalar(a, b) for a, b in zip(p.slope, dk)), LexScalar(p.offset, Q(offset_inf)))
            for p in f.pieces))

    def _piece(self, k, x) -> LexScalar:
        slope, offset = self.pieces[k]
        val = offset
        for a, xi in zip(slope, x):
            val = val + a * xi
        return val

    def __call__(self, x) -> LexScalar:
        x = qvec(x)
        return max(self._piece(k, x) for k in range(len(self.pieces)))

    def std_part(self) -> PolyFunc:
        return PolyFunc.from_slopes([tuple(a.std for a in s) for s, _ in self.pieces],
                                    [b.std for _, b in self.pieces])

    def gaps(self, x):
        x = qvec(x)
        top = self(x)
        return [top - self._piece(k, x) for k in range(len(self.pieces))]


def infinitesimal_subdifferential(f: LexPolyFunc, point) -> Polytope:
    """Slopes (standard parts) of the pieces that are infinitely close to active."""
    point = qvec(point)
    slopes = [tuple(a.std for a in s) for s, _ in f.pieces]
    pts = [slopes[k] for k, g in enumerate(f.gaps(point)) if g.is_infinitesimal()]
    return Polytope.hull(pts, f.dim)


def in_infinitesimal_subdifferential(f: LexPolyFunc, point, y) -> bool:
    """Some eps in the monad puts y in the eps-subdifferential.

    The conjugate gap f(xbar) + f*(y) - <y, xbar> is measured on standard
    parts; an infinitesimal eps absorbs exactly the gaps with zero standard part.
    """
    point, y = qvec(point), qvec(y)
    g = f.std_part()
    conj = PolyConjugate(g)(y)
    if conj.is_top:
        return False
    return g(point) + conj.value - la.dot(y, point) <= 0


def is_infinitesimal_minimum(f: LexPolyFunc, point) -> bool:
    return in_infinitesimal_subdifferential(f, point, la.zeros(f.dim))


# ---------------------------------------------------------------- infimal convolution


EXACT = "exact"
INF_EXACT = "infinitesimally-exact"
INEXACT = "inexact"


def _binary(f):
    if isinstance(f, (PolyFunc, LexPolyFunc)):
        return lambda u, v: f(tuple(u) + tuple(v))
    return f


def _point(v):
    if isinstance(v, (tuple, list)):
        return qvec(v)
    return (Q(v),)


def _classify(value, attained) -> str:
    if isinstance(value, ExtScalar):
        if not value.is_finite:
            return INEXACT
        value = value.value
    a, b = _lex(value), _lex(attained)
    if a == b:
        return EXACT
    if a.approx(b):
        return INF_EXACT
    return INEXACT


@dataclass(frozen=True)
class ConvolutionPoint:
    x: tuple
    z: tuple
    value: object  # Fraction, LexScalar or BOTTOM
    witness: tuple | None
    exactness: str

    @property
    def exact(self) -> bool:
        return self.exactness != INEXACT


@dataclass(frozen=True)
class ConvolutionResult:
    """(f2 # f1)(x, z) = inf_y f1(x, y) + f2(y, z).

    ``mode`` "grid" minimizes over ``y_grid`` (ties to the smallest y);
    "polyhedral" takes PolyFuncs on Q^2 and minimizes over all of Q by
    breakpoint enumeration.
    """

    f1: object
    f2: object
    mode: str
    y_grid: tuple = ()

    def total(self, x, y, z):
        return _binary(self.f1)(x, y) + _binary(self.f2)(y, z)

    def evaluate(self, x, z) -> ConvolutionPoint:
        x, z = _point(x), _point(z)
        if self.mode == "grid":
            best = None
            for y in self.y_grid:
                v = self.total(x, y, z)
                if best is None or _lex(v) < _lex(best[0]):
                    best = (v, y)
            return ConvolutionPoint(x, z, best[0], best[1], EXACT)
        value, y = _poly_inf(self.f1, self.f2, x[0], z[0])
        if y is None:
            return ConvolutionPoint(x, z, BOTTOM, None, INEXACT)
        return ConvolutionPoint(x, z, value, (y,), EXACT)

    def classify(self, x, y, z) -> str:
        """Exactness of the convolution at (x, z) when y is offered as witness."""
        x, y, z = _point(x), _point(y), _point(z)
        return _classify(self.evaluate(x, z).value, self.total(x, y, z))

    def lower_bound_holds(self, x, z, ys) -> bool:
        v = self.evaluate(x, z).value
        if isinstance(v, ExtScalar):
            return v.is_bottom
        return all(_lex(v) <= _lex(self.total(_point(x), _point(y), _point(z))) for y in ys)

    def as_polyfunc(self) -> PolyFunc | None:
        """The value function on (x, z); None when it is identically -inf."""
        if self.mode != "polyhedral":
            raise ValueError("only polyhedral convolutions have a closed form")
        return _eliminate_middle(self.f1, self.f2)


def _restricted(f: PolyFunc, fixed, at_front):
    """Pieces of y -> f(fixed, y) (at_front) or f(y, fixed) as (slope, intercept)."""
    out = []
    for p in f.pieces:
        a, b = p.slope
        out.append((b, a * fixed + p.offset) if at_front else (a, b * fixed + p.offset))
    return out


def _poly_inf(f1: PolyFunc, f2: PolyFunc, x, z):
    """(min value, smallest minimizing breakpoint) or (None, None) when unbounded below."""
    h1 = _restricted(f1, x, True)
    h2 = _restricted(f2, z, False)
    hi = max(s for s, _ in h1) + max(s for s, _ in h2)
    lo = min(s for s, _ in h1) + min(s for s, _ in h2)
    if hi < 0 or lo > 0:
        return None, None
    cands = set()
    for h in (h1, h2):
        for i, (si, ci) in enumerate(h):
            for sj, cj in h[i + 1:]:
                if si != sj:
                    cands.add((cj - ci) / (si - sj))
    cands = sorted(cands) or [Fraction(0)]

    def total(y):
        return max(s * y + c for s, c in h1) + max(s * y + c for s, c in h2)

    vals = [(total(y), y) for y in cands]
    best = min(v for v, _ in vals)
    return best, next(y for v, y in vals if v == best)


def _check_binary_poly(f1, f2):
    for f in (f1, f2):
        if not isinstance(f, PolyFunc) or f.dim != 2:
            raise ValueError("polyhedral convolution takes PolyFuncs on Q x Q")


def _eliminate_middle(f1: PolyFunc, f2: PolyFunc) -> PolyFunc | None:
    """Fourier-Motzkin elimination of y from the epigraph of f1(x, y) + f2(y, z)."""
    pos, neg, zero = [], [], []
    for p in f1.pieces:
        for q in f2.pieces:
            # (cx, cy, cz, d) for the piece cx x + cy y + cz z + d
            row = (p.slope[0], p.slope[1] + q.slope[0], q.slope[1], p.offset + q.offset)
            (pos if row[1] > 0 else neg if row[1] < 0 else zero).append(row)
    slopes, offsets = [], []
    for r in zero:
        slopes.append((r[0], r[2]))
        offsets.append(r[3])
    for p in pos:
        for n in neg:
            wp, wn = -n[1], p[1]
            tot = wp + wn
            slopes.append(((wp * p[0] + wn * n[0]) / tot, (wp * p[2] + wn * n[2]) / tot))
            offsets.append((wp * p[3] + wn * n[3]) / tot)
    if not slopes:
        return None
    return PolyFunc.from_slopes(slopes, offsets)


def infimal_convolution(f1, f2, mode="grid", y_grid=None) -> ConvolutionResult:
    if mode == "grid":
        if not y_grid:
            raise EmptySetError("grid convolution needs a nonempty y grid")
        grid = sorted({_point(y) for y in y_grid})
        if len({len(y) for y in grid}) > 1:
            raise ValueError("y grid points of different dimensions")
        return ConvolutionResult(f1, f2, "grid", tuple(grid))
    if mode == "polyhedral":
        _check_binary_poly(f1, f2)
        return ConvolutionResult(f1, f2, "polyhedral")
    raise ValueError(f"unknown convolution mode {mode!r}")


# ---------------------------------------------------------------- relations and the chain rule


@dataclass(frozen=True)
class SubdiffRelation:
    """Pairs (t, s) of functionals stored as one polytope in the product space."""

    left: int
    right: int
    polytope: object  # Polytope or EmptyPolytope

    def __contains__(self, pair) -> bool:
        t, s = pair
        return hull_membership(_point(t) + _point(s), self.polytope)[0]

    @property
    def is_empty(self) -> bool:
        return isinstance(self.polytope, EmptyPolytope)

    def same_as(self, other: "SubdiffRelation") -> bool:
        return (self.left, self.right) == (other.left, other.right) and same_polytope(
            self.polytope, other.polytope)


def relation_of(f: PolyFunc, point, left: int) -> SubdiffRelation:
    """Relation of f at point; the first ``left`` coordinates carry t."""
    point = qvec(point)
    flip = [tuple(a if i < left else -a for i, a in enumerate(v))
            for v in f.subgradients(point).vertices]
    return SubdiffRelation(left, f.dim - left, Polytope.hull(flip, f.dim))


def compose_relations(r1: SubdiffRelation, r2: SubdiffRelation) -> SubdiffRelation:
    """{(t, r) : (t, s) in r1 and (s, r) in r2 for some s}; scalar blocks only."""
    if (r1.left, r1.right, r2.left, r2.right) != (1, 1, 1, 1):
        raise ValueError("relation composition is enumerated for scalar blocks")
    if r1.is_empty or r2.is_empty:
        return SubdiffRelation(1, 1, EmptyPolytope(2))
    ineqs = []
    for g, g0 in polytope_inequalities(r1.polytope):
        ineqs.append(((g[0], g[1], Fraction(0)), -g0))
    for g, g0 in polytope_inequalities(r2.polytope):
        ineqs.append(((Fraction(0), g[0], g[1]), -g0))
    joint = polytope_vertices_from_inequalities(ineqs, 3)
    if isinstance(joint, EmptyPolytope):
        return SubdiffRelation(1, 1, EmptyPolytope(2))
    return SubdiffRelation(1, 1, Polytope.hull([(v[0], v[2]) for v in joint.vertices], 2))


def _directional(f: PolyFunc, point) -> PolyFunc:
    return PolyFunc.from_slopes([f.pieces[i].slope for i in f.active(point)])


def _lift(K: PolyCone, slots, free_slot) -> PolyCone:
    """Embed rays of K into Q^4 at ``slots`` and add the free line along ``free_slot``."""
    rays = []
    for r in K.rays:
        v = [Fraction(0)] * 4
        for a, k in zip(r, slots):
            v[k] = a
        rays.append(tuple(v))
    e = la.unit(4, free_slot)
    return PolyCone(4, tuple(rays) + (e, la.neg(e)))


@dataclass(frozen=True)
class ChainRuleReport:
    point: tuple
    value: object
    exactness: str
    general_position: bool
    lhs: SubdiffRelation
    rhs: SubdiffRelation
    equal: bool

    @property
    def hypotheses_hold(self) -> bool:
        return self.exactness != INEXACT and self.general_position


def chain_rule_check(f1: PolyFunc, f2: PolyFunc, point) -> ChainRuleReport:
    """Compare the relation of f2 # f1 at (x, z) with Df2(y, z) o Df1(x, y).

    Everything is one-dimensional: f1 lives on (x, y), f2 on (y, z).  The
    exactness and general-position hypotheses are evaluated and reported;
    ``equal`` is computed regardless.
    """
    _check_binary_poly(f1, f2)
    x, y, z = qvec(point)
    conv = infimal_convolution(f1, f2, "polyhedral")
    at = conv.evaluate((x,), (z,))
    exactness = conv.classify((x,), (y,), (z,))
    g = conv.as_polyfunc()
    if g is None:
        lhs = SubdiffRelation(1, 1, EmptyPolytope(2))
    else:
        lhs = relation_of(g, (x, z), 1)
    rhs = compose_relations(relation_of(f1, (x, y), 1), relation_of(f2, (y, z), 1))
    # epigraph cones of the directional derivatives, coordinates (dx, dy, dz, tau)
    k1 = _lift(epigraph_cone(_directional(f1, (x, y))), (0, 1, 3), 2)
    k2 = _lift(epigraph_cone(_directional(f2, (y, z))), (1, 2, 3), 0)
    gp = general_position_check([k1, k2]).holds
    return ChainRuleReport((x, y, z), at.value, exactness, gp, lhs, rhs, lhs.same_as(rhs))


__all__ = [
    "EXACT", "INEXACT", "INF_EXACT", "ChainRuleReport", "ConvolutionPoint", "ConvolutionResult",
    "EpsLimitReport", "EpsSubdiff", "LexPolyFunc", "SubdiffRelation", "chain_rule_check", "compose_relations",
    "eps_limit", "eps_subdifferential", "in_infinitesimal_subdifferential", "infimal_convolution",
    "infinitesimal_subdifferential", "is_infinitesimal_minimum", "relation_of",
]
