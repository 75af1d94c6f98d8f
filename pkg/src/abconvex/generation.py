"""Abstract convexity generated by affine minorants.

Functions come in two representations: ``PolyFunc`` (a finite max of
affine pieces on all of Q^n) and ``SampledFunc`` (extended values on a
finite grid).  For sampled functions every statement is read on the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import linalg as la
from .core.geometry import EmptyPolytope, EmptySetError, Polytope
from .core.lp import eq, geq, leq, lp_solve
from .core.scalars import BOTTOM, TOP, ExtScalar, Q, qvec


@dataclass(frozen=True)
class AffineFunctional:
    slope: tuple
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "slope", qvec(self.slope))
        object.__setattr__(self, "offset", Q(self.offset))

    @property
    def dim(self) -> int:
        return len(self.slope)

    @property
    def is_linear(self) -> bool:
        return self.offset == 0

    def __call__(self, x) -> Fraction:
        return la.dot(self.slope, x) + self.offset


def _affine(piece) -> AffineFunctional:
    if isinstance(piece, AffineFunctional):
        return piece
    slope, offset = piece
    return AffineFunctional(slope, offset)


def _unique(items):
    seen, out = set(), []
    for it in items:
        if it not in seen:
            seen.add(it)
            out.append(it)
    return tuple(out)


@dataclass(frozen=True)
class GeneratorSet:
    """A finite nonempty family H of affine functionals."""

    dim: int
    members: tuple

    def __post_init__(self):
        members = _unique(_affine(m) for m in self.members)
        if not members:
            raise ValueError("a generator set must be nonempty")
        for m in members:
            if m.dim != self.dim:
                raise ValueError(f"member {m} does not live in dimension {self.dim}")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class PolyFunc:
    """x -> max of the affine pieces; finite on all of Q^dim."""

    dim: int
    pieces: tuple

    def __post_init__(self):
        pieces = _unique(_affine(p) for p in self.pieces)
        if not pieces:
            raise ValueError("a PolyFunc needs at least one piece")
        for p in pieces:
            if p.dim != self.dim:
                raise ValueError(f"piece {p} does not live in dimension {self.dim}")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def from_slopes(cls, slopes, offsets=None) -> "PolyFunc":
        slopes = [qvec(s) for s in slopes]
        offsets = offsets or [0] * len(slopes)
        return cls(len(slopes[0]), tuple(AffineFunctional(s, b) for s, b in zip(slopes, offsets)))

    @property
    def is_sublinear(self) -> bool:
        return all(p.is_linear for p in self.pieces)

    @property
    def slopes(self):
        return [p.slope for p in self.pieces]

    def __call__(self, x) -> Fraction:
        x = qvec(x)
        if len(x) != self.dim:
            raise ValueError(f"point of dimension {len(x)} for a function on Q^{self.dim}")
        return max(p(x) for p in self.pieces)

    def active(self, x):
        """Indices of the pieces attaining the max at x."""
        x = qvec(x)
        vals = [p(x) for p in self.pieces]
        top = max(vals)
        return [i for i, v in enumerate(vals) if v == top]

    def subgradients(self, x) -> Polytope:
        """The classical subdifferential at x: hull of the active slopes."""
        return Polytope.hull([self.pieces[i].slope for i in self.active(x)], self.dim)


@dataclass(frozen=True)
class SampledFunc:
    """Extended-valued function on a finite grid; TOP allowed, BOTTOM refused."""

    grid: tuple
    values: tuple

    def __post_init__(self):
        grid = tuple(qvec(p) for p in self.grid)
        values = tuple(ExtScalar.of(v) for v in self.values)
        if len(grid) != len(values):
            raise ValueError("grid and values differ in length")
        if len(set(grid)) != len(grid):
            raise ValueError("grid points must be pairwise distinct")
        if grid and len({len(p) for p in grid}) != 1:
            raise ValueError("grid points must share one dimension")
        if any(v.is_bottom for v in values):
            raise ValueError("BOTTOM values are not admissible")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def sample(cls, f, grid) -> "SampledFunc":
        grid = [qvec(p) if isinstance(p, (tuple, list)) else (Q(p),) for p in grid]
        return cls(tuple(grid), tuple(ExtScalar.of(f(p)) for p in grid))

    @property
    def dim(self) -> int:
        return len(self.grid[0]) if self.grid else 0

    def __call__(self, x) -> ExtScalar:
        x = qvec(x) if isinstance(x, (tuple, list)) else (Q(x),)
        return self.values[self.grid.index(x)]

    def domain(self):
        """Effective domain: grid points with a finite value."""
        return [(x, v.value) for x, v in zip(self.grid, self.values) if not v.is_top]


@dataclass(frozen=True)
class SupportSet:
    """Indices into a generator set selecting the H-minorants of a function."""

    generators: GeneratorSet
    indices: tuple

    @property
    def members(self):
        return [self.generators.members[i] for i in self.indices]

    def __len__(self):
        return len(self.indices)

    def __contains__(self, h) -> bool:
        return _affine(h) in self.members


@dataclass(frozen=True)
class DegenerateEnvelope:
    """sup of an empty support set: BOTTOM everywhere, reported rather than built."""

    dim: int

    def __call__(self, x):
        return BOTTOM


# ---------------------------------------------------------------- H-convexity


def minorizes(h: AffineFunctional, p: PolyFunc) -> bool:
    """True iff h(x) <= p(x) for all x, by minimizing p - h over Q^n."""
    # variables (x, t); t >= piece(x) for every piece
    cons = [geq(tuple(-a for a in q.slope) + (Fraction(1),), q.offset) for q in p.pieces]
    obj = tuple(-a for a in h.slope) + (Fraction(1),)
    res = lp_solve(obj, cons, "min", lexmin=False, certificate=False)
    if res.status != "optimal":
        return False
    return res.value - h.offset >= 0


def _check_dims(p, H):
    if p.dim != H.dim:
        raise ValueError(f"function on Q^{p.dim} against generators on Q^{H.dim}")


def h_support_set(p, H: GeneratorSet) -> SupportSet:
    """{h in H : h <= p}."""
    _check_dims(p, H)
    if isinstance(p, PolyFunc):
        idx = [i for i, h in enumerate(H.members) if minorizes(h, p)]
    else:
        idx = [
            i for i, h in enumerate(H.members)
            if all(v.is_top or h(x) <= v.value for x, v in zip(p.grid, p.values))
        ]
    return SupportSet(H, tuple(idx))


def h_convex_envelope(p, H: GeneratorSet):
    """sup of the H-support set, in the representation of p."""
    U = h_support_set(p, H)
    if not len(U):
        return DegenerateEnvelope(p.dim)
    if isinstance(p, PolyFunc):
        return PolyFunc(p.dim, tuple(U.members))
    vals = tuple(ExtScalar(max(h(x) for h in U.members)) for x in p.grid)
    return SampledFunc(p.grid, vals)


def dominates(p: PolyFunc, q: PolyFunc) -> bool:
    """p >= q everywhere, one LP per piece of q."""
    return all(minorizes(piece, p) for piece in q.pieces)


def is_h_convex(p, H: GeneratorSet) -> bool:
    env = h_convex_envelope(p, H)
    if isinstance(env, DegenerateEnvelope):
        return False
    if isinstance(p, PolyFunc):
        return dominates(p, env) and dominates(env, p)
    return env.values == p.values


# ---------------------------------------------------------------- conjugation


def lower_hull_1d(points):
    """Lower convex hull vertices of (x, value) pairs, sorted by x (monotone chain)."""
    pts = sorted(points)
    hull = []
    for p in pts:
        if hull and hull[-1][0] == p[0]:
            continue  # sorted: an equal abscissa never lowers the hull
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (y2 - y1) * (p[0] - x1) >= (p[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _conjugate_1d(dom, duals):
    """Walk the hull slopes against the sorted dual points."""
    hull = lower_hull_1d(dom)
    slopes = [(hull[k + 1][1] - hull[k][1]) / (hull[k + 1][0] - hull[k][0])
              for k in range(len(hull) - 1)]
    order = sorted(range(len(duals)), key=lambda i: duals[i])
    out = [None] * len(duals)
    k = 0
    for i in order:
        y = duals[i]
        while k < len(slopes) and slopes[k] < y:
            k += 1
        x, fx = hull[k]
        out[i] = y * x - fx
    return out


def fenchel_conjugate(f: SampledFunc, dual_grid) -> SampledFunc:
    """f*(y) = max over the effective domain of <y, x> - f(x).

    Repeated dual points are merged.  In one dimension the maximizers are
    read off the lower hull by a single sorted sweep.
    """
    dom = f.domain()
    if not dom:
        raise EmptySetError("conjugate of a function with empty effective domain")
    duals = list(_unique(qvec(y) if isinstance(y, (tuple, list)) else (Q(y),) for y in dual_grid))
    for y in duals:
        if len(y) != f.dim:
            raise ValueError(f"dual point {y} does not match dimension {f.dim}")
    if f.dim == 1:
        vals = _conjugate_1d([(x[0], v) for x, v in dom], [y[0] for y in duals])
    else:
        vals = [max(la.dot(y, x) - v for x, v in dom) for y in duals]
    return SampledFunc(tuple(duals), tuple(ExtScalar(v) for v in vals))


@dataclass(frozen=True)
class PolyConjugate:
    """Exact conjugate of a max of affines.

    epi f* is generated by the points (slope_i, -offset_i) and the upward ray;
    f* is finite exactly on the hull of the slopes.
    """

    source: PolyFunc

    @property
    def points(self):
        return [(p.slope, -p.offset) for p in self.source.pieces]

    @property
    def domain(self) -> Polytope:
        return Polytope.hull(self.source.slopes, self.source.dim)

    def __call__(self, y) -> ExtScalar:
        y = qvec(y) if isinstance(y, (tuple, list)) else (Q(y),)
        pieces = self.source.pieces
        k = len(pieces)
        n = self.source.dim
        cons = [eq(tuple(p.slope[i] for p in pieces), y[i]) for i in range(n)]
        cons.append(eq((1,) * k, 1))
        res = lp_solve(tuple(-p.offset for p in pieces), cons, "min", nonneg=[True] * k,
                       lexmin=False, certificate=False)
        if res.status == "infeasible":
            return TOP
        return ExtScalar(res.value)


def fenchel_conjugate_poly(f: PolyFunc) -> PolyConjugate:
    return PolyConjugate(f)


def conjugate_sup_direct(f: PolyFunc, y) -> ExtScalar:
    """sup_x <y, x> - f(x) by the primal LP over the epigraph."""
    y = qvec(y)
    cons = [geq(tuple(-a for a in q.slope) + (Fraction(1),), q.offset) for q in f.pieces]
    res = lp_solve(tuple(y) + (Fraction(-1),), cons, "max", lexmin=False, certificate=False)
    if res.status == "unbounded":
        return TOP
    return ExtScalar(res.value)


def _supporting_slope(x, dom, n):
    """Slope of a lower supporting hyperplane of the domain points at x, or None."""
    # variables (y, c): maximize <y, x> - c  s.t.  <y, x_i> - c <= f(x_i)
    cons = [leq(tuple(xi) + (Fraction(-1),), v) for xi, v in dom]
    res = lp_solve(tuple(x) + (Fraction(-1),), cons, "max", lexmin=False, certificate=False)
    if res.status != "optimal":
        return None
    return res.x[:n]


def biconjugate(f: SampledFunc) -> SampledFunc:
    """f** on the grid of f, via the slopes of the lower hull as dual grid.

    Grid points outside the hull of the effective domain get TOP.
    """
    dom = f.domain()
    if not dom:
        raise EmptySetError("biconjugate of a function with empty effective domain")
    n = f.dim
    if n == 1:
        hull = lower_hull_1d([(x[0], v) for x, v in dom])
        slopes = [(hull[k + 1][1] - hull[k][1]) / (hull[k + 1][0] - hull[k][0])
                  for k in range(len(hull) - 1)] or [Fraction(0)]
        duals = [(s,) for s in _unique(slopes)]
        lo, hi = hull[0][0], hull[-1][0]
        inside = [lo <= x[0] <= hi for x in f.grid]
    else:
        found = [_supporting_slope(x, dom, n) for x in f.grid]
        inside = [s is not None for s in found]
        duals = list(_unique(s for s in found if s is not None))
    fstar = fenchel_conjugate(f, duals)
    vals = []
    for x, ok in zip(f.grid, inside):
        if not ok:
            vals.append(TOP)
            continue
        vals.append(ExtScalar(max(la.dot(y, x) - c.value for y, c in zip(fstar.grid, fstar.values))))
    return SampledFunc(f.grid, tuple(vals))


# ---------------------------------------------------------------- support functions


def support_function(U) -> PolyFunc:
    """x -> max over the vertices v of U of <v, x>."""
    if isinstance(U, EmptyPolytope):
        raise EmptySetError("the support function of the empty set is not a PolyFunc")
    return PolyFunc(U.dim, tuple(AffineFunctional(v, 0) for v in U.vertices))


def subdifferential_at_zero(p: PolyFunc) -> Polytope:
    """Support set {t : <t, x> <= p(x) for all x} of a sublinear PolyFunc."""
    if not p.is_sublinear:
        raise ValueError("the support set is defined for sublinear functions")
    return Polytope.hull(p.slopes, p.dim)


def in_support_set(t, p: PolyFunc) -> bool:
    """<t, .> <= p via the minorant LP; independent of the slope hull."""
    return minorizes(AffineFunctional(t, 0), p)


__all__ = [
    "AffineFunctional", "DegenerateEnvelope", "GeneratorSet", "PolyConjugate", "PolyFunc",
    "SampledFunc", "SupportSet", "biconjugate", "conjugate_sup_direct", "dominates",
    "fenchel_conjugate", "fenchel_conjugate_poly", "h_convex_envelope",
    "h_support_set", "in_support_set", "is_h_convex", "lower_hull_1d",
    "minorizes", "subdifferential_at_zero", "support_function",
]
