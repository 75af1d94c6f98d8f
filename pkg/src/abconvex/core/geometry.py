"""Finitely generated cones and polytopes over the rationals.

Membership questions are LPs and work in any dimension.  Generator
enumeration (turning inequalities into rays) is brute-force over active
sets and is only offered up to a small ambient dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from . import linalg as la
from .lp import eq, lp_solve
from .scalars import qvec

MAX_ENUM_DIM = 4


class DimensionCapError(ValueError):
    def __init__(self, dim, cap, what="generator enumeration"):
        super().__init__(f"{what} needs ambient dimension <= {cap} (max-dim), got {dim}")
        self.dim = dim
        self.cap = cap


class EmptySetError(ValueError):
    pass


def _dedupe(points):
    seen = set()
    out = []
    for p in points:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


@dataclass(frozen=True)
class PolyCone:
    """cone(rays) in Q^dim.  An empty ray list denotes the zero cone."""

    dim: int
    rays: tuple = ()

    def __post_init__(self):
        rays = []
        for r in self.rays:
            r = qvec(r)
            if len(r) != self.dim:
                raise ValueError(f"ray {r} does not live in dimension {self.dim}")
            if not la.is_zero(r):
                rays.append(la.primitive(r))
        object.__setattr__(self, "rays", tuple(_dedupe(rays)))

    def __contains__(self, x) -> bool:
        return cone_membership(x, self) is not None

    def negated(self) -> "PolyCone":
        return PolyCone(self.dim, tuple(la.neg(r) for r in self.rays))

    @classmethod
    def whole_space(cls, dim: int) -> "PolyCone":
        rays = []
        for i in range(dim):
            rays += [la.unit(dim, i), la.neg(la.unit(dim, i))]
        return cls(dim, tuple(rays))


@dataclass(frozen=True)
class Polytope:
    """conv(vertices) in Q^dim; at least one vertex."""

    dim: int
    vertices: tuple

    def __post_init__(self):
        verts = []
        for v in self.vertices:
            v = qvec(v)
            if len(v) != self.dim:
                raise ValueError(f"vertex {v} does not live in dimension {self.dim}")
            verts.append(v)
        if not verts:
            raise EmptySetError("a Polytope needs a vertex; use EmptyPolytope")
        object.__setattr__(self, "vertices", tuple(_dedupe(verts)))

    @classmethod
    def hull(cls, points, dim=None) -> "Polytope":
        """Polytope with redundant points removed."""
        points = _dedupe([qvec(p) for p in points])
        if dim is None:
            if not points:
                raise EmptySetError("no points")
            dim = len(points[0])
        return cls(dim, tuple(extreme_points(points, dim)))

    def __contains__(self, y) -> bool:
        return hull_membership(y, self)[0]

    def interval(self):
        """(lo, hi) for a one-dimensional polytope."""
        if self.dim != 1:
            raise ValueError("interval() needs dimension 1")
        vals = [v[0] for v in self.vertices]
        return min(vals), max(vals)


@dataclass(frozen=True)
class EmptyPolytope:
    dim: int

    def __contains__(self, y) -> bool:
        return False


# ---------------------------------------------------------------- membership


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(points):
    """Strict convex hull (counter-clockwise, no collinear points), monotone chain."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _segment_weights(y, a, b):
    """Weight t with y = (1-t) a + t b, or None."""
    d = la.sub(b, a)
    k = next(i for i, v in enumerate(d) if v != 0)
    t = (y[k] - a[k]) / d[k]
    if not 0 <= t <= 1:
        return None
    if la.add(la.scale(1 - t, a), la.scale(t, b)) != tuple(y):
        return None
    return t


def _geometric_membership(y, verts):
    """Exact point-in-hull for dimension <= 2 with explicit weights."""
    dim = len(y)
    index = {v: i for i, v in enumerate(verts)}
    w = [Fraction(0)] * len(verts)
    if dim == 1:
        lo = min(verts)
        hi = max(verts)
        if not lo[0] <= y[0] <= hi[0]:
            return None
        if lo == hi:
            w[index[lo]] = Fraction(1)
            return w
        t = (y[0] - lo[0]) / (hi[0] - lo[0])
        w[index[lo]] += 1 - t
        w[index[hi]] += t
        return w
    hull = _hull_2d(verts)
    if len(hull) == 1:
        if tuple(y) != hull[0]:
            return None
        w[index[hull[0]]] = Fraction(1)
        return w
    if len(hull) == 2:
        a, b = hull
        t = _segment_weights(y, a, b)
        if t is None:
            return None
        w[index[a]] += 1 - t
        w[index[b]] += t
        return w
    if any(_cross(hull[i], hull[(i + 1) % len(hull)], y) < 0 for i in range(len(hull))):
        return None
    h0 = hull[0]
    for k in range(1, len(hull) - 1):
        a, b = hull[k], hull[k + 1]
        area = _cross(h0, a, b)
        l1 = _cross(y, a, b) / area
        l2 = _cross(h0, y, b) / area
        l3 = _cross(h0, a, y) / area
        if l1 >= 0 and l2 >= 0 and l3 >= 0:
            w[index[h0]] += l1
            w[index[a]] += l2
            w[index[b]] += l3
            return w
    return None  # pragma: no cover - the fan covers the polygon


def hull_membership_lp(y, verts):
    """Weights from the LP over the simplex, or None."""
    k = len(verts)
    dim = len(y)
    cons = [eq(tuple(v[i] for v in verts), y[i]) for i in range(dim)]
    cons.append(eq((1,) * k, 1))
    res = lp_solve(None, cons, "feasibility", nonneg=[True] * k, lexmin=False,
                   certificate=False)
    return list(res.x) if res.feasible else None


def hull_membership(y, P):
    """(True, weights) if y is a convex combination of P's vertices, else (False, None).

    Dimensions 1 and 2 use exact planar geometry (barycentric weights);
    higher dimensions solve the weight LP.
    """
    y = qvec(y)
    if isinstance(P, EmptyPolytope):
        return False, None
    if len(y) != P.dim:
        raise ValueError(f"point of dimension {len(y)} against polytope of dimension {P.dim}")
    verts = list(P.vertices)
    if P.dim == 0:
        return True, (Fraction(1),) + (Fraction(0),) * (len(verts) - 1)
    if P.dim <= 2:
        w = _geometric_membership(y, verts)
    else:
        w = hull_membership_lp(y, verts)
    if w is None:
        return False, None
    return True, tuple(w)


def extreme_points(points, dim):
    points = _dedupe(points)
    if len(points) <= 1:
        return points
    if dim == 1:
        return _dedupe([min(points), max(points)])
    if dim == 2:
        return _hull_2d(points)
    keep = []
    for i, p in enumerate(points):
        others = points[:i] + points[i + 1:]
        if hull_membership_lp(p, others) is None:
            keep.append(p)
    return keep


def cone_membership(x, K: PolyCone):
    """Nonnegative ray weights reproducing x, or None."""
    x = qvec(x)
    if len(x) != K.dim:
        raise ValueError(f"vector of dimension {len(x)} against cone of dimension {K.dim}")
    if not K.rays:
        return () if la.is_zero(x) else None
    k = len(K.rays)
    cons = [eq(tuple(r[i] for r in K.rays), x[i]) for i in range(K.dim)]
    res = lp_solve(None, cons, "feasibility", nonneg=[True] * k, lexmin=False,
                   certificate=False)
    return res.x if res.feasible else None


def cone_contains_all(K: PolyCone, vectors) -> bool:
    return all(cone_membership(v, K) is not None for v in vectors)


def same_cone(K: PolyCone, L: PolyCone) -> bool:
    """Equality of generated cones by mutual ray membership."""
    return K.dim == L.dim and cone_contains_all(K, L.rays) and cone_contains_all(L, K.rays)


def same_polytope(P, Q) -> bool:
    if isinstance(P, EmptyPolytope) or isinstance(Q, EmptyPolytope):
        return isinstance(P, EmptyPolytope) and isinstance(Q, EmptyPolytope)
    return (P.dim == Q.dim
            and all(hull_membership(v, Q)[0] for v in P.vertices)
            and all(hull_membership(v, P)[0] for v in Q.vertices))


def span_basis(vectors, dim):
    return la.row_basis(list(vectors), dim)


# ---------------------------------------------------------------- enumeration


def cone_rays_from_inequalities(rows, dim, max_dim=MAX_ENUM_DIM) -> PolyCone:
    """Generators of {x : <a, x> <= 0 for every row a}.

    The lineality space contributes +/- a basis; extreme rays of the pointed
    part are the one-dimensional solutions of rank-deficient active sets.
    """
    if dim > max_dim:
        raise DimensionCapError(dim, max_dim)
    A = _dedupe([la.primitive(qvec(a)) for a in rows if not la.is_zero(qvec(a))])
    for a in A:
        if len(a) != dim:
            raise ValueError(f"inequality {a} does not live in dimension {dim}")
    lineal = la.nullspace(A, dim)
    rays = []
    for v in lineal:
        rays += [v, la.neg(v)]
    d = dim - len(lineal)
    for active in (combinations(A, d - 1) if d >= 1 else ()):
        sol = la.nullspace(list(active) + lineal, dim)
        if len(sol) != 1:
            continue
        v = sol[0]
        for cand in (v, la.neg(v)):
            if all(la.dot(a, cand) <= 0 for a in A):
                rays.append(cand)
    return PolyCone(dim, tuple(rays))


def cone_inequalities(K: PolyCone, max_dim=MAX_ENUM_DIM):
    """Rows a with K = {x : <a, x> <= 0}; the generators of the polar cone."""
    return cone_rays_from_inequalities(K.rays, K.dim, max_dim).rays


def polytope_inequalities(P: Polytope, max_dim=MAX_ENUM_DIM):
    """Pairs (g, g0) with P = {t : <g, t> + g0 <= 0}, via the homogenized cone."""
    lifted = [tuple(v) + (Fraction(1),) for v in P.vertices]
    if P.dim + 1 > max_dim:
        raise DimensionCapError(P.dim + 1, max_dim, "polytope facet enumeration")
    rows = cone_rays_from_inequalities(lifted, P.dim + 1, max_dim).rays
    return [(r[:-1], r[-1]) for r in rows]


def polytope_vertices_from_inequalities(ineqs, dim, max_dim=MAX_ENUM_DIM):
    """Vertices of the bounded set {t : <g, t> <= h}; EmptyPolytope if infeasible.

    ``ineqs`` holds pairs (g, h).  Unbounded input raises ValueError.
    """
    if dim + 1 > max_dim:
        raise DimensionCapError(dim + 1, max_dim, "polytope vertex enumeration")
    rows = [tuple(qvec(g)) + (-Fraction(h),) for g, h in ineqs]
    rows.append(la.zeros(dim) + (Fraction(-1),))
    C = cone_rays_from_inequalities(rows, dim + 1, max_dim)
    verts = []
    for r in C.rays:
        if r[-1] > 0:
            verts.append(tuple(a / r[-1] for a in r[:-1]))
        elif not la.is_zero(r[:-1]):
            raise ValueError("inequality system is unbounded")
    if not verts:
        return EmptyPolytope(dim)
    return Polytope.hull(verts, dim)
