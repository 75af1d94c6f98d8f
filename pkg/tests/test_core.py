import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abconvex.core import (
    BOTTOM,
    TOP,
    DimensionCapError,
    ExtScalar,
    LexScalar,
    LPError,
    PolyCone,
    Polytope,
    Q,
    cone_rays_from_inequalities,
    eq,
    ext_inf,
    ext_sup,
    geq,
    hull_membership,
    hull_membership_lp,
    leq,
    lp_solve,
    same_cone,
    verify_farkas,
)
from abconvex.core import linalg as la

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=6)


# ---------------------------------------------------------------- scalars


def test_ext_order_and_absorption():
    assert BOTTOM < ExtScalar(-10**9) < ExtScalar(10**9) < TOP
    assert ext_sup([1, TOP, 3]) is TOP
    assert ext_inf([1, BOTTOM]) is BOTTOM
    assert ext_sup([]) == BOTTOM and ext_inf([]) == TOP
    with pytest.raises(ArithmeticError):
        TOP + BOTTOM
    assert TOP + 5 == TOP and BOTTOM - 3 == BOTTOM


@given(st.lists(st.one_of(rationals.map(ExtScalar), st.just(TOP), st.just(BOTTOM)),
                min_size=1, max_size=6))
def test_ext_sup_inf_are_members_and_lattice_laws(vals):
    s, i = ext_sup(vals), ext_inf(vals)
    assert s in vals and i in vals
    assert ext_sup(vals + vals) == s
    assert ext_sup(list(reversed(vals))) == s
    assert ext_sup([ext_sup(vals[:2]), ext_sup(vals[2:])]) == s
    assert ext_inf([ext_inf(vals[:1]), ext_inf(vals[1:])]) == i


def test_q_refuses_floats():
    assert Q("3/4") == F(3, 4) and Q([1, 3]) == F(1, 3)
    with pytest.raises(TypeError):
        Q(0.5)
    with pytest.raises(ValueError):
        Q("0.5")


@given(rationals, rationals, rationals, rationals)
def test_lex_order_is_lexicographic(a, b, c, d):
    x, y = LexScalar(a, b), LexScalar(c, d)
    assert (x < y) == (a < c or (a == c and b < d))
    assert x.approx(y) == (a == c)
    assert (x + y) - y == x
    assert 2 * x == LexScalar(2 * a, 2 * b)


def test_monad():
    assert LexScalar(0, 5).in_monad()
    assert LexScalar(0, 0).in_monad()
    assert not LexScalar(0, -1).in_monad()
    assert not LexScalar(F(1, 10**6), 0).in_monad()
    # the positive infinitesimal lies below every standard positive
    assert LexScalar(0, 10**9) < LexScalar(F(1, 10**9), 0)


# ---------------------------------------------------------------- lp


def test_lp_single_active_constraint():
    res = lp_solve([1], [geq([1], 3)])
    assert res.optimal and res.value == 3 and res.x == (3,)


def test_lp_infeasible_certificate():
    cons = [geq([1], 0), leq([1], -1)]
    res = lp_solve(None, cons, "feasibility")
    assert res.status == "infeasible"
    assert verify_farkas(cons, [False], res.certificate)
    assert all(v != 0 for v in res.certificate)


def test_lp_triangle_lexmin_vertex():
    tri = [geq([1, 0], 0), geq([0, 1], 0), leq([1, 1], 1)]
    res = lp_solve([1, 1], tri, "max")
    assert res.value == 1 and res.x == (0, 1)


def test_lp_unbounded_direction():
    res = lp_solve([1, 0], [geq([0, 1], 0)], "min")
    assert res.status == "unbounded"
    assert res.direction[0] < 0


def test_lp_dimension_mismatch():
    with pytest.raises(LPError):
        lp_solve([1, 2], [leq([1], 0)])


def test_lp_redundant_equalities():
    cons = [eq([1, 1], 2), eq([2, 2], 4), geq([1, 0], 0), geq([0, 1], 0)]
    res = lp_solve([1, 0], cons, "max")
    assert res.x == (2, 0)


def _vertex_oracle(c, cons, n):
    """Best objective over the vertices of a bounded polyhedron, lexmin among ties."""
    best = None
    rows = [(con.coeffs, con.rhs) for con in cons]
    for active in combinations(rows, n):
        x = la.solve_unique([a for a, _ in active], [b for _, b in active])
        if x is None or not all(con.holds(x) for con in cons):
            continue
        key = (la.dot(c, x), x)
        if best is None or key < best:
            best = key
    return best


def test_lp_agrees_with_vertex_enumeration():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(1, 3)
        cons = []
        for i in range(n):
            e = la.unit(n, i)
            cons += [leq(e, rng.randint(1, 4)), geq(e, -rng.randint(1, 4))]
        for _ in range(rng.randint(0, 8 - 2 * n)):
            a = [F(rng.randint(-3, 3)) for _ in range(n)]
            cons.append(leq(a, F(rng.randint(-4, 6), rng.randint(1, 3))))
        c = [F(rng.randint(-3, 3)) for _ in range(n)]
        res = lp_solve(c, cons, "min")
        oracle = _vertex_oracle(c, cons, n)
        if oracle is None:
            assert res.status == "infeasible"
            assert verify_farkas(cons, [False] * n, res.certificate)
        else:
            assert res.optimal
            assert (res.value, res.x) == oracle


# ---------------------------------------------------------------- hulls


def test_hull_membership_examples():
    seg = Polytope(2, ((1, 0), (0, 1)))
    ok, w = hull_membership((F(1, 2), F(1, 2)), seg)
    assert ok and w == (F(1, 2), F(1, 2))
    assert hull_membership((2, 0), seg) == (False, None)
    tri = Polytope(2, ((0, 0), (1, 0), (0, 1)))
    ok, w = hull_membership((F(1, 3), F(1, 3)), tri)
    assert ok and w == (F(1, 3), F(1, 3), F(1, 3))


def test_hull_membership_dimension_mismatch():
    with pytest.raises(ValueError):
        hull_membership((1, 2, 3), Polytope(2, ((0, 0),)))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.data())
def test_hull_membership_agrees_with_lp(dim, data):
    pts = data.draw(st.lists(st.tuples(*[rationals] * dim), min_size=1, max_size=6))
    y = data.draw(st.tuples(*[rationals] * dim))
    P = Polytope(dim, tuple(pts))
    ok, w = hull_membership(y, P)
    assert ok == (hull_membership_lp(y, list(P.vertices)) is not None)
    if ok:
        assert sum(w) == 1 and all(v >= 0 for v in w)
        combo = tuple(sum(wi * v[i] for wi, v in zip(w, P.vertices)) for i in range(dim))
        assert combo == y
    # vertices are always members
    assert all(v in P for v in P.vertices)


def test_hull_removes_redundant_points():
    P = Polytope.hull([(0, 0), (2, 0), (0, 2), (1, 1), (F(1, 2), F(1, 2))])
    assert set(P.vertices) == {(0, 0), (2, 0), (0, 2)}
    P3 = Polytope.hull([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1), (F(1, 4),) * 3])
    assert len(P3.vertices) == 4


# ---------------------------------------------------------------- cone rays


def test_rays_negative_orthant():
    K = cone_rays_from_inequalities([(1, 0), (0, 1)], 2)
    assert set(K.rays) == {(-1, 0), (0, -1)}


def test_rays_half_plane():
    K = cone_rays_from_inequalities([(1, 1)], 2)
    assert same_cone(K, PolyCone(2, ((1, -1), (-1, 1), (-1, -1))))


def test_rays_whole_space():
    K = cone_rays_from_inequalities([], 2)
    assert same_cone(K, PolyCone.whole_space(2))


def test_rays_dimension_cap():
    with pytest.raises(DimensionCapError):
        cone_rays_from_inequalities([(1,) * 5], 5)


def test_rays_generate_exactly_the_inequality_cone():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randint(1, 4)
        A = [tuple(F(rng.randint(-2, 2)) for _ in range(n)) for _ in range(rng.randint(0, 5))]
        K = cone_rays_from_inequalities(A, n)
        # every ray satisfies the inequalities
        assert all(la.dot(a, r) <= 0 for a in A for r in K.rays)
        # every feasible sample point is generated
        for _ in range(5):
            x = tuple(F(rng.randint(-3, 3)) for _ in range(n))
            if all(la.dot(a, x) <= 0 for a in A):
                assert x in K


def test_zero_cone():
    K = PolyCone(3)
    assert (0, 0, 0) in K and (1, 0, 0) not in K
