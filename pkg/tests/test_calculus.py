import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abconvex.calculus import (
    BoundedMap,
    MatrixOperator,
    OperatorFamily,
    canonical_sublinear,
    compose,
    composition_subdifferential,
    family_embed,
    p_family,
    support_hull,
    support_set,
)
from abconvex.core import Polytope, same_polytope
from abconvex.core import linalg as la
from abconvex.generation import PolyFunc, in_support_set

rat = st.fractions(min_value=-5, max_value=5, max_denominator=6)
lin = PolyFunc.from_slopes


def vec(m):
    return st.tuples(*([rat] * m))


# ---------------------------------------------------------------- canonical operator


def test_canonical_examples():
    assert canonical_sublinear(BoundedMap.of({"a": (1, 0), "b": (0, 1)})) == (1, 1)
    assert canonical_sublinear(BoundedMap.of({"a": (F(3, 2), -2)})) == (F(3, 2), -2)


def test_canonical_empty():
    with pytest.raises(ValueError):
        canonical_sublinear(BoundedMap(()))


@given(st.lists(st.tuples(vec(2), vec(2), vec(2)), min_size=3, max_size=3), rat)
@settings(max_examples=60, deadline=None)
def test_canonical_is_increasing_and_sublinear(triples, lam):
    f = BoundedMap(tuple((i, t[0]) for i, t in enumerate(triples)))
    g = BoundedMap(tuple((i, t[1]) for i, t in enumerate(triples)))
    bump = BoundedMap(tuple((i, tuple(abs(v) for v in t[2])) for i, t in enumerate(triples)))
    ef, eg = canonical_sublinear(f), canonical_sublinear(g)
    assert all(a <= b + c for a, b, c in zip(canonical_sublinear(f + g), ef, eg))
    upper = f + bump
    assert f.leq(upper)
    assert all(a <= b for a, b in zip(ef, canonical_sublinear(upper)))
    lam = abs(lam)
    assert canonical_sublinear(f.scaled(lam)) == la.scale(lam, ef)


# ---------------------------------------------------------------- family operators


def test_embed_examples():
    fam = OperatorFamily((((1,),), ((-1,),)))
    assert family_embed(fam, (3,)) == BoundedMap(((0, (3,)), (1, (-3,))))
    assert all(v == (0,) for _, v in family_embed(fam, (0,)).items)
    fam2 = OperatorFamily((((1, 2), (3, 4)), ((5, 6), (7, 8))))
    assert [v for _, v in family_embed(fam2, (1, 0)).items] == [(1, 3), (5, 7)]


def test_embed_shape_mismatch():
    with pytest.raises(ValueError):
        family_embed(OperatorFamily((((1, 2),),)), (1,))


def test_family_shape_mismatch():
    with pytest.raises(ValueError):
        OperatorFamily((((1, 2),), ((1,),)))


def test_p_family_examples():
    assert p_family(OperatorFamily((((1, 0),), ((0, 1),))), (2, 5)) == (5,)
    A = ((1, -2), (3, 1))
    fam = OperatorFamily((A, tuple(tuple(-a for a in r) for r in A)))
    x = (F(1, 2), 2)
    assert p_family(fam, x) == tuple(abs(v) for v in la.matvec(A, x))
    assert p_family(fam, (0, 0)) == (0, 0)


def test_factorization_random_suite():
    rng = random.Random(7)
    for _ in range(200):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        fam = OperatorFamily(tuple(
            tuple(tuple(F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n))
                  for _ in range(m))
            for _ in range(rng.randint(1, 4))))
        x = tuple(F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n))
        assert p_family(fam, x, check=True) == canonical_sublinear(family_embed(fam, x))


@given(vec(2), vec(2), rat)
@settings(max_examples=50, deadline=None)
def test_embed_is_linear(x, y, lam):
    fam = OperatorFamily((((1, 2), (0, -1)), ((F(1, 2), 0), (3, 3))))
    lhs = family_embed(fam, la.add(la.scale(lam, x), y))
    rhs = family_embed(fam, x).scaled(lam) + family_embed(fam, y)
    assert lhs == rhs


def test_positivity_predicate():
    assert MatrixOperator(((1, 0), (2, 3))).is_positive
    assert not MatrixOperator(((1, -1),)).is_positive


# ---------------------------------------------------------------- support sets and hulls


def test_support_set_examples():
    assert support_set(lin([(1,), (-1,)])).interval() == (-1, 1)
    P = support_set(lin([(1, 0), (0, 1), (0, 0)]))
    assert sorted(P.vertices) == [(0, 0), (0, 1), (1, 0)]
    assert sorted(support_set(lin([(1,), (2,), (F(3, 2),)])).vertices) == [(1,), (2,)]


def test_support_set_rejects_affine():
    with pytest.raises(ValueError):
        support_set(PolyFunc(1, (((1,), 1),)))


def test_support_set_matches_minorant_lp():
    rng = random.Random(3)
    p = lin([(1, 0), (0, 1), (-1, -1), (2, -1)])
    P = support_set(p)
    for _ in range(60):
        t = (F(rng.randint(-6, 6), 3), F(rng.randint(-6, 6), 3))
        assert (t in P) == in_support_set(t, p)


def test_support_hull_strictness():
    fam = OperatorFamily((((1, 0), (0, 1)), ((0, 0), (0, 0))))
    H = support_hull(fam)
    half = ((F(1, 2), 0), (0, F(1, 2)))
    assert half in H and H.in_convex_hull(half)
    T = ((1, 0), (0, 0))
    assert T in H and H.dominated(T)
    assert not H.in_convex_hull(T)


def test_support_hull_singleton():
    A = ((1, 2), (3, 4))
    H = support_hull(OperatorFamily((A,)))
    assert A in H
    assert ((1, 2), (3, 5)) not in H


def test_support_hull_rows_both_directions():
    rng = random.Random(5)
    fam = OperatorFamily(tuple(
        tuple(tuple(F(rng.randint(-3, 3)) for _ in range(2)) for _ in range(2))
        for _ in range(3)))
    H = support_hull(fam)
    inside = outside = 0
    for k in range(80):
        if k % 2:
            T = tuple(tuple(F(rng.randint(-9, 9), 3) for _ in range(2)) for _ in range(2))
        else:
            # an independent convex combination in each row
            rows = []
            for j in range(2):
                w = [F(rng.randint(1, 4)) for _ in fam.members]
                w = [v / sum(w) for v in w]
                rows.append(tuple(sum(c * A.rows[j][i] for c, A in zip(w, fam.members))
                                  for i in range(2)))
            T = tuple(rows)
        member = T in H
        assert member == H.dominated(T)
        inside += member
        outside += not member
    assert inside and outside


def test_scalar_support_hull_is_convex_hull():
    rng = random.Random(9)
    for _ in range(20):
        pts = [tuple(F(rng.randint(-4, 4)) for _ in range(2)) for _ in range(rng.randint(1, 5))]
        H = support_hull(OperatorFamily(tuple((p,) for p in pts)))
        assert same_polytope(H.rows[0], Polytope.hull(pts))
        for _ in range(5):
            T = ((F(rng.randint(-8, 8), 2), F(rng.randint(-8, 8), 2)),)
            assert (T in H) == H.in_convex_hull(T)


# ---------------------------------------------------------------- composition


def test_composition_absolute_values():
    c = composition_subdifferential([lin([(1,), (-1,)]), lin([(2,), (-2,)])],
                                    lin([(1, 0), (0, 1)]))
    assert c.direct.interval() == (-2, 2)
    assert c.agree


def test_composition_projection():
    p1 = [lin([(1, 0), (0, 1)]), lin([(5, 5)])]
    c = composition_subdifferential(p1, lin([(1, 0)]))
    assert same_polytope(c.direct, support_set(p1[0]))
    assert c.agree


def test_composition_linear_pullback():
    A = ((1, 2), (-1, 1))
    p2 = lin([(1, 0), (0, 2), (1, 1)])
    c = composition_subdifferential([lin([A[0]]), lin([A[1]])], p2)
    pulled = [tuple(sum(mu[j] * A[j][i] for j in range(2)) for i in range(2)) for mu in p2.slopes]
    assert same_polytope(c.direct, Polytope.hull(pulled))
    assert c.agree


def test_composition_requires_increasing():
    with pytest.raises(ValueError):
        composition_subdifferential([lin([(1,)])], lin([(-1,)]))


def test_composition_requires_sublinear():
    with pytest.raises(ValueError):
        composition_subdifferential([PolyFunc(1, (((1,), 1),))], lin([(1,)]))


def _random_instance(rng):
    n, m = rng.randint(1, 2), rng.randint(1, 2)
    p1 = [lin([tuple(F(rng.randint(-3, 3)) for _ in range(n)) for _ in range(rng.randint(1, 3))])
          for _ in range(m)]
    p2 = lin([tuple(F(rng.randint(0, 3)) for _ in range(m)) for _ in range(rng.randint(1, 3))])
    return p1, p2


def test_composition_corpus_agrees():
    rng = random.Random(11)
    for _ in range(50):
        p1, p2 = _random_instance(rng)
        c = composition_subdifferential(p1, p2)
        assert c.direct_in_formula and c.formula_in_direct


def test_composition_members_are_minorants():
    rng = random.Random(13)
    for _ in range(15):
        p1, p2 = _random_instance(rng)
        c = composition_subdifferential(p1, p2)
        g = compose(p1, p2)
        n = p1[0].dim
        xs = [tuple(F(rng.randint(-20, 20), rng.randint(1, 7)) for _ in range(n))
              for _ in range(100)]
        for t in c.direct.vertices:
            for x in xs:
                assert la.dot(t, x) <= p2(tuple(f(x) for f in p1)) == g(x)
