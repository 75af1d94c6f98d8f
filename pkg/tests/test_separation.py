import random
from fractions import Fraction as F

import pytest

from abconvex.core import DimensionCapError, PolyCone, same_cone
from abconvex.core import linalg as la
from abconvex.generation import PolyFunc
from abconvex.separation import (
    ConePair,
    _representation_cost,
    conic_correspondence,
    general_position_check,
    in_polar,
    nonoblate_check,
    nonoblate_diagonal_equivalence,
    polar,
    polar_decomposition_check,
    SandwichWitness,
    sandwich,
    sublinear_general_position,
    verify_sandwich,
)

ORTHANT = PolyCone(2, ((1, 0), (0, 1)))
E1 = PolyCone(2, ((1, 0),))
E2 = PolyCone(2, ((0, 1),))
LOWER_HALF = PolyCone(2, ((1, 0), (-1, 0), (0, -1)))
ABS = PolyFunc.from_slopes([(1,), (-1,)])


def random_cone(rng, dim, max_rays=4, spread=3):
    rays = []
    for _ in range(rng.randint(1, max_rays)):
        rays.append(tuple(F(rng.randint(-spread, spread)) for _ in range(dim)))
    return PolyCone(dim, tuple(rays))


# ---------------------------------------------------------------- conic correspondence


def test_decomposition_in_orthant():
    k1, k2 = conic_correspondence(ConePair(ORTHANT, ORTHANT), (1, -1))
    assert k1 == (1, 0) and k2 == (0, 1)


def test_decomposition_of_zero():
    assert conic_correspondence(ConePair(ORTHANT, E1), (0, 0)) == ((0, 0), (0, 0))


def test_not_representable():
    assert conic_correspondence(ConePair(E1, E1), (0, 1)) is None


def test_correspondence_is_a_cone():
    rng = random.Random(1)
    for _ in range(30):
        pair = ConePair(random_cone(rng, 2), random_cone(rng, 2))
        x = tuple(F(rng.randint(-3, 3)) for _ in range(2))
        dec = conic_correspondence(pair, x)
        if dec is None:
            continue
        k1, k2 = dec
        for lam in (F(1, 3), F(2), F(7, 2)):
            assert la.sub(la.scale(lam, k1), la.scale(lam, k2)) == la.scale(lam, x)
            assert la.scale(lam, k1) in pair.K1 and la.scale(lam, k2) in pair.K2


# ---------------------------------------------------------------- nonoblateness


def test_opposite_orthants_are_oblate():
    # K1 - K2 = R^2_+ + R^2_+ = R^2_+, a quadrant: not the plane
    rep = nonoblate_check(ConePair(ORTHANT, ORTHANT.negated()))
    assert not rep.nonoblate


def test_equal_orthants_are_nonoblate():
    rep = nonoblate_check(ConePair(ORTHANT, ORTHANT))
    assert rep.nonoblate and rep.radius > 0


def test_ray_is_nonoblate_in_its_span():
    rep = nonoblate_check(ConePair(E1, E1))
    assert rep.nonoblate
    assert rep.span == ((1, 0),)
    assert rep.radius == 1


def test_quadrant_counterexample():
    rep = nonoblate_check(ConePair(E1, E2))
    assert not rep.nonoblate and rep.radius is None


def test_radius_certificate_is_sound():
    # points sum a_j b_j with sum |a_j| <= r decompose inside the unit box both ways
    rng = random.Random(4)
    for _ in range(20):
        pair = ConePair(random_cone(rng, 2, 4), random_cone(rng, 2, 4))
        rep = nonoblate_check(pair)
        if not rep.nonoblate or not rep.span:
            continue
        for _ in range(5):
            a = [F(rng.randint(-4, 4)) for _ in rep.span]
            tot = sum(abs(v) for v in a) or F(1)
            a = [v * rep.radius / tot for v in a]
            x = tuple(sum(c * b[i] for c, b in zip(a, rep.span)) for i in range(2))
            for A, B in ((pair.K1, pair.K2), (pair.K2, pair.K1)):
                cost = _representation_cost(A, B, x)
                assert cost is not None and cost <= 1


@pytest.mark.parametrize("k1,k2,expected", [
    (((1,),), ((-1,),), False),  # R_+ - (-R_+) = R_+
    (((1,),), ((1,),), True),    # R_+ - R_+ = R
])
def test_diagonal_equivalence_line(k1, k2, expected):
    rep = nonoblate_diagonal_equivalence(ConePair(PolyCone(1, k1), PolyCone(1, k2)))
    assert rep.direct == rep.lifted == expected


def test_diagonal_equivalence_quadrant():
    rep = nonoblate_diagonal_equivalence(ConePair(E1, E2))
    assert rep.direct is False and rep.lifted is False


def test_diagonal_equivalence_random_corpus():
    rng = random.Random(12)
    seen = set()
    for _ in range(60):
        dim = rng.randint(1, 2)
        pair = ConePair(random_cone(rng, dim), random_cone(rng, dim))
        rep = nonoblate_diagonal_equivalence(pair)
        assert rep.agree
        seen.add(rep.direct)
    assert seen == {True, False}


def test_diagonal_cap():
    with pytest.raises(DimensionCapError):
        nonoblate_diagonal_equivalence(ConePair(PolyCone(5), PolyCone(5)))


# ---------------------------------------------------------------- general position


def test_general_position_lower_half_plane():
    # K2 - K1 = lower half-plane - orthant stays in {y <= 0}
    assert not general_position_check([ORTHANT, LOWER_HALF])
    assert general_position_check([ORTHANT, ORTHANT.negated(), LOWER_HALF]).holds is False


def test_general_position_orthant_and_half_plane_in_order():
    assert general_position_check([ORTHANT, PolyCone.whole_space(2)])


def test_general_position_zero_cones():
    rep = general_position_check([PolyCone(2), PolyCone(2)])
    assert rep.holds and rep.complemented == "automatic"


def test_general_position_quadrant_fails():
    assert not general_position_check([E1, E2])


def test_general_position_three_cones():
    rep = general_position_check([ORTHANT, ORTHANT, PolyCone.whole_space(2)])
    assert rep.reduced and rep.holds


def test_general_position_cap():
    with pytest.raises(DimensionCapError):
        general_position_check([PolyCone(3)] * 3)


def test_sublinear_general_position_examples():
    assert sublinear_general_position([ABS, ABS])
    assert sublinear_general_position([PolyFunc.from_slopes([(1,)]), PolyFunc.from_slopes([(-1,)])])
    zero = PolyFunc.from_slopes([(0, 0)])
    assert not sublinear_general_position([zero, zero], [E1, E2])


def test_sublinear_general_position_rejects_affine():
    with pytest.raises(ValueError):
        sublinear_general_position([PolyFunc(1, (((1,), 1),)), ABS])


def test_sublinear_general_position_cap():
    f = PolyFunc.from_slopes([(1, 0, 0)])
    with pytest.raises(DimensionCapError):
        sublinear_general_position([f, f, f])


# ---------------------------------------------------------------- polars


def test_polar_of_orthant():
    assert same_cone(polar(ORTHANT), ORTHANT.negated())


def test_polar_of_ray_is_half_plane():
    assert same_cone(polar(PolyCone(2, ((1, 1),))), PolyCone(2, ((1, -1), (-1, 1), (-1, -1))))


def test_polar_of_zero_is_everything():
    assert same_cone(polar(PolyCone(3)), PolyCone.whole_space(3))


def test_polar_membership_predicate_any_dimension():
    K = PolyCone(6, ((1, 0, 0, 0, 0, 0), (0, 1, 1, 0, 0, 0)))
    assert in_polar((-1, 0, -1, 5, 5, 5), K)
    assert not in_polar((1, 0, 0, 0, 0, 0), K)


def test_polar_is_involutive_and_antitone():
    rng = random.Random(21)
    for _ in range(40):
        dim = rng.randint(1, 3)
        K = random_cone(rng, dim)
        assert same_cone(polar(polar(K)), K)
        L = PolyCone(dim, K.rays + random_cone(rng, dim).rays)
        # K subset L  =>  polar(L) subset polar(K)
        assert all(in_polar(t, K) for t in polar(L).rays)


def test_decomposition_example():
    K1 = PolyCone(2, ((1, 0), (1, 1)))
    K2 = PolyCone(2, ((1, 1), (0, 1)))
    rep = polar_decomposition_check([K1, K2])
    assert rep.equal
    assert same_cone(polar(PolyCone(2, ((1, 1),))), PolyCone(2, rep.lhs_rays))


def test_decomposition_idempotent():
    K = PolyCone(2, ((1, 0), (1, 2)))
    rep = polar_decomposition_check([K, K])
    assert rep.equal and same_cone(PolyCone(2, rep.lhs_rays), polar(K))


def test_decomposition_reports_violated_hypothesis():
    rep = polar_decomposition_check([E1, E2])
    assert rep.hypothesis_violated
    # observed, not claimed: polyhedral cones still decompose
    assert rep.equal


# ---------------------------------------------------------------- sandwich


def test_sandwich_forced_witness():
    w = sandwich(PolyFunc.from_slopes([(1,)]), PolyFunc.from_slopes([(-1,)]))
    assert w.t == (1,)


def test_sandwich_lexmin_witness():
    w = sandwich(ABS, ABS)
    assert w.t == (-1,)
    assert all(-abs(x) <= w.t[0] * x <= abs(x) for x in (-1, 1))


def test_sandwich_violation():
    w = sandwich(PolyFunc.from_slopes([(0,)]), PolyFunc.from_slopes([(-1,)]))
    assert w.t is None and w.violation == (1,) and w.gap == -1


def test_sandwich_rejects_affine():
    with pytest.raises(ValueError):
        sandwich(PolyFunc(1, (((1,), 1),)), ABS)


def test_sandwich_witness_needs_exactly_one():
    with pytest.raises(ValueError):
        SandwichWitness()
    with pytest.raises(ValueError):
        SandwichWitness(t=(1,), violation=(1,))


def test_sandwich_random_soundness():
    rng = random.Random(31)
    for _ in range(30):
        n = rng.randint(1, 3)
        P = PolyFunc.from_slopes([tuple(F(rng.randint(-3, 3)) for _ in range(n))
                                  for _ in range(rng.randint(1, 4))])
        Q = PolyFunc.from_slopes([tuple(F(rng.randint(-3, 3)) for _ in range(n))
                                  for _ in range(rng.randint(1, 4))])
        w = sandwich(P, Q)
        if w.found:
            pts = [tuple(F(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(n))
                   for _ in range(100)]
            assert verify_sandwich(P, Q, w.t, pts)
        else:
            assert P(w.violation) + Q(w.violation) < 0
