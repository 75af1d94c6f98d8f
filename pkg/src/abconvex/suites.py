"""Seeded invariant suites behind ``abconvex check`` and the acceptance tests.

Each suite draws its corpus from ``random.Random(f"{seed}:{name}")`` so that
suites are reproducible independently of each other, compares library
results with oracles written here from first principles, and returns counts
plus the first few counterexamples.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction as F

from . import approximation as ap
from . import calculus as ca
from . import generation as ge
from . import separation as se
from .core import linalg as la
from .core.geometry import PolyCone, Polytope, same_cone, same_polytope
from .core.lp import eq, lp_solve
from .core.scalars import TOP, ExtScalar, LexScalar

MAX_FAILURES = 5


@dataclass
class SuiteResult:
    name: str
    stats: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def count(self, key, n=1):
        self.stats[key] = self.stats.get(key, 0) + n

    def expect(self, ok, key, detail):
        self.count(key)
        if not ok:
            self.count(f"{key}_failed")
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(f"{key}: {detail}")
        return ok


def _q(rng, lo, hi, den=1):
    return F(rng.randint(lo * den, hi * den), den)


def _vec(rng, dim, lo=-3, hi=3, den=1):
    return tuple(_q(rng, lo, hi, den) for _ in range(dim))


def _poly(rng, dim, pieces=3, offsets=True, lo=-3, hi=3):
    k = rng.randint(1, pieces)
    return ge.PolyFunc.from_slopes([_vec(rng, dim, lo, hi) for _ in range(k)],
                                   [_q(rng, -3, 3) if offsets else 0 for _ in range(k)])


def _cone(rng, dim, max_rays=4):
    return PolyCone(dim, tuple(_vec(rng, dim) for _ in range(rng.randint(1, max_rays))))


# ---------------------------------------------------------------- oracles


def _naive_conjugate(grid, values, y):
    best = None
    for x, v in zip(grid, values):
        if v.is_top:
            continue
        cand = sum((a * b for a, b in zip(x, y)), F(0)) - v.value
        if best is None or cand > best:
            best = cand
    return best


def _lower_chain(points):
    """Lower hull of (x, v) by sorting and popping non-left turns."""
    pts = sorted(points)
    chain = []
    for p in pts:
        while chain and chain[-1][0] == p[0]:
            if chain[-1][1] <= p[1]:
                break
            chain.pop()
        else:
            while len(chain) >= 2:
                (x1, v1), (x2, v2) = chain[-2], chain[-1]
                # drop chain[-1] if it lies on or above the segment chain[-2] -> p
                if (v2 - v1) * (p[0] - x1) >= (p[1] - v1) * (x2 - x1):
                    chain.pop()
                else:
                    break
            chain.append(p)
    return chain


def _chain_value(chain, x):
    for (x1, v1), (x2, v2) in zip(chain, chain[1:]):
        if x1 <= x <= x2:
            return v1 + (v2 - v1) * (x - x1) / (x2 - x1)
    if len(chain) == 1 and chain[0][0] == x:
        return chain[0][1]
    return None


def _envelope_lp(grid, values, x):
    """Lower convex envelope of finite grid values at x: min sum l_i v_i, sum l_i x_i = x."""
    pts = [(g, v.value) for g, v in zip(grid, values) if not v.is_top]
    k = len(pts)
    cons = [eq(tuple(g[i] for g, _ in pts), x[i]) for i in range(len(x))]
    cons.append(eq((1,) * k, 1))
    res = lp_solve(tuple(v for _, v in pts), cons, "min", nonneg=[True] * k, lexmin=False,
                   certificate=False)
    return res.value if res.optimal else None


def _sampled(rng, dim):
    if dim == 1:
        n = rng.randint(2, 64)
        xs = sorted({_q(rng, -8, 8, 4) for _ in range(n)})
        grid = [(x,) for x in xs]
    else:
        k = rng.randint(2, 4)
        grid = [(F(i), F(j)) for i in range(k) for j in range(rng.randint(2, 4))]
    vals = [ExtScalar(_q(rng, -6, 6, 2)) for _ in grid]
    if len(grid) > 2 and rng.random() < 0.2:
        vals[rng.randrange(1, len(grid))] = TOP
    return ge.SampledFunc(tuple(grid), tuple(vals))


# ---------------------------------------------------------------- 1. Fenchel


def suite_fenchel(rng, res, instances=200):
    for _ in range(instances):
        dim = rng.choice((1, 1, 2))
        f = _sampled(rng, dim)
        duals = [_vec(rng, dim, -4, 4, 2) for _ in range(rng.randint(1, 12))]
        fs = ge.fenchel_conjugate(f, duals)
        for y, v in zip(fs.grid, fs.values):
            res.expect(v.value == _naive_conjugate(f.grid, f.values, y), "conjugate_vs_naive", (f, y))
            for x, fx in zip(f.grid, f.values):
                if not fx.is_top:
                    res.expect(fx.value + v.value >= la.dot(x, y), "fenchel_young", (f, x, y))
        fss = ge.biconjugate(f)
        finite = [(x, v) for x, v in zip(f.grid, f.values) if not v.is_top]
        chain = _lower_chain([(x[0], v.value) for x, v in finite]) if dim == 1 else None
        for x, fx, bx in zip(f.grid, f.values, fss.values):
            res.expect(bx <= fx, "biconjugate_below", (f, x))
            env = _chain_value(chain, x[0]) if dim == 1 else _envelope_lp(f.grid, f.values, x)
            if env is None:
                res.expect(bx.is_top, "biconjugate_outside_hull", (f, x))
                continue
            res.expect(not bx.is_top and bx.value == env, "biconjugate_is_envelope", (f, x))
            on_hull = not fx.is_top and fx.value == env
            res.expect((bx == fx) == on_hull, "equality_on_hull_points", (f, x))
        res.count("instances")


# ---------------------------------------------------------------- 2. Minkowski duality


def suite_minkowski(rng, res, instances=100):
    for _ in range(instances):
        pts = [_vec(rng, 2, -4, 4) for _ in range(rng.randint(1, 6))]
        U = Polytope.hull(pts)
        p = ge.support_function(U)
        back = ge.subdifferential_at_zero(p)
        res.expect(same_polytope(back, U), "support_roundtrip", pts)
        # the support set of p is {t : <t, .> <= p}; spot-check against the minorant LP
        t = _vec(rng, 2, -4, 4, 2)
        inside = all(la.dot(t, x) <= p(x) for x in _directions(2))
        res.expect((t in U) == ge.in_support_set(t, p), "support_membership", (pts, t))
        res.expect(inside or t not in U, "support_inequality", (pts, t))
        res.count("polytopes")
    for _ in range(instances):
        dim = rng.randint(1, 2)
        p = _poly(rng, dim)
        members = [ge.AffineFunctional(_vec(rng, dim), _q(rng, -4, 4)) for _ in range(rng.randint(1, 6))]
        anchor = p.pieces[0]
        members.append(ge.AffineFunctional(anchor.slope, anchor.offset - rng.randint(0, 2)))
        H = ge.GeneratorSet(dim, tuple(members))
        env = ge.h_convex_envelope(p, H)
        res.expect(ge.is_h_convex(env, H), "envelope_is_h_convex", (p, H))
        res.expect(ge.dominates(p, env), "envelope_below", (p, H))
        res.count("functions")


def _directions(dim):
    out = []
    for i in range(dim):
        out += [la.unit(dim, i), la.neg(la.unit(dim, i))]
    return out + [tuple(F(1) for _ in range(dim)), tuple(F(-1) for _ in range(dim))]


# ---------------------------------------------------------------- 3. separation


def _general_position_pair(rng, dim):
    while True:
        K1, K2 = _cone(rng, dim, 5), _cone(rng, dim, 5)
        if se.general_position_check([K1, K2]).holds:
            return K1, K2


def suite_separation(rng, res, pairs=80, cones=100, gp2=100, gp3=50):
    for _ in range(pairs):
        dim = rng.randint(1, 2)
        rep = se.nonoblate_diagonal_equivalence(se.ConePair(_cone(rng, dim), _cone(rng, dim)))
        res.expect(rep.agree, "diagonal_equivalence", rep)
        res.count("nonoblate_true" if rep.direct else "nonoblate_false")
    for _ in range(cones):
        K = _cone(rng, rng.randint(1, 3))
        res.expect(same_cone(se.polar(se.polar(K)), K), "polar_involution", K)
    for dim, n in ((2, gp2), (3, gp3)):
        for _ in range(n):
            K1, K2 = _general_position_pair(rng, dim)
            rep = se.polar_decomposition_check([K1, K2])
            res.expect(rep.equal and not rep.hypothesis_violated, f"decomposition_r{dim}", (K1, K2))


# ---------------------------------------------------------------- 4. sandwich


def _hull_with(rng, dim, point, extra):
    return [point] + [_vec(rng, dim) for _ in range(extra)]


def suite_sandwich(rng, res, feasible=100, infeasible=50):
    for _ in range(feasible):
        n = rng.randint(1, 3)
        t0 = _vec(rng, n, -2, 2)
        P = ge.PolyFunc.from_slopes(_hull_with(rng, n, t0, rng.randint(0, 3)))
        Q = ge.PolyFunc.from_slopes(_hull_with(rng, n, la.neg(t0), rng.randint(0, 3)))
        w = se.sandwich(P, Q)
        if not res.expect(w.found, "feasible_found", (P, Q)):
            continue
        pts = _directions(n) + [_vec(rng, n, -9, 9, 4) for _ in range(100)]
        res.expect(se.verify_sandwich(P, Q, w.t, pts), "witness_on_points", (P, Q, w.t))
        res.expect(ge.in_support_set(w.t, P) and ge.in_support_set(la.neg(w.t), Q),
                   "witness_exact", (P, Q, w.t))
    for _ in range(infeasible):
        n = rng.randint(1, 3)
        c = _vec(rng, n, -2, 2)
        if la.is_zero(c):
            c = la.unit(n, 0)
        P = ge.PolyFunc.from_slopes(_halfspace_points(rng, n, c))
        Q = ge.PolyFunc.from_slopes(_halfspace_points(rng, n, c))
        w = se.sandwich(P, Q)
        if not res.expect(not w.found, "infeasible_rejected", (P, Q)):
            continue
        x = w.violation
        res.expect(P(x) + Q(x) < 0, "violation_exact", (P, Q, x))


def _halfspace_points(rng, n, c):
    """Random points s with <c, s> >= 1."""
    out = []
    cc = la.dot(c, c)
    for _ in range(rng.randint(1, 3)):
        s = _vec(rng, n)
        gap = 1 - la.dot(c, s)
        if gap > 0:
            s = la.add(s, la.scale(gap / cc + _q(rng, 0, 2), c))
        out.append(s)
    return out


# ---------------------------------------------------------------- 5. calculus


def _family(rng, m, n, k):
    return ca.OperatorFamily(tuple(tuple(_vec(rng, n, -3, 3) for _ in range(m)) for _ in range(k)))


def suite_calculus(rng, res, factorizations=200, matrices=100, compositions=50):
    for _ in range(factorizations):
        fam = _family(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(1, 4))
        x = _vec(rng, fam.shape[1], -9, 9, 3)
        direct = tuple(max(la.dot(A.rows[j], x) for A in fam.members) for j in range(fam.shape[0]))
        res.expect(ca.p_family(fam, x) == ca.canonical_sublinear(ca.family_embed(fam, x)) == direct,
                   "factorization", (fam, x))
    diag = ca.OperatorFamily((((1, 0), (0, 1)), ((0, 0), (0, 0))))
    strict = ((1, 0), (0, 0))
    H = ca.support_hull(diag)
    res.expect(strict in H and H.dominated(strict) and not H.in_convex_hull(strict),
               "strict_member", strict)
    fam = _family(rng, 2, 2, 3)
    H = ca.support_hull(fam)
    for k in range(matrices):
        if k % 2:
            T = tuple(_vec(rng, 2, -3, 3, 3) for _ in range(2))
        else:
            rows = []
            for j in range(2):
                w = [F(rng.randint(1, 4)) for _ in fam.members]
                tot = sum(w)
                rows.append(tuple(sum(c / tot * A.rows[j][i] for c, A in zip(w, fam.members))
                                  for i in range(2)))
            T = tuple(rows)
        member = T in H
        res.expect(member == H.dominated(T), "row_factorization", T)
        res.count("cop_members" if member else "cop_non_members")
        if member and not H.in_convex_hull(T):
            res.count("cop_minus_conv")
    for _ in range(compositions):
        n, m = rng.randint(1, 2), rng.randint(1, 2)
        p1 = [_poly(rng, n, 3, offsets=False) for _ in range(m)]
        p2 = ge.PolyFunc.from_slopes([_vec(rng, m, 0, 3) for _ in range(rng.randint(1, 3))])
        c = ca.composition_subdifferential(p1, p2)
        res.expect(c.direct_in_formula and c.formula_in_direct, "composition", (p1, p2))


# ---------------------------------------------------------------- 6. approximation


def suite_approximation(rng, res, instances=100, lex=50, chains=30):
    for _ in range(instances):
        dim = rng.randint(1, 2)
        f = _poly(rng, dim, 4)
        x = _vec(rng, dim, -3, 3, 2)
        e1, e2 = sorted((_q(rng, 0, 4, 4), _q(rng, 0, 4, 4)))
        small, big = ap.eps_subdifferential(f, x, e1), ap.eps_subdifferential(f, x, e2)
        res.expect(all(v in big for v in small.polytope.vertices), "eps_monotone", (f, x, e1, e2))
        y = _vec(rng, dim, -4, 4, 2)
        res.expect((y in small) == small.direct_contains(y) == (y in small.polytope),
                   "eps_routes_agree", (f, x, e1, y))
        res.expect(ap.eps_limit(f, x).holds, "eps_limit", (f, x))
    for _ in range(lex):
        dim = rng.randint(1, 2)
        base = _poly(rng, dim, 4)
        pieces = tuple((tuple(LexScalar(a, rng.randint(-2, 2)) for a in p.slope),
                        LexScalar(p.offset, rng.randint(-2, 2))) for p in base.pieces)
        f = ap.LexPolyFunc(dim, pieces)
        x = _vec(rng, dim, -2, 2)
        D = ap.infinitesimal_subdifferential(f, x)
        res.expect(same_polytope(D, ap.eps_subdifferential(f.std_part(), x, 0).polytope),
                   "infinitesimal_vs_std", (f, x))
    for _ in range(chains):
        while True:
            f1, f2 = _poly(rng, 2), _poly(rng, 2)
            x, z = _q(rng, -3, 3), _q(rng, -3, 3)
            at = ap.infimal_convolution(f1, f2, "polyhedral").evaluate(x, z)
            if at.witness is not None:
                break
        rep = ap.chain_rule_check(f1, f2, (x, at.witness[0], z))
        res.expect(rep.exactness == ap.EXACT, "chain_exact", (f1, f2))
        res.expect(rep.general_position, "chain_general_position", (f1, f2))
        res.expect(rep.equal, "chain_rule", (f1, f2, (x, at.witness[0], z)))


SUITES = {
    "fenchel": suite_fenchel,
    "minkowski": suite_minkowski,
    "separation": suite_separation,
    "sandwich": suite_sandwich,
    "calculus": suite_calculus,
    "approximation": suite_approximation,
}


def run_suite(name, seed=42) -> SuiteResult:
    rng = random.Random(f"{seed}:{name}")
    res = SuiteResult(name)
    SUITES[name](rng, res)
    return res


def run_all(names=None, seed=42):
    return [run_suite(n, seed) for n in (names or SUITES)]
