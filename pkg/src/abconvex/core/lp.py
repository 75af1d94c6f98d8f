"""Exact two-phase simplex over Fraction with Bland's rule.

Variables are free unless flagged nonnegative.  Results are deterministic:
entering variables are chosen by smallest index, leaving variables by the
minimum ratio with ties going to the smallest basic index.  With
``lexmin=True`` the optimal face is further reduced to its lexicographically
smallest point by minimizing the coordinates one after another.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalars import Q

_SENSES = ("<=", ">=", "==")


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple
    sense: str
    rhs: Fraction

    def __post_init__(self):
        if self.sense not in _SENSES:
            raise ValueError(f"unknown constraint sense {self.sense!r}")
        object.__setattr__(self, "coeffs", tuple(Q(a) for a in self.coeffs))
        object.__setattr__(self, "rhs", Q(self.rhs))

    def holds(self, x) -> bool:
        lhs = sum((a * v for a, v in zip(self.coeffs, x)), Fraction(0))
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


def leq(coeffs, rhs=0) -> Constraint:
    return Constraint(coeffs, "<=", rhs)


def geq(coeffs, rhs=0) -> Constraint:
    return Constraint(coeffs, ">=", rhs)


def eq(coeffs, rhs=0) -> Constraint:
    return Constraint(coeffs, "==", rhs)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: tuple | None = None
    value: Fraction | None = None
    certificate: tuple | None = None
    direction: tuple | None = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class LPError(ValueError):
    pass


def _pivot(T, z, basis, r, q):
    row = T[r]
    piv = row[q]
    if piv != 1:
        row[:] = [v / piv for v in row]
    nz = [(j, v) for j, v in enumerate(row) if v != 0]
    for i, other in enumerate(T):
        if i != r:
            f = other[q]
            if f != 0:
                for j, v in nz:
                    other[j] -= f * v
    f = z[q]
    if f != 0:
        for j, v in nz:
            z[j] -= f * v
    basis[r] = q


def _simplex(T, z, basis, allowed):
    """Run Bland's rule to optimality.  Returns None or an unbounded column."""
    rhs = len(z) - 1
    while True:
        q = next((j for j in allowed if z[j] < 0), None)
        if q is None:
            return None
        best = None
        for i, row in enumerate(T):
            a = row[q]
            if a > 0:
                ratio = row[rhs] / a
                key = (ratio, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return q
        _pivot(T, z, basis, best[1], q)


def _standard_form(constraints, nonneg, n):
    """Map to A y = b, y >= 0, b >= 0.  Returns rows, rhs and the column map."""
    cols = []  # (original var, sign)
    for j in range(n):
        cols.append((j, 1))
        if not nonneg[j]:
            cols.append((j, -1))
    n_struct = len(cols)
    n_slack = sum(1 for c in constraints if c.sense != "==")
    rows, rhs = [], []
    s = 0
    for c in constraints:
        row = [sign * c.coeffs[j] for j, sign in cols] + [Fraction(0)] * n_slack
        if c.sense == "<=":
            row[n_struct + s] = Fraction(1)
            s += 1
        elif c.sense == ">=":
            row[n_struct + s] = Fraction(-1)
            s += 1
        b = c.rhs
        if b < 0:
            row = [-v for v in row]
            b = -b
        rows.append(row)
        rhs.append(b)
    return rows, rhs, cols, n_struct + n_slack


def _recover(y, cols, n):
    x = [Fraction(0)] * n
    for val, (j, sign) in zip(y, cols):
        if val:
            x[j] += sign * val
    return tuple(x)


def _solve_once(cost, constraints, nonneg, n):
    rows, rhs, cols, N = _standard_form(constraints, nonneg, n)
    m = len(rows)
    width = N + m + 1
    T = []
    for i, row in enumerate(rows):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(row + art + [rhs[i]])
    basis = [N + i for i in range(m)]
    # phase 1: minimize the sum of artificials
    z = [Fraction(0)] * width
    for row in T:
        for j in range(N):
            z[j] -= row[j]
        z[-1] -= row[-1]
    _simplex(T, z, basis, range(N))
    if z[-1] != 0:
        return LPResult("infeasible")
    # drive zero-level artificials out of the basis, dropping redundant rows
    i = 0
    while i < len(T):
        if basis[i] >= N:
            q = next((j for j in range(N) if T[i][j] != 0), None)
            if q is None:
                del T[i]
                del basis[i]
                continue
            _pivot(T, z, basis, i, q)
        i += 1
    c = [Fraction(0)] * width
    for k, (j, sign) in enumerate(cols):
        c[k] = sign * cost[j]
    z = c[:]
    for i, row in enumerate(T):
        cb = c[basis[i]]
        if cb != 0:
            for j in range(width):
                if row[j] != 0:
                    z[j] -= cb * row[j]
    q = _simplex(T, z, basis, range(N))
    y = [Fraction(0)] * N
    for i, b in enumerate(basis):
        y[b] = T[i][-1]
    x = _recover(y[: len(cols)], cols, n)
    if q is not None:
        d = [Fraction(0)] * N
        d[q] = Fraction(1)
        for i, b in enumerate(basis):
            d[b] = -T[i][q]
        return LPResult("unbounded", x=x, direction=_recover(d[: len(cols)], cols, n))
    value = sum((a * v for a, v in zip(cost, x)), Fraction(0))
    return LPResult("optimal", x=x, value=value)


def farkas_certificate(constraints, nonneg, n):
    """Multipliers y proving infeasibility of the system.

    Sign pattern: y_i >= 0 on '<=' rows, y_i <= 0 on '>=' rows, free on '=='.
    Then sum_i y_i a_i vanishes on free variables, is >= 0 on nonnegative
    variables, and sum_i y_i b_i < 0.  Returns None if the system is feasible.
    """
    flip = [c.sense == ">=" for c in constraints]
    normed = [
        Constraint(tuple(-a for a in c.coeffs), "<=", -c.rhs) if f else c
        for c, f in zip(constraints, flip)
    ]
    m = len(normed)
    alt = []
    for j in range(n):
        col = tuple(c.coeffs[j] for c in normed)
        alt.append(Constraint(col, ">=" if nonneg[j] else "==", 0))
    alt.append(Constraint(tuple(c.rhs for c in normed), "==", -1))
    alt_nonneg = [c.sense == "<=" for c in normed]
    res = _solve_once([Fraction(0)] * m, alt, alt_nonneg, m)
    if res.status == "infeasible":
        return None
    return tuple(-v if f else v for v, f in zip(res.x, flip))


def verify_farkas(constraints, nonneg, y) -> bool:
    """Independent check that ``y`` certifies infeasibility."""
    n = len(nonneg)
    for c, v in zip(constraints, y):
        if (c.sense == "<=" and v < 0) or (c.sense == ">=" and v > 0):
            return False
    for j in range(n):
        s = sum((v * c.coeffs[j] for c, v in zip(constraints, y)), Fraction(0))
        if (nonneg[j] and s < 0) or (not nonneg[j] and s != 0):
            return False
    return sum((v * c.rhs for c, v in zip(constraints, y)), Fraction(0)) < 0


def lp_solve(objective=None, constraints=(), sense="min", nonneg=None, lexmin=True,
             num_vars=None, certificate=True, lex_vars=None) -> LPResult:
    """Solve ``sense`` of ``objective . x`` subject to ``constraints``.

    ``sense`` is "min", "max" or "feasibility".  ``nonneg`` is a per-variable
    flag sequence (default: all variables free).  ``lex_vars`` limits the
    lexicographic tie-break to the leading variables.
    """
    if sense not in ("min", "max", "feasibility"):
        raise LPError(f"unknown sense {sense!r}")
    constraints = list(constraints)
    if num_vars is None:
        if objective is not None:
            num_vars = len(objective)
        elif constraints:
            num_vars = len(constraints[0].coeffs)
        else:
            raise LPError("cannot infer the number of variables")
    n = num_vars
    if objective is None or sense == "feasibility":
        cost = [Fraction(0)] * n
    else:
        cost = [Q(a) for a in objective]
    if len(cost) != n:
        raise LPError(f"objective has {len(cost)} entries, expected {n}")
    for c in constraints:
        if len(c.coeffs) != n:
            raise LPError(f"constraint has {len(c.coeffs)} coefficients, expected {n}")
    nonneg = [False] * n if nonneg is None else list(nonneg)
    if len(nonneg) != n:
        raise LPError("nonneg flags do not match the number of variables")
    if sense == "max":
        cost = [-a for a in cost]

    res = _solve_once(cost, constraints, nonneg, n)
    if res.status == "infeasible":
        cert = farkas_certificate(constraints, nonneg, n) if certificate else None
        return LPResult("infeasible", certificate=cert)
    if res.status == "unbounded":
        d = res.direction
        if sense == "max":
            return LPResult("unbounded", x=res.x, direction=d)
        return res
    if lexmin:
        fixed = list(constraints)
        if any(cost):
            fixed.append(Constraint(tuple(cost), "==", res.value))
        for k in range(n if lex_vars is None else lex_vars):
            e = [Fraction(0)] * n
            e[k] = Fraction(1)
            sub = _solve_once(e, fixed, nonneg, n)
            if sub.status == "optimal":
                fixed.append(Constraint(tuple(e), "==", sub.x[k]))
                res = LPResult("optimal", x=sub.x, value=res.value)
    value = res.value
    if sense == "max":
        value = -value
    elif sense == "feasibility":
        value = Fraction(0)
    return LPResult("optimal", x=res.x, value=value)


def feasible_point(constraints, nonneg=None, num_vars=None, lexmin=False):
    """A feasible point or None."""
    res = lp_solve(None, constraints, "feasibility", nonneg=nonneg, lexmin=lexmin,
                   num_vars=num_vars, certificate=False)
    return res.x if res.feasible else None
