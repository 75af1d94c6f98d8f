"""Exact scalars: rationals, the extended line, and two-level lexicographic numbers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering

_RATIONAL_RE = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


def Q(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to Fraction; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise ValueError(f"not an exact rational literal: {value!r}")
        return Fraction(value.replace(" ", ""))
    if isinstance(value, (tuple, list)) and len(value) == 2:
        num, den = value
        if not (isinstance(num, int) and isinstance(den, int)):
            raise ValueError(f"rational pair must hold integers: {value!r}")
        return Fraction(num, den)
    raise TypeError(f"cannot make an exact rational from {type(value).__name__}")


def qvec(values) -> tuple[Fraction, ...]:
    return tuple(Q(v) for v in values)


def fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@total_ordering
class ExtScalar:
    """A rational, or one of the two adjoined elements TOP (+inf) and BOTTOM (-inf)."""

    __slots__ = ("_rank", "_value")

    def __init__(self, value=0, _rank: int = 0):
        # rank: -1 bottom, 0 finite, 1 top
        object.__setattr__(self, "_rank", _rank)
        object.__setattr__(self, "_value", Q(value) if _rank == 0 else None)

    def __setattr__(self, name, value):
        raise AttributeError("ExtScalar is immutable")

    @classmethod
    def of(cls, value) -> "ExtScalar":
        if isinstance(value, ExtScalar):
            return value
        if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "top"):
            return TOP
        if isinstance(value, str) and value.strip().lower() in ("-inf", "bottom"):
            return BOTTOM
        return cls(value)

    @property
    def is_top(self) -> bool:
        return self._rank == 1

    @property
    def is_bottom(self) -> bool:
        return self._rank == -1

    @property
    def is_finite(self) -> bool:
        return self._rank == 0

    @property
    def value(self) -> Fraction:
        if self._rank != 0:
            raise ValueError(f"{self} has no finite value")
        return self._value

    def _key(self):
        return (self._rank, self._value if self._rank == 0 else 0)

    def __eq__(self, other):
        if not isinstance(other, ExtScalar):
            try:
                other = ExtScalar.of(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self._key() == other._key()

    def __lt__(self, other):
        other = ExtScalar.of(other)
        return self._key() < other._key()

    def __hash__(self):
        return hash(self._key())

    def __add__(self, other):
        other = ExtScalar.of(other)
        if {self._rank, other._rank} == {1, -1}:
            raise ArithmeticError("TOP + BOTTOM is undefined")
        if self._rank or other._rank:
            return TOP if 1 in (self._rank, other._rank) else BOTTOM
        return ExtScalar(self._value + other._value)

    __radd__ = __add__

    def __neg__(self):
        if self._rank:
            return BOTTOM if self._rank == 1 else TOP
        return ExtScalar(-self._value)

    def __sub__(self, other):
        return self + (-ExtScalar.of(other))

    def __rsub__(self, other):
        return ExtScalar.of(other) + (-self)

    def __repr__(self):
        if self._rank == 1:
            return "TOP"
        if self._rank == -1:
            return "BOTTOM"
        return f"ExtScalar({fmt_q(self._value)})"

    def __str__(self):
        if self._rank == 1:
            return "inf"
        if self._rank == -1:
            return "-inf"
        return fmt_q(self._value)


TOP = ExtScalar(_rank=1)
BOTTOM = ExtScalar(_rank=-1)


def ext_sup(values) -> ExtScalar:
    """Supremum of a finite family; the empty supremum is BOTTOM."""
    best = BOTTOM
    for v in values:
        v = ExtScalar.of(v)
        if best < v:
            best = v
    return best


def ext_inf(values) -> ExtScalar:
    best = TOP
    for v in values:
        v = ExtScalar.of(v)
        if v < best:
            best = v
    return best


@dataclass(frozen=True, order=True)
class LexScalar:
    """Pair (std, inf) read as std + inf*d for one formal positive infinitesimal d.

    Dataclass ordering compares fields in declaration order, which is exactly
    the lexicographic order.
    """

    std: Fraction
    inf: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "std", Q(self.std))
        object.__setattr__(self, "inf", Q(self.inf))

    @classmethod
    def of(cls, value) -> "LexScalar":
        if isinstance(value, LexScalar):
            return value
        if isinstance(value, (tuple, list)) and len(value) == 2 and not all(
            isinstance(v, int) for v in value
        ):
            return cls(Q(value[0]), Q(value[1]))
        return cls(Q(value))

    def __add__(self, other):
        other = LexScalar.of(other)
        return LexScalar(self.std + other.std, self.inf + other.inf)

    __radd__ = __add__

    def __neg__(self):
        return LexScalar(-self.std, -self.inf)

    def __sub__(self, other):
        return self + (-LexScalar.of(other))

    def __rsub__(self, other):
        return LexScalar.of(other) - self

    def __mul__(self, k):
        if isinstance(k, LexScalar):
            raise TypeError("LexScalar is a module over the rationals, not a field")
        k = Q(k)
        return LexScalar(self.std * k, self.inf * k)

    __rmul__ = __mul__

    def in_monad(self) -> bool:
        """Membership in the monad: nonnegative and infinitesimal."""
        return self.std == 0 and self.inf >= 0

    def is_infinitesimal(self) -> bool:
        return self.std == 0

    def approx(self, other) -> bool:
        """Infinite proximity: each difference lies in the monad or its negative."""
        diff = self - LexScalar.of(other)
        return diff.is_infinitesimal() and (-diff).is_infinitesimal()

    def __str__(self):
        return f"({fmt_q(self.std)}, {fmt_q(self.inf)})"


def std_part(value) -> Fraction:
    if isinstance(value, LexScalar):
        return value.std
    return Q(value)
