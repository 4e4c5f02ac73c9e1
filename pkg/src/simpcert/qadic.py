"""Exact arithmetic in Z[1/q] and the ideal I = (q-1)Z[1/q].

A :class:`QRational` is ``m / q**k`` kept in canonical form (``k == 0`` or
``q`` does not divide ``m``), so equality is componentwise.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "QRational",
    "Interval",
    "canonicalize",
    "arith",
    "in_ideal",
    "between",
    "parse_qrational",
]


def _strip(m: int, k: int, q: int) -> tuple[int, int]:
    if m == 0:
        return 0, 0
    while k > 0 and m % q == 0:
        m //= q
        k -= 1
    return m, k


class QRational:
    """Exact element ``m/q^k`` of Z[1/q]. Immutable."""

    __slots__ = ("q", "m", "k")

    def __init__(self, m: int, k: int = 0, q: int = 2):
        if q < 2:
            raise ValueError(f"base q must be >= 2, got {q}")
        if k < 0:
            m, k = m * q ** (-k), 0
        m, k = _strip(int(m), int(k), q)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", k)

    def __setattr__(self, name, value):
        raise AttributeError("QRational is immutable")

    @classmethod
    def _raw(cls, m: int, k: int, q: int) -> "QRational":
        # caller guarantees canonical (m, k)
        obj = object.__new__(cls)
        object.__setattr__(obj, "q", q)
        object.__setattr__(obj, "m", m)
        object.__setattr__(obj, "k", k)
        return obj

    # -- coercion -----------------------------------------------------------
    def _coerce(self, other) -> "QRational":
        if isinstance(other, QRational):
            if other.q != self.q:
                raise ValueError(f"mismatched base: q={self.q} vs q={other.q}")
            return other
        if isinstance(other, int):
            return QRational._raw(*_strip(other, 0, self.q), self.q)
        return NotImplemented

    def _aligned(self, other: "QRational") -> tuple[int, int, int]:
        q = self.q
        if self.k == other.k:
            return self.m, other.m, self.k
        if self.k > other.k:
            return self.m, other.m * q ** (self.k - other.k), self.k
        return self.m * q ** (other.k - self.k), other.m, other.k

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, k = self._aligned(other)
        return QRational._raw(*_strip(a + b, k, self.q), self.q)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, k = self._aligned(other)
        return QRational._raw(*_strip(a - b, k, self.q), self.q)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QRational._raw(*_strip(self.m * other.m, self.k + other.k, self.q), self.q)

    __rmul__ = __mul__

    def __neg__(self):
        return QRational._raw(-self.m, self.k, self.q)

    def __abs__(self):
        return self if self.m >= 0 else -self

    def scale(self, e: int) -> "QRational":
        """Multiply by ``q**e`` (``e`` may be negative)."""
        k = self.k - e
        if k < 0:
            return QRational._raw(self.m * self.q ** (-k), 0, self.q)
        return QRational._raw(*_strip(self.m, k, self.q), self.q)

    # -- ordering -----------------------------------------------------------
    def _cmp(self, other) -> int:
        other = self._coerce(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare QRational with {type(other).__name__}")
        a, b, _ = self._aligned(other)
        return (a > b) - (a < b)

    def __eq__(self, other):
        if isinstance(other, QRational):
            return self.q == other.q and self.m == other.m and self.k == other.k
        if isinstance(other, int):
            return self.k == 0 and self.m == other
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.m, self.k))

    def __lt__(self, other):
        if type(other) is QRational and other.q == self.q:
            if self.k == other.k:
                return self.m < other.m
            a, b, _ = self._aligned(other)
            return a < b
        return self._cmp(other) < 0

    def __le__(self, other):
        return not other < self if type(other) is QRational else self._cmp(other) <= 0

    def __gt__(self, other):
        return other < self if type(other) is QRational else self._cmp(other) > 0

    def __ge__(self, other):
        return not self < other if type(other) is QRational else self._cmp(other) >= 0

    def sign(self) -> int:
        return (self.m > 0) - (self.m < 0)

    def floor(self) -> int:
        return self.m // self.q**self.k

    def __str__(self):
        if self.k == 0:
            return str(self.m)
        return f"{self.m}/{self.q}^{self.k}"

    def __repr__(self):
        return f"QRational({self.m}, {self.k}, q={self.q})"


def canonicalize(m: int, k: int, q: int) -> QRational:
    """Canonical QRational with value ``m / q**k``."""
    if q < 2:
        raise ValueError(f"base q must be >= 2, got {q}")
    if k < 0:
        raise ValueError(f"exponent k must be >= 0, got {k}")
    return QRational(m, k, q)


_OPS = {"add": QRational.__add__, "sub": QRational.__sub__, "mul": QRational.__mul__}


def arith(a: QRational, b: QRational, op: str) -> QRational:
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    if a.q != b.q:
        raise ValueError(f"mismatched base: q={a.q} vs q={b.q}")
    return fn(a, b)


def in_ideal(x: QRational) -> bool:
    """True iff x lies in (q-1)Z[1/q]. Since q = 1 mod q-1, this is (q-1) | m."""
    return x.m % (x.q - 1) == 0


def between(a: QRational, b: QRational, require_ideal: bool = False) -> QRational:
    """Point of the coarsest q-adic grid strictly inside (a, b).

    Scans j = 0, 1, 2, ... over the grid ``step * n / q**j`` (step = q-1 when
    ``require_ideal``) and returns the smallest grid point above ``a``.
    """
    if a.q != b.q:
        raise ValueError(f"mismatched base: q={a.q} vs q={b.q}")
    if not a < b:
        raise ValueError(f"between requires a < b, got {a} >= {b}")
    q = a.q
    step = q - 1 if require_ideal else 1
    j = 0
    while True:
        # n = floor(a * q^j / step) + 1, in integers
        if a.k <= j:
            num, den = a.m * q ** (j - a.k), step
        else:
            num, den = a.m, step * q ** (a.k - j)
        n = num // den + 1
        c = QRational(step * n, j, q)
        if c < b:
            return c
        j += 1


_LITERAL = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*\^\s*(\d+))?\s*$")


def parse_qrational(text: str, q: int) -> QRational:
    """Parse ``"m"`` or ``"m/q^k"``; the literal's base must equal ``q``."""
    mo = _LITERAL.match(text)
    if mo is None:
        raise ValueError(f"malformed q-adic literal {text!r}")
    m = int(mo.group(1))
    if mo.group(2) is None:
        return QRational(m, 0, q)
    base, k = int(mo.group(2)), int(mo.group(3))
    if base != q:
        raise ValueError(f"literal {text!r} has base {base}, expected {q}")
    return QRational(m, k, q)


Number = Union[QRational, int]


@dataclass(frozen=True)
class Interval:
    lo: QRational
    hi: QRational

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"interval requires lo < hi, got ({self.lo}, {self.hi})")

    def __str__(self):
        return f"({self.lo}, {self.hi})"
