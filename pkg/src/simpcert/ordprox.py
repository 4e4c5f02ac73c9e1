"""Nested ordered sets I_k with groups acting boundedly and proximally but
not doubly transitively, and the integer invariant f_k that obstructs
double transitivity.

Level 0 is Z under translations. A level k+1 point is a finitely supported
map Z -> I_k (the default value being the base point i_k), ordered by the
first coordinate where two points differ. Level k+1 adds the shift sigma and
lets every lower-level element act on coordinate 0 of points whose negative
coordinates are all default (and trivially elsewhere).

Group elements are lists of letters in application order:
``("t", j)`` translates level 0 by j, ``("s", L, j)`` is sigma_L^j.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Union

from .errors import PreconditionError


class NestedPoint:
    __slots__ = ("level", "entries")

    def __init__(self, level: int, entries=()):
        if level < 1:
            raise ValueError("NestedPoint is for levels >= 1; level 0 points are ints")
        items = dict(entries)
        d = default(level - 1)
        for n, v in items.items():
            if point_level(v) != level - 1:
                raise PreconditionError(f"entry at {n} has level {point_level(v)}, expected {level - 1}")
        self.level = level
        self.entries = tuple(sorted((n, v) for n, v in items.items() if v != d))

    def get(self, n: int):
        for k, v in self.entries:
            if k == n:
                return v
        return default(self.level - 1)

    def support(self) -> list[int]:
        return [n for n, _ in self.entries]

    def in_conv(self) -> bool:
        return not self.entries or self.entries[0][0] >= 0

    def __eq__(self, other):
        return isinstance(other, NestedPoint) and self.level == other.level and self.entries == other.entries

    def __hash__(self):
        return hash((self.level, self.entries))

    def __repr__(self):
        return f"NestedPoint({self.level}, {render(self)})"


Point = Union[int, NestedPoint]


def point_level(p: Point) -> int:
    return 0 if isinstance(p, int) else p.level


def default(level: int) -> Point:
    return 0 if level == 0 else NestedPoint(level)


def upper(level: int) -> Point:
    """A point above the base point i_k."""
    return 1 if level == 0 else NestedPoint(level, {-1: upper(level - 1)})


def lower(level: int) -> Point:
    return -1 if level == 0 else NestedPoint(level, {-1: lower(level - 1)})


def embed(p: Point, level: int) -> Point:
    """Place p at coordinate 0 of successively higher levels."""
    while point_level(p) < level:
        p = NestedPoint(point_level(p) + 1, {0: p})
    return p


def render(p: Point) -> str:
    if isinstance(p, int):
        return str(p)
    return "{" + ",".join(f"{n}:{render(v)}" for n, v in p.entries) + "}"


def parse_point(text: str, level: int) -> Point:
    text = text.strip()
    pos = 0

    def parse(lv):
        nonlocal pos
        if lv == 0:
            start = pos
            if pos < len(text) and text[pos] == "-":
                pos += 1
            while pos < len(text) and text[pos].isdigit():
                pos += 1
            return int(text[start:pos])
        if text[pos] != "{":
            raise ValueError(f"expected '{{' at offset {pos}")
        pos += 1
        items = {}
        while text[pos] != "}":
            start = pos
            if text[pos] == "-":
                pos += 1
            while text[pos].isdigit():
                pos += 1
            n = int(text[start:pos])
            if text[pos] != ":":
                raise ValueError(f"expected ':' at offset {pos}")
            pos += 1
            items[n] = parse(lv - 1)
            if text[pos] == ",":
                pos += 1
        pos += 1
        return NestedPoint(lv, items)

    try:
        p = parse(level)
    except (IndexError, ValueError) as e:
        raise ValueError(f"malformed nested point {text!r}: {e}") from None
    if pos != len(text):
        raise ValueError(f"trailing text in nested point {text!r}")
    return p


def _first_difference(a: NestedPoint, b: NestedPoint):
    keys = sorted(set(a.support()) | set(b.support()))
    for n in keys:
        if a.get(n) != b.get(n):
            return n
    return None


def np_compare(a: Point, b: Point) -> int:
    """-1, 0 or 1."""
    if point_level(a) != point_level(b):
        raise PreconditionError(f"level mismatch: {point_level(a)} vs {point_level(b)}")
    if isinstance(a, int):
        return (a > b) - (a < b)
    m = _first_difference(a, b)
    if m is None:
        return 0
    return np_compare(a.get(m), b.get(m))


def less(a: Point, b: Point) -> bool:
    return np_compare(a, b) < 0


def _letter_level(letter) -> int:
    return 0 if letter[0] == "t" else letter[1]


def _act_letter(letter, p: Point) -> Point:
    K = point_level(p)
    L = _letter_level(letter)
    if K < L:
        raise PreconditionError(f"letter of level {L} cannot act on a level-{K} point")
    if K > L:
        if not p.in_conv():
            return p
        items = dict(p.entries)
        items[0] = _act_letter(letter, p.get(0))
        return NestedPoint(K, items)
    if letter[0] == "t":
        return p + letter[1]
    j = letter[2]
    return NestedPoint(K, {n - j: v for n, v in p.entries})


@dataclass(frozen=True)
class NestedElem:
    letters: tuple = ()

    def __call__(self, p: Point) -> Point:
        for letter in self.letters:
            p = _act_letter(letter, p)
        return p

    def then(self, other: "NestedElem") -> "NestedElem":
        """Apply self, then other."""
        return NestedElem(self.letters + other.letters)

    def inverse(self) -> "NestedElem":
        out = []
        for letter in reversed(self.letters):
            out.append(("t", -letter[1]) if letter[0] == "t" else ("s", letter[1], -letter[2]))
        return NestedElem(tuple(out))

    def level(self) -> int:
        return max((_letter_level(x) for x in self.letters), default=0)

    def __str__(self):
        parts = [f"t^{x[1]}" if x[0] == "t" else f"s{x[1]}^{x[2]}" for x in self.letters]
        return " ".join(parts) if parts else "id"


def shift(level: int, j: int) -> NestedElem:
    return NestedElem((("s", level, j),) if j else ())


def act(g: NestedElem, a: Point) -> Point:
    return g(a)


def invariant_f(a: Point, b: Point) -> int:
    if point_level(a) != point_level(b):
        raise PreconditionError(f"level mismatch: {point_level(a)} vs {point_level(b)}")
    if a == b:
        raise PreconditionError("invariant_f is undefined on equal points")
    while not isinstance(a, int):
        m = _first_difference(a, b)
        a, b = a.get(m), b.get(m)
    return a - b


def normalizer(p: Point) -> NestedElem:
    """Element sending p to the base point of its level."""
    if isinstance(p, int):
        return NestedElem((("t", -p),) if p else ())
    K = p.level
    out = NestedElem()
    cur = p
    while cur.entries:
        n0 = cur.entries[0][0]
        step = shift(K, n0)
        cur = step(cur)
        inner = normalizer(cur.get(0))
        cur = inner(cur)
        out = out.then(step).then(inner)
    return out


def _truncate(p: NestedPoint, upto: int) -> NestedPoint:
    return NestedPoint(p.level, {n: v for n, v in p.entries if n <= upto})


def _shift_total(g: NestedElem, level: int) -> int:
    return sum(x[2] for x in g.letters if x[0] == "s" and x[1] == level)


def proximality_witness(a: Point, b: Point, c: Point, d: Point) -> NestedElem:
    """g with g(a) < c and d < g(b), for a < b and c < d at a level >= 1.

    The interval (a, b) contains every point agreeing with b up to m_{a,b}
    and smaller than b at the next coordinate; normalising that prefix and
    shifting turns it into the points of the embedded copy lying below
    beta = b(m_{a,b}+1) at coordinate 0. Dually (c, d) sits inside the
    points agreeing with c before m_{c,d} whose m_{c,d} entry lies in
    [c(m), d(m)]. A lower-level element pushing beta above d(m) joins the two.
    """
    K = point_level(a)
    if K < 1 or any(point_level(x) != K for x in (b, c, d)):
        raise PreconditionError("proximality_witness needs four points of one level >= 1")
    if not (less(a, b) and less(c, d)):
        raise PreconditionError("need a < b and c < d")
    if less(a, c) and less(d, b):
        return NestedElem()
    c0, d0 = c, d
    c, d = _beyond(c, lower), _beyond(d, upper)
    m = _first_difference(a, b)
    u = normalizer(_truncate(b, m))
    M = m - _shift_total(u, K)
    beta = b.get(m + 1)
    m2 = _first_difference(c, d)
    v = normalizer(_truncate(c, m2 - 1))
    M2 = m2 - _shift_total(v, K)
    y = d.get(m2)
    y_up = y + 1 if isinstance(y, int) else _above(y)
    push = normalizer(beta).then(normalizer(y_up).inverse())
    g = u.then(shift(K, M + 1)).then(push).then(shift(K, -M2)).then(v.inverse())
    if not (less(g(a), c0) and less(d0, g(b))):
        raise AssertionError("proximality witness failed its comparison check")
    return g


def _beyond(p: NestedPoint, side) -> NestedPoint:
    """A point next to p: change the first default coordinate past its support."""
    N = max(p.support(), default=-1) + 1
    items = dict(p.entries)
    items[N] = side(p.level - 1)
    return NestedPoint(p.level, items)


def _above(p: NestedPoint) -> NestedPoint:
    return _beyond(p, upper)


@dataclass
class Non2TransWitness:
    level: int
    pair1: tuple
    pair2: tuple
    f1: int
    f2: int


def non2trans_witness(level: int) -> Non2TransWitness:
    """Two increasing pairs with different invariants.

    Pairs are (lo, hi); the recorded value is f(hi, lo), which is 1 and 2.
    """
    if level < 1:
        raise PreconditionError("non-2-transitivity witness needs level >= 1")
    base = default(level)
    p1, p2 = embed(1, level), embed(2, level)
    w = Non2TransWitness(level, (base, p1), (base, p2), invariant_f(p1, base), invariant_f(p2, base))
    assert w.f1 != w.f2
    return w


def random_point(rng: random.Random, level: int, width: int = 3, spread: int = 4) -> Point:
    if level == 0:
        return rng.randint(-spread, spread)
    items = {}
    for _ in range(rng.randint(0, width)):
        items[rng.randint(-spread, spread)] = random_point(rng, level - 1, width, spread)
    return NestedPoint(level, items)


def random_elem(rng: random.Random, level: int, length: int = 6) -> NestedElem:
    letters = []
    for _ in range(rng.randint(0, length)):
        L = rng.randint(0, level)
        j = rng.choice([-3, -2, -1, 1, 2, 3])
        letters.append(("t", j) if L == 0 else ("s", L, j))
    return NestedElem(tuple(letters))
