"""Boundedly supported piecewise-affine homeomorphisms of the line (BF_q).

A map is a breakpoint table ``[(x_0, y_0), ..., (x_n, y_n)]`` over Z[1/q]; it
is the identity outside ``[x_0, x_n]`` and affine with slope a power of ``q``
between consecutive breakpoints. Tables are kept canonical (no breakpoint
between two pieces of equal slope, identity = empty table), so equality of
maps is equality of tables.
"""
from __future__ import annotations

from bisect import bisect_right
from typing import Iterable, Optional, Sequence

from .errors import PLError
from .qadic import Interval, QRational, in_ideal

__all__ = [
    "PLMap",
    "FqrMap",
    "pl_validate",
    "pl_eval",
    "pl_compose",
    "pl_invert",
    "pl_conjugate",
    "pl_commutator",
    "pl_support_bounds",
    "interp_build",
    "move_interval",
    "order_displacer",
    "slope_exponent",
]


def _qval(q: int, x) -> int:
    """Largest e with q^e | x (x != 0)."""
    e = 0
    while x % q == 0:
        x //= q
        e += 1
    return e


def slope_exponent(dx: QRational, dy: QRational) -> Optional[int]:
    """Return e with dy == q^e * dx, or None if the ratio is not a power of q."""
    q = dx.q
    a, b = dy.m, dx.m
    if a <= 0 or b <= 0:
        return None
    ea, eb = _qval(q, a), _qval(q, b)
    if a // q**ea != b // q**eb:
        return None
    return ea - eb + dx.k - dy.k


def _reduce(xs, ys, exps):
    """Drop breakpoints whose neighbouring slopes agree (outer slope is 1)."""
    n = len(xs)
    kept = [i for i in range(n) if (exps[i - 1] if i > 0 else 0) != (exps[i] if i < n - 1 else 0)]
    return (
        tuple(xs[i] for i in kept),
        tuple(ys[i] for i in kept),
        tuple(exps[i] for i in kept[:-1]),
    )


class PLMap:
    """Element of BF_q given by a canonical breakpoint table."""

    __slots__ = ("q", "xs", "ys", "exps", "_hash")

    def __init__(self, q: int, xs: Sequence[QRational] = (), ys: Sequence[QRational] = (), exps=None):
        # trusted constructor; use pl_validate for untrusted tables
        self.q = q
        if exps is None:
            exps = tuple(slope_exponent(xs[i + 1] - xs[i], ys[i + 1] - ys[i]) for i in range(len(xs) - 1))
        self.xs, self.ys, self.exps = _reduce(tuple(xs), tuple(ys), tuple(exps))
        self._hash = None

    @classmethod
    def identity(cls, q: int) -> "PLMap":
        return cls(q)

    def identity_like(self) -> "PLMap":
        return PLMap(self.q)

    def is_identity(self) -> bool:
        return not self.xs

    @property
    def table(self):
        return list(zip(self.xs, self.ys))

    def __len__(self):
        return len(self.xs)

    # -- group structure ------------------------------------------------------
    def __call__(self, x: QRational) -> QRational:
        return _eval(self.xs, self.ys, self.exps, x)

    def preimage(self, y: QRational) -> QRational:
        return _eval(self.ys, self.xs, tuple(-e for e in self.exps), y)

    def __mul__(self, other: "PLMap") -> "PLMap":
        return pl_compose(self, other)

    def inverse(self) -> "PLMap":
        return pl_invert(self)

    def __pow__(self, n: int) -> "PLMap":
        base = self if n >= 0 else self.inverse()
        out = self.identity_like()
        for _ in range(abs(n)):
            out = out * base
        return out

    def __eq__(self, other):
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.q == other.q and self.xs == other.xs and self.ys == other.ys

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.q, self.xs, self.ys))
        return self._hash

    def support_interval(self) -> Optional[tuple[QRational, QRational]]:
        if not self.xs:
            return None
        return self.xs[0], self.xs[-1]

    def commutes_with(self, other: "PLMap") -> bool:
        a, b = self.support_interval(), other.support_interval()
        if a is None or b is None or a[1] <= b[0] or b[1] <= a[0]:
            return True
        return self * other == other * self

    def __repr__(self):
        pts = ", ".join(f"({x}, {y})" for x, y in zip(self.xs, self.ys))
        return f"PLMap(q={self.q}, [{pts}])"


def _eval(xs, ys, exps, x: QRational) -> QRational:
    if not xs or x < xs[0] or x > xs[-1]:
        return x
    i = bisect_right(xs, x) - 1
    if i == len(xs) - 1:
        return ys[-1]
    return ys[i] + (x - xs[i]).scale(exps[i])


def pl_validate(table: Iterable[tuple[QRational, QRational]], q: int) -> PLMap:
    """Check an untrusted breakpoint table and return the canonical map."""
    pts = list(table)
    for x, y in pts:
        for v in (x, y):
            if not isinstance(v, QRational) or v.q != q:
                raise PLError(f"breakpoint {v} is not an element of Z[1/{q}]")
    if not pts:
        return PLMap(q)
    if len(pts) == 1:
        raise PLError("a table needs at least two breakpoints")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    if ys[0] != xs[0] or ys[-1] != xs[-1]:
        raise PLError(f"unbalanced endpoints: y_0={ys[0]} vs x_0={xs[0]}, y_n={ys[-1]} vs x_n={xs[-1]}")
    exps = []
    for i in range(len(pts) - 1):
        dx, dy = xs[i + 1] - xs[i], ys[i + 1] - ys[i]
        if dx.sign() <= 0:
            raise PLError(f"breakpoints not increasing at x={xs[i + 1]}")
        if dy.sign() <= 0:
            raise PLError(f"non-monotone table at y={ys[i + 1]}")
        e = slope_exponent(dx, dy)
        if e is None:
            raise PLError(f"slope on [{xs[i]}, {xs[i + 1]}] is not a power of {q}")
        exps.append(e)
    return PLMap(q, xs, ys, exps)


def pl_eval(g: PLMap, x: QRational) -> QRational:
    return g(x)


def pl_invert(g: PLMap) -> PLMap:
    return PLMap(g.q, g.ys, g.xs, tuple(-e for e in g.exps))


def _eval_sorted(xs, ys, exps, pts):
    """Evaluate at an increasing sequence of points with one forward sweep."""
    n = len(xs)
    if n == 0:
        return list(pts)
    lo, hi = xs[0], xs[-1]
    out = []
    i = 0
    for x in pts:
        if x < lo or x > hi:
            out.append(x)
            continue
        while i + 1 < n and not x < xs[i + 1]:
            i += 1
        out.append(ys[-1] if i == n - 1 else ys[i] + (x - xs[i]).scale(exps[i]))
    return out


def _piece_exps(xs, exps, pts):
    """Slope exponent on each gap (pts[t], pts[t+1]) of an increasing sequence."""
    n = len(xs)
    out = []
    i = 0
    for t in range(len(pts) - 1):
        a, b = pts[t], pts[t + 1]
        if n == 0 or not xs[0] < b or not a < xs[-1]:
            out.append(0)
            continue
        while i + 1 < n and not a < xs[i + 1]:
            i += 1
        out.append(exps[i])
    return out


def pl_compose(g: PLMap, f: PLMap) -> PLMap:
    """g o f (apply f first)."""
    if g.q != f.q:
        raise ValueError(f"mismatched base: q={g.q} vs q={f.q}")
    if not f.xs:
        return g
    if not g.xs:
        return f
    pre = _eval_sorted(f.ys, f.xs, [-e for e in f.exps], g.xs)
    xs = sorted(set(f.xs).union(pre))
    mids = _eval_sorted(f.xs, f.ys, f.exps, xs)
    ys = _eval_sorted(g.xs, g.ys, g.exps, mids)
    # slope of g o f on a piece is the product of the slopes of the two pieces
    fe = _piece_exps(f.xs, f.exps, xs)
    ge = _piece_exps(g.xs, g.exps, mids)
    return PLMap(g.q, xs, ys, [a + b for a, b in zip(fe, ge)])


def pl_conjugate(g: PLMap, h: PLMap) -> PLMap:
    """h o g o h^-1."""
    return h * g * h.inverse()


def pl_commutator(g: PLMap, h: PLMap) -> PLMap:
    """g o h o g^-1 o h^-1."""
    return g * h * g.inverse() * h.inverse()


def _grid_floor(x: QRational, j: int) -> QRational:
    """Largest point of (q-1)Z/q^j that is <= x."""
    q = x.q
    step = q - 1
    num = x.m * q ** (j - x.k) if x.k <= j else x.m
    den = step if x.k <= j else step * q ** (x.k - j)
    return QRational(step * (num // den), j, q)


def _grid_ceil(x: QRational, j: int) -> QRational:
    q = x.q
    step = q - 1
    num = x.m * q ** (j - x.k) if x.k <= j else x.m
    den = step if x.k <= j else step * q ** (x.k - j)
    return QRational(step * (-((-num) // den)), j, q)


def pl_support_bounds(g: PLMap) -> Optional[Interval]:
    """Tightest (a, b) with a, b in I on the grid (q-1)Z/q^j containing supp(g).

    ``j`` is the larger denominator exponent of the two extreme breakpoints,
    so endpoints already in I are returned unchanged. ``None`` for identity.
    """
    if not g.xs:
        return None
    lo, hi = g.xs[0], g.xs[-1]
    j = max(lo.k, hi.k)
    return Interval(_grid_floor(lo, j), _grid_ceil(hi, j))


def _digits(b: int, q: int) -> list[int]:
    out = []
    while b:
        b, r = divmod(b, q)
        out.append(r)
    return out


def _expansion(x1: QRational, l1: QRational, y1: QRational, l2: QRational):
    """Points of a convex PL map [x1, x1+l1] -> [y1, y1+l2], l2 >= l1."""
    q = x1.q
    j = max(l1.k, l2.k)
    a = l1.m * q ** (j - l1.k)
    b = l2.m * q ** (j - l2.k)
    while sum(_digits(b, q)) > a:
        a, b, j = a * q, b * q, j + 1
    counts = _digits(b, q)
    splits = (a - sum(counts)) // (q - 1)
    for e in range(len(counts) - 1, 0, -1):
        t = min(counts[e], splits)
        counts[e] -= t
        counts[e - 1] += q * t
        splits -= t
        if splits == 0:
            break
    assert splits == 0 and sum(counts) == a
    pts = [(x1, y1)]
    x, y = x1, y1
    exps = []
    for e, c in enumerate(counts):
        if c:
            x = x + QRational(c, j, q)
            y = y + QRational(c * q**e, j, q)
            pts.append((x, y))
            exps.append(e)
    return pts, exps


def interp_build(x1: QRational, x2: QRational, y1: QRational, y2: QRational) -> list[tuple[QRational, QRational]]:
    """Breakpoints of a PL bijection [x1, x2] -> [y1, y2] with slopes q^k.

    Exists iff the two lengths agree modulo I. Source cells of size q^-j are
    stretched by powers of q chosen from the base-q digits of the target
    length; pieces are laid out with increasing slope (expanding pieces are
    convex, contracting ones concave).
    """
    q = x1.q
    if not (x1 < x2 and y1 < y2):
        raise PLError(f"interp_build needs x1<x2 and y1<y2, got [{x1},{x2}] -> [{y1},{y2}]")
    l1, l2 = x2 - x1, y2 - y1
    if not in_ideal(l2 - l1):
        raise PLError(f"lengths {l1} and {l2} are not congruent modulo ({q - 1})Z[1/{q}]")
    if l1 == l2:
        pts = [(x1, y1), (x2, y2)]
    elif l2 > l1:
        pts, _ = _expansion(x1, l1, y1, l2)
    else:
        inv, _ = _expansion(y1, l2, x1, l1)
        pts = [(x, y) for y, x in inv]
    assert pts[0] == (x1, y1) and pts[-1] == (x2, y2)
    return pts


def glue_pieces(q: int, pieces: list[list[tuple[QRational, QRational]]]) -> PLMap:
    pts: list[tuple[QRational, QRational]] = []
    for piece in pieces:
        if pts and pts[-1] == piece[0]:
            pts.extend(piece[1:])
        else:
            pts.extend(piece)
    return pl_validate(pts, q)


def _frame(lo: QRational, hi: QRational) -> tuple[QRational, QRational]:
    """Integers P < lo and Q > hi, both multiples of q-1."""
    q = lo.q
    s = q - 1
    p = s * (lo.floor() // s - 1)
    qq = s * (-((-(hi.floor() + 1)) // s) + 1)
    return QRational(p, 0, q), QRational(qq, 0, q)


def move_interval(a: QRational, b: QRational, c: QRational, d: QRational) -> PLMap:
    """Element g of BF_q with g(a) <= c and g(b) >= d, i.e. g(a,b) covers (c,d)."""
    for name, v in zip("abcd", (a, b, c, d)):
        if not in_ideal(v):
            raise PLError(f"endpoint {name}={v} is not in the ideal ({v.q - 1})Z[1/{v.q}]")
    if not (a < b and c < d):
        raise PLError("move_interval needs a<b and c<d")
    P, Q = _frame(min(a, c), max(b, d))
    pieces = [interp_build(P, a, P, c), interp_build(a, b, c, d), interp_build(b, Q, d, Q)]
    g = glue_pieces(a.q, pieces)
    assert g(a) <= c and g(b) >= d
    return g


def order_displacer(interval: Interval, K: int) -> PLMap:
    """h in BF_q with h^j(a, b), 0 <= j <= K, pairwise disjoint.

    h(a) = b and h(x) > x on [a, Q) for a frame point Q beyond the K-th
    image, so the images are consecutive intervals marching right.
    """
    a, b = interval.lo, interval.hi
    if not (in_ideal(a) and in_ideal(b)):
        raise PLError("order_displacer needs endpoints in the ideal I")
    if K <= 0:
        return PLMap(a.q)
    P, _ = _frame(a, b)
    Q = b + (b - a) * (K + 1)
    h = glue_pieces(a.q, [interp_build(P, a, P, b), interp_build(a, Q, b, Q)])
    return h


class FqrMap:
    """F_{q,r} element: a PLMap tagged with r and supported in [0, r]."""

    __slots__ = ("plmap", "r")

    def __init__(self, plmap: PLMap, r: int):
        q = plmap.q
        if not 1 <= r < q:
            raise PLError(f"F_(q,r) needs 1 <= r < q, got q={q}, r={r}")
        if plmap.xs and (plmap.xs[0] < 0 or plmap.xs[-1] > r):
            raise PLError(f"support [{plmap.xs[0]}, {plmap.xs[-1]}] not inside [0, {r}]")
        self.plmap = plmap
        self.r = r

    def __mul__(self, other: "FqrMap") -> "FqrMap":
        if other.r != self.r:
            raise ValueError("mismatched r")
        return FqrMap(self.plmap * other.plmap, self.r)

    def inverse(self) -> "FqrMap":
        return FqrMap(self.plmap.inverse(), self.r)

    def __eq__(self, other):
        return isinstance(other, FqrMap) and self.r == other.r and self.plmap == other.plmap

    def __hash__(self):
        return hash((self.r, self.plmap))
