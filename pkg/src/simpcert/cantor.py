"""Cylinder/clopen algebra on tree boundaries and prefix-exchange maps.

The boundary of a rooted tree with ``m`` branches at the root and ``d`` at
every deeper vertex is a Cantor set. Points are infinite words; a cylinder
``[w]`` is the set of points extending the finite word ``w``. Words are
tuples of ints. The empty word denotes the whole space.

A :class:`PrefixMap` is a finite table ``u_i -> v_i`` whose domain and range
cylinders each partition the space; the point ``u_i + s`` goes to
``v_i + s``. All table words have length >= 1, so suffixes always live in
the ``d``-letter alphabet.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CantorError

Word = tuple

__all__ = [
    "TreeShape",
    "ClopenSet",
    "PrefixMap",
    "BoundaryPoint",
    "clopen_biject",
    "ep_oracle",
    "moved_clopen",
    "tau_build",
    "point_in",
    "format_word",
    "parse_word",
]


@dataclass(frozen=True)
class TreeShape:
    m: int
    d: int

    def __post_init__(self):
        if self.m < 2 or self.d < 2:
            raise CantorError(f"tree shape needs m, d >= 2, got ({self.m}, {self.d})")

    def arity(self, word: Word) -> int:
        return self.m if not word else self.d

    def children(self, word: Word) -> list[Word]:
        return [word + (i,) for i in range(self.arity(word))]

    def check_word(self, word: Word) -> None:
        for i, x in enumerate(word):
            bound = self.m if i == 0 else self.d
            if not (isinstance(x, int) and 0 <= x < bound):
                raise CantorError(f"letter {x!r} at position {i} of {format_word(word)} out of range for shape {self}")

    def depth_words(self, depth: int) -> list[Word]:
        """All words of the given length, in lexicographic order."""
        out: list[Word] = [()]
        for _ in range(depth):
            out = [w + (i,) for w in out for i in range(self.arity(w))]
        return out

    def __str__(self):
        return f"({self.m},{self.d})"


def format_word(word: Word) -> str:
    if not word:
        return "()"
    if all(x < 10 for x in word):
        return "".join(str(x) for x in word)
    # dotted form; a lone letter keeps a trailing dot so "10." is not read as 1, 0
    return ".".join(str(x) for x in word) + ("." if len(word) == 1 else "")


def parse_word(text: str) -> Word:
    text = text.strip()
    if text == "()":
        return ()
    if not text:
        raise CantorError("empty word literal")
    if "." in text:
        parts = text.split(".")
        if len(parts) == 2 and parts[1] == "":
            parts = parts[:1]
    else:
        parts = list(text)
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise CantorError(f"malformed word {text!r}") from None


def _is_prefix(u: Word, w: Word) -> bool:
    return len(u) <= len(w) and w[: len(u)] == u


def _comparable(u: Word, v: Word) -> bool:
    return _is_prefix(u, v) or _is_prefix(v, u)


def _antichain(words: Iterable[Word]) -> list[Word]:
    out: list[Word] = []
    for w in sorted(set(words)):
        if out and _is_prefix(out[-1], w):
            continue
        out.append(w)
    return out


def _canonical_words(shape: TreeShape, words: Iterable[Word]) -> tuple:
    s = set(_antichain(words))
    frontier = {w[:-1] for w in s if w}
    while frontier:
        nxt = set()
        for p in sorted(frontier, key=len, reverse=True):
            kids = shape.children(p)
            if all(k in s for k in kids):
                s.difference_update(kids)
                s.add(p)
                if p:
                    nxt.add(p[:-1])
        frontier = nxt
    return tuple(sorted(s))


def _descendants_below(sorted_words: Sequence[Word], w: Word) -> list[Word]:
    """Words in a sorted list having ``w`` as a proper prefix."""
    i = bisect_left(sorted_words, w)
    out = []
    while i < len(sorted_words) and _is_prefix(w, sorted_words[i]):
        if len(sorted_words[i]) > len(w):
            out.append(sorted_words[i])
        i += 1
    return out


def _prefix_in(sorted_words: Sequence[Word], index: dict, w: Word) -> Optional[Word]:
    for i in range(len(w), 0, -1):
        if w[:i] in index:
            return w[:i]
    if () in index:
        return ()
    return None


class ClopenSet:
    """Finite union of cylinders in canonical antichain form."""

    __slots__ = ("shape", "words", "_set")

    def __init__(self, shape: TreeShape, words: Iterable[Word] = ()):
        self.shape = shape
        self.words = _canonical_words(shape, words)
        self._set = frozenset(self.words)

    @classmethod
    def whole(cls, shape: TreeShape) -> "ClopenSet":
        return cls(shape, [()])

    @classmethod
    def empty(cls, shape: TreeShape) -> "ClopenSet":
        return cls(shape, [])

    def _check(self, other: "ClopenSet"):
        if other.shape != self.shape:
            raise CantorError(f"shape mismatch: {self.shape} vs {other.shape}")

    def cylinders(self) -> list[Word]:
        """Cylinder list with every word of length >= 1."""
        if self.words == ((),):
            return self.shape.children(())
        return list(self.words)

    def count(self) -> int:
        return len(self.cylinders())

    def is_empty(self) -> bool:
        return not self.words

    def is_whole(self) -> bool:
        return self.words == ((),)

    def is_proper(self) -> bool:
        return not self.is_empty() and not self.is_whole()

    def union(self, other: "ClopenSet") -> "ClopenSet":
        self._check(other)
        return ClopenSet(self.shape, self.words + other.words)

    __or__ = union

    def intersect(self, other: "ClopenSet") -> "ClopenSet":
        self._check(other)
        out = []
        for w in self.words:
            for v in other.words:
                if _is_prefix(w, v):
                    out.append(v)
                elif _is_prefix(v, w):
                    out.append(w)
        return ClopenSet(self.shape, out)

    __and__ = intersect

    def subtract(self, other: "ClopenSet") -> "ClopenSet":
        self._check(other)
        out: list[Word] = []
        others = other.words
        oset = other._set

        def rec(w: Word):
            if _prefix_in(others, oset, w) is not None:
                return
            below = _descendants_below(others, w)
            if not below:
                out.append(w)
                return
            for c in self.shape.children(w):
                rec(c)

        for w in self.words:
            rec(w)
        return ClopenSet(self.shape, out)

    __sub__ = subtract

    def complement(self) -> "ClopenSet":
        return ClopenSet.whole(self.shape) - self

    def issubset(self, other: "ClopenSet") -> bool:
        return (self - other).is_empty()

    __le__ = issubset

    def is_proper_subset(self, other: "ClopenSet") -> bool:
        return self.issubset(other) and self != other

    __lt__ = is_proper_subset

    def isdisjoint(self, other: "ClopenSet") -> bool:
        return (self & other).is_empty()

    def __eq__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        return self.shape == other.shape and self.words == other.words

    def __hash__(self):
        return hash((self.shape, self.words))

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __str__(self):
        return "{" + ",".join(format_word(w) for w in self.words) + "}"

    def __repr__(self):
        return f"ClopenSet{self.shape}{self}"


def clopen_ops(a: ClopenSet, b: ClopenSet, op: str):
    if op == "union":
        return a | b
    if op == "intersect":
        return a & b
    if op == "subtract":
        return a - b
    if op == "subset?":
        return a <= b
    if op == "proper?":
        return a < b
    if op == "empty?":
        return a.is_empty()
    raise ValueError(f"unknown clopen op {op!r}")


@dataclass(frozen=True)
class BoundaryPoint:
    """Eventually constant infinite word: ``stem`` then ``letter`` forever."""

    stem: Word
    letter: int

    def prefix(self, n: int) -> Word:
        if n <= len(self.stem):
            return self.stem[:n]
        return self.stem + (self.letter,) * (n - len(self.stem))

    def check(self, shape: TreeShape) -> None:
        shape.check_word(self.prefix(len(self.stem) + 1))
        if not 0 <= self.letter < shape.d:
            raise CantorError(f"repeating letter {self.letter} out of range for shape {shape}")


def point_in(x: BoundaryPoint, A: ClopenSet) -> bool:
    return any(x.prefix(len(w)) == w for w in A.words)


def _split_shallowest(shape: TreeShape, cyls: list[Word], times: int) -> list[Word]:
    cyls = sorted(cyls, key=lambda w: (len(w), w))
    for _ in range(times):
        w = cyls.pop(0)
        cyls.extend(shape.children(w))
        cyls.sort(key=lambda w: (len(w), w))
    return sorted(cyls)


def clopen_biject(shape: TreeShape, A: Sequence[Word], B: Sequence[Word]) -> list[tuple[Word, Word]]:
    """Prefix-substitution bijection between two cylinder lists.

    Each split of a cylinder adds ``d - 1`` pieces, so counts can be equalised
    exactly when they agree modulo ``d - 1``. Shallowest cylinders are split
    first; the final matching pairs the two lists in lexicographic order.
    """
    A, B = list(A), list(B)
    if not A or not B:
        raise CantorError("clopen_biject needs nonempty sides")
    if any(len(w) == 0 for w in A + B):
        raise CantorError("clopen_biject needs cylinders of depth >= 1")
    step = shape.d - 1
    if (len(A) - len(B)) % step:
        raise CantorError(
            f"cylinder counts {len(A)} and {len(B)} differ modulo {step}: residues {len(A) % step} vs {len(B) % step}"
        )
    if len(A) < len(B):
        A = _split_shallowest(shape, A, (len(B) - len(A)) // step)
    elif len(B) < len(A):
        B = _split_shallowest(shape, B, (len(A) - len(B)) // step)
    return list(zip(sorted(A), sorted(B)))


def _check_partition(shape: TreeShape, words: Sequence[Word], what: str) -> None:
    ws = sorted(words)
    for u, v in zip(ws, ws[1:]):
        if _is_prefix(u, v):
            raise CantorError(f"{what} cylinders overlap: {format_word(u)} and {format_word(v)}")
    if _canonical_words(shape, ws) != ((),):
        raise CantorError(f"{what} cylinders do not cover the whole space")


def _merge_pairs(shape: TreeShape, table: dict) -> dict:
    """Merge sibling families u.x -> v.x into u -> v (u, v nonempty)."""
    d = shape.d
    frontier = {u[:-1] for u in table if len(u) >= 2}
    while frontier:
        nxt = set()
        for p in sorted(frontier, key=len, reverse=True):
            kids = [p + (i,) for i in range(d)]
            imgs = [table.get(k) for k in kids]
            if any(v is None for v in imgs):
                continue
            r = imgs[0][:-1]
            if not r or any(v != r + (i,) for i, v in enumerate(imgs)):
                continue
            for k in kids:
                del table[k]
            table[p] = r
            if len(p) >= 2:
                nxt.add(p[:-1])
        frontier = nxt
    return table


def _pieces_on(dom: Sequence[Word], mp: dict, w: Word) -> list[tuple[Word, Word]]:
    u = _prefix_in(dom, mp, w)
    if u is not None:
        return [(w, mp[u] + w[len(u):])]
    if not w:
        return [(u2, mp[u2]) for u2 in dom]
    return [(u2, mp[u2]) for u2 in _descendants_below(dom, w)]


def compose_pieces(second, first: Iterable[tuple[Word, Word]]) -> list[tuple[Word, Word]]:
    """Pieces of ``second o first``; ``second`` is anything with ``pieces_on``."""
    out = []
    for u, v in first:
        for a, b in second.pieces_on(v):
            out.append((u + a[len(v):], b))
    return out


class PartialMap:
    """Prefix substitution defined on a clopen domain (not necessarily onto C)."""

    def __init__(self, pieces: Iterable[tuple[Word, Word]]):
        self.pairs = tuple(sorted(pieces))
        self._dom = tuple(u for u, _ in self.pairs)
        self._map = dict(self.pairs)

    def pieces_on(self, w: Word) -> list[tuple[Word, Word]]:
        out = _pieces_on(self._dom, self._map, w)
        if not out:
            raise CantorError(f"cylinder {format_word(w)} lies outside the partial map's domain")
        return out


class PrefixMap:
    """Homeomorphism of the boundary given by a complete prefix-exchange table."""

    __slots__ = ("shape", "pairs", "_dom", "_map", "_hash")

    def __init__(self, shape: TreeShape, pairs: Iterable[tuple[Word, Word]], check: bool = True):
        pairs = list(pairs)
        if check:
            for u, v in pairs:
                if not u or not v:
                    raise CantorError("prefix-map entries must have depth >= 1")
                shape.check_word(u)
                shape.check_word(v)
            _check_partition(shape, [u for u, _ in pairs], "domain")
            _check_partition(shape, [v for _, v in pairs], "range")
        table = _merge_pairs(shape, dict(pairs))
        self.shape = shape
        self.pairs = tuple(sorted(table.items()))
        self._dom = tuple(u for u, _ in self.pairs)
        self._map = dict(self.pairs)
        self._hash = None

    @classmethod
    def identity(cls, shape: TreeShape) -> "PrefixMap":
        return cls(shape, [((i,), (i,)) for i in range(shape.m)], check=False)

    def identity_like(self) -> "PrefixMap":
        return PrefixMap.identity(self.shape)

    def is_identity(self) -> bool:
        return all(u == v for u, v in self.pairs)

    def __eq__(self, other):
        if not isinstance(other, PrefixMap):
            return NotImplemented
        return self.shape == other.shape and self.pairs == other.pairs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.pairs))
        return self._hash

    def __len__(self):
        return len(self.pairs)

    def __repr__(self):
        body = ", ".join(f"{format_word(u)}->{format_word(v)}" for u, v in self.pairs)
        return f"PrefixMap{self.shape}[{body}]"

    # -- cylinder-level action ------------------------------------------------
    def pieces_on(self, w: Word) -> list[tuple[Word, Word]]:
        """Restriction to the cylinder [w] as a list of prefix substitutions."""
        return _pieces_on(self._dom, self._map, w)

    def restrict(self, A: ClopenSet) -> list[tuple[Word, Word]]:
        out = []
        for w in A.cylinders():
            out.extend(self.pieces_on(w))
        return out

    def apply_clopen(self, A: ClopenSet) -> ClopenSet:
        if A.shape != self.shape:
            raise CantorError("shape mismatch")
        return ClopenSet(self.shape, [v for _, v in self.restrict(A)])

    def __call__(self, x):
        if isinstance(x, ClopenSet):
            return self.apply_clopen(x)
        if isinstance(x, BoundaryPoint):
            return self.apply_point(x)
        raise TypeError(f"cannot apply PrefixMap to {type(x).__name__}")

    def apply_point(self, x: BoundaryPoint) -> BoundaryPoint:
        depth = max(len(u) for u in self._dom)
        w = x.prefix(max(depth, len(x.stem)))
        u = _prefix_in(self._dom, self._map, w)
        assert u is not None
        return BoundaryPoint(self._map[u] + w[len(u):], x.letter)

    def identity_on(self, A: ClopenSet) -> bool:
        return all(a == b for a, b in self.restrict(A))

    def support(self) -> ClopenSet:
        """Clopen outside of which the map is the identity (an over-approximation)."""
        return ClopenSet(self.shape, [u for u, v in self.pairs if u != v])

    # -- group structure ------------------------------------------------------
    def __mul__(self, f: "PrefixMap") -> "PrefixMap":
        """self o f (apply f first)."""
        if f.shape != self.shape:
            raise CantorError("shape mismatch")
        return PrefixMap(self.shape, compose_pieces(self, f.pairs), check=False)

    def inverse(self) -> "PrefixMap":
        return PrefixMap(self.shape, [(v, u) for u, v in self.pairs], check=False)

    def __pow__(self, n: int) -> "PrefixMap":
        base = self if n >= 0 else self.inverse()
        out = self.identity_like()
        for _ in range(abs(n)):
            out = out * base
        return out

    def commutes_with(self, other: "PrefixMap") -> bool:
        if self.support().isdisjoint(other.support()):
            return True
        return self * other == other * self


def pieces_to_map(shape: TreeShape, pieces: Iterable[tuple[Word, Word]]) -> PrefixMap:
    """Assemble a PrefixMap from pieces, expanding any root-level entry."""
    out = []
    for u, v in pieces:
        if not u or not v:
            if u or v:
                raise CantorError("cannot map the whole space onto a proper cylinder")
            out.extend((c, c) for c in shape.children(()))
        else:
            out.append((u, v))
    return PrefixMap(shape, out)


def identity_pieces(A: ClopenSet) -> list[tuple[Word, Word]]:
    return [(w, w) for w in A.cylinders()]


def moved_clopen(f: PrefixMap, within: Optional[ClopenSet] = None) -> ClopenSet:
    """Nonempty cylinder U (inside ``within``) with f(U) disjoint from U."""
    region = within if within is not None else ClopenSet.whole(f.shape)
    d = f.shape.d
    for a, b in f.restrict(region):
        if a == b:
            continue
        queue = [(a, b)]
        while queue:
            nxt = []
            for u, v in queue:
                if not _comparable(u, v):
                    return ClopenSet(f.shape, [u])
                nxt.extend((u + (x,), v + (x,)) for x in range(d))
            queue = nxt
    raise CantorError("map is the identity on the region; no moved clopen exists")


def tau_build(h: PrefixMap, U: ClopenSet) -> PrefixMap:
    """Involution equal to h on U, h^-1 on h(U), identity elsewhere."""
    hU = h.apply_clopen(U)
    if not U.isdisjoint(hU):
        raise CantorError(f"tau needs h(U) disjoint from U; U={U}, h(U)={hU}")
    fwd = h.restrict(U)
    rest = (U | hU).complement()
    pieces = fwd + [(b, a) for a, b in fwd] + identity_pieces(rest)
    return pieces_to_map(h.shape, pieces)


def ep_oracle(A: ClopenSet, B: ClopenSet) -> PrefixMap:
    """g with g(A) strictly inside B, for nonempty proper clopens A, B.

    The target B' is B with its first cylinder b replaced by the first j
    children of b, where 1 <= j <= d-1 is the least choice making the cylinder
    counts of A and B' congruent modulo d-1. Complements then agree too.
    """
    shape = A.shape
    if not (A.is_proper() and B.is_proper()):
        raise CantorError(f"ep_oracle needs nonempty proper clopens, got A={A}, B={B}")
    a_cyls, b_cyls = A.cylinders(), B.cylinders()
    step = shape.d - 1
    b0 = b_cyls[0]
    j = next(j for j in range(1, shape.d) if (len(b_cyls) - 1 + j - len(a_cyls)) % step == 0)
    target = ClopenSet(shape, b_cyls[1:] + [b0 + (i,) for i in range(j)])
    pieces = clopen_biject(shape, a_cyls, target.cylinders())
    pieces += clopen_biject(shape, A.complement().cylinders(), target.complement().cylinders())
    g = PrefixMap(shape, pieces)
    return g
