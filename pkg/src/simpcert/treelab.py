"""Finite-depth experiments on tree boundaries.

Everything here is a one-sided certificate: an infeasible invariant-measure
system at some depth proves that no invariant probability measure exists,
and a BFS witness proves orbit density at that depth, but a feasible system
or a failed search proves nothing about the infinite action.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cantor import ClopenSet, PrefixMap, TreeShape, format_word
from .errors import ParseError, PreconditionError
from .exactlp import check_farkas, check_solution, feasibility

Letter = tuple  # (generator index, +1 or -1)


# -- visual measure ---------------------------------------------------------

def visual_measure(valences: Sequence[int]) -> Fraction:
    """Mass of the halftree beyond a path v_0..v_n, from the valences d_0..d_{n-1}."""
    if not valences:
        raise PreconditionError("visual_measure needs a nonempty path")
    if any(d < 2 for d in valences):
        raise PreconditionError(f"valences must be >= 2, got {list(valences)}")
    den = valences[0]
    for d in valences[1:]:
        den *= d - 1
    return Fraction(1, den)


def visual_total(valence_of, root_class, n: int, next_classes) -> Fraction:
    """Sum of visual masses over all length-n paths from a root.

    ``valence_of(cls)`` gives the valence of a vertex class and
    ``next_classes(cls, parent_cls)`` lists the classes of the children.
    """
    total = Fraction(0)
    stack = [((root_class,), None)]
    while stack:
        path, parent = stack.pop()
        if len(path) == n + 1:
            total += visual_measure([valence_of(c) for c in path[:-1]])
            continue
        for c in next_classes(path[-1], parent):
            stack.append((path + (c,), path[-1]))
    return total


# -- invariant measures -----------------------------------------------------

@dataclass
class MeasureReport:
    feasible: bool
    depth: int
    cylinders: list
    weights: Optional[list] = None
    farkas: Optional[list] = None
    matrix: list = field(default_factory=list, repr=False)
    rhs: list = field(default_factory=list, repr=False)

    def recheck(self) -> bool:
        if self.feasible:
            return check_solution(self.matrix, self.rhs, self.weights)
        return check_farkas(self.matrix, self.rhs, self.farkas)


def _table_depth(g: PrefixMap) -> int:
    return max(max(len(u), len(v)) for u, v in g.pairs)


def measure_system(gens: Sequence[PrefixMap], depth: int):
    """Rows of the invariance system over the depth-D cylinders."""
    shape = gens[0].shape if gens else None
    if shape is None:
        raise PreconditionError("need at least one generator")
    if any(g.shape != shape for g in gens):
        raise PreconditionError("generators have different shapes")
    need = max(_table_depth(g) for g in gens)
    if depth < need:
        raise PreconditionError(f"depth {depth} is smaller than the table depth {need}")
    cyls = shape.depth_words(depth)
    index = {w: i for i, w in enumerate(cyls)}
    n = len(cyls)

    def indicator(words):
        row = [0] * n
        for w in words:
            for c in cyls:
                if c[: len(w)] == w:
                    row[index[c]] += 1
        return row

    A = [[1] * n]
    b = [1]
    seen = set()
    maps = list(gens) + [g.inverse() for g in gens]
    for g in maps:
        for k in range(1, depth + 1):
            for u in shape.depth_words(k):
                img = g.apply_clopen(ClopenSet(shape, [u]))
                if any(len(w) > depth for w in img.cylinders()):
                    continue
                lhs = indicator([u])
                rhs = indicator(img.cylinders())
                row = tuple(x - y for x, y in zip(lhs, rhs))
                if any(row) and row not in seen:
                    seen.add(row)
                    A.append(list(row))
                    b.append(0)
    return cyls, A, b


def measure_feasibility(gens: Sequence[PrefixMap], depth: int) -> MeasureReport:
    cyls, A, b = measure_system(gens, depth)
    n = len(cyls)
    uniform = [Fraction(1, n)] * n
    if check_solution(A, b, uniform):
        return MeasureReport(True, depth, cyls, weights=uniform, matrix=A, rhs=b)
    res = feasibility(A, b)
    if res.feasible:
        return MeasureReport(True, depth, cyls, weights=res.x, matrix=A, rhs=b)
    return MeasureReport(False, depth, cyls, farkas=res.farkas, matrix=A, rhs=b)


# -- orbit searches ---------------------------------------------------------

def _letters(gens):
    inv = [g.inverse() for g in gens]
    out = []
    for i, g in enumerate(gens):
        out.append(((i, 1), g))
        out.append(((i, -1), inv[i]))
    return out


def word_element(gens, word: Sequence[Letter]) -> PrefixMap:
    """Product x_1 x_2 ... x_n of the letters (x_n acts first)."""
    out = PrefixMap.identity(gens[0].shape)
    for i, e in word:
        out = out * (gens[i] if e == 1 else gens[i].inverse())
    return out


def _bfs_images(gens, start: ClopenSet, L: int):
    """Yield (clopen, word) for distinct images of ``start`` under words of length <= L."""
    letters = _letters(gens)
    seen = {start: ()}
    queue = deque([(start, ())])
    yield start, ()
    while queue:
        X, word = queue.popleft()
        if len(word) >= L:
            continue
        for letter, g in letters:
            Y = g.apply_clopen(X)
            if Y not in seen:
                seen[Y] = (letter,) + word
                queue.append((Y, seen[Y]))
                yield Y, seen[Y]


@dataclass
class MinimalityReport:
    witnesses: dict
    missing: list

    @property
    def complete(self) -> bool:
        return not self.missing


def minimality_search(gens: Sequence[PrefixMap], depth: int, L: int) -> MinimalityReport:
    shape = gens[0].shape
    cyls = shape.depth_words(depth)
    witnesses, missing = {}, []
    for u in cyls:
        U = ClopenSet(shape, [u])
        todo = set(cyls)
        for X, word in _bfs_images(gens, U, L):
            for v in list(todo):
                if not X.isdisjoint(ClopenSet(shape, [v])):
                    witnesses[(u, v)] = word
                    todo.discard(v)
            if not todo:
                break
        missing.extend((u, v) for v in sorted(todo))
    for (u, v), word in witnesses.items():
        img = word_element(gens, word).apply_clopen(ClopenSet(shape, [u]))
        assert not img.isdisjoint(ClopenSet(shape, [v]))
    return MinimalityReport(witnesses, missing)


def halftree_shrink_search(gens: Sequence[PrefixMap], u, L: int):
    """Word w with w([u]) strictly inside [u], or None."""
    shape = gens[0].shape
    U = ClopenSet(shape, [tuple(u)])
    for X, word in _bfs_images(gens, U, L):
        if X < U:
            assert word_element(gens, word).apply_clopen(U) < U
            return word
    return None


# -- standard generator sets ------------------------------------------------

def _pm(shape, table):
    return PrefixMap(shape, [(tuple(int(c) for c in u), tuple(int(c) for c in v)) for u, v in table])


def thompson_v_gens() -> list[PrefixMap]:
    s = TreeShape(2, 2)
    return [
        _pm(s, [("0", "00"), ("10", "01"), ("11", "1")]),
        _pm(s, [("0", "0"), ("10", "100"), ("110", "101"), ("111", "11")]),
        _pm(s, [("0", "11"), ("10", "0"), ("11", "10")]),
        _pm(s, [("0", "10"), ("10", "0"), ("11", "11")]),
    ]


def _fg_inv(x: int) -> int:
    return x ^ 1


def fg_allowed(prev: int, n: int) -> list[int]:
    return [x for x in range(2 * n) if x != _fg_inv(prev)]


def fg_encode(letters: Sequence[int], n: int) -> tuple:
    """Tree word of a reduced free-group word (letter 2i = a_i, 2i+1 = a_i^-1)."""
    out = []
    for i, x in enumerate(letters):
        if i == 0:
            out.append(x)
        else:
            out.append(fg_allowed(letters[i - 1], n).index(x))
    return tuple(out)


def fg_decode(word: Sequence[int], n: int) -> list[int]:
    out = []
    for i, c in enumerate(word):
        out.append(c if i == 0 else fg_allowed(out[-1], n)[c])
    return out


def free_group_boundary_gens(n: int) -> list[PrefixMap]:
    """Left multiplication by a_1, a_1^-1, ..., a_n, a_n^-1 on the boundary of F_n."""
    if n < 2:
        raise PreconditionError(f"free group rank must be >= 2, got {n}")
    shape = TreeShape(2 * n, 2 * n - 1)
    out = []
    for s in range(2 * n):
        si = _fg_inv(s)
        table = []
        for x in range(2 * n):
            if x != si:
                table.append(((x,), (s, fg_allowed(s, n).index(x))))
        for j, x2 in enumerate(fg_allowed(si, n)):
            table.append(((si, j), (x2,)))
        out.append(PrefixMap(shape, table))
    for s in range(0, 2 * n, 2):
        assert (out[s] * out[s + 1]).is_identity()
    return out


# -- colored graphs and Tits balls ------------------------------------------

class ColoredGraph:
    """Finite graph with a positive integer c(x, y) on each oriented edge."""

    def __init__(self, colors: dict):
        self.c = dict(colors)
        if not self.c:
            raise PreconditionError("colored graph needs at least one edge")
        for (x, y), k in self.c.items():
            if not isinstance(k, int) or k < 1:
                raise PreconditionError(f"color c({x},{y}) = {k!r} must be a positive integer")
            if (y, x) not in self.c:
                raise PreconditionError(f"edge ({x},{y}) has no reverse orientation")
        self.vertices = sorted({x for e in self.c for x in e})
        self._check_connected()

    def _check_connected(self):
        adj = {v: set() for v in self.vertices}
        for x, y in self.c:
            adj[x].add(y)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(self.vertices):
            raise PreconditionError("colored graph is disconnected")

    def neighbors(self, x):
        return sorted(y for (a, y) in self.c if a == x)

    def valency(self, x) -> int:
        return sum(k for (a, _), k in self.c.items() if a == x)

    @classmethod
    def parse(cls, text: str) -> "ColoredGraph":
        colors = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 4 or parts[0] != "c":
                raise ParseError("expected 'c <u> <v> <k>'", line=lineno)
            try:
                k = int(parts[3])
            except ValueError:
                raise ParseError(f"color {parts[3]!r} is not an integer", line=lineno) from None
            colors[(parts[1], parts[2])] = k
        return cls(colors)

    def to_text(self) -> str:
        return "".join(f"c {x} {y} {k}\n" for (x, y), k in sorted(self.c.items()))


@dataclass
class TreeBall:
    classes: list
    parents: list
    depths: list
    valency: dict
    cantor_flag: bool
    ep_flag: bool

    def __len__(self):
        return len(self.classes)

    def quotient_edges(self) -> set:
        out = set()
        for v, p in enumerate(self.parents):
            if p is not None:
                out.add((self.classes[p], self.classes[v]))
                out.add((self.classes[v], self.classes[p]))
        return out

    def report(self) -> str:
        lines = [f"vertices {len(self)}"]
        for x in sorted(self.valency):
            lines.append(f"valency {x} {self.valency[x]}")
        lines.append(f"cantor {'yes' if self.cantor_flag else 'no'}")
        lines.append(f"extremely-proximal {'yes' if self.ep_flag else 'no'}")
        return "\n".join(lines) + "\n"


def tits_ball_build(G: ColoredGraph, root, R: int) -> TreeBall:
    if R < 0:
        raise PreconditionError("radius must be >= 0")
    if root not in G.vertices:
        raise PreconditionError(f"root class {root!r} is not a vertex of the graph")
    classes, parents, depths = [root], [None], [0]
    frontier = [0]
    for depth in range(1, R + 1):
        nxt = []
        for v in frontier:
            x = classes[v]
            pcls = classes[parents[v]] if parents[v] is not None else None
            for y in G.neighbors(x):
                count = G.c[(x, y)] - (1 if y == pcls else 0)
                for _ in range(count):
                    classes.append(y)
                    parents.append(v)
                    depths.append(depth)
                    nxt.append(len(classes) - 1)
        frontier = nxt
    valency = {x: G.valency(x) for x in G.vertices}
    cantor = all(v >= 3 for v in valency.values())
    ep = all(k >= 2 for k in G.c.values())
    return TreeBall(classes, parents, depths, valency, cantor, ep)


def format_word_list(words) -> str:
    return " ".join(format_word(w) for w in words)
