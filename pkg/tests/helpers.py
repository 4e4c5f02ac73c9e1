"""Generators of elements confined to a region, and a symbolic model group."""
import random

from simpcert.bip import CommutatorWord
from simpcert.cantor import ClopenSet, PrefixMap, TreeShape
from simpcert.plmap import PLMap, glue_pieces, interp_build
from simpcert.qadic import QRational


def pl_bump_in(rng: random.Random, lo: QRational, hi: QRational) -> PLMap:
    """Two-piece element supported in [lo, hi]; lo, hi must lie in I."""
    q = lo.q
    s = q - 1
    j = max(lo.k, hi.k) + rng.randint(1, 2)
    a, b = lo.scale(j).m, hi.scale(j).m  # integers on the q^-j grid
    x = rng.randrange(a // s + 1, b // s) * s
    y = rng.randrange(a // s + 1, b // s) * s
    X, Y = QRational(x, j, q), QRational(y, j, q)
    return glue_pieces(q, [interp_build(lo, X, lo, Y), interp_build(X, hi, Y, hi)])


def pl_in(rng, lo, hi) -> PLMap:
    g = pl_bump_in(rng, lo, hi)
    if rng.random() < 0.5:
        g = g * pl_bump_in(rng, lo, hi)
    return g


def pl_word_in(rng, lo, hi, k) -> CommutatorWord:
    return CommutatorWord([(pl_in(rng, lo, hi), pl_in(rng, lo, hi)) for _ in range(k)], PLMap(lo.q))


def _subtree_antichain(rng, shape, prefix, splits):
    leaves = [prefix]
    for _ in range(splits):
        w = leaves.pop(rng.randrange(len(leaves)))
        leaves += shape.children(w)
    return leaves


def vmap_in(rng: random.Random, shape: TreeShape, prefix, splits: int = 3) -> PrefixMap:
    """Random prefix exchange supported in the cylinder [prefix]."""
    s = rng.randint(1, splits)
    A = _subtree_antichain(rng, shape, prefix, s)
    B = _subtree_antichain(rng, shape, prefix, s)
    rng.shuffle(B)
    rest = (ClopenSet.whole(shape) - ClopenSet(shape, [prefix])).cylinders()
    return PrefixMap(shape, list(zip(A, B)) + [(w, w) for w in rest])


def vmap_word_in(rng, shape, prefix, k) -> CommutatorWord:
    return CommutatorWord(
        [(vmap_in(rng, shape, prefix), vmap_in(rng, shape, prefix)) for _ in range(k)],
        PrefixMap.identity(shape),
    )


# -- free group wreath Z ------------------------------------------------------
#
# Elements are (f, s): f maps integer coordinates to reduced free-group words
# (tuples of nonzero ints, -i the inverse of i), s is the shift. Conjugating
# a coordinate-0 element by h = (0, 1) moves it to coordinate 1, where it
# commutes with everything at coordinate 0, so h displaces every subgroup
# living at coordinate 0 for all k. Equality is free reduction, so identities
# checked here hold in the free group itself.

def fg_mul(u: tuple, v: tuple) -> tuple:
    out = list(u)
    for x in v:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def fg_inv(u: tuple) -> tuple:
    return tuple(-x for x in reversed(u))


def fg_random(rng, rank: int, max_len: int) -> tuple:
    out = ()
    while len(out) < rng.randint(1, max_len):
        out = fg_mul(out, (rng.choice([1, -1]) * rng.randint(1, rank),))
    return out


class Wreath:
    __slots__ = ("f", "s")

    def __init__(self, f=None, s: int = 0):
        self.f = {n: w for n, w in (f or {}).items() if w}
        self.s = s

    def __mul__(self, other: "Wreath") -> "Wreath":
        f = dict(self.f)
        for n, w in other.f.items():
            f[n + self.s] = fg_mul(f.get(n + self.s, ()), w)
        return Wreath(f, self.s + other.s)

    def inverse(self) -> "Wreath":
        return Wreath({n - self.s: fg_inv(w) for n, w in self.f.items()}, -self.s)

    def identity_like(self) -> "Wreath":
        return Wreath()

    def is_identity(self) -> bool:
        return not self.f and self.s == 0

    def commutes_with(self, other: "Wreath") -> bool:
        return self * other == other * self

    def __eq__(self, other):
        return isinstance(other, Wreath) and self.s == other.s and self.f == other.f

    def __hash__(self):
        return hash((self.s, tuple(sorted(self.f.items()))))

    def __repr__(self):
        return f"Wreath({self.f}, {self.s})"


SHIFT = Wreath({}, 1)


def wreath_word(rng, k: int, rank: int = 2, max_len: int = 4) -> CommutatorWord:
    def base():
        return Wreath({0: fg_random(rng, rank, max_len)})

    return CommutatorWord([(base(), base()) for _ in range(k)], Wreath())


# -- certificate mutations ---------------------------------------------------

MUTATIONS = ("factor", "bound", "target")
EXPECTED_REASON = {"factor": "mismatch", "bound": "bound", "target": "mismatch"}


def mutate(cert, how: str, rng: random.Random, perturb):
    """Copy of ``cert`` damaged in one way; ``perturb()`` returns a random element of the carrier."""
    import copy

    bad = copy.copy(cert)
    if how == "bound":
        bad.bound = cert.count() - 1
        return bad
    if how == "target":
        while True:
            x = perturb()
            if not x.is_identity():
                bad.target = cert.target * x
                return bad
    factors = list(cert.factors)
    i = rng.randrange(len(factors))
    w, eps = factors[i]
    if rng.random() < 0.5:
        factors[i] = (w, -eps)
    else:
        g = cert.g
        while True:
            x = perturb()
            if x * g != g * x:
                break
        factors[i] = (w * x, eps)
    bad.factors = factors
    bad.witnesses = {}
    return bad
