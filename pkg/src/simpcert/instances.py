"""Seeded random instances for both pipelines."""
from __future__ import annotations

import random

from .bip import CommutatorWord
from .cantor import ClopenSet, PrefixMap, TreeShape
from .fragment import CantorInstance, ep_witness_commutator
from .order import OrderInstance
from .plmap import PLMap, glue_pieces, interp_build
from .qadic import QRational

ORDER_BASES = (2, 3, 5)
CANTOR_SHAPES = ((2, 2), (3, 3), (3, 2), (4, 3))


def random_bump(rng: random.Random, q: int) -> PLMap:
    """Two-piece element supported on an interval with endpoints in the ideal."""
    s = q - 1
    P = s * rng.randint(-3, 1)
    Q = P + s * rng.randint(1, 3)
    j = rng.randint(1, 2)
    lo, hi = P * q**j, Q * q**j
    x = rng.randrange(lo // s + 1, hi // s) * s
    y = rng.randrange(lo // s + 1, hi // s) * s
    P, Q, x, y = (QRational(v, j, q) for v in (lo, hi, x, y))
    return glue_pieces(q, [interp_build(P, x, P, y), interp_build(x, Q, y, Q)])


def random_pl(rng: random.Random, q: int, max_breakpoints: int = 12) -> PLMap:
    while True:
        e = random_bump(rng, q)
        if rng.random() < 0.5:
            e = e * random_bump(rng, q)
        if len(e) <= max_breakpoints:
            return e


def random_antichain(rng: random.Random, shape: TreeShape, splits: int) -> list:
    leaves = shape.children(())
    for _ in range(splits):
        w = leaves.pop(rng.randrange(len(leaves)))
        leaves += shape.children(w)
    return leaves


def random_vmap(rng: random.Random, shape: TreeShape, max_splits: int = 3) -> PrefixMap:
    s = rng.randint(0, max_splits)
    A = random_antichain(rng, shape, s)
    B = random_antichain(rng, shape, s)
    rng.shuffle(B)
    return PrefixMap(shape, list(zip(A, B)))


def random_clopen(rng: random.Random, shape: TreeShape, max_splits: int = 3) -> ClopenSet:
    while True:
        A = random_antichain(rng, shape, rng.randint(1, max_splits))
        C = ClopenSet(shape, rng.sample(A, rng.randint(1, len(A))))
        if C.is_proper():
            return C


def random_order_instance(rng: random.Random, q: int = None, size: int = 12, max_len: int = 4) -> OrderInstance:
    q = q or rng.choice(ORDER_BASES)
    k = rng.randint(1, max_len)
    word = CommutatorWord([(random_pl(rng, q, size), random_pl(rng, q, size)) for _ in range(k)], PLMap(q))
    while True:
        g = random_pl(rng, q, size)
        if not g.is_identity():
            return OrderInstance(q, word, g)


def random_cantor_instance(rng: random.Random, shape: TreeShape = None, size: int = 3, max_len: int = 4) -> CantorInstance:
    shape = shape or TreeShape(*rng.choice(CANTOR_SHAPES))
    while True:
        U, V = random_clopen(rng, shape, size), random_clopen(rng, shape, size)
        if not V <= U:
            break
    gw = ep_witness_commutator(U, V)
    k = rng.randint(1, max_len)
    word = CommutatorWord(
        [(random_vmap(rng, shape, size), random_vmap(rng, shape, size)) for _ in range(k)],
        PrefixMap.identity(shape),
    )
    assert not gw.element.is_identity()
    return CantorInstance(shape, word, gw.element, gw.word)


def random_instance(kind: str, seed: int, size: int = None):
    rng = random.Random(seed)
    if kind == "order":
        return random_order_instance(rng, size=size or 12)
    if kind == "cantor":
        return random_cantor_instance(rng, size=size or 3)
    raise ValueError(f"unknown instance kind {kind!r}")
