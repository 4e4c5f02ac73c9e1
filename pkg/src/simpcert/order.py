"""Six-factor decomposition and width two for bounded PL groups BF_q."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bip import CommutatorWord, ConjugateFactorization, Factor, comm, conj, three_gcommutators, verify
from .errors import PreconditionError
from .plmap import PLMap, move_interval, pl_support_bounds
from .qadic import QRational, between, in_ideal


@dataclass
class OrderInstance:
    q: int
    target: CommutatorWord
    g: PLMap


def moved_ideal_point(g: PLMap) -> QRational:
    """Some a in I with g(a) != a."""
    if g.is_identity():
        raise PreconditionError("g is the identity")
    for x0, x1 in zip(g.xs, g.xs[1:]):
        c = between(x0, x1, require_ideal=True)
        if g(c) != c:
            return c
        # an affine piece that is not the identity fixes at most one point
        c = between(c, x1, require_ideal=True)
        if g(c) != c:
            return c
    raise AssertionError("non-identity map fixes a point on every piece")


def joint_bounds(elements, fallback):
    lo = hi = None
    for x in elements:
        iv = pl_support_bounds(x)
        if iv is None:
            continue
        lo = iv.lo if lo is None else min(lo, iv.lo)
        hi = iv.hi if hi is None else max(hi, iv.hi)
    if lo is None:
        return fallback
    return lo, hi


class ConjugateDisplacer:
    """Oracle returning conjugates of g that displace anything with bounded support.

    With a in I and a < g(a), every b in I between them makes the intervals
    g^j(a, b) pairwise disjoint; conjugating by a map sending (a, b) over the
    joint support gives an element displacing that support forever.
    """

    def __init__(self, g: PLMap, a: QRational):
        assert a < g(a)
        self.g = g
        self.a = a
        self.b = between(a, g(a), require_ideal=True)

    def __call__(self, elements, k):
        c, d = joint_bounds(elements, (self.a, self.b))
        w = move_interval(self.a, self.b, c, d)
        return w, conj(w, self.g)


def _normalized(g: PLMap):
    a = moved_ideal_point(g)
    if g(a) > a:
        return g, a, 1
    return g.inverse(), a, -1


def order_decompose(inst: OrderInstance):
    """(factorization over inst.g, two-commutator word)."""
    gs, a, sign = _normalized(inst.g)
    cf, width = three_gcommutators(inst.target, gs, ConjugateDisplacer(gs, a))
    if sign == -1:
        cf = ConjugateFactorization(inst.g, [Factor(f.w, -f.eps, f.witness) for f in cf.factors])
    return cf, width


def order_six_factor(inst: OrderInstance, strict: bool = False) -> ConjugateFactorization:
    cf, _ = order_decompose(inst)
    if strict:
        cf = strictify(cf)
    verify("order-six", cf.evaluate(), inst.target.evaluate())
    return cf


def order_width_two(inst: OrderInstance) -> CommutatorWord:
    _, width = order_decompose(inst)
    assert len(width) <= 2
    return width


def strictify(cf: ConjugateFactorization) -> ConjugateFactorization:
    """Replace each conjugator w by a commutator [w, x] giving the same factor.

    x pushes the support of w past the support of g, so x w^-1 x^-1 commutes
    with g and [w, x] g [w, x]^-1 = w g w^-1.
    """
    g = cf.g
    gb = pl_support_bounds(g)
    one = g.identity_like()
    out = []
    for f in cf.factors:
        wb = pl_support_bounds(f.w)
        if wb is None:
            out.append(Factor(f.w, f.eps, CommutatorWord([], one)))
            continue
        shift = gb.hi - wb.lo + (g.q - 1)
        x = move_interval(wb.lo, wb.hi, wb.lo + shift, wb.hi + shift)
        w2 = comm(f.w, x)
        out.append(Factor(w2, f.eps, CommutatorWord([(f.w, x)])))
    res = ConjugateFactorization(g, out)
    verify("strictify", res.evaluate(), cf.evaluate())
    return res
