"""Carrier-agnostic commutator machinery.

Elements are any objects supporting ``*`` (composition, ``x * y`` applies
``y`` first), ``inverse()``, ``identity_like()``, ``==`` and
``commutes_with``. Both :class:`~simpcert.plmap.PLMap` and
:class:`~simpcert.cantor.PrefixMap` qualify.

Conventions: ``conj(w, x) = w x w^-1`` and ``comm(a, b) = a b a^-1 b^-1``.

A displacement oracle is a callable ``oracle(elements, k)`` returning a pair
``(w, h)``. In conjugate-of-g mode ``h == conj(w, g)``; otherwise ``w`` is
``None`` and ``h`` is just some element. Either way ``h`` must k-displace the
group generated by ``elements``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

from .errors import PreconditionError, VerificationError

Oracle = Callable[[Sequence[Any], int], tuple]


def conj(w, x):
    return w * x * w.inverse()


def comm(a, b):
    return a * b * a.inverse() * b.inverse()


def product(items, one):
    out = one
    for x in items:
        out = out * x
    return out


class CommutatorWord:
    """Product of commutators [a_1,b_1]...[a_n,b_n]."""

    __slots__ = ("pairs", "one")

    def __init__(self, pairs=(), one=None):
        self.pairs = [tuple(p) for p in pairs]
        if one is None:
            if not self.pairs:
                raise ValueError("empty CommutatorWord needs an explicit identity")
            one = self.pairs[0][0].identity_like()
        self.one = one

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __add__(self, other: "CommutatorWord") -> "CommutatorWord":
        return CommutatorWord(self.pairs + other.pairs, self.one)

    def entries(self) -> list:
        return [x for p in self.pairs for x in p]

    def evaluate(self):
        return product((comm(a, b) for a, b in self.pairs), self.one)

    def inverse(self) -> "CommutatorWord":
        # ([a1,b1]...[an,bn])^-1 = [bn,an]...[b1,a1]
        return CommutatorWord([(b, a) for a, b in reversed(self.pairs)], self.one)

    def conjugate(self, w) -> "CommutatorWord":
        winv = w.inverse()
        return self.map(lambda x: w * x * winv)

    def map(self, fn) -> "CommutatorWord":
        return CommutatorWord([(fn(a), fn(b)) for a, b in self.pairs], self.one)

    def __repr__(self):
        return f"CommutatorWord(len={len(self.pairs)})"


@dataclass
class Factor:
    """``w g^eps w^-1``; ``witness`` optionally certifies ``w`` as a product of commutators."""

    w: Any
    eps: int
    witness: Optional[CommutatorWord] = None

    def evaluate(self, g):
        x = g if self.eps == 1 else g.inverse()
        return conj(self.w, x)


@dataclass
class ConjugateFactorization:
    g: Any
    factors: list = field(default_factory=list)

    def __len__(self):
        return len(self.factors)

    def evaluate(self):
        return product((f.evaluate(self.g) for f in self.factors), self.g.identity_like())

    def rebase(self, w, witness: Optional[CommutatorWord] = None) -> "ConjugateFactorization":
        """Reinterpret factors of ``conj(w, g0)`` as factors of ``g0``.

        Requires ``self.g == conj(w, g0)``; the caller passes ``g0`` implicitly
        through ``w``: the new base is ``w^-1 g w``.
        """
        g0 = conj(w.inverse(), self.g)
        out = []
        for f in self.factors:
            wit = None
            if f.witness is not None and witness is not None:
                wit = f.witness + witness
            out.append(Factor(f.w * w, f.eps, wit))
        return ConjugateFactorization(g0, out)

    def extend(self, other: "ConjugateFactorization") -> None:
        if other.g != self.g:
            raise ValueError("cannot concatenate factorizations with different bases")
        self.factors.extend(other.factors)


def verify(stage: str, got, want) -> None:
    if got != want:
        raise VerificationError(stage, "exact equality failed")


def check_k_displaces(h, gens: Sequence, k: int) -> bool:
    """True iff every ``conj(h^j, y)`` commutes with every ``x`` for 1 <= j <= k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    gens = [x for x in gens if not x.is_identity()]
    hinv = h.inverse()
    hj, hjinv = h.identity_like(), h.identity_like()
    for _ in range(k):
        hj, hjinv = h * hj, hjinv * hinv
        for y in gens:
            yc = hj * y * hjinv
            for x in gens:
                if not x.commutes_with(yc):
                    return False
    return True


def lemma_commutators_expand(alpha, beta, h) -> ConjugateFactorization:
    """[alpha, beta] as four conjugates of h^{+-1}, given alpha commutes with conj(h, beta)."""
    if not alpha.commutes_with(conj(h, beta)):
        raise PreconditionError("alpha does not commute with the h-conjugate of beta")
    one = h.identity_like()
    cf = ConjugateFactorization(h, [
        Factor(alpha * beta, 1),
        Factor(alpha, -1),
        Factor(one, 1),
        Factor(beta, -1),
    ])
    verify("commutator-expand", cf.evaluate(), comm(alpha, beta))
    return cf


def bip_merge(word: CommutatorWord, h):
    """(alpha, beta, gamma) with eval(word) == [alpha, beta][gamma, h].

    Valid when h (k-1)-displaces the entries of a length-k word.
    """
    one = word.one
    k = len(word)
    if k == 0:
        return one, one, one
    if k == 1:
        a, b = word.pairs[0]
        return a, b, one
    if not check_k_displaces(h, word.entries(), k - 1):
        raise PreconditionError(f"h does not {k - 1}-displace the word entries")
    hinv = h.inverse()
    powers = [one]
    inv_powers = [one]
    for _ in range(k - 1):
        powers.append(h * powers[-1])
        inv_powers.append(inv_powers[-1] * hinv)

    def c(i, x):
        return powers[i] * x * inv_powers[i]

    alpha = product((c(i, a) for i, (a, _) in enumerate(word.pairs)), one)
    beta = product((c(i, b) for i, (_, b) in enumerate(word.pairs)), one)
    cs = [comm(a, b) for a, b in word.pairs]
    # tails[j] = c_{j+1} ... c_{k-1} (0-based)
    tails = [one] * (k + 1)
    for j in range(k - 1, -1, -1):
        tails[j] = cs[j] * tails[j + 1]
    gamma = product((c(i, tails[i + 1]) for i in range(k - 1)), one)
    verify("bip-merge", comm(alpha, beta) * comm(gamma, h), word.evaluate())
    return alpha, beta, gamma


def perfect_rewrite(alpha, beta, oracle: Oracle):
    """(alpha', beta') with [alpha', beta'] == [alpha, beta], each a single commutator.

    Returns ``(alpha2, beta2, wit_alpha, wit_beta)`` where ``wit_*`` are
    length-1 CommutatorWords evaluating to ``alpha2`` and ``beta2``.
    """
    _, h = oracle([alpha, beta], 1)
    bh = comm(beta, h)
    _, g = oracle([alpha, bh], 1)
    a2 = comm(alpha, g)
    verify("perfect-rewrite", comm(a2, bh), comm(alpha, beta))
    return a2, bh, CommutatorWord([(alpha, g)]), CommutatorWord([(beta, h)])


def three_gcommutators(word: CommutatorWord, g, oracle: Oracle):
    """At most six conjugates of g^{+-1} multiplying to eval(word).

    ``oracle`` works in conjugate-of-g mode. Returns ``(cf, pairs)`` where
    ``pairs`` is the two-commutator form ``[(alpha, beta), (gamma, h)]``
    (trivial pairs dropped).
    """
    target = word.evaluate()
    one = g.identity_like()
    cf = ConjugateFactorization(g, [])
    if len(word) == 0:
        return cf, CommutatorWord([], one)
    if len(word) == 1:
        (alpha, beta), gamma, h, w1 = word.pairs[0], one, None, None
    else:
        w1, h = oracle(word.entries(), len(word) - 1)
        verify("oracle", h, conj(w1, g))
        alpha, beta, gamma = bip_merge(word, h)
    pairs = []
    if not (alpha.is_identity() and beta.is_identity()):
        w2, h2 = oracle([alpha, beta], 1)
        verify("oracle", h2, conj(w2, g))
        cf.extend(lemma_commutators_expand(alpha, beta, h2).rebase(w2))
        pairs.append((alpha, beta))
    if not gamma.is_identity():
        # [gamma, h] = (gamma h gamma^-1) h^-1
        cf.factors.append(Factor(gamma * w1, 1))
        cf.factors.append(Factor(w1, -1))
        pairs.append((gamma, h))
    if len(cf) > 6:
        raise VerificationError("three-gcommutators", f"{len(cf)} factors exceeds 6")
    verify("three-gcommutators", cf.evaluate(), target)
    width = CommutatorWord(pairs, one)
    verify("width-two", width.evaluate(), target)
    return cf, width


def four_gcommutators(word: CommutatorWord, g, inner_oracle: Oracle, strict: bool = False):
    """At most eight conjugates of g^{+-1} multiplying to eval(word).

    ``g`` must 1-displace the subgroup in which ``inner_oracle`` operates.
    In strict mode every conjugator carries a CommutatorWord witness.
    Returns ``(cf, pairs)`` with ``pairs`` the two-commutator form.
    """
    target = word.evaluate()
    one = g.identity_like()
    cf = ConjugateFactorization(g, [])
    if len(word) == 0:
        return cf, CommutatorWord([], one)
    if len(word) == 1:
        (alpha, beta), gamma, h = word.pairs[0], one, one
    else:
        _, h = inner_oracle(word.entries(), len(word) - 1)
        alpha, beta, gamma = bip_merge(word, h)
    pairs = [(x, y) for x, y in ((alpha, beta), (gamma, h)) if not (x.is_identity() and y.is_identity())]
    for x, y in pairs:
        if strict:
            x2, y2, wx, wy = perfect_rewrite(x, y, inner_oracle)
        else:
            x2, y2, wx, wy = x, y, None, None
        part = lemma_commutators_expand(x2, y2, g)
        if strict:
            empty = CommutatorWord([], one)
            wits = [wx + wy, wx, empty, wy]
            for f, wit in zip(part.factors, wits):
                f.witness = wit
        cf.extend(part)
    if len(cf) > 8:
        raise VerificationError("four-gcommutators", f"{len(cf)} factors exceeds 8")
    verify("four-gcommutators", cf.evaluate(), target)
    if strict:
        for f in cf.factors:
            verify("strict-witness", f.witness.evaluate(), f.w)
    width = CommutatorWord(pairs, one)
    verify("width", width.evaluate(), target)
    return cf, width
