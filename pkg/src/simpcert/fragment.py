"""Fragmentation toolkit and the nine-factor / width-three pipeline for
groups of prefix-exchange homeomorphisms of a Cantor set."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .bip import (
    CommutatorWord,
    ConjugateFactorization,
    Factor,
    comm,
    conj,
    four_gcommutators,
    verify,
)
from .cantor import (
    BoundaryPoint,
    ClopenSet,
    PartialMap,
    PrefixMap,
    TreeShape,
    compose_pieces,
    ep_oracle,
    identity_pieces,
    moved_clopen,
    tau_build,
)
from .errors import CantorError, PreconditionError, VerificationError


@dataclass
class CantorInstance:
    shape: TreeShape
    target: CommutatorWord
    g: PrefixMap
    g_witness: CommutatorWord


@dataclass
class Witnessed:
    """An element together with a commutator word evaluating to it."""

    element: PrefixMap
    word: CommutatorWord

    def check(self, stage: str = "witness") -> None:
        verify(stage, self.word.evaluate(), self.element)

    def inverse(self) -> "Witnessed":
        return Witnessed(self.element.inverse(), self.word.inverse())

    def __mul__(self, other: "Witnessed") -> "Witnessed":
        return Witnessed(self.element * other.element, self.word + other.word)


def _require_proper(*sets: ClopenSet) -> None:
    for s in sets:
        if not s.is_proper():
            raise PreconditionError(f"clopen {s} must be nonempty and proper")


def _tau_pair(U: ClopenSet, g1: PrefixMap, g2: PrefixMap) -> Witnessed:
    """tau_{g2,U} tau_{g1,U} = [tau_{g1,U}, tau_{g2,U}] for U, g1 U, g2 U disjoint."""
    t1, t2 = tau_build(g1, U), tau_build(g2, U)
    w = Witnessed(t2 * t1, CommutatorWord([(t1, t2)]))
    w.check("tau-pair")
    return w


def _ep_single(U: ClopenSet, V: ClopenSet) -> Witnessed:
    # V not inside U: land U in V \ U, then use spare room for the second involution
    C = ClopenSet.whole(U.shape)
    g1 = ep_oracle(U, V - U)
    g1U = g1.apply_clopen(U)
    g2 = ep_oracle(U, C - (U | g1U))
    return _tau_pair(U, g1, g2)


def ep_witness_commutator(U: ClopenSet, V: ClopenSet) -> Witnessed:
    """gamma in the derived subgroup with gamma(U) strictly inside V.

    When V is not contained in U the result is a single commutator of two
    involutions and has order 3. When V is inside U no element of finite
    order can work (gamma(U) < U forces gamma^n(U) < U), so two such steps
    are chained through the complement of U.
    """
    _require_proper(U, V)
    if not V <= U:
        res = _ep_single(U, V)
    else:
        first = _ep_single(U, U.complement())
        second = _ep_single(first.element.apply_clopen(U), V)
        res = second * first
    img = res.element.apply_clopen(U)
    if not img < V:
        raise VerificationError("ep-witness", f"image {img} is not strictly inside {V}")
    return res


def displace_conj_commutator(f: PrefixMap, V: ClopenSet) -> Witnessed:
    """h in the derived subgroup with V disjoint from (h f h^-1)(V)."""
    if f.is_identity():
        raise PreconditionError("f is the identity")
    _require_proper(V)
    U = moved_clopen(f)
    h = ep_witness_commutator(V, U).inverse()
    hf = conj(h.element, f)
    if not V.isdisjoint(hf.apply_clopen(V)):
        raise VerificationError("displace-conj", "conjugate does not displace V")
    return h


def _shrink(W: ClopenSet) -> ClopenSet:
    w = W.cylinders()[0]
    return ClopenSet(W.shape, [w + (0,)])


def trivialize_on_clopen(f: PrefixMap, g: PrefixMap):
    """(h, W): h in the derived subgroup with (h g h^-1) f the identity on W."""
    if f.is_identity() or g.is_identity():
        raise PreconditionError("f and g must both be nontrivial")
    shape = f.shape
    C = ClopenSet.whole(shape)
    U = moved_clopen(f)
    V = moved_clopen(g)
    h1 = ep_witness_commutator(U, V).inverse()
    gamma = conj(h1.element, g)
    gf = gamma * f
    if gf.identity_on(U):
        return h1, U
    W = moved_clopen(gf, within=U)
    fi, gi = f, gamma.inverse()
    while True:
        cover = W | fi.apply_clopen(W) | gi.apply_clopen(W)
        if not cover.is_whole():
            break
        W = _shrink(W)
    eta = ep_oracle(W, C - cover)
    base = gi.apply_clopen(W)
    tau1 = tau_build(eta * gamma, base)
    tau2 = tau_build(f * gamma, base)
    h2 = Witnessed(tau1 * tau2, CommutatorWord([(tau2, tau1)]))
    h2.check("trivialize-tau")
    h = h2 * h1
    if not (conj(h.element, g) * f).identity_on(W):
        raise VerificationError("trivialize", "conjugate product is not the identity on W")
    return h, W


class CommutantEmbedding:
    """Homomorphism Psi into the maps supported on a proper clopen U containing V.

    With e = ep_oracle(V, V), alpha = e^-1 satisfies alpha(V) > V and
    U = V + alpha(C \\ V). psi: U -> C is the identity on V and alpha^-1 on
    the rest; Psi(x) = psi^-1 x psi on U and the identity off U. Psi fixes
    every map supported in V.
    """

    def __init__(self, V: ClopenSet):
        _require_proper(V)
        self.V = V
        C = ClopenSet.whole(V.shape)
        e = ep_oracle(V, V)
        alpha = e.inverse()
        rest = alpha.apply_clopen(C - V)
        self.U = V | rest
        if not (V < self.U and self.U.is_proper()):
            raise VerificationError("commutant-embed", "embedding clopen is not strictly between V and C")
        self.psi = PartialMap(identity_pieces(V) + e.restrict(rest))
        self.psi_inv = PartialMap(identity_pieces(V) + alpha.restrict(C - V))
        self.outside = identity_pieces(C - self.U)

    def __call__(self, x: PrefixMap) -> PrefixMap:
        inner = compose_pieces(x, self.psi.pairs)
        pieces = compose_pieces(self.psi_inv, inner)
        return PrefixMap(x.shape, pieces + self.outside)


def commutant_embed(word: CommutatorWord, V: ClopenSet):
    """(U, word') with V < U < C, entries of word' supported in U, same value."""
    value = word.evaluate()
    if not value.identity_on(V.complement()):
        raise PreconditionError("word value is not supported in V")
    emb = CommutantEmbedding(V)
    word2 = word.map(emb)
    verify("commutant-embed", word2.evaluate(), value)
    return emb.U, word2


def infinite_displacer(U: ClopenSet, V: ClopenSet, k_test: int = 10) -> Witnessed:
    """h = [alpha, tau] supported in V with the sets h^k(U) pairwise disjoint."""
    if not U < V:
        raise PreconditionError(f"infinite_displacer needs U strictly inside V, got U={U}, V={V}")
    if U.is_empty():
        raise PreconditionError("U must be nonempty")
    shape = U.shape
    C = ClopenSet.whole(shape)
    rest = (V - U).cylinders()
    extra = rest[0] if len(rest) > 1 else rest[0] + (0,)
    W = U | ClopenSet(shape, [extra])
    assert U < W < V
    beta = ep_oracle(W, V - W)
    gam = ep_oracle(W, W - U)
    gW = gam.apply_clopen(W)
    bW = beta.apply_clopen(W)
    pieces = (
        gam.inverse().restrict(gW)
        + beta.restrict(W - gW)
        + (beta * gam * beta.inverse()).restrict(bW)
        + identity_pieces(C - (W | bW))
    )
    alpha = PrefixMap(shape, pieces)
    tau = tau_build(beta, W)
    h = Witnessed(alpha * alpha, CommutatorWord([(alpha, tau)]))
    h.check("infinite-displacer")
    if not h.element.support() <= V:
        raise VerificationError("infinite-displacer", "support escapes V")
    _check_orbit_disjoint(h.element, U, k_test)
    return h


def _check_orbit_disjoint(h: PrefixMap, U: ClopenSet, K: int) -> None:
    imgs = [U]
    fwd, bwd = U, U
    hinv = h.inverse()
    for _ in range(K):
        fwd = h.apply_clopen(fwd)
        bwd = hinv.apply_clopen(bwd)
        imgs.extend((fwd, bwd))
    # pairwise disjointness of translates reduces to U vs h^j U, 1 <= j <= 2K
    acc = ClopenSet.empty(U.shape)
    for s in imgs:
        if not acc.isdisjoint(s):
            raise VerificationError("infinite-displacer", "orbit translates overlap")
        acc = acc | s


class RegionDisplacer:
    """Oracle: an element supported in ``region`` displacing given elements forever."""

    def __init__(self, region: ClopenSet, k_test: int = 10):
        self.region = region
        self.k_test = k_test

    def __call__(self, elements, k):
        shape = self.region.shape
        S = ClopenSet.empty(shape)
        for x in elements:
            S = S | x.support()
        if S.is_empty():
            S = ClopenSet(shape, [self.region.cylinders()[0] + (0,)])
        if not S < self.region:
            raise CantorError(f"support {S} leaves no room inside {self.region}")
        h = infinite_displacer(S, self.region, k_test=max(k, 1))
        return None, h.element


def _room(U: ClopenSet):
    """Disjoint cylinders w0, w1 outside U leaving extra room between them."""
    c = (ClopenSet.whole(U.shape) - U).cylinders()[0]
    desc = [c + (i, j) for i in range(U.shape.d) for j in range(U.shape.d)]
    return desc[0], desc[-1]


@dataclass
class CantorResult:
    factorization: ConjugateFactorization
    width: CommutatorWord
    stages: dict


def cantor_decompose(inst: CantorInstance, strict: bool = False) -> CantorResult:
    shape = inst.shape
    g = inst.g
    one = PrefixMap.identity(shape)
    if g.is_identity():
        raise PreconditionError("g is the identity")
    verify("g-witness", inst.g_witness.evaluate(), g)
    f = inst.target.evaluate()
    if f.is_identity():
        return CantorResult(ConjugateFactorization(g, []), CommutatorWord([], one), {})

    h, W = trivialize_on_clopen(f, g)
    hg = conj(h.element, g)
    f1 = hg * f
    word1 = inst.g_witness.conjugate(h.element) + inst.target
    verify("transport", word1.evaluate(), f1)

    V1 = W.complement()
    U, word2 = commutant_embed(word1, V1)
    w0, w1 = _room(U)
    V0 = ClopenSet(shape, [w0]).complement()
    omega = BoundaryPoint(w1, 0)
    A = V0 - ClopenSet(shape, [w1])
    assert U < A

    h3 = displace_conj_commutator(g, V0)
    g_disp = conj(h3.element, g)
    inner = RegionDisplacer(A)
    cf4, pairs = four_gcommutators(word2, g_disp, inner, strict=strict)
    tail = cf4.rebase(h3.element, h3.word if strict else None)

    cf = ConjugateFactorization(g, [Factor(h.element, -1, h.word)] + tail.factors)
    if len(cf) > 9:
        raise VerificationError("cantor-nine", f"{len(cf)} factors exceeds 9")
    verify("cantor-nine", cf.evaluate(), f)

    # (h g h^-1)^-1 = [h b h^-1, h a h^-1] when g = [a, b]
    width = inst.g_witness.conjugate(h.element).inverse() + pairs
    verify("cantor-width", width.evaluate(), f)
    stages = {"W": W, "U": U, "V0": V0, "omega": omega, "region": A}
    return CantorResult(cf, width, stages)


def cantor_nine_factor(inst: CantorInstance, strict: bool = False) -> ConjugateFactorization:
    return cantor_decompose(inst, strict).factorization


def cantor_width_three(inst: CantorInstance) -> CommutatorWord:
    return cantor_decompose(inst).width
