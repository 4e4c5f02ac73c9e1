import random

import pytest
from hypothesis import given, settings, strategies as st

from simpcert.bip import CommutatorWord, comm, conj
from simpcert.cantor import BoundaryPoint, ClopenSet, PrefixMap, TreeShape, moved_clopen, point_in
from simpcert.errors import PreconditionError
from simpcert.fragment import (
    CantorInstance,
    CommutantEmbedding,
    cantor_decompose,
    cantor_nine_factor,
    cantor_width_three,
    commutant_embed,
    displace_conj_commutator,
    ep_witness_commutator,
    infinite_displacer,
    trivialize_on_clopen,
)
from simpcert.instances import random_cantor_instance, random_clopen, random_order_instance, random_vmap
from simpcert.order import OrderInstance, moved_ideal_point, order_decompose, order_six_factor, order_width_two
from simpcert.plmap import PLMap, pl_validate
from simpcert.qadic import in_ideal
from simpcert.treelab import thompson_v_gens

from conftest import Q
from helpers import vmap_in

S22 = TreeShape(2, 2)


def C(shape, *words):
    return ClopenSet(shape, [tuple(int(c) for c in w) for w in words])


def pm(shape, rows):
    return PrefixMap(shape, [(tuple(int(c) for c in u), tuple(int(c) for c in v)) for u, v in rows])


def f_gens():
    x0 = pl_validate([(Q(a, 2), Q(b, 2)) for a, b in [("0", "0"), ("1/2", "1/4"), ("3/4", "1/2"), ("1", "1")]], 2)
    x1 = pl_validate([(Q(a, 2), Q(b, 2)) for a, b in [("1/2", "1/2"), ("3/4", "5/8"), ("7/8", "3/4"), ("1", "1")]], 2)
    return x0, x1


# -- order pipeline ------------------------------------------------------------

def test_order_empty_target():
    x0, x1 = f_gens()
    inst = OrderInstance(2, CommutatorWord([], PLMap(2)), comm(x0, x1))
    assert len(order_six_factor(inst)) == 0
    assert len(order_width_two(inst)) == 0


def test_order_standard_commutator():
    x0, x1 = f_gens()
    g = comm(x1, x0 * x1)  # nontrivial element of the derived subgroup
    assert not g.is_identity()
    inst = OrderInstance(2, CommutatorWord([(x0, x1)]), g)
    cf = order_six_factor(inst)
    assert len(cf) <= 6 and cf.g == g
    assert cf.evaluate() == comm(x0, x1)
    strict = order_six_factor(inst, strict=True)
    assert len(strict) <= 6 and strict.evaluate() == comm(x0, x1)
    for f in strict.factors:
        assert f.witness.evaluate() == f.w


def test_order_width_two_on_length_three():
    rng = random.Random(31)
    while True:
        inst = random_order_instance(rng, q=3)
        if len(inst.target) == 3:
            break
    width = order_width_two(inst)
    assert len(width) == 2
    assert width.evaluate() == inst.target.evaluate()


def test_order_sign_normalization():
    x0, _ = f_gens()
    inst = OrderInstance(2, CommutatorWord([(x0, f_gens()[1])]), x0)  # x0 pushes points left
    a = moved_ideal_point(x0)
    assert in_ideal(a) and x0(a) < a
    cf, _ = order_decompose(inst)
    assert cf.g == x0 and cf.evaluate() == inst.target.evaluate()


def test_order_rejects_identity_g():
    x0, x1 = f_gens()
    with pytest.raises(PreconditionError):
        order_six_factor(OrderInstance(2, CommutatorWord([(x0, x1)]), PLMap(2)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**9))
def test_order_random(seed):
    inst = random_order_instance(random.Random(seed))
    cf, width = order_decompose(inst)
    assert len(cf) <= 6 and len(width) <= 2
    assert cf.evaluate() == inst.target.evaluate() == width.evaluate()


# -- fragmentation toolkit ---------------------------------------------------------

def test_ep_witness_examples():
    gw = ep_witness_commutator(C(S22, "0"), C(S22, "10"))
    gamma = gw.element
    assert gamma(C(S22, "0")) < C(S22, "10")
    assert (gamma * gamma * gamma).is_identity()
    assert len(gw.word) == 1 and gw.word.evaluate() == gamma
    U, V = C(S22, "0", "10"), C(S22, "1")
    gw = ep_witness_commutator(U, V)
    assert gw.element(U) < V and (gw.element ** 3).is_identity()


def test_ep_witness_nested_case():
    # V inside U: gamma(U) < U rules out finite order, so the witness is longer
    U, V = C(S22, "0"), C(S22, "01")
    gw = ep_witness_commutator(U, V)
    assert gw.element(U) < V
    assert gw.word.evaluate() == gw.element
    assert len(gw.word) == 2


def test_ep_witness_rejects_improper():
    with pytest.raises(PreconditionError):
        ep_witness_commutator(ClopenSet.whole(S22), C(S22, "0"))


def test_displace_conj_commutator_example():
    sigma = pm(S22, [("0", "1"), ("1", "0")])
    V = C(S22, "01")
    h = displace_conj_commutator(sigma, V)
    assert V.isdisjoint(conj(h.element, sigma)(V))
    assert h.word.evaluate() == h.element


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_displace_conj_commutator_property(seed):
    rng = random.Random(seed)
    shape = TreeShape(*rng.choice([(2, 2), (3, 3), (3, 2)]))
    f = random_vmap(rng, shape)
    if f.is_identity():
        return
    V = random_clopen(rng, shape)
    h = displace_conj_commutator(f, V)
    assert V.isdisjoint(conj(h.element, f)(V))


def _early_exit_predicate(f, g):
    U, V = moved_clopen(f), moved_clopen(g)
    h1 = ep_witness_commutator(U, V).inverse()
    return (conj(h1.element, g) * f).identity_on(U)


def test_trivialize_early_exit_branch():
    # found by exhaustive search over (2,2) tables with at most five entries
    f = thompson_v_gens()[0]
    g = pm(S22, [("00", "001"), ("0100", "01"), ("0101", "0000"), ("011", "1"), ("1", "0001")])
    assert _early_exit_predicate(f, g)
    h, W = trivialize_on_clopen(f, g)
    assert W == moved_clopen(f)
    assert (conj(h.element, g) * f).identity_on(W)
    assert h.word.evaluate() == h.element


def test_trivialize_tau_branch():
    gens = thompson_v_gens()
    f, g = gens[0], gens[2]
    assert not _early_exit_predicate(f, g)
    h, W = trivialize_on_clopen(f, g)
    assert not W.is_empty()
    assert (conj(h.element, g) * f).identity_on(W)
    assert h.word.evaluate() == h.element


def test_trivialize_inverse_pair():
    f = thompson_v_gens()[1]
    h, W = trivialize_on_clopen(f, f.inverse())
    assert (conj(h.element, f.inverse()) * f).identity_on(W)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**9))
def test_trivialize_property(seed):
    rng = random.Random(seed)
    shape = TreeShape(*rng.choice([(2, 2), (3, 3), (4, 3)]))
    f, g = random_vmap(rng, shape), random_vmap(rng, shape)
    if f.is_identity() or g.is_identity():
        return
    h, W = trivialize_on_clopen(f, g)
    assert not W.is_empty()
    assert (conj(h.element, g) * f).identity_on(W)
    assert h.word.evaluate() == h.element


def test_commutant_embed_example():
    rng = random.Random(41)
    V = C(S22, "00")
    word = CommutatorWord([(vmap_in(rng, S22, (0, 0)), vmap_in(rng, S22, (0, 0))) for _ in range(2)])
    U, word2 = commutant_embed(word, V)
    assert V < U and U.is_proper()
    assert word2.evaluate() == word.evaluate()
    for x in word2.entries():
        assert x.identity_on(U.complement())


def test_commutant_embed_homomorphism():
    rng = random.Random(42)
    for shape in (S22, TreeShape(3, 3)):
        V = C(shape, "1", "20") if shape.m == 3 else C(shape, "1")
        emb = CommutantEmbedding(V)
        for _ in range(20):
            x, y = random_vmap(rng, shape), random_vmap(rng, shape)
            assert emb(x * y) == emb(x) * emb(y)
            assert emb(x.inverse()) == emb(x).inverse()
            assert emb(x).identity_on(emb.U.complement())
        z = vmap_in(rng, shape, (1,))
        assert emb(z) == z


def test_commutant_embed_rejects_unsupported():
    rng = random.Random(43)
    while True:
        word = CommutatorWord([(random_vmap(rng, S22), random_vmap(rng, S22))])
        if not word.evaluate().identity_on(C(S22, "1")):
            break
    with pytest.raises(PreconditionError):
        commutant_embed(word, C(S22, "0"))


def test_infinite_displacer_example():
    U, V = C(S22, "00"), C(S22, "0")
    h = infinite_displacer(U, V, k_test=5)
    assert h.word.evaluate() == h.element and len(h.word) == 1
    assert not h.element.is_identity()
    assert h.element.support() <= V
    imgs = [(h.element ** k)(U) for k in range(-5, 6)]
    for i in range(len(imgs)):
        for j in range(i + 1, len(imgs)):
            assert imgs[i].isdisjoint(imgs[j])
    with pytest.raises(PreconditionError):
        infinite_displacer(V, V)


# -- cantor pipeline -----------------------------------------------------------

def _v_instance(target):
    gw = ep_witness_commutator(C(S22, "0"), C(S22, "10"))
    return CantorInstance(S22, target, gw.element, gw.word)


def test_cantor_empty_target():
    inst = _v_instance(CommutatorWord([], PrefixMap.identity(S22)))
    assert len(cantor_nine_factor(inst)) <= 1
    assert len(cantor_width_three(inst)) == 0


def test_cantor_standard_commutator():
    a, b = thompson_v_gens()[:2]
    inst = _v_instance(CommutatorWord([(a, b)]))
    res = cantor_decompose(inst)
    assert len(res.factorization) <= 9 and len(res.width) <= 3
    assert res.factorization.evaluate() == comm(a, b) == res.width.evaluate()
    stages = res.stages
    assert stages["U"] < stages["region"] and not point_in(stages["omega"], stages["region"])
    strict = cantor_nine_factor(inst, strict=True)
    assert len(strict) <= 9 and strict.evaluate() == comm(a, b)
    for f in strict.factors:
        assert f.witness is not None and f.witness.evaluate() == f.w


def test_cantor_rejects_bad_witness():
    a, b = thompson_v_gens()[:2]
    inst = _v_instance(CommutatorWord([(a, b)]))
    inst.g_witness = CommutatorWord([(b, a)])
    with pytest.raises(Exception, match="g-witness"):
        cantor_decompose(inst)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**9))
def test_cantor_random(seed):
    inst = random_cantor_instance(random.Random(seed))
    res = cantor_decompose(inst)
    assert len(res.factorization) <= 9 and len(res.width) <= 3
    assert res.factorization.evaluate() == inst.target.evaluate() == res.width.evaluate()
