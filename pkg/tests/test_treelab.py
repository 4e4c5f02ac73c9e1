import itertools
from fractions import Fraction

import pytest

from simpcert.cantor import ClopenSet, PrefixMap, TreeShape
from simpcert.errors import ParseError, PreconditionError
from simpcert.treelab import (
    ColoredGraph,
    fg_decode,
    fg_encode,
    free_group_boundary_gens,
    halftree_shrink_search,
    measure_feasibility,
    minimality_search,
    thompson_v_gens,
    tits_ball_build,
    visual_measure,
    visual_total,
    word_element,
)

S22 = TreeShape(2, 2)
SIGMA = PrefixMap(S22, [((0,), (1,)), ((1,), (0,))])


def regular(d):
    return (lambda c: d), (lambda c, parent: ["x"] * (d if parent is None else d - 1))


def biregular(s, t):
    val = {"b": s, "w": t}

    def nxt(c, parent):
        other = "w" if c == "b" else "b"
        return [other] * (val[c] if parent is None else val[c] - 1)

    return val.__getitem__, nxt


def test_visual_measure_examples():
    assert visual_measure([3]) == Fraction(1, 3)
    assert visual_measure([3, 3]) == Fraction(1, 6)
    assert visual_measure([3]) == 2 * visual_measure([3, 3])
    with pytest.raises(PreconditionError):
        visual_measure([])


def test_visual_total_is_one():
    for n in range(1, 7):
        for d in (3, 4):
            val, nxt = regular(d)
            assert visual_total(val, "x", n, nxt) == 1
        val, nxt = biregular(3, 4)
        for root in ("b", "w"):
            assert visual_total(val, root, n, nxt) == 1


def test_measure_uniform_feasible():
    rep = measure_feasibility([SIGMA], 2)
    assert rep.feasible and rep.weights == [Fraction(1, 4)] * 4 and rep.recheck()
    rep = measure_feasibility([PrefixMap.identity(S22)], 2)
    assert rep.feasible and rep.recheck()


def test_measure_thompson_v_infeasible():
    rep = measure_feasibility(thompson_v_gens(), 4)
    assert not rep.feasible and rep.recheck()
    y = rep.farkas
    for j in range(len(rep.cylinders)):
        assert sum(y[i] * rep.matrix[i][j] for i in range(len(y))) >= 0
    assert sum(yi * bi for yi, bi in zip(y, rep.rhs)) < 0


def test_measure_free_group_infeasible():
    rep = measure_feasibility(free_group_boundary_gens(2), 3)
    assert not rep.feasible and rep.recheck()


def test_measure_depth_too_small():
    with pytest.raises(PreconditionError):
        measure_feasibility(thompson_v_gens(), 2)


def test_minimality_search():
    gens = thompson_v_gens()
    rep = minimality_search(gens, 2, 6)
    assert rep.complete and len(rep.witnesses) == 16
    for (u, v), word in rep.witnesses.items():
        img = word_element(gens, word).apply_clopen(ClopenSet(S22, [u]))
        assert not img.isdisjoint(ClopenSet(S22, [v]))
    rep = minimality_search([PrefixMap.identity(S22)], 2, 6)
    assert len(rep.missing) == 12
    assert all(u != v for u, v in rep.missing)


def test_halftree_shrink():
    gens = thompson_v_gens()
    word = halftree_shrink_search(gens, (0,), 4)
    assert word is not None
    assert word_element(gens, word).apply_clopen(ClopenSet(S22, [(0,)])) < ClopenSet(S22, [(0,)])
    for L in range(1, 7):
        for u in [(0,), (1,), (0, 1)]:
            assert halftree_shrink_search([SIGMA], u, L) is None


BW = ColoredGraph({("black", "white"): 3, ("white", "black"): 4})


def test_tits_ball_biregular():
    ball = tits_ball_build(BW, "black", 2)
    assert len(ball) == 1 + 3 + 3 * (4 - 1) == 13
    assert len(tits_ball_build(BW, "black", 0)) == 1
    assert ball.quotient_edges() == set(BW.c)
    assert ball.valency == {"black": 3, "white": 4}
    assert ball.cantor_flag and ball.ep_flag


def test_tits_ball_child_counts():
    G = ColoredGraph({("a", "a"): 2, ("a", "b"): 1, ("b", "a"): 3})
    ball = tits_ball_build(G, "a", 4)
    for v in range(len(ball)):
        if ball.depths[v] == 4:
            continue
        kids = [w for w, p in enumerate(ball.parents) if p == v]
        x = ball.classes[v]
        pcls = ball.classes[ball.parents[v]] if ball.parents[v] is not None else None
        for y in G.neighbors(x):
            want = G.c[(x, y)] - (1 if y == pcls else 0)
            assert sum(1 for w in kids if ball.classes[w] == y) == want
    assert not ball.ep_flag  # c(a, b) = 1


def test_colored_graph_text():
    text = "# bi-regular\nc black white 3\nc white black 4\n"
    G = ColoredGraph.parse(text)
    assert G.c == BW.c
    assert ColoredGraph.parse(G.to_text()).c == G.c
    with pytest.raises(ParseError):
        ColoredGraph.parse("c black white three\nc white black 4\n")
    with pytest.raises(PreconditionError):
        ColoredGraph.parse("c a b 1\n")  # missing reverse edge
    with pytest.raises(PreconditionError):
        ColoredGraph({("a", "b"): 1, ("b", "a"): 1, ("c", "d"): 1, ("d", "c"): 1})
    with pytest.raises(PreconditionError):
        ColoredGraph({("a", "b"): 0, ("b", "a"): 1})


def test_free_group_generator_table():
    gens = free_group_boundary_gens(2)
    a = gens[0]  # letters: 0 = a, 1 = a^-1, 2 = b, 3 = b^-1

    def enc(*letters):
        return fg_encode(list(letters), 2)

    table = dict(a.pairs)
    assert table[enc(2)] == enc(0, 2)
    assert table[enc(0)] == enc(0, 0)
    assert table[enc(3)] == enc(0, 3)
    for x in (1, 2, 3):  # a^-1 x -> x, for every x that may follow a^-1
        assert table[enc(1, x)] == enc(x)
    for g in range(0, 4, 2):
        assert (gens[g] * gens[g + 1]).is_identity()
    with pytest.raises(PreconditionError):
        free_group_boundary_gens(1)


def test_free_group_encoding_round_trip():
    for letters in itertools.product(range(4), repeat=3):
        if any(letters[i] ^ 1 == letters[i + 1] for i in range(2)):
            continue
        assert fg_decode(fg_encode(list(letters), 2), 2) == list(letters)


def test_free_group_small_words_nontrivial():
    gens = free_group_boundary_gens(2)
    count = 0
    for n in range(1, 5):
        for letters in itertools.product(range(4), repeat=n):
            if any(letters[i] ^ 1 == letters[i + 1] for i in range(n - 1)):
                continue
            assert not word_element(gens, [(x, 1) for x in letters]).is_identity()
            count += 1
    assert count == 4 + 12 + 36 + 108
