"""Stability conditions, twist selection, and theta chamber structure.

The banana oracles are worked out by hand. For A = (0, (1, -1)) and a
condition with positive weight on the markingless side, the untwisted
multidegree (1, -1) fails the subset inequality on that side, and the
two candidates (kink on either edge, multidegree (-1, 0)) have kink
position t equal to the opposite edge length; the cycle cone splits
along the diagonal. For A = (0, (2, -2)) the same bookkeeping gives
four chambers with walls at x1/x0 in {1/2, 1, 2}.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logtaut.abeljacobi import (
    AJDatum,
    NonGenericError,
    StabilityCondition,
    is_generic,
    perturbed_condition,
    quasi_stable_model,
    stable_twist,
    theta_subdivision,
    vertical_degrees,
)
from logtaut.graphs import stable_graphs

F = Fraction


def find_graph(g, n, nv, ne, loops=0):
    out = [
        G
        for G in stable_graphs(g, n)
        if G.n_vertices == nv
        and G.n_edges == ne
        and sum(G.loops_at(v) for v in range(nv)) == loops
    ]
    assert len(out) == 1
    return out[0]


# the five strata of genus 1 with two markings
TRIV = find_graph(1, 2, 1, 0)
SEP = find_graph(1, 2, 2, 1)
LOOP = find_graph(1, 2, 1, 1, loops=1)
BANANA = find_graph(1, 2, 2, 2)
TADPOLE = find_graph(1, 2, 2, 2, loops=1)

# markingless banana vertex carries theta = +6/25: the untwisted
# bundle is unstable there and the cycle cone must split
THETA_SPLIT = perturbed_condition(1, 2, 0, (F(-7, 25), F(1, 5)), F(1, 25))
# opposite sign: untwisted multidegree stays stable on the whole cone
THETA_PLAIN = perturbed_condition(1, 2, 0, (F(7, 25), F(-1, 5)), F(-1, 25))

A_UNIT = AJDatum(0, (1, -1))
A_TWO = AJDatum(0, (2, -2))
A_ZERO = AJDatum(0, (0, 0))


def mark0_vertex(graph):
    return graph.legs[0]


def test_ajdatum_degree():
    assert A_UNIT.degree(1) == 0
    assert AJDatum(1, (3,)).degree(2) == 2 * (2 * 2 - 2) // 2 + 3
    assert AJDatum(2, (0, 0)).degree(1) == 0
    with pytest.raises(ValueError):
        AJDatum(0, (1, F(1, 2)))


def test_vertical_degrees():
    # entry names the markingless genus-one side of the separating graph
    side = SEP.genera.index(1)
    D = ((SEP, side, 1),)

    A = AJDatum(0, (1, -1), D)
    deg = vertical_degrees(SEP, A.D)
    assert deg[side] == -1 and sum(deg) == 0
    # contracting either banana edge gives the irreducible one-edge
    # graph, never the separating one
    assert vertical_degrees(BANANA, A.D) == (0, 0)
    # the tadpole contracts onto SEP by collapsing its loop
    tad = vertical_degrees(TADPOLE, A.D)
    assert sorted(tad) == [-1, 1] and sum(tad) == 0
    assert vertical_degrees(TRIV, A.D) == (0,)

    sym = find_graph(2, 0, 2, 1)
    with pytest.raises(ValueError):
        vertical_degrees(sym, ((sym, 0, 1),))


def test_stability_condition_validate():
    assert THETA_SPLIT.d == 0
    assert THETA_SPLIT.values[BANANA][mark0_vertex(BANANA)] == F(-6, 25)

    bad = dict(THETA_SPLIT.values)
    vals = list(bad[BANANA])
    vals[0] += 1
    bad[BANANA] = tuple(vals)
    with pytest.raises(ValueError):
        StabilityCondition(1, 2, 0, bad)

    # break contraction compatibility while keeping totals: collapsing
    # the tadpole loop pins its vertex values to the separating graph
    bad = dict(THETA_SPLIT.values)
    vals = list(bad[TADPOLE])
    bad[TADPOLE] = (vals[0] + F(1, 7), vals[1] - F(1, 7))
    with pytest.raises(ValueError):
        StabilityCondition(1, 2, 0, bad)

    with pytest.raises(ValueError):
        StabilityCondition(1, 2, 0, {BANANA: THETA_SPLIT.values[BANANA]})


def test_is_generic_witness():
    zero = perturbed_condition(1, 2, 0, (0, 0), 0)
    ok, witness = is_generic(zero)
    assert not ok
    # deg(W) = theta(W) - delta(W)/2 is integral exactly on the cycle
    # graph subset {markingless vertex}
    assert witness[0] == BANANA
    assert witness[1] == (1 - mark0_vertex(BANANA),)

    third = perturbed_condition(1, 2, 0, (F(-1, 3), F(1, 3)), 0)
    assert is_generic(third) == (True, None)
    assert is_generic(THETA_SPLIT) == (True, None)
    assert is_generic(THETA_PLAIN) == (True, None)


def test_small_generic():
    for seed in (0, 1, 5):
        theta = StabilityCondition.small_generic(1, 2, seed=seed)
        assert is_generic(theta)[0]
    theta = StabilityCondition.small_generic(2, 1, seed=0)
    assert is_generic(theta)[0]
    assert StabilityCondition.small_generic(1, 1).d == 0
    with pytest.raises(NonGenericError):
        StabilityCondition.small_generic(2, 0)


def test_stable_twist_banana_split():
    x = (F(3), F(1))
    tw = stable_twist(BANANA, x, A_UNIT, THETA_SPLIT)
    assert len(tw.kinks) == 1
    k = tw.kinks[0]
    # kink sits on the long edge, at distance = short edge length
    assert tw.positions[0] == x[1 - k]
    assert 0 < tw.positions[0] < x[k]
    u = mark0_vertex(BANANA)
    assert tw.degrees[u] == -1 and tw.degrees[1 - u] == 0

    tw2 = stable_twist(BANANA, (F(1), F(3)), A_UNIT, THETA_SPLIT)
    assert tw2.kinks == (1 - k,)

    # the diagonal is a wall
    with pytest.raises(ValueError):
        stable_twist(BANANA, (F(1), F(1)), A_UNIT, THETA_SPLIT)

    # opposite condition: no modification anywhere
    tw3 = stable_twist(BANANA, x, A_UNIT, THETA_PLAIN)
    assert tw3.kinks == () and tw3.positions == ()
    assert tw3.degrees[u] == 1 and tw3.degrees[1 - u] == -1
    assert tw3.slopes == (0, 0)


def test_stable_twist_trees_and_loops():
    tw = stable_twist(SEP, (F(5),), A_ZERO, THETA_SPLIT)
    assert tw.kinks == () and tw.slopes == (0,) and tw.degrees == (0, 0)
    tw = stable_twist(SEP, (F(5),), A_UNIT, THETA_SPLIT)
    assert tw.kinks == () and tw.slopes == (0,)
    tw = stable_twist(LOOP, (F(2),), A_UNIT, THETA_SPLIT)
    assert tw.kinks == () and tw.slopes == (0,) and tw.degrees == (0,)
    with pytest.raises(ValueError):
        stable_twist(BANANA, (F(1), F(0)), A_UNIT, THETA_SPLIT)


def test_theta_subdivision_unit():
    subdiv, twists = theta_subdivision(1, 2, A_UNIT, THETA_SPLIT)
    counts = {G: len(subdiv.cones[G]) for G in subdiv.graphs()}
    assert counts == {TRIV: 1, SEP: 1, LOOP: 1, BANANA: 2, TADPOLE: 1}
    assert set(subdiv.cones[BANANA]) == {
        ((0, 1), (1, 1)),
        ((1, 0), (1, 1)),
    }
    for cone in subdiv.cones[BANANA]:
        tw = twists[(BANANA, cone)]
        (k,) = tw.kinks
        unit = tuple(1 if j == k else 0 for j in range(2))
        assert unit in cone and (1, 1) in cone
        # position form: t equals the short edge coordinate
        other = tuple(1 if j == 1 - k else 0 for j in range(2))
        assert tw.positions == (other,)
    # unsubdivided graphs carry the trivial twist
    assert twists[(SEP, subdiv.cones[SEP][0])].kinks == ()
    assert twists[(TRIV, ())].degrees == (0,)

    plain, _ = theta_subdivision(1, 2, A_UNIT, THETA_PLAIN)
    assert all(len(plain.cones[G]) == 1 for G in plain.graphs())


def test_theta_subdivision_two():
    subdiv, twists = theta_subdivision(1, 2, A_TWO, THETA_SPLIT)
    assert len(subdiv.cones[BANANA]) == 4
    rays = subdiv.rays_of(BANANA)
    assert set(rays) == {(0, 1), (1, 2), (1, 1), (2, 1), (1, 0)}
    forms = {twists[(BANANA, c)].positions[0] for c in subdiv.cones[BANANA]}
    assert forms == {(0, 2), (-1, 1), (1, -1), (2, 0)}
    for G in (TRIV, SEP, LOOP, TADPOLE):
        assert len(subdiv.cones[G]) == 1


def test_theta_subdivision_rejects_nongeneric():
    zero = perturbed_condition(1, 2, 0, (0, 0), 0)
    with pytest.raises(NonGenericError):
        theta_subdivision(1, 2, A_UNIT, zero)
    with pytest.raises(NonGenericError):
        stable_twist(BANANA, (F(3), F(1)), A_UNIT, zero)


def test_quasi_stable_model():
    tw = stable_twist(BANANA, (F(3), F(1)), A_UNIT, THETA_SPLIT)
    qs, deg = quasi_stable_model(BANANA, tw)
    assert qs.is_quasistable() and not qs.is_stable()
    assert qs.n_vertices == 3 and qs.n_edges == 3
    assert sorted(deg) == [-1, 0, 1] and sum(deg) == 0
    ex = qs.exceptional_vertices()
    assert len(ex) == 1 and deg[ex[0]] == 1

    tw = stable_twist(SEP, (F(2),), A_UNIT, THETA_SPLIT)
    qs, deg = quasi_stable_model(SEP, tw)
    assert qs == SEP and tuple(deg) == tw.degrees


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 25), st.integers(1, 25))
def test_twist_cycle_closure(p, q):
    # around the banana cycle the total alpha drop must vanish
    if p == q or p == 2 * q or q == 2 * p:
        return
    x = (F(p), F(q))
    tw = stable_twist(BANANA, x, A_TWO, THETA_SPLIT)
    (k,) = tw.kinks
    drop = [tw.slopes[j] * x[j] for j in range(2)]
    drop[k] += tw.positions[0]
    assert drop[0] == drop[1]
    assert 0 < tw.positions[0] < x[k]
    assert sum(tw.degrees) == -1
