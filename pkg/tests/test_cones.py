from fractions import Fraction

import pytest

from logtaut.cones import (
    PPFunction,
    Subdivision,
    courant,
    pp_push,
    pp_to_taut,
    stratum_indicator,
)
from logtaut.graphs import StableGraph, trivial_graph
from logtaut.taut import TautExpr, numerically_equal

LOOP12 = StableGraph((0,), (0, 0), [(0, 0)]).canonical()
BANANA12 = StableGraph((0, 0), (0, 1), [(0, 1), (0, 1)]).canonical()
TADPOLE = StableGraph((0, 0), (1, 1), [(0, 0), (0, 1)])
THETA = StableGraph((0, 0), (), [(0, 1), (0, 1), (0, 1)]).canonical()

DIAG = (1, 1)


def delta(g, n, graph):
    return TautExpr.stratum_class(g, n, graph)


def test_trivial_subdivisions_validate():
    for g, n in [(0, 4), (1, 1), (1, 2), (2, 0)]:
        Subdivision.trivial(g, n).validate()


def test_star_at_banana_diagonal():
    sub = Subdivision.trivial(1, 2)
    star = sub.star(BANANA12, DIAG)
    star.validate()
    assert set(star.cones[BANANA12]) == {
        ((0, 1), (1, 1)),
        ((1, 0), (1, 1)),
    }
    # nothing else in (1,2) has a banana face
    assert star.cones[LOOP12] == sub.cones[LOOP12]
    assert star.cones[TADPOLE.canonical()] == sub.cones[TADPOLE.canonical()]


def test_validator_rejects_defects():
    sub = Subdivision.trivial(1, 2)
    # a gap: only half the banana orthant
    broken = dict(sub.cones)
    broken[BANANA12] = (((1, 0), (1, 1)),)
    with pytest.raises(ValueError):
        Subdivision(1, 2, broken).validate()
    # an overlap: the full orthant plus one half
    broken[BANANA12] = (((1, 0), (0, 1)), ((1, 0), (1, 1)))
    with pytest.raises(ValueError):
        Subdivision(1, 2, broken).validate()
    # asymmetric: star at a ray off the diagonal
    broken[BANANA12] = (((1, 0), (2, 1)), ((2, 1), (0, 1)))
    with pytest.raises(ValueError):
        Subdivision(1, 2, broken).validate()


def test_courant_on_star_subdivision():
    star = Subdivision.trivial(1, 2).star(BANANA12, DIAG)
    phi = courant(star, BANANA12, DIAG)
    phi.validate()
    assert phi.value_at(BANANA12, (2, 3)) == 2
    assert phi.value_at(BANANA12, (3, 1)) == 1
    assert phi.value_at(BANANA12, (5, 5)) == 5
    assert phi.value_at(LOOP12, (5,)) == 0
    assert phi.value_at(trivial_graph(1, 2), ()) == 0


def test_courant_requires_an_actual_ray():
    sub = Subdivision.trivial(1, 2)
    with pytest.raises(ValueError):
        courant(sub, BANANA12, DIAG)


def test_boundary_divisor_from_courant():
    sub = Subdivision.trivial(1, 2)
    phi = courant(sub, LOOP12, (1,))
    phi.validate()
    # both banana branches map onto the loop
    assert phi.value_at(BANANA12, (2, 3)) == 5
    assert phi.value_at(TADPOLE, (7, 3)) == 7
    assert phi.value_at(LOOP12, (4,)) == 4
    assert pp_to_taut(phi) == delta(1, 2, LOOP12)
    # squaring commutes with taking classes here
    d = delta(1, 2, LOOP12)
    assert pp_to_taut(phi * phi) == d * d


def test_stratum_indicators():
    sub = Subdivision.trivial(1, 2)
    assert stratum_indicator(sub, LOOP12) == courant(sub, LOOP12, (1,))
    for graph in [BANANA12, TADPOLE.canonical()]:
        ind = stratum_indicator(sub, graph)
        ind.validate()
        assert pp_push(ind) == delta(1, 2, graph)
    assert pp_push(stratum_indicator(sub, trivial_graph(1, 2))) == TautExpr.one(
        1, 2
    )


def test_pp_push_on_banana_blowup():
    star = Subdivision.trivial(1, 2).star(BANANA12, DIAG)
    phi = courant(star, BANANA12, DIAG)
    assert pp_push(phi) == TautExpr.zero(1, 2)
    assert pp_push(phi * phi) == delta(1, 2, BANANA12).scale(-1)
    assert pp_push(PPFunction.const(star, 1)) == TautExpr.one(1, 2)
    # chamber indicators carry their whole Aut orbit: the banana swap
    # exchanges the two chambers, so the push sees both
    half = stratum_indicator(star, BANANA12, (((1, 0), (1, 1))))
    assert pp_push(half) == TautExpr.push(1, 2, BANANA12)
    # the subdivided face is no longer a face, so its indicator dies
    assert pp_push(stratum_indicator(star, BANANA12)) == TautExpr.zero(1, 2)


def test_pullback_is_a_section_of_push():
    sub = Subdivision.trivial(1, 2)
    star = sub.star(BANANA12, DIAG)
    phi = courant(sub, LOOP12, (1,))
    lifted = phi.pullback(star)
    lifted.validate()
    assert pp_push(lifted) == pp_push(phi)
    assert lifted * lifted == (phi * phi).pullback(star)
    assert pp_push(lifted * lifted) == pp_push(phi * phi)


def test_theta_subdivision_in_genus_two():
    sub = Subdivision.trivial(2, 0)
    star = sub.star(THETA, (1, 1, 1))
    star.validate()
    assert len(star.cones[THETA]) == 3
    phi = courant(star, THETA, (1, 1, 1))
    phi.validate()
    assert pp_push(PPFunction.const(star, 1)) == TautExpr.one(2, 0)
    assert pp_push(phi) == TautExpr.zero(2, 0)
    assert pp_push(phi * phi) == TautExpr.zero(2, 0)
    # Lagrange: sum of x_i^2 over the dual products collapses to 1
    assert pp_push(phi**3) == delta(2, 0, THETA)


def test_pp_ring_ops():
    sub = Subdivision.trivial(1, 2)
    one = PPFunction.const(sub, 1)
    phi = courant(sub, LOOP12, (1,))
    assert one * phi == phi
    assert phi - phi == PPFunction.const(sub, 0)
    assert (phi + phi).scale(Fraction(1, 2)) == phi
    assert phi**2 == phi * phi
    assert numerically_equal(
        pp_to_taut(phi**2), delta(1, 2, LOOP12) ** 2
    )
