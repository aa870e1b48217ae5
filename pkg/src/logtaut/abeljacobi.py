"""Resolving the universal Abel-Jacobi section over the boundary.

The bundle omega^k(sum_i a_i x_i)(D) on the universal curve extends
over a boundary stratum only after a quasi-stable modification:
bubbles at some nodes, recorded as a piecewise linear kink datum on
the tropical fiber. A stability condition theta selects one
modification per tropical direction, and directions sharing a
modification cut each graph cone into polyhedral chambers. This
module enumerates the chambers, the kink data on each, and a
simplicial refinement of the resulting tiling, all in exact
arithmetic.

Conventions. Edge j runs from its half 2j (tail) to 2j+1 (head) and a
slope is the rate of increase of the kink function alpha in that
direction. A kinked edge carries slope sigma_e + 1 on the tail
segment and sigma_e past the kink, which sits at distance t_e from
the tail; a bubble always has degree one. Subset inequalities
deg(W) >= theta(W) - delta(W)/2 are strict unless marking 1 lies on
W (section tie-break); with no markings every inequality is strict.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .cones import Subdivision
from .graphs import StableGraph, stable_graphs
from .linalg import nullspace, primitive, rank, rref, strict_feasible


class NonGenericError(ValueError):
    """The stability condition sits on a wall; witness, when present,
    is a (graph, data) pair locating the degeneracy."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class AJDatum:
    """Relative bundle data omega^k(sum_i a_i x_i)(D).

    D lists vertical divisors as (one-edge canonical graph, side
    vertex, multiplicity) triples. Sides swapped by an automorphism
    would be ill-defined and are rejected on use.
    """

    k: int
    a: tuple
    D: tuple = ()

    def __post_init__(self):
        if any(x != int(x) for x in self.a):
            raise ValueError("marking twists must be integers")
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "D", tuple(self.D))

    @property
    def n(self) -> int:
        return len(self.a)

    def degree(self, g: int) -> int:
        # vertical divisors miss the generic fiber
        return self.k * (2 * g - 2) + sum(self.a)


def vertical_degrees(graph: StableGraph, D) -> tuple:
    """Fiberwise multidegree of the vertical divisor list D over the
    interior of the graph's stratum.

    A divisor (gamma, side, m) meets the fiber along edges whose
    complement contracts onto gamma. Such an edge crosses the side
    partition and contributes -m at its endpoint on the named side
    and +m opposite, the degree pattern of a component's conormal
    directions; edges surviving as loops of gamma never cross.
    """
    out = [0] * graph.n_vertices
    for gamma, side, mult in D:
        if gamma.n_edges != 1:
            raise ValueError("vertical divisors live on one-edge graphs")
        if not 0 <= side < gamma.n_vertices:
            raise ValueError("side vertex out of range")
        if any(vp[side] != side for vp in gamma.vertex_automorphisms()):
            raise ValueError("side is only defined up to automorphism")
        for j in range(graph.n_edges):
            rest = frozenset(range(graph.n_edges)) - {j}
            canon, vmap, _, _ = graph.contract(rest)
            if canon != gamma:
                continue
            a, b = graph.edges[j]
            ina, inb = vmap[a] == side, vmap[b] == side
            if ina != inb:
                out[a if ina else b] -= mult
                out[b if ina else a] += mult
    return tuple(out)


def _base_degrees(graph: StableGraph, A: AJDatum) -> tuple:
    """Untwisted fiber multidegree of the bundle on the stratum."""
    vert = vertical_degrees(graph, A.D) if A.D else (0,) * graph.n_vertices
    out = []
    for v in range(graph.n_vertices):
        d = A.k * (2 * graph.genera[v] - 2 + len(graph.halves_at(v)))
        d += sum(A.a[i] for i in graph.marks_at(v)) + vert[v]
        out.append(d)
    return tuple(out)


class StabilityCondition:
    """Vertex weights per canonical stable graph, summing to d on
    each graph, automorphism invariant and additive under edge
    contraction."""

    __slots__ = ("g", "n", "d", "values")

    def __init__(self, g: int, n: int, d: int, values: dict):
        self.g = int(g)
        self.n = int(n)
        self.d = int(d)
        vals = {}
        for graph in stable_graphs(g, n):
            if graph not in values:
                raise ValueError("missing weights on a stable graph")
            row = tuple(Fraction(x) for x in values[graph])
            if len(row) != graph.n_vertices:
                raise ValueError("weight count does not match vertex count")
            vals[graph] = row
        self.values = vals
        self._validate()

    def _validate(self):
        for graph, row in self.values.items():
            if sum(row) != self.d:
                raise ValueError("weights must sum to the total degree")
            for vperm in graph.vertex_automorphisms():
                if any(row[vperm[v]] != row[v] for v in range(graph.n_vertices)):
                    raise ValueError("weights must be automorphism invariant")
            for j in range(graph.n_edges):
                canon, vmap, _, _ = graph.contract({j})
                pushed = [Fraction(0)] * canon.n_vertices
                for v in range(graph.n_vertices):
                    pushed[vmap[v]] += row[v]
                if tuple(pushed) != self.values[canon]:
                    raise ValueError("weights must push forward under contraction")

    def theta(self, graph: StableGraph, subset) -> Fraction:
        vals = self.values[graph]
        return sum((vals[v] for v in subset), Fraction(0))

    @classmethod
    def small_generic(cls, g: int, n: int, d: int = 0, seed: int = 0):
        """Seeded small perturbation, retried until generic."""
        if n == 0:
            raise NonGenericError("generic conditions need a marking")
        rng = random.Random(seed)
        for _ in range(64):
            q = rng.choice((97, 101, 103, 107, 109, 113))
            scale = 8 * (4 * g + n + 2) * q
            eps = [
                Fraction(rng.randrange(1, q) * rng.choice((-1, 1)), scale)
                for _ in range(n)
            ]
            beta = Fraction(rng.randrange(1, q) * rng.choice((-1, 1)), scale)
            eps[0] += d - sum(eps) - beta * (2 * g - 2 + n)
            theta = perturbed_condition(g, n, d, eps, beta)
            if is_generic(theta)[0]:
                return theta
        raise NonGenericError("no generic perturbation found", (g, n, d))


def perturbed_condition(g: int, n: int, d: int, eps, beta) -> StabilityCondition:
    """theta(v) = sum of eps over the legs at v plus beta times the
    canonical vertex degree 2 g_v - 2 + val(v).

    Both parts are additive under edge contraction, so the assignment
    is automatically compatible."""
    eps = [Fraction(x) for x in eps]
    beta = Fraction(beta)
    if len(eps) != n:
        raise ValueError("one epsilon per marking")
    if sum(eps) + beta * (2 * g - 2 + n) != d:
        raise ValueError("weights do not sum to the requested degree")
    values = {}
    for graph in stable_graphs(g, n):
        row = []
        for v in range(graph.n_vertices):
            t = beta * (2 * graph.genera[v] - 2 + graph.valence(v))
            t += sum((eps[i] for i in graph.marks_at(v)), Fraction(0))
            row.append(t)
        values[graph] = tuple(row)
    return StabilityCondition(g, n, d, values)


def is_generic(theta: StabilityCondition):
    """Wall test: (ok, witness).

    theta is on a wall when some integer multidegree can meet a subset
    bound with equality, i.e. theta(W) - delta(W)/2 is an integer for
    a proper subset W of some graph's vertices. Subsets carrying the
    first marking are exempt (their inequality is non-strict, and the
    complement is tested instead); bubbles never shift the parity of
    delta, so checking stable graphs suffices."""
    for graph in stable_graphs(theta.g, theta.n):
        vals = theta.values[graph]
        nv = graph.n_vertices
        mark_v = graph.legs[0] if theta.n else None
        for r in range(1, nv):
            for W in itertools.combinations(range(nv), r):
                if mark_v is not None and mark_v in W:
                    continue
                delta = sum(1 for a, b in graph.edges if (a in W) != (b in W))
                gap = sum((vals[v] for v in W), Fraction(0)) - Fraction(delta, 2)
                if gap.denominator == 1:
                    return False, (graph, W)
    return True, None


@dataclass(frozen=True)
class Twist:
    """A theta-stable quasi-stable modification over part of a cone.

    slopes holds the head-side slope of every edge; a kinked edge adds
    one on its tail side. positions has one entry per kink: a Fraction
    (from stable_twist, at a point) or a coefficient tuple over the
    edge coordinates (from theta_subdivision, on a chamber). degrees
    is the multidegree on the main vertices; bubbles carry one."""

    graph: StableGraph
    kinks: tuple
    slopes: tuple
    degrees: tuple
    positions: tuple


def _dot(row, x):
    return sum(Fraction(c) * Fraction(v) for c, v in zip(row, x))


def _is_stable(graphK, deg, theta, mark_v, n):
    nv = graphK.n_vertices
    edges = graphK.edges
    for r in range(1, nv):
        for W in itertools.combinations(range(nv), r):
            Wset = set(W)
            delta = sum(1 for a, b in edges if (a in Wset) != (b in Wset))
            lhs = (
                sum(deg[v] for v in W)
                - sum((theta[v] for v in W), Fraction(0))
                + Fraction(delta, 2)
            )
            if lhs < 0:
                return False
            if lhs == 0 and (n == 0 or mark_v not in Wset):
                return False
    return True


def _tree_data(graph: StableGraph):
    """BFS spanning tree: parent[v] = (edge, parent vertex)."""
    parent = {0: None}
    order = [0]
    frontier = [0]
    tree = set()
    while frontier:
        v = frontier.pop(0)
        for j, (a, b) in enumerate(graph.edges):
            if a == b:
                continue
            for x, y in ((a, b), (b, a)):
                if x == v and y not in parent:
                    parent[y] = (j, v)
                    tree.add(j)
                    order.append(y)
                    frontier.append(y)
    assert len(order) == graph.n_vertices, "graph must be connected"
    return parent, order, tree


def _particular_flow(graph: StableGraph, target):
    """Integer slopes, zero off the tree, whose divergence (tail out
    minus head in) matches target; requires sum(target) == 0."""
    parent, order, _ = _tree_data(graph)
    sigma = [0] * graph.n_edges
    acc = list(target)
    for y in reversed(order[1:]):
        j, p = parent[y]
        a, _b = graph.edges[j]
        sigma[j] = acc[y] if a == y else -acc[y]
        acc[p] += acc[y]
    assert acc[order[0]] == 0, "divergence target must sum to zero"
    return sigma


def _cycles(graph: StableGraph):
    """Fundamental cycles as +-1 vectors over the edges; pairing any
    of them with the per-edge drops must give zero."""
    parent, _, tree = _tree_data(graph)

    def path(v):
        out = []
        while parent[v] is not None:
            j, p = parent[v]
            a, _b = graph.edges[j]
            out.append((j, 1 if a == v else -1))
            v = p
        return out

    cycles = []
    for j, (a, b) in enumerate(graph.edges):
        if j in tree:
            continue
        vec = [0] * graph.n_edges
        vec[j] += 1
        for e, s in path(b):
            vec[e] += s
        for e, s in path(a):
            vec[e] -= s
        cycles.append(tuple(vec))
    assert len(cycles) == graph.b1()
    return cycles


def _solve_positions(K, sigma, cycles, E):
    """Kink positions forced by single-valuedness around cycles, as
    linear forms in the edge lengths; None when the cycle equations
    only close on a thin locus of lengths."""
    kk = len(K)
    if not cycles:
        if kk:
            raise NonGenericError("kink positions are unconstrained")
        return []
    aug = []
    for c in cycles:
        aug.append(
            [Fraction(c[j]) for j in K]
            + [Fraction(-c[e] * sigma[e]) for e in range(E)]
        )
    red, pivots = rref(aug)
    if any(p >= kk for p in pivots):
        return None
    if len(pivots) < kk:
        # a stable twist with a free kink can only happen on a wall
        raise NonGenericError("kink positions are unconstrained")
    return [row[kk:] for row in red[:kk]]


def _chamber_rows(K, tmat, E):
    """Closed description of a chamber: coordinates, kink positions,
    and their complements, all nonnegative."""
    rows = [tuple(1 if e == f else 0 for e in range(E)) for f in range(E)]
    for i, j in enumerate(K):
        t = tuple(tmat[i])
        rows.append(t)
        rows.append(tuple((1 if e == j else 0) - t[e] for e in range(E)))
    return rows


def _chambers(graph: StableGraph, A: AJDatum, theta_vals, n: int):
    """All full-dimensional stability chambers of the graph's cone as
    (Twist with position forms, closed inequality rows) pairs."""
    E = graph.n_edges
    base = _base_degrees(graph, A)
    if E == 0:
        return [(Twist(graph, (), (), base, ()), [])]
    cycles = _cycles(graph)
    nv = graph.n_vertices
    mark_v = graph.legs[0] if n else None
    halves = [len(graph.halves_at(v)) for v in range(nv)]
    cap = 4 + sum(abs(x) for x in base) + sum(halves) + 2 * E
    total = sum(base)
    out = []
    for size in range(E + 1):
        for K in itertools.combinations(range(E), size):
            counts = [1 if j in K else 0 for j in range(E)]
            graphK, _, inserted = graph.subdivide_edges(counts)
            thetaK = list(theta_vals) + [Fraction(0)] * size
            windows = []
            for v in range(nv):
                lo = math.floor(theta_vals[v] - Fraction(halves[v], 2)) - 1
                hi = math.ceil(theta_vals[v] + Fraction(halves[v], 2)) + 1
                windows.append(range(lo, hi + 1))
            tails = [0] * nv
            for j in K:
                tails[graph.edges[j][0]] += 1
            for deg in itertools.product(*windows):
                if sum(deg) != total - size:
                    continue
                degK = list(deg) + [1] * size
                if not _is_stable(graphK, degK, thetaK, mark_v, n):
                    continue
                target = [base[v] - tails[v] - deg[v] for v in range(nv)]
                sigma0 = _particular_flow(graph, target)
                for m in itertools.product(
                    range(-cap, cap + 1), repeat=len(cycles)
                ):
                    sigma = [
                        sigma0[e] + sum(mi * c[e] for mi, c in zip(m, cycles))
                        for e in range(E)
                    ]
                    if any(abs(s) > cap for s in sigma):
                        continue
                    tmat = _solve_positions(K, sigma, cycles, E)
                    if tmat is None:
                        continue
                    rows = _chamber_rows(K, tmat, E)
                    if not strict_feasible(rows):
                        continue
                    if any(abs(s) >= cap - 1 for s in sigma):
                        raise RuntimeError("slope cap reached; raise the bound")
                    tw = Twist(
                        graph,
                        tuple(K),
                        tuple(sigma),
                        tuple(deg),
                        tuple(tuple(r) for r in tmat),
                    )
                    out.append((tw, rows))
    return out


def _require_match(A: AJDatum, theta: StabilityCondition):
    if A.n != theta.n:
        raise ValueError("marking count mismatch")
    if A.degree(theta.g) != theta.d:
        raise ValueError("bundle degree does not match the condition")


def stable_twist(graph: StableGraph, x, A: AJDatum, theta: StabilityCondition):
    """The unique theta-stable twist at an interior point of the
    graph's cone.

    Raises NonGenericError when theta is on a wall or the twist is
    ambiguous, ValueError on chamber walls and face points."""
    _require_match(A, theta)
    if graph not in theta.values:
        raise ValueError("graph is not a canonical stable graph here")
    x = tuple(Fraction(v) for v in x)
    if len(x) != graph.n_edges:
        raise ValueError("need one length per edge")
    if any(v <= 0 for v in x):
        raise ValueError("face point: evaluate on the contracted graph")
    ok, witness = is_generic(theta)
    if not ok:
        raise NonGenericError("stability condition lies on a wall", witness)
    hits = []
    boundary = False
    for tw, rows in _chambers(graph, A, theta.values[graph], theta.n):
        vals = [_dot(r, x) for r in rows]
        if all(v > 0 for v in vals):
            hits.append(tw)
        elif all(v >= 0 for v in vals):
            boundary = True
    if len(hits) > 1:
        raise NonGenericError("stable twist is not unique", (graph, x))
    if not hits:
        if boundary:
            raise ValueError("point lies on a chamber wall")
        raise RuntimeError("no stable twist at an interior point")
    tw = hits[0]
    positions = tuple(_dot(f, x) for f in tw.positions)
    return Twist(graph, tw.kinks, tw.slopes, tw.degrees, positions)


def _cone_rays(rows, E):
    """Extreme rays of the closed chamber cut out by rows >= 0."""
    if E == 1:
        return [(1,)]
    rowlist = [tuple(Fraction(x) for x in r) for r in rows]
    rays = set()
    for sub in itertools.combinations(range(len(rowlist)), E - 1):
        ns = nullspace([rowlist[i] for i in sub])
        if len(ns) != 1:
            continue
        v = ns[0]
        for cand in (v, [-y for y in v]):
            if all(_dot(r, cand) >= 0 for r in rowlist):
                rays.add(primitive(cand))
                break
    return sorted(rays)


def _triangulate(rays, rows):
    """Fan the cone from its ray barycenter, recursing on facets.

    The barycenter is fixed by any symmetry of the chamber, so the
    result is equivariant; simplicial cones pass through unchanged."""
    rays = sorted(set(tuple(r) for r in rays))
    d = rank(rays)
    if len(rays) == d:
        return [tuple(rays)]
    bary = primitive([sum(c) for c in zip(*rays)])
    out = set()
    for row in rows:
        tight = [r for r in rays if _dot(row, r) == 0]
        if len(tight) < d - 1 or rank(tight) != d - 1:
            continue
        for face in _triangulate(tight, rows):
            out.add(tuple(sorted(set(face) | {bary})))
    return sorted(out)


def _check_integral(tw: Twist, rays):
    for form in tw.positions:
        for r in rays:
            if _dot(form, r).denominator != 1:
                raise NotImplementedError(
                    "fractional kink position at a ray; orbifold models "
                    "are not supported"
                )


def theta_subdivision(g: int, n: int, A: AJDatum, theta: StabilityCondition):
    """Chamber decomposition of every graph cone, with the stable
    twist on each piece.

    Returns (Subdivision, twists) where twists maps (graph, cone) to
    the Twist holding on that cone; cone keys match the subdivision's.
    The tiling is validated, so a non-generic theta that slips past
    the wall test still fails loudly."""
    _require_match(A, theta)
    if (g, n) != (theta.g, theta.n):
        raise ValueError("condition built for different moduli")
    ok, witness = is_generic(theta)
    if not ok:
        raise NonGenericError("stability condition lies on a wall", witness)
    cones = {}
    twists = {}
    for graph in stable_graphs(g, n):
        chambers = _chambers(graph, A, theta.values[graph], n)
        if graph.n_edges == 0:
            cones[graph] = ((),)
            twists[(graph, ())] = chambers[0][0]
            continue
        pieces = {}
        for tw, rows in chambers:
            rays = _cone_rays(rows, graph.n_edges)
            if rank(rays) != graph.n_edges:
                raise RuntimeError("chamber ray extraction failed")
            _check_integral(tw, rays)
            for simplex in _triangulate(rays, rows):
                key = tuple(sorted(simplex))
                if key in pieces:
                    raise NonGenericError(
                        "two stable twists share a cone", (graph, key)
                    )
                pieces[key] = tw
        if not pieces:
            raise RuntimeError("no stable twist over a graph cone")
        cones[graph] = tuple(sorted(pieces))
        for key, tw in pieces.items():
            twists[(graph, key)] = tw
    subdiv = Subdivision(g, n, cones)
    try:
        subdiv.validate()
    except AssertionError as exc:
        raise NonGenericError(f"chambers do not tile: {exc}") from exc
    return subdiv, twists


def quasi_stable_model(graph: StableGraph, twist: Twist):
    """The bubbled graph of a twist and its full multidegree."""
    counts = [1 if j in twist.kinks else 0 for j in range(graph.n_edges)]
    qs, _, inserted = graph.subdivide_edges(counts)
    deg = list(twist.degrees) + [0] * (qs.n_vertices - graph.n_vertices)
    for j in twist.kinks:
        deg[inserted[j][0]] = 1
    assert qs.is_quasistable()
    return qs, tuple(deg)
