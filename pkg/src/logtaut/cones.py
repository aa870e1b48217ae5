"""Cone stacks, subdivisions, and piecewise polynomial functions.

Each stable graph contributes one orthant, with coordinates indexed by
its edges; contractions embed smaller orthants as coordinate faces.  A
Subdivision assigns every graph a simplicial fan tiling its orthant,
compatible across faces and under automorphisms.  Piecewise polynomials
on a subdivision form a ring; they push forward to tautological classes
through an exact localization sum over maximal cones.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from .graphs import StableGraph, stable_graphs
from .linalg import det, inverse, nullspace, primitive, strict_feasible
from .poly import Poly
from .taut import Decoration, TautExpr, half_autos

Ray = tuple[int, ...]
Cone = tuple[Ray, ...]

_EDGE_AUTOS: dict[StableGraph, tuple[tuple[int, ...], ...]] = {}


def edge_autos(graph: StableGraph) -> tuple[tuple[int, ...], ...]:
    """Distinct edge permutations induced by the automorphism group."""
    cached = _EDGE_AUTOS.get(graph)
    if cached is None:
        perms = {
            tuple(hperm[2 * j] // 2 for j in range(graph.n_edges))
            for _, hperm in half_autos(graph)
        }
        cached = tuple(sorted(perms))
        _EDGE_AUTOS[graph] = cached
    return cached


def _cone_key(rays) -> Cone:
    return tuple(sorted(tuple(int(x) for x in r) for r in rays))


def cone_index(cone: Cone) -> Fraction:
    """Lattice index of the sublattice spanned by the rays."""
    if not cone:
        return Fraction(1)
    return abs(det([[Fraction(x) for x in r] for r in cone]))


def cone_duals(cone: Cone) -> list[list[Fraction]]:
    """Covectors lam_i with lam_i(ray_j) = delta_ij, exact."""
    if not cone:
        return []
    minv = inverse([[Fraction(x) for x in r] for r in cone])
    k = len(cone)
    return [[minv[j][i] for j in range(k)] for i in range(k)]


def cone_contains(cone: Cone, point) -> bool:
    """Closed containment; the cone must be full-dimensional."""
    if not cone:
        return all(x == 0 for x in point)
    lams = cone_duals(cone)
    return all(
        sum(c * Fraction(x) for c, x in zip(lam, point)) >= 0 for lam in lams
    )


def _bary(cone: Cone):
    return tuple(sum(col) for col in zip(*cone))


def _prim_signed(vec):
    """Split a rational covector as scale * primitive with positive lead."""
    lead = next(x for x in vec if x != 0)
    w = primitive(vec if lead > 0 else [-x for x in vec])
    k = next(i for i, x in enumerate(vec) if x != 0)
    return Fraction(vec[k]) / w[k], tuple(w)


def _standard_cone(k: int) -> Cone:
    return tuple(tuple(1 if i == j else 0 for i in range(k)) for j in range(k))


def _apply_eperm(ray, eperm):
    out = [0] * len(ray)
    for j, x in enumerate(ray):
        out[eperm[j]] = x
    return tuple(out)


class Subdivision:
    """A simplicial fan per stable graph, tiling every orthant."""

    __slots__ = ("g", "n", "cones", "_hash")

    def __init__(self, g: int, n: int, cones: dict):
        self.g = g
        self.n = n
        fixed = {}
        for graph, cs in cones.items():
            assert graph == graph.canonical(), "graphs must be canonical"
            fixed[graph] = tuple(sorted(_cone_key(c) for c in cs))
        self.cones = fixed
        self._hash = hash((g, n, frozenset(fixed.items())))

    @classmethod
    def trivial(cls, g: int, n: int, max_edges=None) -> "Subdivision":
        cones = {
            graph: (_standard_cone(graph.n_edges),)
            for graph in stable_graphs(g, n, max_edges)
        }
        return cls(g, n, cones)

    def graphs(self):
        return sorted(self.cones)

    def __eq__(self, other):
        if not isinstance(other, Subdivision):
            return NotImplemented
        return (self.g, self.n, self.cones) == (other.g, other.n, other.cones)

    def __hash__(self):
        return self._hash

    def rays_of(self, graph):
        out = set()
        for cone in self.cones[graph]:
            out.update(cone)
        return sorted(out)

    # -- validation ---------------------------------------------------------

    def validate(self):
        """Raise ValueError on any structural defect."""
        for graph in self.graphs():
            self._validate_graph(graph)
            self._validate_faces(graph)

    def _validate_graph(self, graph):
        ne = graph.n_edges
        cones = self.cones[graph]
        if ne == 0:
            if cones != ((),):
                raise ValueError("zero-dimensional orthant must carry ()")
            return
        for cone in cones:
            if len(cone) != ne:
                raise ValueError(f"non-maximal cone on {graph!r}")
            for ray in cone:
                if len(ray) != ne or min(ray) < 0 or max(ray) <= 0:
                    raise ValueError(f"bad ray {ray} on {graph!r}")
                if tuple(primitive(ray)) != ray:
                    raise ValueError(f"ray {ray} is not primitive")
            if cone_index(cone) == 0:
                raise ValueError(f"degenerate cone on {graph!r}")
        for eperm in edge_autos(graph):
            mapped = {
                _cone_key(_apply_eperm(r, eperm) for r in cone) for cone in cones
            }
            if mapped != set(cones):
                raise ValueError(f"subdivision of {graph!r} not Aut-invariant")
        for c1, c2 in itertools.combinations(cones, 2):
            ineqs = [list(lam) for lam in cone_duals(c1)]
            ineqs += [list(lam) for lam in cone_duals(c2)]
            if strict_feasible(ineqs):
                raise ValueError(f"overlapping cones on {graph!r}")
        facets: dict = {}
        for cone in cones:
            for i in range(ne):
                facet = frozenset(cone[:i] + cone[i + 1 :])
                facets[facet] = facets.get(facet, 0) + 1
        for facet, count in facets.items():
            on_boundary = any(
                all(r[e] == 0 for r in facet) for e in range(ne)
            )
            if count != (1 if on_boundary else 2):
                raise ValueError(f"facet mismatch on {graph!r}")
        for point in _sample_points(ne):
            if not any(cone_contains(c, point) for c in cones):
                raise ValueError(f"point {point} not covered on {graph!r}")

    def _validate_faces(self, graph):
        ne = graph.n_edges
        for size in range(1, ne):
            for sub in itertools.combinations(range(ne), size):
                small, _, emap, _ = graph.contract(sub)
                induced = set()
                for cone in self.cones[graph]:
                    in_face = [
                        r for r in cone if all(r[e] == 0 for e in sub)
                    ]
                    if len(in_face) != ne - size:
                        continue
                    pulled = []
                    for r in in_face:
                        vec = [0] * small.n_edges
                        for e in range(ne):
                            if emap[e] is not None:
                                vec[emap[e]] = r[e]
                        pulled.append(vec)
                    induced.add(_cone_key(pulled))
                if induced != set(self.cones[small]):
                    raise ValueError(
                        f"face {sub} of {graph!r} disagrees with {small!r}"
                    )

    # -- refinement ---------------------------------------------------------

    def star(self, graph, ray) -> "Subdivision":
        """Stellar subdivision at a ray, propagated over the whole stack."""
        graph = graph.canonical()
        ray = tuple(primitive(ray))
        out = {}
        for big in self.graphs():
            cones = self.cones[big]
            for r in sorted(_embedded_rays(graph, ray, big)):
                cones = _stellar(cones, r)
            out[big] = cones
        return Subdivision(self.g, self.n, out)


def _sample_points(k: int):
    for t in range(3):
        yield tuple(
            Fraction(97 + 31 * (t + 1) * (e + 2) + (e + 2) ** 3, 89)
            for e in range(k)
        )


def _embedded_rays(graph, ray, big) -> set:
    """Images of a ray of graph's orthant inside big's orthant.

    One image per contraction of big onto graph and per identification,
    so the result is closed under Aut(big).
    """
    orbit = {_apply_eperm(ray, ep) for ep in edge_autos(graph)}
    out = set()
    ne = big.n_edges
    drop = ne - graph.n_edges
    if drop < 0:
        return out
    for sub in itertools.combinations(range(ne), drop):
        small, _, emap, _ = big.contract(sub)
        if small != graph:
            continue
        for rho in orbit:
            vec = [0] * ne
            for e in range(ne):
                if emap[e] is not None:
                    vec[e] = rho[emap[e]]
            out.add(tuple(vec))
    return out


def _stellar(cones, ray):
    out = []
    for cone in cones:
        if ray in cone or not cone_contains(cone, ray):
            out.append(cone)
            continue
        lams = cone_duals(cone)
        coeffs = [
            sum(c * x for c, x in zip(lam, ray)) for lam in lams
        ]
        for i, c in enumerate(coeffs):
            if c > 0:
                rays = cone[:i] + cone[i + 1 :] + (ray,)
                out.append(_cone_key(rays))
    return tuple(sorted(out))


class PPFunction:
    """Piecewise polynomial on a subdivision, exact coefficients."""

    __slots__ = ("subdiv", "polys")

    def __init__(self, subdiv: Subdivision, polys: dict):
        self.subdiv = subdiv
        fixed = {}
        for graph in subdiv.graphs():
            ps = polys[graph]
            assert len(ps) == len(subdiv.cones[graph])
            assert all(p.n == graph.n_edges for p in ps)
            fixed[graph] = tuple(ps)
        self.polys = fixed

    @classmethod
    def const(cls, subdiv: Subdivision, value) -> "PPFunction":
        value = Fraction(value)
        polys = {
            graph: tuple(
                Poly.const(graph.n_edges, value) for _ in subdiv.cones[graph]
            )
            for graph in subdiv.graphs()
        }
        return cls(subdiv, polys)

    def _zip(self, other, op):
        assert isinstance(other, PPFunction) and self.subdiv == other.subdiv
        polys = {
            graph: tuple(
                op(p, q) for p, q in zip(self.polys[graph], other.polys[graph])
            )
            for graph in self.subdiv.graphs()
        }
        return PPFunction(self.subdiv, polys)

    def __add__(self, other):
        return self._zip(other, lambda p, q: p + q)

    def __sub__(self, other):
        return self._zip(other, lambda p, q: p - q)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return self._zip(other, lambda p, q: p * q)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PPFunction.const(self.subdiv, 1)
        for _ in range(k):
            out = out * self
        return out

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "PPFunction":
        polys = {
            graph: tuple(p.scale(c) for p in ps)
            for graph, ps in self.polys.items()
        }
        return PPFunction(self.subdiv, polys)

    def __eq__(self, other):
        if not isinstance(other, PPFunction):
            return NotImplemented
        return self.subdiv == other.subdiv and self.polys == other.polys

    def degree(self) -> int:
        return max(p.degree() for ps in self.polys.values() for p in ps)

    def value_at(self, graph, point):
        graph = graph.canonical()
        for cone, p in zip(self.subdiv.cones[graph], self.polys[graph]):
            if cone_contains(cone, point):
                return p.eval(point)
        raise ValueError(f"point {point} outside the orthant of {graph!r}")

    def pullback(self, fine: Subdivision) -> "PPFunction":
        """Reinterpret on a refinement; ambient polynomials carry over."""
        assert (fine.g, fine.n) == (self.subdiv.g, self.subdiv.n)
        assert set(fine.cones) == set(self.subdiv.cones)
        polys = {}
        for graph in fine.graphs():
            coarse = list(zip(self.subdiv.cones[graph], self.polys[graph]))
            assigned = []
            for cone in fine.cones[graph]:
                pt = _bary(cone) if cone else ()
                for ccone, p in coarse:
                    if cone_contains(ccone, pt) if cone else True:
                        assigned.append(p)
                        break
                else:
                    raise ValueError("refinement does not nest")
            polys[graph] = tuple(assigned)
        return PPFunction(fine, polys)

    def validate(self):
        """Continuity across facets, face restriction, Aut-invariance."""
        for graph in self.subdiv.graphs():
            self._validate_graph(graph)
            self._validate_faces(graph)

    def _validate_graph(self, graph):
        ne = graph.n_edges
        cones = self.subdiv.cones[graph]
        ps = self.polys[graph]
        by_facet: dict = {}
        for idx, cone in enumerate(cones):
            for i in range(ne):
                facet = frozenset(cone[:i] + cone[i + 1 :])
                by_facet.setdefault(facet, []).append(idx)
        for facet, idxs in by_facet.items():
            if len(idxs) != 2:
                continue
            diff = ps[idxs[0]] - ps[idxs[1]]
            if not diff.d:
                continue
            kernel = nullspace([[Fraction(x) for x in r] for r in facet])
            if len(kernel) != 1:
                raise ValueError("facet is not a hyperplane")
            try:
                diff.divide_linear(primitive(kernel[0]))
            except ValueError:
                raise ValueError(
                    f"discontinuous across a facet of {graph!r}"
                ) from None
        for eperm in edge_autos(graph):
            table = {cone: p for cone, p in zip(cones, ps)}
            move = {j: eperm[j] for j in range(ne)}
            for cone, p in zip(cones, ps):
                image = _cone_key(_apply_eperm(r, eperm) for r in cone)
                if table[image] != p.relabel(move, ne):
                    raise ValueError(f"not Aut-invariant on {graph!r}")

    def _validate_faces(self, graph):
        ne = graph.n_edges
        for size in range(1, ne):
            for sub in itertools.combinations(range(ne), size):
                small, _, emap, _ = graph.contract(sub)
                keep = {
                    e: emap[e] for e in range(ne) if emap[e] is not None
                }
                small_table = {
                    cone: p
                    for cone, p in zip(
                        self.subdiv.cones[small], self.polys[small]
                    )
                }
                for cone, p in zip(self.subdiv.cones[graph], self.polys[graph]):
                    in_face = [
                        r for r in cone if all(r[e] == 0 for e in sub)
                    ]
                    if len(in_face) != ne - size:
                        continue
                    pulled = []
                    for r in in_face:
                        vec = [0] * small.n_edges
                        for e, enew in keep.items():
                            vec[enew] = r[e]
                        pulled.append(vec)
                    restricted = p
                    for e in sub:
                        restricted = restricted.substitute(
                            e, Poly.zero(ne)
                        )
                    restricted = restricted.relabel(keep, small.n_edges)
                    if small_table[_cone_key(pulled)] != restricted:
                        raise ValueError(
                            f"face value mismatch from {graph!r} to {small!r}"
                        )


def courant(subdiv: Subdivision, graph, ray) -> PPFunction:
    """Global piecewise linear function dual to one orbit of rays.

    Takes value 1 at every embedded image of the given ray and 0 at all
    other rays of the subdivision.
    """
    graph = graph.canonical()
    ray = tuple(primitive(ray))
    polys = {}
    for big in subdiv.graphs():
        ne = big.n_edges
        embedded = _embedded_rays(graph, ray, big)
        assigned = []
        for cone in subdiv.cones[big]:
            p = Poly.zero(ne)
            duals = cone_duals(cone)
            for r in embedded:
                if r in cone:
                    p = p + Poly.linear(duals[cone.index(r)])
                elif cone_contains(cone, r):
                    raise ValueError(f"{r} is not a ray of the subdivision")
            assigned.append(p)
        polys[big] = tuple(assigned)
    return PPFunction(subdiv, polys)


def stratum_indicator(subdiv: Subdivision, graph, rays=None) -> PPFunction:
    """Product of dual forms over one orbit of embedded cone copies.

    With rays omitted this is the indicator of the graph's own stratum
    (standard rays); explicit rays must form a face of the subdivision
    on that graph's orthant.
    """
    graph = graph.canonical()
    if rays is None:
        rays = _standard_cone(graph.n_edges)
    rays = _cone_key(rays)
    polys = {}
    for big in subdiv.graphs():
        ne = big.n_edges
        copies = _embedded_cones(graph, rays, big)
        assigned = []
        for cone in subdiv.cones[big]:
            p = Poly.zero(ne)
            duals = cone_duals(cone)
            for copy in copies:
                if all(r in cone for r in copy):
                    q = Poly.const(ne, Fraction(1))
                    for r in copy:
                        q = q * Poly.linear(duals[cone.index(r)])
                    p = p + q
            assigned.append(p)
        polys[big] = tuple(assigned)
    return PPFunction(subdiv, polys)


def _embedded_cones(graph, rays, big) -> set:
    """Images of a ray set under all contractions big -> graph."""
    images = {
        frozenset(_apply_eperm(r, ep) for r in rays)
        for ep in edge_autos(graph)
    }
    out = set()
    ne = big.n_edges
    drop = ne - graph.n_edges
    if drop < 0:
        return out
    for sub in itertools.combinations(range(ne), drop):
        small, _, emap, _ = big.contract(sub)
        if small != graph:
            continue
        for image in images:
            copy = []
            for rho in image:
                vec = [0] * ne
                for e in range(ne):
                    if emap[e] is not None:
                        vec[e] = rho[emap[e]]
                copy.append(tuple(vec))
            out.add(frozenset(copy))
    return out


def pp_push(f: PPFunction) -> TautExpr:
    """Pushforward to a tautological class by localization.

    Per graph the maximal cones contribute F / (index * prod of dual
    forms); the sum times the product of edge coordinates is a
    polynomial, whose monomials with full edge support feed the stratum
    with psi decorations at the two branches of each edge.
    """
    sub = f.subdiv
    g, n = sub.g, sub.n
    total = TautExpr.zero(g, n)
    for graph in sub.graphs():
        ne = graph.n_edges
        if ne == 0:
            (p,) = f.polys[graph]
            total = total + TautExpr.const(g, n, p.constant())
            continue
        terms = []
        need: dict = {}
        for cone, p in zip(sub.cones[graph], f.polys[graph]):
            if not p.d:
                continue
            scale = Fraction(1) / cone_index(cone)
            counts: dict = {}
            for lam in cone_duals(cone):
                c, w = _prim_signed(lam)
                scale /= c
                counts[w] = counts.get(w, 0) + 1
            terms.append((p, scale, counts))
            for w, k in counts.items():
                need[w] = max(need.get(w, 0), k)
        if not terms:
            continue
        num = Poly.zero(ne)
        for p, scale, counts in terms:
            q = p.scale(scale)
            for w, k in need.items():
                missing = k - counts.get(w, 0)
                if missing:
                    q = q * Poly.linear([Fraction(x) for x in w]) ** missing
            num = num + q
        for e in range(ne):
            num = num * Poly.var(ne, e)
        for w, k in need.items():
            for _ in range(k):
                num = num.divide_linear(w)
        aut = graph.automorphism_count()
        nv = graph.n_vertices
        for exps, coeff in num.d.items():
            if min(exps) < 1:
                continue
            base = Fraction(coeff, aut)
            # expand prod_e (-psi' - psi'')^(k_e - 1)
            choices = [range(k - 1 + 1) for k in exps]
            for pick in itertools.product(*choices):
                hpsi = [0] * (2 * ne)
                weight = base
                for e, (k, j) in enumerate(zip(exps, pick)):
                    weight *= comb(k - 1, j) * (-1) ** (k - 1)
                    hpsi[2 * e] = j
                    hpsi[2 * e + 1] = k - 1 - j
                dec = Decoration(((),) * nv, tuple(hpsi), (0,) * n)
                total = total + TautExpr.push(g, n, graph, dec, weight)
    return total


def pp_to_taut(f: PPFunction) -> TautExpr:
    """Class of a piecewise polynomial; alias kept for single-cone use."""
    return pp_push(f)
