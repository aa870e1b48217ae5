"""Tautological classes on moduli of stable curves.

A class is a rational combination of decorated boundary pushforwards
[Gamma, dec] = xi_* (monomial in kappa and psi classes on the factors
of the stratum normalization). No 1/|Aut| is built into the generators;
the reduced stratum class is [Gamma, 1] / |Aut Gamma|, and integration
is integration over the normalization product.

Products use the excess intersection formula over common degenerations:
the two edge sets land disjointly in the bigger graph and every shared
edge contributes -psi' - psi''.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb, prod

from .graphs import StableGraph, _match_positions, stable_graphs, trivial_graph
from .intnum import kappa_psi_intersection, moduli_dim
from .linalg import rank


class Decoration:
    """Monomial decoration on a fixed graph: kappa classes per vertex,
    psi exponents per half-edge and per marking."""

    __slots__ = ("kappa", "hpsi", "lpsi", "_hash")

    def __init__(self, kappa, hpsi, lpsi):
        norm = []
        for entries in kappa:
            merged: dict[int, int] = {}
            for a, e in entries:
                assert a >= 1, "kappa_0 must be folded into the coefficient"
                if e:
                    merged[a] = merged.get(a, 0) + e
            norm.append(tuple(sorted(merged.items())))
        self.kappa = tuple(norm)
        self.hpsi = tuple(int(x) for x in hpsi)
        self.lpsi = tuple(int(x) for x in lpsi)
        assert all(x >= 0 for x in self.hpsi) and all(x >= 0 for x in self.lpsi)
        self._hash = hash((self.kappa, self.hpsi, self.lpsi))

    @classmethod
    def trivial(cls, graph: StableGraph) -> "Decoration":
        return cls(
            ((),) * graph.n_vertices,
            (0,) * (2 * graph.n_edges),
            (0,) * graph.n_markings,
        )

    def data(self):
        return (self.kappa, self.hpsi, self.lpsi)

    def __eq__(self, other):
        if isinstance(other, Decoration):
            return self.data() == other.data()
        return NotImplemented

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.data() < other.data()

    def __repr__(self):
        return f"Decoration(kappa={self.kappa}, hpsi={self.hpsi}, lpsi={self.lpsi})"

    def degree_at(self, graph: StableGraph, v: int) -> int:
        d = sum(a * e for a, e in self.kappa[v])
        d += sum(self.hpsi[h] for h in graph.halves_at(v))
        d += sum(self.lpsi[m] for m in graph.marks_at(v))
        return d

    def total_degree(self) -> int:
        return (
            sum(a * e for entries in self.kappa for a, e in entries)
            + sum(self.hpsi)
            + sum(self.lpsi)
        )

    def transport(self, vperm, hperm) -> "Decoration":
        kappa = [()] * len(self.kappa)
        for v, entries in enumerate(self.kappa):
            kappa[vperm[v]] = entries
        hpsi = [0] * len(self.hpsi)
        for h, e in enumerate(self.hpsi):
            hpsi[hperm[h]] = e
        return Decoration(kappa, hpsi, self.lpsi)


_DEC_CANON_CACHE: dict = {}
_HALF_AUTO_CACHE: dict = {}


def half_autos(graph: StableGraph):
    cached = _HALF_AUTO_CACHE.get(graph)
    if cached is None:
        cached = tuple(graph.half_automorphisms())
        _HALF_AUTO_CACHE[graph] = cached
    return cached


def canonical_decoration(graph: StableGraph, dec: Decoration) -> Decoration:
    key = (graph, dec)
    cached = _DEC_CANON_CACHE.get(key)
    if cached is None:
        cached = min(
            (dec.transport(vp, hp) for vp, hp in half_autos(graph)),
            key=Decoration.data,
        )
        _DEC_CANON_CACHE[key] = cached
    return cached


def dec_mul(d1: Decoration, d2: Decoration) -> Decoration:
    """Product of two monomial decorations on the same graph."""
    kappa = []
    for e1, e2 in zip(d1.kappa, d2.kappa):
        kappa.append(tuple(e1) + tuple(e2))
    hpsi = tuple(a + b for a, b in zip(d1.hpsi, d2.hpsi))
    lpsi = tuple(a + b for a, b in zip(d1.lpsi, d2.lpsi))
    return Decoration(kappa, hpsi, lpsi)


class TautExpr:
    __slots__ = ("g", "n", "terms")

    def __init__(self, g: int, n: int, terms=None):
        self.g = g
        self.n = n
        self.terms: dict[tuple[StableGraph, Decoration], Fraction] = {
            k: v for k, v in (terms or {}).items() if v != 0
        }

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, g, n) -> "TautExpr":
        return cls(g, n)

    @classmethod
    def one(cls, g, n) -> "TautExpr":
        return cls.const(g, n, 1)

    def one_like(self) -> "TautExpr":
        return TautExpr.one(self.g, self.n)

    @classmethod
    def const(cls, g, n, c) -> "TautExpr":
        t = trivial_graph(g, n)
        c = Fraction(c)
        if c == 0:
            return cls.zero(g, n)
        return cls(g, n, {(t, Decoration.trivial(t)): c})

    @classmethod
    def psi(cls, g, n, i) -> "TautExpr":
        """psi class at marking i (0-indexed)."""
        t = trivial_graph(g, n)
        lpsi = [0] * n
        lpsi[i] = 1
        out = cls.zero(g, n)
        _add_term(out.terms, g, n, t, Decoration(((),), (), lpsi), Fraction(1))
        return out

    @classmethod
    def kappa(cls, g, n, a) -> "TautExpr":
        if a == 0:
            return cls.const(g, n, 2 * g - 2 + n)
        t = trivial_graph(g, n)
        out = cls.zero(g, n)
        _add_term(out.terms, g, n, t, Decoration((((a, 1),),), (), (0,) * n), Fraction(1))
        return out

    @classmethod
    def push(cls, g, n, graph: StableGraph, dec: Decoration | None = None, coeff=1) -> "TautExpr":
        """xi_* of a decorated monomial; graph need not be canonical."""
        assert graph.genus() == g and graph.n_markings == n
        if dec is None:
            dec = Decoration.trivial(graph)
        canon, perm = graph.canonical_with_perm()
        _, hmap = graph.edge_maps_under(perm)
        dec_t = dec.transport(perm, hmap)
        out = cls.zero(g, n)
        _add_term(out.terms, g, n, canon, dec_t, Fraction(coeff))
        return out

    @classmethod
    def stratum_class(cls, g, n, graph: StableGraph) -> "TautExpr":
        """Reduced class of the closed stratum: xi_*(1) / |Aut|."""
        return cls.push(g, n, graph, coeff=Fraction(1, graph.automorphism_count()))

    # -- ring structure ---------------------------------------------------

    def _check(self, other: "TautExpr"):
        if (self.g, self.n) != (other.g, other.n):
            raise ValueError("classes live on different moduli spaces")

    def __add__(self, other):
        if not isinstance(other, TautExpr):
            other = TautExpr.const(self.g, self.n, other)
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            s = terms.get(k, Fraction(0)) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return TautExpr(self.g, self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return TautExpr(self.g, self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TautExpr):
            other = TautExpr.const(self.g, self.n, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TautExpr":
        c = Fraction(c)
        return TautExpr(self.g, self.n, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TautExpr):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                for k, c in _term_product(self.g, self.n, k1, k2).items():
                    s = out.get(k, Fraction(0)) + c1 * c2 * c
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return TautExpr(self.g, self.n, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        assert k >= 0
        result = TautExpr.one(self.g, self.n)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, TautExpr):
            return (self.g, self.n) == (other.g, other.n) and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.g, self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return f"TautExpr({self.g},{self.n}; 0)"
        bits = [f"{c} * [{g!r}, {d!r}]" for (g, d), c in sorted(self.terms.items(), key=lambda kv: (kv[0][0].key(), kv[0][1].data()))]
        return f"TautExpr({self.g},{self.n}; " + " + ".join(bits) + ")"

    # -- grading ----------------------------------------------------------

    def codim_parts(self) -> dict[int, "TautExpr"]:
        parts: dict[int, dict] = {}
        for (graph, dec), c in self.terms.items():
            k = graph.n_edges + dec.total_degree()
            parts.setdefault(k, {})[(graph, dec)] = c
        return {k: TautExpr(self.g, self.n, d) for k, d in sorted(parts.items())}

    def codim_part(self, k: int) -> "TautExpr":
        return self.codim_parts().get(k, TautExpr.zero(self.g, self.n))

    def max_codim(self) -> int:
        if not self.terms:
            return -1
        return max(g.n_edges + d.total_degree() for g, d in self.terms)

    # -- functionals --------------------------------------------------------

    def integrate(self) -> Fraction:
        """Integral over the moduli space; terms below top degree give 0."""
        dim = moduli_dim(self.g, self.n)
        total = Fraction(0)
        for (graph, dec), c in self.terms.items():
            if graph.n_edges + dec.total_degree() != dim:
                continue
            total += c * _integrate_term(graph, dec)
        return total

    def forget_last(self) -> "TautExpr":
        """Pushforward along the map forgetting the last marking."""
        g, n = self.g, self.n
        assert n >= 1 and 2 * g - 2 + (n - 1) > 0
        out = TautExpr.zero(g, n - 1)
        for (graph, dec), c in self.terms.items():
            _forget_term(out.terms, g, n, graph, dec, c)
        return out


# -- term-level helpers ----------------------------------------------------


def _add_term(terms: dict, g, n, graph: StableGraph, dec: Decoration, coeff: Fraction):
    """Accumulate a decorated term, pruning classes that vanish for
    dimension reasons, with the decoration in canonical position."""
    if coeff == 0:
        return
    if graph.n_edges + dec.total_degree() > moduli_dim(g, n):
        return
    for v in range(graph.n_vertices):
        if dec.degree_at(graph, v) > moduli_dim(graph.genera[v], graph.valence(v)):
            return
    dec = canonical_decoration(graph, dec)
    key = (graph, dec)
    s = terms.get(key, Fraction(0)) + coeff
    if s:
        terms[key] = s
    else:
        terms.pop(key, None)


def _integrate_term(graph: StableGraph, dec: Decoration) -> Fraction:
    total = Fraction(1)
    for v in range(graph.n_vertices):
        exps = [dec.hpsi[h] for h in graph.halves_at(v)]
        exps += [dec.lpsi[m] for m in graph.marks_at(v)]
        kappas = []
        for a, e in dec.kappa[v]:
            kappas.extend([a] * e)
        total *= kappa_psi_intersection(graph.genera[v], exps, kappas)
        if total == 0:
            return total
    return total


# -- products ---------------------------------------------------------------


def fiber_structures(big: StableGraph, graph1: StableGraph, graph2: StableGraph):
    """Pairs of contraction structures big -> graph1, big -> graph2 with
    disjoint contracted edge sets.

    Yields (S1, maps1, S2, maps2); maps = (vmap, emap, hmap) composed
    with an automorphism of the target, so all isomorphisms onto each
    graph_i appear. Edges outside S1 | S2 are the shared ones.
    """
    ne = big.n_edges
    s1 = ne - graph1.n_edges
    s2 = ne - graph2.n_edges
    if s1 < 0 or s2 < 0 or s1 + s2 > ne:
        return
    for set1 in itertools.combinations(range(ne), s1):
        c1, vmap1, emap1, hmap1 = big.contract(set1)
        if c1 != graph1:
            continue
        rest = [j for j in range(ne) if j not in set1]
        for set2 in itertools.combinations(rest, s2):
            c2, vmap2, emap2, hmap2 = big.contract(set2)
            if c2 != graph2:
                continue
            for vp1, hp1 in half_autos(graph1):
                maps1 = _compose_maps(vmap1, emap1, hmap1, vp1, hp1)
                for vp2, hp2 in half_autos(graph2):
                    maps2 = _compose_maps(vmap2, emap2, hmap2, vp2, hp2)
                    yield set1, maps1, set2, maps2


def _compose_maps(vmap, emap, hmap, vp, hp):
    vc = tuple(vp[v] for v in vmap)
    ec = tuple(None if e is None else hp[2 * e] // 2 for e in emap)
    hc = tuple(None if h is None else hp[h] for h in hmap)
    return vc, ec, hc


def _pullback_dec_poly(big: StableGraph, maps, src: StableGraph, dec: Decoration):
    """Pull a decoration back through a contraction structure.

    kappa classes pull back to sums over preimage vertices, expanded
    multinomially; psi classes land on the unique preimage half.
    Returns dict[Decoration on big -> coeff].
    """
    vmap, _, hmap = maps
    nv = big.n_vertices
    hinv = {}
    for h, h2 in enumerate(hmap):
        if h2 is not None:
            hinv[h2] = h
    hpsi = [0] * (2 * big.n_edges)
    for h2, e in enumerate(dec.hpsi):
        if e:
            hpsi[hinv[h2]] += e
    base = Decoration(((),) * nv, hpsi, dec.lpsi)
    out = {base: Fraction(1)}
    pre: dict[int, list[int]] = {}
    for w in range(nv):
        pre.setdefault(vmap[w], []).append(w)
    for v2, entries in enumerate(dec.kappa):
        for a, e in entries:
            vs = pre[v2]
            factor: dict[Decoration, Fraction] = {}
            for split in _compositions(e, len(vs)):
                kappa = [()] * nv
                for w, t in zip(vs, split):
                    if t:
                        kappa[w] = ((a, t),)
                d = Decoration(kappa, (0,) * (2 * big.n_edges), (0,) * big.n_markings)
                factor[d] = Fraction(_multinomial(e, split))
            out = _poly_mul(out, factor)
    return out


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for x in range(total + 1):
        for rest in _compositions(total - x, parts - 1):
            yield (x,) + rest


def _multinomial(total: int, split) -> int:
    out = 1
    left = total
    for x in split:
        out *= comb(left, x)
        left -= x
    return out


def _poly_mul(p1: dict, p2: dict) -> dict:
    out: dict = {}
    for d1, c1 in p1.items():
        for d2, c2 in p2.items():
            d = dec_mul(d1, d2)
            s = out.get(d, Fraction(0)) + c1 * c2
            if s:
                out[d] = s
    return out


def _excess_factor(big: StableGraph, edge: int) -> dict:
    out = {}
    for h in (2 * edge, 2 * edge + 1):
        hpsi = [0] * (2 * big.n_edges)
        hpsi[h] = 1
        d = Decoration(((),) * big.n_vertices, hpsi, (0,) * big.n_markings)
        out[d] = out.get(d, Fraction(0)) - 1
    return out


_TERM_PRODUCT_CACHE: dict = {}


def _term_product(g, n, key1, key2) -> dict:
    """Product of two canonical decorated terms as a term dict."""
    if key2 < key1:
        key1, key2 = key2, key1
    cached = _TERM_PRODUCT_CACHE.get((key1, key2))
    if cached is not None:
        return cached
    graph1, dec1 = key1
    graph2, dec2 = key2
    dim = moduli_dim(g, n)
    out: dict = {}
    cap = min(graph1.n_edges + graph2.n_edges, dim)
    for big in stable_graphs(g, n, cap):
        if big.n_edges < max(graph1.n_edges, graph2.n_edges):
            continue
        aut = Fraction(1, big.automorphism_count())
        for set1, maps1, set2, maps2 in fiber_structures(big, graph1, graph2):
            poly = _poly_mul(
                _pullback_dec_poly(big, maps1, graph1, dec1),
                _pullback_dec_poly(big, maps2, graph2, dec2),
            )
            for j in range(big.n_edges):
                if j in set1 or j in set2:
                    continue
                poly = _poly_mul(poly, _excess_factor(big, j))
            for dec, c in poly.items():
                _add_term(out, g, n, big, dec, c * aut)
    _TERM_PRODUCT_CACHE[(key1, key2)] = out
    return out


# -- forgetful pushforward ---------------------------------------------------


def _forget_term(out_terms: dict, g, n, graph: StableGraph, dec: Decoration, coeff):
    """Push one decorated term along forgetting marking n-1."""
    last = n - 1
    v = graph.legs[last]
    marks_v = graph.marks_at(v)
    halves_v = graph.halves_at(v)
    stable_after = 2 * graph.genera[v] - 2 + graph.valence(v) - 1 > 0
    if stable_after:
        _forget_stable_vertex(out_terms, g, n, graph, dec, coeff, v)
        return
    # v is a genus-0 trivalent vertex that disappears
    assert graph.genera[v] == 0 and graph.valence(v) == 3
    assert dec.degree_at(graph, v) == 0, "pruning should have removed this"
    if len(marks_v) == 2:
        _forget_two_marks(out_terms, g, n, graph, dec, coeff, v)
    else:
        assert len(marks_v) == 1 and len(halves_v) == 2
        _forget_bridge(out_terms, g, n, graph, dec, coeff, v)


def _forget_stable_vertex(out_terms, g, n, graph, dec, coeff, v):
    last = n - 1
    new_graph = StableGraph(graph.genera, graph.legs[:last], graph.edges)
    pts = [("h", h) for h in graph.halves_at(v)]
    pts += [("l", m) for m in graph.marks_at(v) if m != last]
    exps = {p: (dec.hpsi[p[1]] if p[0] == "h" else dec.lpsi[p[1]]) for p in pts}
    kappas = list(dec.kappa[v])
    c = dec.lpsi[last]
    g0 = graph.genera[v]
    npts = len(pts)
    for new_exps, new_kappas, factor in _factor_forget(g0, pts, exps, kappas, c, npts):
        kappa = list(dec.kappa)
        kappa[v] = tuple(new_kappas)
        hpsi = list(dec.hpsi)
        lpsi = list(dec.lpsi[:last])
        for p, e in new_exps.items():
            if p[0] == "h":
                hpsi[p[1]] = e
            else:
                lpsi[p[1]] = e
        _add_term(
            out_terms, g, n - 1, new_graph, Decoration(kappa, hpsi, lpsi), coeff * factor
        )


def _factor_forget(g0, pts, exps, kappas, c, npts):
    """Forgetful pushforward on one factor space.

    The class is psi^c at the forgotten point times prod psi_p^exps[p]
    times prod kappa_a^e. Yields (exponents, kappa list, coefficient).
    Uses kappa_up = pi^* kappa + psi^a, psi_up = pi^* psi + D, the
    vanishing D.D' = D.psi = 0, D^j = (-pi^* psi)^(j-1) D, and
    pi_*(pi^* x . psi^k) = x . kappa_{k-1}, pi_*(pi^* x . D) = x.
    """
    # route A: no diagonal divisor survives
    choices = []
    for a, e in kappas:
        choices.append([(t, comb(e, t)) for t in range(e + 1)])
    for picks in itertools.product(*choices):
        ctot = c + sum(a * t for (a, _), (t, _) in zip(kappas, picks))
        if ctot < 1:
            continue
        w = prod(b for _, b in picks)
        new_kappas = []
        for (a, e), (t, _) in zip(kappas, picks):
            if e - t:
                new_kappas.append((a, e - t))
        factor = Fraction(w)
        if ctot - 1 == 0:
            factor *= 2 * g0 - 2 + npts
        else:
            new_kappas.append((ctot - 1, 1))
        yield dict(exps), new_kappas, factor
    # route B: the forgotten point hits a diagonal divisor
    if c == 0:
        for p in pts:
            if exps[p] >= 1:
                new_exps = dict(exps)
                new_exps[p] -= 1
                yield new_exps, list(kappas), Fraction(1)


def _forget_two_marks(out_terms, g, n, graph, dec, coeff, v):
    last = n - 1
    (other,) = [m for m in graph.marks_at(v) if m != last]
    (h_in,) = graph.halves_at(v)
    edge = h_in // 2
    h_out = h_in ^ 1
    w = graph.half_vertex(h_out)
    keep = [x for x in range(graph.n_vertices) if x != v]
    newid = {x: i for i, x in enumerate(keep)}
    genera = [graph.genera[x] for x in keep]
    legs = []
    for m in range(n - 1):
        src = graph.legs[m]
        legs.append(newid[w] if m == other else newid[src])
    new_graph = StableGraph(
        genera,
        legs,
        [
            (newid[a], newid[b])
            for j, (a, b) in enumerate(graph.edges)
            if j != edge
        ],
    )
    hmap, _ = _surviving_half_map(graph, new_graph, {edge}, newid)
    hpsi = [0] * (2 * new_graph.n_edges)
    for h_old, h_new in hmap.items():
        hpsi[h_new] = dec.hpsi[h_old]
    lpsi = list(dec.lpsi[:last])
    # the node half at w turns back into the marking that sat on the bubble
    lpsi[other] = dec.hpsi[h_out]
    kappa = [dec.kappa[x] for x in keep]
    _add_term(out_terms, g, n - 1, new_graph, Decoration(kappa, hpsi, lpsi), coeff)


def _forget_bridge(out_terms, g, n, graph, dec, coeff, v):
    last = n - 1
    h1, h2 = graph.halves_at(v)
    e1, e2 = h1 // 2, h2 // 2
    assert e1 != e2
    out1, out2 = h1 ^ 1, h2 ^ 1
    w1, w2 = graph.half_vertex(out1), graph.half_vertex(out2)
    keep = [x for x in range(graph.n_vertices) if x != v]
    newid = {x: i for i, x in enumerate(keep)}
    genera = [graph.genera[x] for x in keep]
    legs = [newid[graph.legs[m]] for m in range(n - 1)]
    edges = [
        (newid[a], newid[b])
        for j, (a, b) in enumerate(graph.edges)
        if j not in (e1, e2)
    ]
    merged = tuple(sorted((newid[w1], newid[w2])))
    edges.append(merged)
    new_graph = StableGraph(genera, legs, edges)
    hmap, extra_pos = _surviving_half_map(
        graph, new_graph, {e1, e2}, newid, extra=[merged]
    )
    hpsi = [0] * (2 * new_graph.n_edges)
    for h_old, h_new in hmap.items():
        hpsi[h_new] = dec.hpsi[h_old]
    # outer halves of the removed bridge keep their psi exponents on the
    # merged edge; for a new loop the flip is absorbed by Aut
    jm = extra_pos[0]
    if newid[w1] <= newid[w2]:
        hw1, hw2 = 2 * jm, 2 * jm + 1
    else:
        hw1, hw2 = 2 * jm + 1, 2 * jm
    hpsi[hw1] += dec.hpsi[out1]
    hpsi[hw2] += dec.hpsi[out2]
    kappa = [dec.kappa[x] for x in keep]
    _add_term(
        out_terms, g, n - 1, new_graph, Decoration(kappa, hpsi, dec.lpsi[:last]), coeff
    )


# -- spanning monomials and numerical equality --------------------------------


def _partitions(w: int):
    """Integer partitions of w as nonincreasing tuples."""

    def rec(left, biggest):
        if left == 0:
            yield ()
            return
        for x in range(min(left, biggest), 0, -1):
            for rest in rec(left - x, x):
                yield (x,) + rest

    yield from rec(w, w)


def decorated_monomials(g: int, n: int, codim: int):
    """Canonical decorated terms of pure codimension codim; these span the
    tautological group in that degree."""
    found = set()
    if codim < 0:
        return ()
    for graph in stable_graphs(g, n, codim):
        rest = codim - graph.n_edges
        if rest < 0:
            continue
        nv, ne = graph.n_vertices, graph.n_edges
        slots = nv + 2 * ne + n
        for weights in _compositions(rest, slots):
            vw = weights[:nv]
            hpsi = weights[nv : nv + 2 * ne]
            lpsi = weights[nv + 2 * ne :]
            kappa_options = []
            for w in vw:
                opts = []
                for part in _partitions(w):
                    counts: dict[int, int] = {}
                    for a in part:
                        counts[a] = counts.get(a, 0) + 1
                    opts.append(tuple(sorted(counts.items())))
                kappa_options.append(opts)
            for kappas in itertools.product(*kappa_options):
                dec = Decoration(kappas, hpsi, lpsi)
                bad = False
                for v in range(nv):
                    if dec.degree_at(graph, v) > moduli_dim(
                        graph.genera[v], graph.valence(v)
                    ):
                        bad = True
                        break
                if bad:
                    continue
                found.add((graph, canonical_decoration(graph, dec)))
    return tuple(sorted(found, key=lambda k: (k[0].key(), k[1].data())))


def numerically_equal(x: TautExpr, y: TautExpr) -> bool:
    """Equality against the full pairing with complementary-degree
    decorated monomials, degree by degree."""
    x._check(y)
    diff = x - y
    if not diff.terms:
        return True
    g, n = diff.g, diff.n
    d = moduli_dim(g, n)
    for c, part in diff.codim_parts().items():
        if c > d:
            continue
        for key in decorated_monomials(g, n, d - c):
            probe = TautExpr(g, n, {key: Fraction(1)})
            if (part * probe).integrate() != 0:
                return False
    return True


def pairing_rank(g: int, n: int, codim: int) -> int:
    """Rank of the pairing matrix between decorated monomials of
    complementary codimensions."""
    d = moduli_dim(g, n)
    rows = decorated_monomials(g, n, codim)
    cols = decorated_monomials(g, n, d - codim)
    matrix = []
    for rk in rows:
        row_expr = TautExpr(g, n, {rk: Fraction(1)})
        matrix.append(
            [(row_expr * TautExpr(g, n, {ck: Fraction(1)})).integrate() for ck in cols]
        )
    return rank(matrix) if matrix else 0


def _surviving_half_map(old: StableGraph, new: StableGraph, skip, newid, extra=None):
    """Half-edge map into the rebuilt graph for edges outside skip, plus
    the slots assigned to any extra appended edges."""
    survivors = [j for j in range(old.n_edges) if j not in skip]
    raw = [
        tuple(sorted((newid[old.edges[j][0]], newid[old.edges[j][1]])))
        for j in survivors
    ]
    raw += list(extra or [])
    pos = _match_positions(new.edges, raw)
    hmap: dict[int, int] = {}
    for r, j in enumerate(survivors):
        jn = pos[r]
        a, b = old.edges[j]
        if newid[a] <= newid[b]:
            hmap[2 * j], hmap[2 * j + 1] = 2 * jn, 2 * jn + 1
        else:
            hmap[2 * j], hmap[2 * j + 1] = 2 * jn + 1, 2 * jn
    return hmap, pos[len(survivors) :]
