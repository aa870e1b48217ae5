"""Stable graphs with labeled markings.

A graph records a genus for each vertex, an assignment of markings to
vertices, and a multiset of edges. Vertices are 0-indexed. Markings are
0-indexed internally (user-facing output labels them 1..n). Edge j
carries half-edges 2j and 2j+1 at its two (sorted) endpoints.

Stability is a predicate, not a construction invariant: the same class
models the quasi-stable graphs that appear when edges get subdivided.
"""

from __future__ import annotations

import itertools
from math import factorial


class StableGraph:
    __slots__ = ("genera", "legs", "edges", "_hash")

    def __init__(self, genera, legs, edges):
        self.genera = tuple(int(g) for g in genera)
        self.legs = tuple(int(v) for v in legs)
        self.edges = tuple(sorted(tuple(sorted((int(u), int(v)))) for u, v in edges))
        nv = len(self.genera)
        if nv == 0:
            raise ValueError("graph needs at least one vertex")
        if any(g < 0 for g in self.genera):
            raise ValueError("negative genus")
        if any(not 0 <= v < nv for v in self.legs):
            raise ValueError("leg attached to missing vertex")
        if any(not 0 <= v < nv for e in self.edges for v in e):
            raise ValueError("edge endpoint out of range")
        self._hash = hash((self.genera, self.legs, self.edges))

    # -- basic structure ------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.genera)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_markings(self) -> int:
        return len(self.legs)

    def half_vertex(self, h: int) -> int:
        return self.edges[h // 2][h % 2]

    def halves_at(self, v: int) -> tuple[int, ...]:
        out = []
        for j, (a, b) in enumerate(self.edges):
            if a == v:
                out.append(2 * j)
            if b == v:
                out.append(2 * j + 1)
        return tuple(out)

    def marks_at(self, v: int) -> tuple[int, ...]:
        return tuple(m for m, w in enumerate(self.legs) if w == v)

    def valence(self, v: int) -> int:
        ends = sum((a == v) + (b == v) for a, b in self.edges)
        return ends + sum(1 for w in self.legs if w == v)

    def loops_at(self, v: int) -> int:
        return sum(1 for a, b in self.edges if a == v and b == v)

    def multiplicity(self, u: int, v: int) -> int:
        pair = tuple(sorted((u, v)))
        return sum(1 for e in self.edges if e == pair)

    def is_connected(self) -> bool:
        seen = {0}
        frontier = [0]
        while frontier:
            v = frontier.pop()
            for a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == v and y not in seen:
                        seen.add(y)
                        frontier.append(y)
        return len(seen) == self.n_vertices

    def b1(self) -> int:
        assert self.is_connected()
        return self.n_edges - self.n_vertices + 1

    def genus(self) -> int:
        return sum(self.genera) + self.b1()

    def is_stable(self) -> bool:
        if not self.is_connected():
            return False
        return all(
            2 * self.genera[v] - 2 + self.valence(v) > 0 for v in range(self.n_vertices)
        )

    def exceptional_vertices(self) -> tuple[int, ...]:
        """Genus-0 vertices with no markings and exactly two half-edges on
        two distinct edges. These are the bubble components of a
        quasi-stable model."""
        out = []
        for v in range(self.n_vertices):
            if self.genera[v] or self.marks_at(v):
                continue
            halves = self.halves_at(v)
            if len(halves) == 2 and halves[0] // 2 != halves[1] // 2:
                out.append(v)
        return tuple(out)

    def is_quasistable(self) -> bool:
        if not self.is_connected():
            return False
        exc = set(self.exceptional_vertices())
        for v in range(self.n_vertices):
            if v in exc:
                continue
            if 2 * self.genera[v] - 2 + self.valence(v) <= 0:
                return False
        # no two bubbles may touch
        for a, b in self.edges:
            if a in exc and b in exc:
                return False
        return True

    def __eq__(self, other) -> bool:
        if isinstance(other, StableGraph):
            return (
                self.genera == other.genera
                and self.legs == other.legs
                and self.edges == other.edges
            )
        return NotImplemented

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "StableGraph") -> bool:
        return self.key() < other.key()

    def key(self):
        return (
            self.n_vertices,
            self.n_edges,
            self.genera,
            self.legs,
            self.edges,
        )

    def __repr__(self) -> str:
        return f"StableGraph(genera={self.genera}, legs={self.legs}, edges={list(self.edges)})"

    def to_dict(self) -> dict:
        return {
            "genera": list(self.genera),
            "legs": list(self.legs),
            "edges": [list(e) for e in self.edges],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StableGraph":
        return cls(d["genera"], d["legs"], d.get("edges", []))

    # -- relabeling and canonical form ------------------------------------

    def relabel(self, perm) -> "StableGraph":
        """Apply a vertex permutation; perm[old] = new."""
        genera = [0] * self.n_vertices
        for v, g in enumerate(self.genera):
            genera[perm[v]] = g
        legs = tuple(perm[v] for v in self.legs)
        edges = [(perm[a], perm[b]) for a, b in self.edges]
        return StableGraph(genera, legs, edges)

    def _refined_classes(self) -> list[int]:
        """Equitable-partition class index per vertex, canonically ordered."""
        nv = self.n_vertices
        keys = [
            (self.genera[v], self.marks_at(v), self.valence(v), self.loops_at(v))
            for v in range(nv)
        ]
        ranks = _rank(keys)
        while True:
            nbr = [[] for _ in range(nv)]
            for a, b in self.edges:
                nbr[a].append(ranks[b])
                nbr[b].append(ranks[a])
            new = _rank([(ranks[v], tuple(sorted(nbr[v]))) for v in range(nv)])
            if new == ranks:
                return ranks
            ranks = new

    def _class_perms(self):
        """All vertex permutations preserving the refined classes, with each
        class mapped onto a fixed block of new indices."""
        ranks = self._refined_classes()
        classes: dict[int, list[int]] = {}
        for v, r in enumerate(ranks):
            classes.setdefault(r, []).append(v)
        blocks = [classes[r] for r in sorted(classes)]
        starts = []
        pos = 0
        for b in blocks:
            starts.append(pos)
            pos += len(b)
        for choice in itertools.product(*(itertools.permutations(b) for b in blocks)):
            perm = [0] * self.n_vertices
            for block, start in zip(choice, starts):
                for off, old in enumerate(block):
                    perm[old] = start + off
            yield tuple(perm)

    def canonical_with_perm(self) -> tuple["StableGraph", tuple[int, ...]]:
        cached = _CANON_CACHE.get(self)
        if cached is not None:
            return cached
        best = None
        best_perm = None
        for perm in self._class_perms():
            cand = self.relabel(perm)
            enc = (cand.genera, cand.legs, cand.edges)
            if best is None or enc < best:
                best = enc
                best_perm = perm
        result = (StableGraph(*best), best_perm)
        _CANON_CACHE[self] = result
        return result

    def canonical(self) -> "StableGraph":
        return self.canonical_with_perm()[0]

    def edge_maps_under(self, perm) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Edge and half-edge maps induced by a vertex permutation.

        Parallel edges are matched in input order; returns
        (edge_map, half_map) into self.relabel(perm).
        """
        target = self.relabel(perm)
        used: dict[tuple[int, int], list[int]] = {}
        for j, (a, b) in enumerate(target.edges):
            used.setdefault((a, b), []).append(j)
        emap = []
        hmap = [0] * (2 * self.n_edges)
        taken: dict[tuple[int, int], int] = {}
        for j, (a, b) in enumerate(self.edges):
            pa, pb = perm[a], perm[b]
            pair = tuple(sorted((pa, pb)))
            k = taken.get(pair, 0)
            taken[pair] = k + 1
            j2 = used[pair][k]
            emap.append(j2)
            if pa <= pb:
                hmap[2 * j] = 2 * j2
                hmap[2 * j + 1] = 2 * j2 + 1
            else:
                hmap[2 * j] = 2 * j2 + 1
                hmap[2 * j + 1] = 2 * j2
        return tuple(emap), tuple(hmap)

    # -- automorphisms ----------------------------------------------------

    def vertex_automorphisms(self) -> tuple[tuple[int, ...], ...]:
        ranks = self._refined_classes()
        classes: dict[int, list[int]] = {}
        for v, r in enumerate(ranks):
            classes.setdefault(r, []).append(v)
        blocks = list(classes.values())
        out = []
        # permute each class within its own member slots
        for choice in itertools.product(
            *(itertools.permutations(b) for b in blocks)
        ):
            perm = [0] * self.n_vertices
            for block, images in zip(blocks, choice):
                for old, new in zip(block, images):
                    perm[old] = new
            perm = tuple(perm)
            if self.relabel(perm) == self:
                out.append(perm)
        return tuple(out)

    def automorphism_count(self) -> int:
        count = len(self.vertex_automorphisms())
        seen = set()
        for a, b in self.edges:
            if (a, b) in seen:
                continue
            seen.add((a, b))
            m = self.multiplicity(a, b)
            count *= factorial(m)
            if a == b:
                count *= 2**m
        return count

    def half_automorphisms(self):
        """All automorphisms at half-edge resolution.

        Yields (vertex_perm, half_perm); the number of items equals
        automorphism_count(). Parallel edges permute freely and loops
        flip, on top of each vertex automorphism.
        """
        groups: dict[tuple[int, int], list[int]] = {}
        for j, e in enumerate(self.edges):
            groups.setdefault(e, []).append(j)
        pairs = sorted(groups)
        for vperm in self.vertex_automorphisms():
            target_of = {}
            for pair in pairs:
                a, b = sorted((vperm[pair[0]], vperm[pair[1]]))
                target_of[pair] = groups[(a, b)]
            for assignment in itertools.product(
                *(itertools.permutations(target_of[p]) for p in pairs)
            ):
                base = [None] * (2 * self.n_edges)
                flip_slots = []
                for pair, images in zip(pairs, assignment):
                    for j, j2 in zip(groups[pair], images):
                        a, b = pair
                        pa, pb = vperm[a], vperm[b]
                        if a == b:
                            flip_slots.append((j, j2))
                        elif pa <= pb:
                            base[2 * j] = 2 * j2
                            base[2 * j + 1] = 2 * j2 + 1
                        else:
                            base[2 * j] = 2 * j2 + 1
                            base[2 * j + 1] = 2 * j2
                if not flip_slots:
                    yield vperm, tuple(base)
                    continue
                for flips in itertools.product((0, 1), repeat=len(flip_slots)):
                    h = list(base)
                    for (j, j2), f in zip(flip_slots, flips):
                        h[2 * j] = 2 * j2 + f
                        h[2 * j + 1] = 2 * j2 + 1 - f
                    yield vperm, tuple(h)

    # -- contraction and subdivision ---------------------------------------

    def contract(self, edge_subset):
        """Contract a set of edge indices.

        Returns (canonical graph, vertex_map, edge_map, half_map); the
        edge and half maps send surviving indices into the canonical
        contracted graph and contracted ones to None. Contracted loops
        and cycles raise the genus of the merged vertex.
        """
        subset = frozenset(edge_subset)
        cached = _CONTRACT_CACHE.get((self, subset))
        if cached is not None:
            return cached
        parent = list(range(self.n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for j in subset:
            a, b = self.edges[j]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        comp_of = {}
        for v in range(self.n_vertices):
            comp_of.setdefault(find(v), len(comp_of))
        vmap = [comp_of[find(v)] for v in range(self.n_vertices)]
        nc = len(comp_of)
        genera = [0] * nc
        sizes = [0] * nc
        internal = [0] * nc
        for v in range(self.n_vertices):
            genera[vmap[v]] += self.genera[v]
            sizes[vmap[v]] += 1
        for j in subset:
            internal[vmap[self.edges[j][0]]] += 1
        for c in range(nc):
            genera[c] += internal[c] - sizes[c] + 1
        survivors = sorted(set(range(self.n_edges)) - subset)
        raw_edges = [(vmap[self.edges[j][0]], vmap[self.edges[j][1]]) for j in survivors]
        raw = StableGraph(genera, [vmap[v] for v in self.legs], raw_edges)
        # place each surviving edge inside raw's sorted edge tuple
        raw_pos = _match_positions(raw.edges, [tuple(sorted(e)) for e in raw_edges])
        canon, perm = raw.canonical_with_perm()
        emap_c, hmap_c = raw.edge_maps_under(perm)
        vertex_map = tuple(perm[vmap[v]] for v in range(self.n_vertices))
        edge_map: list[int | None] = [None] * self.n_edges
        half_map: list[int | None] = [None] * (2 * self.n_edges)
        for pos, j in enumerate(survivors):
            rj = raw_pos[pos]
            edge_map[j] = emap_c[rj]
            a, b = self.edges[j]
            ra, rb = vmap[a], vmap[b]
            if ra <= rb:
                half_map[2 * j] = hmap_c[2 * rj]
                half_map[2 * j + 1] = hmap_c[2 * rj + 1]
            else:
                half_map[2 * j] = hmap_c[2 * rj + 1]
                half_map[2 * j + 1] = hmap_c[2 * rj]
        result = (canon, vertex_map, tuple(edge_map), tuple(half_map))
        _CONTRACT_CACHE[(self, subset)] = result
        return result

    def subdivide_edges(self, counts):
        """Insert counts[j] bubble vertices along edge j.

        Returns (graph, chains, inserted) where chains[j] lists the new
        edge indices from the 2j half toward the 2j+1 half, and
        inserted[j] the new vertex ids in the same direction. Vertex ids
        of the original graph are unchanged (no canonicalization here).
        """
        counts = list(counts)
        assert len(counts) == self.n_edges
        genera = list(self.genera)
        raw_edges: list[tuple[int, int]] = []
        raw_chain: list[list[int]] = []
        inserted: list[list[int]] = []
        for j, (a, b) in enumerate(self.edges):
            c = counts[j]
            mids = []
            for _ in range(c):
                mids.append(len(genera))
                genera.append(0)
            path = [a] + mids + [b]
            idxs = []
            for x, y in zip(path, path[1:]):
                idxs.append(len(raw_edges))
                raw_edges.append((x, y))
            raw_chain.append(idxs)
            inserted.append(mids)
        graph = StableGraph(genera, self.legs, raw_edges)
        pos = _match_positions(graph.edges, [tuple(sorted(e)) for e in raw_edges])
        chains = [[pos[i] for i in idxs] for idxs in raw_chain]
        return graph, chains, inserted

    def stabilize(self):
        """Contract one edge at each bubble vertex.

        Returns (canonical stable graph, vertex_map, edge_to_core) where
        edge_to_core[j] is the surviving core edge index; the two edges
        at a bubble land on the same core edge.
        """
        exc = self.exceptional_vertices()
        drop = set()
        for v in exc:
            h = self.halves_at(v)[0]
            drop.add(h // 2)
        canon, vmap, emap, _ = self.contract(drop)
        edge_to_core = list(emap)
        for v in exc:
            h0, h1 = self.halves_at(v)
            j0, j1 = h0 // 2, h1 // 2
            keep = j1 if j0 in drop else j0
            gone = j0 if j0 in drop else j1
            edge_to_core[gone] = edge_to_core[keep]
        return canon, vmap, tuple(edge_to_core)


def _rank(keys) -> list[int]:
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _match_positions(sorted_edges, raw_sorted_pairs) -> list[int]:
    """For each raw pair (in raw order) pick its slot in the sorted edge
    tuple, assigning duplicate pairs in order of appearance."""
    slots: dict[tuple[int, int], list[int]] = {}
    for i, e in enumerate(sorted_edges):
        slots.setdefault(e, []).append(i)
    used: dict[tuple[int, int], int] = {}
    out = []
    for e in raw_sorted_pairs:
        k = used.get(e, 0)
        used[e] = k + 1
        out.append(slots[e][k])
    return out


_CANON_CACHE: dict[StableGraph, tuple[StableGraph, tuple[int, ...]]] = {}
_CONTRACT_CACHE: dict = {}
_ENUM_CACHE: dict = {}


def isomorphism(g1: StableGraph, g2: StableGraph):
    """One vertex bijection g1 -> g2, or None."""
    c1, p1 = g1.canonical_with_perm()
    c2, p2 = g2.canonical_with_perm()
    if c1 != c2:
        return None
    inv2 = [0] * len(p2)
    for v, w in enumerate(p2):
        inv2[w] = v
    return tuple(inv2[p1[v]] for v in range(g1.n_vertices))


def stable_graphs(g: int, n: int, max_edges: int | None = None) -> tuple[StableGraph, ...]:
    """All isomorphism classes of stable graphs of genus g with n markings,
    canonical representatives sorted by key."""
    if g < 0 or n < 0 or (g == 0 and n < 3) or (g == 1 and n < 1):
        raise ValueError(f"no stable curves of type ({g}, {n})")
    dim = 3 * g - 3 + n
    cap = dim if max_edges is None else min(max_edges, dim)
    cache_key = (g, n, cap)
    if cache_key in _ENUM_CACHE:
        return _ENUM_CACHE[cache_key]
    found: set[StableGraph] = set()
    for ne in range(cap + 1):
        for nv in range(max(1, ne - g + 1), ne + 2):
            b1 = ne - nv + 1
            gsum = g - b1
            if b1 < 0 or gsum < 0:
                continue
            for genera in _genus_tuples(nv, gsum):
                for legs in itertools.product(range(nv), repeat=n):
                    nlegs = [0] * nv
                    for v in legs:
                        nlegs[v] += 1
                    lo = [
                        max(
                            3 - 2 * genera[v] - nlegs[v],
                            1 if nv > 1 else 0,
                        )
                        for v in range(nv)
                    ]
                    lo = [max(0, x) for x in lo]
                    if sum(lo) > 2 * ne:
                        continue
                    for ev in _sum_vectors(lo, 2 * ne):
                        for edges in _adjacency_fills(ev):
                            graph = StableGraph(genera, legs, edges)
                            if graph.is_connected():
                                found.add(graph.canonical())
    result = tuple(sorted(found, key=StableGraph.key))
    _ENUM_CACHE[cache_key] = result
    return result


def one_edge_graphs(g: int, n: int) -> tuple[StableGraph, ...]:
    return tuple(x for x in stable_graphs(g, n, 1) if x.n_edges == 1)


def trivial_graph(g: int, n: int) -> StableGraph:
    return StableGraph((g,), (0,) * n, ())


def _genus_tuples(nv: int, total: int):
    """Nondecreasing tuples of length nv summing to total."""

    def rec(k, lo, left):
        if k == 1:
            if left >= lo:
                yield (left,)
            return
        for x in range(lo, left // k + 1):
            for rest in rec(k - 1, x, left - x):
                yield (x,) + rest

    yield from rec(nv, 0, total)


def _sum_vectors(lows, total: int):
    """Integer vectors v >= lows with sum(v) == total."""

    def rec(i, left):
        if i == len(lows) - 1:
            if left >= lows[i]:
                yield (left,)
            return
        rest_min = sum(lows[i + 1 :])
        for x in range(lows[i], left - rest_min + 1):
            for tail in rec(i + 1, left - x):
                yield (x,) + tail

    if total < sum(lows):
        return
    yield from rec(0, total)


def _adjacency_fills(ev):
    """Edge multisets realizing the edge-valence vector ev."""
    nv = len(ev)

    def rec(u, budgets, edges):
        if u == nv:
            if all(b == 0 for b in budgets):
                yield list(edges)
            return
        # budgets below u are already exhausted by construction

        def place(v, budgets, edges):
            # distribute budgets[u] over loops at u and edges to v..nv-1
            if budgets[u] == 0:
                yield from rec(u + 1, budgets, edges)
                return
            if v > nv - 1:
                return
            if v == u:
                for m in range(budgets[u] // 2 + 1):
                    b2 = list(budgets)
                    b2[u] -= 2 * m
                    yield from place(u + 1, b2, edges + [(u, u)] * m)
            else:
                top = min(budgets[u], budgets[v])
                for m in range(top + 1):
                    b2 = list(budgets)
                    b2[u] -= m
                    b2[v] -= m
                    yield from place(v + 1, b2, edges + [(u, v)] * m)

        yield from place(u, budgets, edges)

    yield from rec(0, list(ev), [])
