"""Chern characters of derived pushforwards along the universal curve.

The closed form for ch_m(Rpi_* L), L a power of the log cotangent line
twisted down at markings, has three layers: a kappa term, psi terms at
the markings, and a node correction summed over one-edge graphs.  The
weights are Bernoulli polynomials evaluated at the twist integers.
Everything downstream (Hodge classes, Chern classes via Newton's
identities, degeneracy determinants) is exact rational arithmetic.
"""

from fractions import Fraction
from math import comb, factorial

from .graphs import StableGraph, one_edge_graphs
from .taut import Decoration, TautExpr, half_autos

_BERNOULLI: list[Fraction] = [Fraction(1)]


def bernoulli_number(k: int) -> Fraction:
    # B_1 = -1/2 convention
    while len(_BERNOULLI) <= k:
        m = len(_BERNOULLI)
        acc = sum(comb(m + 1, j) * _BERNOULLI[j] for j in range(m))
        _BERNOULLI.append(Fraction(-acc, m + 1))
    return _BERNOULLI[k]


def bernoulli_poly(m: int, x) -> Fraction:
    x = Fraction(x)
    return sum(comb(m, k) * bernoulli_number(k) * x ** (m - k) for k in range(m + 1))


def _halves_swappable(graph: StableGraph) -> bool:
    return any(hperm[0] == 1 for _, hperm in half_autos(graph))


def _node_sum(g: int, n: int, m: int) -> TautExpr:
    """Sum over one-edge graphs of the pushed branch-psi polynomial.

    The polynomial is the symmetrization of sum_{i+j=m-1} x^i (-y)^j in
    the two branch psi classes.  Graphs whose halves are exchanged by an
    automorphism count with weight 1/2, matching the double cover of the
    node locus by ordered branches.
    """
    total = TautExpr.zero(g, n)
    if m == 0:
        return total
    for graph in one_edge_graphs(g, n):
        w = Fraction(1, 2) if _halves_swappable(graph) else Fraction(1)
        nv = graph.n_vertices
        for i in range(m):
            j = m - 1 - i
            c = Fraction((-1) ** j + (-1) ** i, 2) * w
            if not c:
                continue
            dec = Decoration(((),) * nv, (i, j), (0,) * n)
            total = total + TautExpr.push(g, n, graph, dec, c)
    return total


def pushforward_ch(g: int, n: int, m: int, power: int = 0, twists=None) -> TautExpr:
    """ch_m of Rpi_* of (log cotangent)^power twisted down by twists_i at marking i.

    Fiber degree is power*(2g-2+n) - sum(twists); degree m = 0 returns
    (d - g + 1) times the fundamental class.
    """
    twists = tuple(twists) if twists is not None else (0,) * n
    assert len(twists) == n
    f = Fraction(1, factorial(m + 1))
    out = TautExpr.kappa(g, n, m).scale(f * bernoulli_poly(m + 1, power))
    for i, b in enumerate(twists):
        c = f * bernoulli_poly(m + 1, b)
        if c:
            out = out - (TautExpr.psi(g, n, i) ** m).scale(c)
    node = f * bernoulli_number(m + 1)
    if node:
        out = out + _node_sum(g, n, m).scale(node)
    return out


def hodge_ch(g: int, n: int, m: int) -> TautExpr:
    """ch_m of the rank-g bundle of relative differentials, m >= 1."""
    assert m >= 1
    expr = pushforward_ch(g, n, m)
    return expr if m % 2 else -expr


def chern_from_ch(chs):
    """Chern classes c_0..c_k from Chern characters ch_0..ch_k (Newton).

    Works for any graded ring elements supporting +, -, *, scale; ch_0
    only fixes the length.
    """
    one = chs[0].one_like()
    cs = [one]
    for k in range(1, len(chs)):
        acc = None
        for i in range(1, k + 1):
            term = (cs[k - i] * chs[i]).scale(Fraction(factorial(i), 1))
            if i % 2 == 0:
                term = -term
            acc = term if acc is None else acc + term
        cs.append(acc.scale(Fraction(1, k)))
    return cs


def lambda_classes(g: int, n: int, upto: int):
    """lambda_0 = 1 through lambda_upto on moduli of (g, n) curves."""
    chs = [TautExpr.const(g, n, g)]
    chs += [hodge_ch(g, n, m) for m in range(1, upto + 1)]
    return chern_from_ch(chs)


def _det(matrix):
    """Leibniz determinant over ring elements; None entries are zero."""
    size = len(matrix)
    import itertools as _it

    acc = None
    for perm in _it.permutations(range(size)):
        if any(matrix[i][perm[i]] is None for i in range(size)):
            continue
        inv = sum(
            1 for a in range(size) for b in range(a + 1, size) if perm[a] > perm[b]
        )
        term = matrix[0][perm[0]]
        for i in range(1, size):
            term = term * matrix[i][perm[i]]
        if inv % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def thom_porteous(p: int, q: int, cs):
    """Degeneracy determinant det(c_{q+j-i}) of size p, codimension p*q.

    cs is the full Chern list starting at c_0; indices below zero vanish,
    indices beyond the list raise.
    """
    assert p >= 1 and q >= 0
    if q + p - 1 >= len(cs):
        raise ValueError("insufficient Chern data for the requested determinant")
    matrix = []
    for i in range(1, p + 1):
        row = []
        for j in range(1, p + 1):
            k = q + j - i
            row.append(cs[k] if k >= 0 else None)
        matrix.append(row)
    out = _det(matrix)
    return cs[0].scale(Fraction(0)) if out is None else out
