"""Exact linear algebra over the rationals.

Small dense matrices only: plain Gaussian elimination on lists of
Fraction rows. No floating point anywhere in this package.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm

Vec = tuple[Fraction, ...]
Matrix = list[list[Fraction]]


def frac_rows(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


def mat_vec(m: Matrix, v) -> list[Fraction]:
    return [sum((row[j] * v[j] for j in range(len(v))), Fraction(0)) for row in m]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    cols = len(b[0])
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
        for i in range(len(a))
    ]


def rref(m) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form of a copy of m, plus pivot column indices."""
    a = frac_rows(m)
    if not a:
        return a, []
    rows, cols = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m) -> int:
    return len(rref(m)[1])


def det(m) -> Fraction:
    a = frac_rows(m)
    n = len(a)
    if n == 0:
        return Fraction(1)
    assert all(len(row) == n for row in a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if a[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            sign = -sign
        result *= a[c][c]
        inv = Fraction(1) / a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] * inv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return sign * result


def inverse(m) -> Matrix:
    a = frac_rows(m)
    n = len(a)
    aug = [row + identity(n)[i] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red[:n]]


def solve(m, b) -> list[Fraction] | None:
    """One solution of m x = b, or None if inconsistent."""
    a = frac_rows(m)
    if not a:
        return [] if all(Fraction(x) == 0 for x in b) else None
    cols = len(a[0])
    aug = [row + [Fraction(bb)] for row, bb in zip(a, b)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [Fraction(0)] * cols
    for r, c in enumerate(pivots):
        x[c] = red[r][cols]
    return x


def nullspace(m) -> list[list[Fraction]]:
    a = frac_rows(m)
    if not a:
        return []
    cols = len(a[0])
    red, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(v)
    return basis


def primitive(v) -> tuple[int, ...]:
    """Scale a nonzero rational vector by a positive factor to a primitive
    integer vector. Direction is preserved, never flipped."""
    fracs = [Fraction(x) for x in v]
    if all(x == 0 for x in fracs):
        raise ValueError("zero vector has no primitive form")
    mult = lcm(*(x.denominator for x in fracs))
    ints = [int(x * mult) for x in fracs]
    g = gcd(*ints)
    return tuple(x // g for x in ints)


def strict_feasible(ineqs) -> bool:
    """Is there an x with w . x > 0 for every w in ineqs?

    Homogeneous strict systems only, solved by Fourier-Motzkin elimination.
    Intended for cone interior and chamber overlap tests in low dimension;
    the inequality count can square with each eliminated variable.
    """
    system = []
    for w in ineqs:
        vec = tuple(Fraction(x) for x in w)
        if all(x == 0 for x in vec):
            return False
        system.append(primitive(vec))
    system = list(dict.fromkeys(system))
    if not system:
        return True
    nvars = len(system[0])
    for i in range(nvars):
        pos = [w for w in system if w[i] > 0]
        neg = [w for w in system if w[i] < 0]
        zero = [w for w in system if w[i] == 0]
        combined = set(zero)
        for u in pos:
            for w in neg:
                vec = tuple(u[i] * w[j] - w[i] * u[j] for j in range(nvars))
                if all(x == 0 for x in vec):
                    return False
                combined.add(primitive(vec))
        system = list(combined)
        if not system:
            return True
    return not system
