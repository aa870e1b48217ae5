"""Intersection numbers of psi and kappa classes on moduli of curves.

psi numbers come from the string and dilaton equations plus the KdV
(Witten-Kontsevich) recursion in the form of Dijkgraaf-Verlinde-Verlinde;
kappa classes reduce to psi classes by the set-partition rule for
forgetting the extra markings. Everything is an exact Fraction.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache


def double_factorial(k: int) -> int:
    """(k)!! with (-1)!! = 1."""
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def _stable(g: int, n: int) -> bool:
    return 2 * g - 2 + n > 0


def psi_intersection(g: int, exps) -> Fraction:
    """<tau_{a_1} ... tau_{a_n}>_g, zero off the dimension gate."""
    exps = tuple(int(a) for a in exps)
    if g < 0 or any(a < 0 for a in exps):
        return Fraction(0)
    if not _stable(g, len(exps)):
        raise ValueError(f"({g}, {len(exps)}) is not a stable moduli space")
    return _psi(g, tuple(sorted(exps, reverse=True)))


@lru_cache(maxsize=None)
def _psi(g: int, exps: tuple[int, ...]) -> Fraction:
    n = len(exps)
    if not _stable(g, n) or any(a < 0 for a in exps):
        return Fraction(0)
    if sum(exps) != 3 * g - 3 + n:
        return Fraction(0)
    if (g, n) == (0, 3):
        return Fraction(1)
    if (g, n) == (1, 1):
        return Fraction(1, 24)
    if exps[-1] == 0:
        # string equation
        rest = exps[:-1]
        total = Fraction(0)
        for j in range(len(rest)):
            lowered = rest[:j] + (rest[j] - 1,) + rest[j + 1 :]
            if lowered[j] >= 0:
                total += _psi(g, tuple(sorted(lowered, reverse=True)))
        return total
    if exps[-1] == 1:
        return (2 * g - 2 + (n - 1)) * _psi(g, exps[:-1])
    # all exponents >= 2 now; apply DVV on the largest
    a1 = exps[0]
    rest = exps[1:]
    total = Fraction(0)
    for j, aj in enumerate(rest):
        merged = rest[:j] + (a1 + aj - 1,) + rest[j + 1 :]
        coeff = Fraction(
            double_factorial(2 * a1 + 2 * aj - 1), double_factorial(2 * aj - 1)
        )
        total += coeff * _psi(g, tuple(sorted(merged, reverse=True)))
    half = Fraction(0)
    for b in range(a1 - 1):
        c = a1 - 2 - b
        w = double_factorial(2 * b + 1) * double_factorial(2 * c + 1)
        if _stable(g - 1, n + 1):
            half += w * _psi(g - 1, tuple(sorted((b, c) + rest, reverse=True)))
        for g1 in range(g + 1):
            g2 = g - g1
            for split in _subsets(rest):
                part_i, part_j = split
                if not _stable(g1, len(part_i) + 1) or not _stable(g2, len(part_j) + 1):
                    continue
                half += (
                    w
                    * _psi(g1, tuple(sorted((b,) + part_i, reverse=True)))
                    * _psi(g2, tuple(sorted((c,) + part_j, reverse=True)))
                )
    total += half / 2
    return total / double_factorial(2 * a1 + 1)


@lru_cache(maxsize=None)
def _subsets(items: tuple) -> tuple:
    out = []
    n = len(items)
    for mask in range(1 << n):
        left = tuple(items[i] for i in range(n) if mask >> i & 1)
        right = tuple(items[i] for i in range(n) if not mask >> i & 1)
        out.append((left, right))
    return tuple(out)


def set_partitions(items: list):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def kappa_psi_intersection(g: int, psi_exps, kappa_indices) -> Fraction:
    """<prod tau_{b_i} prod kappa_{a_j}>_g.

    Each block B of a partition of the kappa set turns into one extra
    marking carrying tau_{1 + sum of a_j over B}, weighted by
    (-1)^(|B|-1); absorbing a subset into one lift step has a unique
    execution path, so no factorial shows up.
    """
    psi_exps = tuple(int(b) for b in psi_exps)
    kappas = [int(a) for a in kappa_indices]
    if not kappas:
        return psi_intersection(g, psi_exps)
    total = Fraction(0)
    for part in set_partitions(kappas):
        coeff = 1
        extra = []
        for block in part:
            coeff *= (-1) ** (len(block) - 1)
            extra.append(1 + sum(block))
        total += coeff * psi_intersection(g, psi_exps + tuple(extra))
    return total


def moduli_dim(g: int, n: int) -> int:
    return 3 * g - 3 + n
