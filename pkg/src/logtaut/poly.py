"""Sparse multivariate polynomials over the rationals.

Exponent tuples map to nonzero Fraction coefficients. Instances are
treated as immutable: every operation builds a fresh Poly, and hashing
relies on nobody mutating `d` after construction.

Also provides truncated one-variable power series helpers (plain lists
of Fractions) used for Todd-style coefficient expansions.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial


class Poly:
    __slots__ = ("n", "d")

    def __init__(self, n: int, d: dict[tuple[int, ...], Fraction] | None = None):
        self.n = n
        self.d = {e: c for e, c in (d or {}).items() if c != 0}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls(n)

    @classmethod
    def const(cls, n: int, c) -> "Poly":
        c = Fraction(c)
        return cls(n, {(0,) * n: c} if c else {})

    @classmethod
    def var(cls, n: int, i: int) -> "Poly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, n: int, exps, c=1) -> "Poly":
        e = tuple(exps)
        assert len(e) == n
        return cls(n, {e: Fraction(c)})

    @classmethod
    def linear(cls, coeffs) -> "Poly":
        """The linear form sum_i coeffs[i] * x_i."""
        coeffs = list(coeffs)
        n = len(coeffs)
        d = {}
        for i, c in enumerate(coeffs):
            c = Fraction(c)
            if c:
                e = [0] * n
                e[i] = 1
                d[tuple(e)] = c
        return cls(n, d)

    # -- ring operations ----------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.d)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.n == other.n and self.d == other.d
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.d.items())))

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        assert self.n == other.n
        d = dict(self.d)
        for e, c in other.d.items():
            s = d.get(e, Fraction(0)) + c
            if s:
                d[e] = s
            else:
                d.pop(e, None)
        return Poly(self.n, d)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.n, {e: -c for e, c in self.d.items()})

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(self.n, other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        assert self.n == other.n
        d: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.d.items():
            for e2, c2 in other.d.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = d.get(e, Fraction(0)) + c1 * c2
                if s:
                    d[e] = s
                else:
                    d.pop(e, None)
        return Poly(self.n, d)

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.n)
        return Poly(self.n, {e: c * v for e, v in self.d.items()})

    def __pow__(self, k: int) -> "Poly":
        assert k >= 0
        result = Poly.const(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    # -- structure ----------------------------------------------------

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.d:
            return -1
        return max(sum(e) for e in self.d)

    def homogeneous_part(self, k: int) -> "Poly":
        return Poly(self.n, {e: c for e, c in self.d.items() if sum(e) == k})

    def homogeneous_parts(self) -> dict[int, "Poly"]:
        out: dict[int, dict] = {}
        for e, c in self.d.items():
            out.setdefault(sum(e), {})[e] = c
        return {k: Poly(self.n, d) for k, d in sorted(out.items())}

    def constant(self) -> Fraction:
        return self.d.get((0,) * self.n, Fraction(0))

    def eval(self, point) -> Fraction:
        pt = [Fraction(x) for x in point]
        total = Fraction(0)
        for e, c in self.d.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term *= x**k
            total += term
        return total

    def substitute(self, i: int, p: "Poly") -> "Poly":
        """Replace variable i by the polynomial p (same variable count)."""
        assert p.n == self.n
        out = Poly.zero(self.n)
        powers = {0: Poly.const(self.n, 1)}
        for e, c in self.d.items():
            k = e[i]
            if k not in powers:
                powers[k] = p**k
            rest = list(e)
            rest[i] = 0
            out = out + powers[k] * Poly.monomial(self.n, rest, c)
        return out

    def relabel(self, mapping, m: int) -> "Poly":
        """Move variable i to slot mapping[i] in an m-variable ring.

        mapping must be injective on the variables actually used.
        Handles both permutations (m == n) and embeddings (m > n).
        """
        d: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.d.items():
            new = [0] * m
            for i, k in enumerate(e):
                if k:
                    new[mapping[i]] += k
            key = tuple(new)
            assert key not in d
            d[key] = c
        return Poly(m, d)

    def divide_linear(self, w) -> "Poly":
        """Exact quotient by the linear form w . x; raises if not divisible."""
        w = [Fraction(x) for x in w]
        assert len(w) == self.n
        p = next((i for i, x in enumerate(w) if x != 0), None)
        if p is None:
            raise ValueError("division by zero form")
        c = w[p]
        rest = list(w)
        rest[p] = 0
        r = dict(self.d)
        q: dict[tuple[int, ...], Fraction] = {}
        while r:
            m = max(e[p] for e in r)
            if m == 0:
                raise ValueError("not divisible by linear form")
            top = [(e, cf) for e, cf in r.items() if e[p] == m]
            for e, cf in top:
                qe = list(e)
                qe[p] -= 1
                qc = cf / c
                qe_t = tuple(qe)
                q[qe_t] = q.get(qe_t, Fraction(0)) + qc
                # subtract (w . x) * qc * x^qe from the running remainder
                del r[e]
                for j, wj in enumerate(rest):
                    if wj:
                        e2 = list(qe)
                        e2[j] += 1
                        e2_t = tuple(e2)
                        s = r.get(e2_t, Fraction(0)) - wj * qc
                        if s:
                            r[e2_t] = s
                        else:
                            r.pop(e2_t, None)
        return Poly(self.n, q)

    def __repr__(self) -> str:
        if not self.d:
            return "0"
        parts = []
        for e, c in sorted(self.d.items()):
            vars_ = "*".join(
                f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k
            )
            parts.append(f"{c}" + (f"*{vars_}" if vars_ else ""))
        return " + ".join(parts)


# -- truncated one-variable series (lists indexed by power) ------------


def ser_trim(a, cap: int) -> list[Fraction]:
    out = [Fraction(x) for x in a[: cap + 1]]
    out += [Fraction(0)] * (cap + 1 - len(out))
    return out


def ser_mul(a, b, cap: int) -> list[Fraction]:
    out = [Fraction(0)] * (cap + 1)
    for i, x in enumerate(a[: cap + 1]):
        if x == 0:
            continue
        for j, y in enumerate(b[: cap + 1 - i]):
            if y:
                out[i + j] += x * y
    return out

def ser_inv(a, cap: int) -> list[Fraction]:
    a = ser_trim(a, cap)
    assert a[0] != 0
    out = [Fraction(1) / a[0]] + [Fraction(0)] * cap
    for k in range(1, cap + 1):
        out[k] = -sum(a[i] * out[k - i] for i in range(1, k + 1)) / a[0]
    return out


def ser_log(a, cap: int) -> list[Fraction]:
    """log of a series with constant term 1, via log' = a'/a."""
    a = ser_trim(a, cap)
    assert a[0] == 1
    da = [a[k] * k for k in range(1, cap + 1)]
    quot = ser_mul(da, ser_inv(a, cap), cap - 1) if cap else []
    return [Fraction(0)] + [quot[k - 1] / k for k in range(1, cap + 1)]


def ser_exp(a, cap: int) -> list[Fraction]:
    """exp of a series with constant term 0."""
    a = ser_trim(a, cap)
    assert a[0] == 0
    out = [Fraction(1)] + [Fraction(0)] * cap
    # out' = a' * out, solved coefficient by coefficient
    for k in range(1, cap + 1):
        out[k] = sum(i * a[i] * out[k - i] for i in range(1, k + 1)) / k
    return out


def todd_log_coeffs(cap: int) -> list[Fraction]:
    """Coefficients f_m of log(t / (1 - e^{-t})) up to degree cap.

    f_0 = 0, f_1 = 1/2, f_2 = -1/24.
    """
    # (1 - e^{-t}) / t = sum_k (-1)^k t^k / (k+1)!
    base = [Fraction((-1) ** k, factorial(k + 1)) for k in range(cap + 1)]
    return [-x for x in ser_log(base, cap)]
