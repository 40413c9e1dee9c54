"""Dense univariate polynomials over the rationals.

Coefficients are stored low degree first.  The resultant uses the
subresultant pseudo-remainder sequence on integer polynomials, which keeps
coefficient growth polynomial.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence


class Poly:
    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable = ()):
        c = [x if isinstance(x, (int, Fraction)) else Fraction(x) for x in coeffs]
        c = [int(x) if isinstance(x, Fraction) and x.denominator == 1 else x for x in c]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def monomial(cls, k: int, coeff=1) -> "Poly":
        return cls([0] * k + [coeff])

    @classmethod
    def x(cls) -> "Poly":
        return cls([0, 1])

    # -- basic
    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def lc(self):
        return self.c[-1] if self.c else 0

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly([other])
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        if not self.c:
            return "Poly(0)"
        terms = [f"{a}*x^{i}" for i, a in enumerate(self.c) if a]
        return "Poly(" + " + ".join(reversed(terms)) + ")"

    def __call__(self, x):
        acc = 0
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def _lift(self, other) -> "Poly":
        return other if isinstance(other, Poly) else Poly([other])

    def __add__(self, other):
        other = self._lift(other)
        n = max(len(self.c), len(other.c))
        a = self.c + (0,) * (n - len(self.c))
        b = other.c + (0,) * (n - len(other.c))
        return Poly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Poly(-x for x in self.c)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if not self.c or not other.c:
            return Poly()
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result, base = Poly([1]), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def derivative(self) -> "Poly":
        return Poly(i * a for i, a in enumerate(self.c) if i)

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(x) for x in self.c]
        q = [Fraction(0)] * max(0, len(rem) - len(other.c) + 1)
        lc = Fraction(other.lc())
        while len(rem) >= len(other.c) and any(rem):
            shift = len(rem) - len(other.c)
            f = rem[-1] / lc
            q[shift] = f
            for i, b in enumerate(other.c):
                rem[shift + i] -= f * b
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return Poly(q), Poly(rem)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    # -- integer helpers
    def is_integral(self) -> bool:
        return all(isinstance(a, int) for a in self.c)

    def content(self) -> int:
        return reduce(math.gcd, (int(a) for a in self.c), 0)

    def primitive(self) -> "Poly":
        """Integer primitive part with positive leading coefficient."""
        den = reduce(lambda x, y: x * y // math.gcd(x, y),
                     (Fraction(a).denominator for a in self.c), 1)
        ints = Poly(int(a * den) for a in self.c)
        g = ints.content()
        if g == 0:
            return Poly()
        p = Poly(a // g for a in ints.c)
        return -p if p.lc() < 0 else p

    def monic(self) -> "Poly":
        lc = Fraction(self.lc())
        return Poly(Fraction(a) / lc for a in self.c)


def prem(a: Poly, b: Poly) -> Poly:
    """Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b (integer polys)."""
    if b.is_zero():
        raise ZeroDivisionError("pseudo-division by zero")
    r = list(a.c)
    db, lb = b.degree, b.lc()
    e = a.degree - db + 1
    while len(r) - 1 >= db and r:
        shift = len(r) - 1 - db
        t = r[-1]
        r = [x * lb for x in r]
        for i, cb in enumerate(b.c):
            r[shift + i] -= t * cb
        r.pop()
        e -= 1
        while r and r[-1] == 0:
            r.pop()
    return Poly(r) * (lb ** e) if e > 0 else Poly(r)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Greatest common divisor over Q, returned as an integer primitive poly."""
    a, b = a.primitive(), b.primitive()
    while not b.is_zero():
        r = prem(a, b)
        a, b = b, (r.primitive() if not r.is_zero() else r)
    return a.primitive() if not a.is_zero() else a


def squarefree_part(f: Poly) -> Poly:
    g = poly_gcd(f, f.derivative())
    return (f.primitive() // g).primitive()


def resultant(a: Poly, b: Poly) -> int:
    """Resultant of two integer polynomials by the subresultant algorithm."""
    if not (a.is_integral() and b.is_integral()):
        raise ValueError("resultant expects integer coefficients")
    if a.is_zero() or b.is_zero():
        return 0
    ca, cb = a.content(), b.content()
    a = Poly(x // ca for x in a.c)
    b = Poly(x // cb for x in b.c)
    t = ca ** b.degree * cb ** a.degree
    s = 1
    if a.degree < b.degree:
        a, b = b, a
        if a.degree % 2 and b.degree % 2:
            s = -1
    g, h = 1, Fraction(1)
    while b.degree > 0:
        delta = a.degree - b.degree
        if a.degree % 2 and b.degree % 2:
            s = -s
        r = prem(a, b)
        a = b
        denom = g * h ** delta
        b = Poly(Fraction(x) / denom for x in r.c)
        if b.is_zero():
            return 0
        g = a.lc()
        h = h ** (1 - delta) * Fraction(g) ** delta
    hd = Fraction(h) ** (1 - a.degree) * Fraction(b.lc()) ** a.degree
    out = s * t * hd
    assert out.denominator == 1
    return int(out)


def discriminant(f: Poly) -> int:
    """(-1)^(d(d-1)/2) res(f, f') / lc(f) for an integer polynomial f."""
    d = f.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return 1
    res = resultant(f, f.derivative())
    q, r = divmod(res, f.lc())
    assert r == 0
    return (-1) ** (d * (d - 1) // 2) * q


def interpolate(xs: Sequence, ys: Sequence) -> Poly:
    """Lagrange interpolation over Q."""
    total = Poly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        term = Poly([Fraction(yi)])
        for j, xj in enumerate(xs):
            if j != i:
                term = term * Poly([Fraction(-xj, xi - xj), Fraction(1, xi - xj)])
        total = total + term
    return total
