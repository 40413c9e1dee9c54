"""Independent reference computations used only by the tests."""
from fractions import Fraction

import mpmath


def mpf(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


def encloses(iv, value) -> bool:
    return mpf(iv.lo) <= value <= mpf(iv.hi)


def gauss_pow_naive(u, v, n):
    re, im = 1, 0
    for _ in range(n):
        re, im = re * u - im * v, re * v + im * u
    return re, im


def sylvester_resultant(a, b):
    import sympy
    m, n = a.degree, b.degree
    A, B = list(reversed(a.c)), list(reversed(b.c))
    rows = [[0] * i + A + [0] * (n - 1 - i) for i in range(n)]
    rows += [[0] * i + B + [0] * (m - 1 - i) for i in range(m)]
    return int(sympy.Matrix(rows).det())


def sympy_poly(p):
    import sympy
    x = sympy.Symbol("x")
    return sum(sympy.Integer(int(c)) * x ** i for i, c in enumerate(p.c)), x
