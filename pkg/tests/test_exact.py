from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from expdio.exact import (GaussInt, Interval, PrecisionExhausted, ceil_fraction, floor_fraction,
                          gauss_pow, ilog_floor, interval_atan, interval_atan2, interval_cos,
                          interval_exp, interval_log, interval_pi, interval_sin, interval_sqrt,
                          iroot_exact, refine)
from oracles import encloses, gauss_pow_naive, mpf

fractions = st.builds(Fraction, st.integers(-10 ** 12, 10 ** 12), st.integers(1, 10 ** 14))
positive = fractions.filter(lambda q: q > 0)
bits_st = st.sampled_from([64, 128, 256])


def at_4x(bits):
    mpmath.mp.prec = 4 * bits


class TestGauss:
    def test_cube(self):
        assert gauss_pow(GaussInt(2, 1), 3) == GaussInt(2, 11)

    def test_identity_and_empty(self):
        assert gauss_pow(GaussInt(6, 7), 1) == GaussInt(6, 7)
        assert gauss_pow(GaussInt(2, 1), 0) == GaussInt(1, 0)

    @given(st.integers(-50, 50), st.integers(-50, 50), st.integers(0, 40))
    def test_matches_repeated_multiplication(self, u, v, n):
        g = gauss_pow(GaussInt(u, v), n)
        assert (g.re, g.im) == gauss_pow_naive(u, v, n)

    @given(st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6), st.integers(0, 12))
    def test_norm_multiplicative(self, u, v, n):
        g = GaussInt(u, v)
        assert gauss_pow(g, n).norm() == g.norm() ** n


class TestNamedValues:
    def test_atan_symmetric(self):
        at_4x(64)
        assert encloses(interval_atan2(1, 1, 64), mpmath.pi / 4)

    def test_atan_7_6(self):
        at_4x(64)
        assert encloses(interval_atan2(7, 6, 64), mpmath.atan(mpmath.mpf(7) / 6))

    def test_atan_tiny(self):
        iv = interval_atan2(1, 10 ** 6, 64)
        assert Fraction(99999, 10 ** 11) < iv.lo and iv.hi < Fraction(10001, 10 ** 10)

    def test_log_one(self):
        assert interval_log(1, 64).contains(0)

    def test_log_e(self):
        e = Fraction(2718281828459045, 10 ** 15)
        at_4x(64)
        iv = interval_log(e, 64)
        assert encloses(iv, mpmath.log(mpf(e)))
        assert abs(iv.mid - 1) < Fraction(1, 10 ** 14)

    def test_log_c0(self):
        # the certified value is 24.41214..., see the decisions ledger
        iv = interval_log(4 * 10 ** 10 + 5, 64)
        at_4x(64)
        assert encloses(iv, mpmath.log(4 * 10 ** 10 + 5))
        assert abs(float(iv.mid) - 24.412145) < 1e-6

    def test_pi(self):
        at_4x(256)
        assert encloses(interval_pi(256), mpmath.pi)


class TestSoundness:
    @given(positive, bits_st)
    def test_log(self, x, bits):
        at_4x(bits)
        assert encloses(interval_log(x, bits), mpmath.log(mpf(x)))

    @given(fractions, bits_st)
    def test_atan(self, x, bits):
        at_4x(bits)
        assert encloses(interval_atan(x, bits), mpmath.atan(mpf(x)))

    @given(fractions.filter(lambda q: abs(q) < 2000), bits_st)
    def test_exp(self, x, bits):
        at_4x(bits)
        assert encloses(interval_exp(x, bits), mpmath.exp(mpf(x)))

    @given(fractions.filter(lambda q: abs(q) < 10 ** 9), bits_st)
    def test_sin_cos(self, x, bits):
        at_4x(bits)
        assert encloses(interval_sin(x, bits), mpmath.sin(mpf(x)))
        assert encloses(interval_cos(x, bits), mpmath.cos(mpf(x)))

    @given(positive, bits_st)
    def test_sqrt(self, x, bits):
        at_4x(bits)
        assert encloses(interval_sqrt(x, bits), mpmath.sqrt(mpf(x)))

    @given(positive, bits_st)
    def test_log_tight(self, x, bits):
        iv = interval_log(x, bits)
        assert iv.width <= Fraction(4, 2 ** bits) * max(1, abs(iv.mid))

    @given(fractions, fractions, fractions, fractions, st.sampled_from([32, 64]))
    def test_arithmetic_encloses_exact(self, a, b, c, d, bits):
        x = Interval(min(a, b), max(a, b), bits)
        y = Interval(min(c, d), max(c, d), bits)
        for p in (a, b):
            for q in (c, d):
                assert (x + y).contains(p + q)
                assert (x - y).contains(p - q)
                assert (x * y).contains(p * q)
                if not y.contains(0):
                    assert (x / y).contains(p / q)

    @given(fractions, fractions)
    def test_interval_argument(self, a, b):
        lo, hi = min(a, b), max(a, b)
        if hi - lo > 10:
            hi = lo + 10
        iv = interval_sin(Interval(lo, hi, 64), 64)
        for t in (lo, hi, (lo + hi) / 2):
            assert iv.lo <= interval_sin(t, 64).hi and interval_sin(t, 64).lo <= iv.hi


class TestIntegerHelpers:
    @given(fractions)
    def test_floor_ceil(self, q):
        f, c = floor_fraction(q), ceil_fraction(q)
        assert f <= q <= c and c - f <= 1 and (c == f) == (q.denominator == 1)

    @given(st.integers(1, 10 ** 30), st.integers(2, 40))
    def test_ilog(self, n, b):
        k = ilog_floor(n, b)
        assert b ** k <= n < b ** (k + 1)

    @given(st.integers(0, 10 ** 20), st.integers(2, 7))
    def test_iroot(self, x, k):
        assert iroot_exact(x ** k, k) == x
        if x > 1:
            assert iroot_exact(x ** k + 1, k) is None

    def test_refine_exhausts(self):
        with pytest.raises(PrecisionExhausted):
            refine(lambda bits: None, 64, 256)

    def test_refine_doubles(self):
        seen = []
        assert refine(lambda b: seen.append(b) or (True if b >= 256 else None), 64) is True
        assert seen == [64, 128, 256]

    def test_empty_interval_rejected(self):
        with pytest.raises(ValueError):
            Interval(Fraction(2), Fraction(1))
