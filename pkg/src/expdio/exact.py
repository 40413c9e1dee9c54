"""Exact integers, Gaussian integers and certified interval arithmetic.

Every real quantity that feeds a decision is carried as an ``Interval`` with
dyadic rational endpoints.  Transcendental functions are evaluated with
fixed-point integer series whose truncation and rounding errors are tracked
explicitly, so the returned interval always contains the true value.  No
floating point is used on any certified path.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

DEFAULT_BITS = 128
MAX_BITS = 16384
_GUARD = 24

Number = Union[int, Fraction]


class PrecisionExhausted(ArithmeticError):
    """A comparison stayed undecided up to the precision cap."""


# ---------------------------------------------------------------------------
# Gaussian integers


@dataclass(frozen=True)
class GaussInt:
    re: int
    im: int = 0

    def __add__(self, other):
        other = _as_gauss(other)
        return GaussInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gauss(other)
        return GaussInt(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __mul__(self, other):
        other = _as_gauss(other)
        return GaussInt(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return gauss_pow(self, n)

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im


def _as_gauss(x) -> GaussInt:
    if isinstance(x, GaussInt):
        return x
    if isinstance(x, int):
        return GaussInt(x, 0)
    raise TypeError(f"cannot treat {x!r} as a Gaussian integer")


def gauss_pow(base: GaussInt, n: int) -> GaussInt:
    """``base**n`` for ``n >= 0`` by binary exponentiation."""
    if n < 0:
        raise ValueError("negative exponent")
    result = GaussInt(1, 0)
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


# ---------------------------------------------------------------------------
# dyadic rounding


def _round_down(q: Fraction, bits: int) -> Fraction:
    n, d = q.numerator, q.denominator
    if n == 0:
        return q
    if d & (d - 1) == 0 and abs(n).bit_length() <= bits:
        return q
    shift = bits - (abs(n).bit_length() - d.bit_length())
    if shift >= 0:
        return Fraction((n << shift) // d, 1 << shift)
    return Fraction((n // (d << -shift)) << -shift)


def _round_up(q: Fraction, bits: int) -> Fraction:
    return -_round_down(-q, bits)


# ---------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints.

    ``bits`` is the mantissa length used when rounding results of arithmetic
    outward.  Mixing two intervals uses the larger of the two precisions.
    """

    lo: Fraction
    hi: Fraction
    bits: int = DEFAULT_BITS

    def __post_init__(self):
        if not isinstance(self.lo, Fraction):
            object.__setattr__(self, "lo", Fraction(self.lo))
        if not isinstance(self.hi, Fraction):
            object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x: Number, bits: int = DEFAULT_BITS) -> "Interval":
        x = Fraction(x)
        return cls(x, x, bits)

    # -- helpers
    def _mk(self, lo: Fraction, hi: Fraction, bits: int) -> "Interval":
        return Interval(_round_down(lo, bits), _round_up(hi, bits), bits)

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, (int, Fraction)):
            return Interval.exact(other, self.bits)
        return NotImplemented

    # -- arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        b = max(self.bits, other.bits)
        return self._mk(self.lo + other.lo, self.hi + other.hi, b)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo, self.bits)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        b = max(self.bits, other.bits)
        return self._mk(self.lo - other.hi, self.hi - other.lo, b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        b = max(self.bits, other.bits)
        if self.lo >= 0 and other.lo >= 0:
            return self._mk(self.lo * other.lo, self.hi * other.hi, b)
        ps = (self.lo * other.lo, self.lo * other.hi,
              self.hi * other.lo, self.hi * other.hi)
        return self._mk(min(ps), max(ps), b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        b = max(self.bits, other.bits)
        inv = Interval(_round_down(1 / other.hi, b), _round_up(1 / other.lo, b), b)
        return self * inv

    def __rtruediv__(self, other):
        return Interval.exact(other, self.bits) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        if n == 0:
            return Interval.exact(1, self.bits)
        if n % 2 == 1 or self.lo >= 0:
            return self._mk(self.lo ** n, self.hi ** n, self.bits)
        if self.hi <= 0:
            return self._mk(self.hi ** n, self.lo ** n, self.bits)
        m = max(-self.lo, self.hi)
        return self._mk(Fraction(0), m ** n, self.bits)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi), self.bits)

    # -- queries
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= Fraction(x) <= self.hi

    def definitely_lt(self, other) -> bool:
        other = self._coerce(other)
        return self.hi < other.lo

    def definitely_gt(self, other) -> bool:
        other = self._coerce(other)
        return self.lo > other.hi

    def compare(self, other) -> Optional[int]:
        """-1 or 1 if the order against ``other`` is certain, else None."""
        if self.definitely_lt(other):
            return -1
        if self.definitely_gt(other):
            return 1
        return None

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi),
                        max(self.bits, other.bits))

    def with_bits(self, bits: int) -> "Interval":
        return Interval(self.lo, self.hi, bits)

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r}, bits={self.bits})"


def _as_interval(x, bits: int) -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.exact(x, bits)


def _from_fixed(s: int, e: int, w: int, bits: int, scale_exp: int = 0) -> Interval:
    """Interval for ``[(s-e), (s+e)] * 2**(scale_exp - w)``."""
    k = scale_exp - w
    if k >= 0:
        lo, hi = Fraction((s - e) << k), Fraction((s + e) << k)
    else:
        lo, hi = Fraction(s - e, 1 << -k), Fraction(s + e, 1 << -k)
    return Interval(_round_down(lo, bits + _GUARD), _round_up(hi, bits + _GUARD), bits)


# ---------------------------------------------------------------------------
# fixed-point series; each returns (S, E) with |value * 2**W - S| <= E


def _atan_series(p: int, q: int, w: int) -> tuple[int, int]:
    # requires |p/q| <= 1/2
    neg = p < 0
    p = -p if neg else p
    power = (p << w) // q
    p2, q2 = p * p, q * q
    s, k = 0, 0
    while power:
        term = power // (2 * k + 1)
        s = s + term if k % 2 == 0 else s - term
        power = power * p2 // q2
        k += 1
    return (-s if neg else s), 3 * k + 3


def _atanh_series(p: int, q: int, w: int) -> tuple[int, int]:
    # 2*atanh(p/q) for |p/q| <= 1/3
    neg = p < 0
    p = -p if neg else p
    power = (p << w) // q
    p2, q2 = p * p, q * q
    s, k = 0, 0
    while power:
        s += power // (2 * k + 1)
        power = power * p2 // q2
        k += 1
    s, e = 2 * s, 2 * (3 * k + 3)
    return (-s if neg else s), e


@lru_cache(maxsize=64)
def _pi_fixed(w: int) -> tuple[int, int]:
    s1, e1 = _atan_series(1, 5, w)
    s2, e2 = _atan_series(1, 239, w)
    return 16 * s1 - 4 * s2, 16 * e1 + 4 * e2


@lru_cache(maxsize=64)
def _ln2_fixed(w: int) -> tuple[int, int]:
    return _atanh_series(1, 3, w)


def _atan_fixed(x: Fraction, w: int) -> tuple[int, int]:
    neg = x < 0
    if neg:
        x = -x
    p, q = x.numerator, x.denominator
    if 2 * p <= q:
        s, e = _atan_series(p, q, w)
    elif p <= q:
        ps, pe = _pi_fixed(w)
        t, te = _atan_series(p - q, p + q, w)
        s, e = (ps >> 2) + t, pe // 4 + 1 + te
    else:
        ps, pe = _pi_fixed(w)
        t, te = _atan_fixed(Fraction(q, p), w)
        s, e = (ps >> 1) - t, pe // 2 + 1 + te
    return (-s if neg else s), e


def _log_fixed(x: Fraction, w: int) -> tuple[int, int]:
    n, d = x.numerator, x.denominator
    k = n.bit_length() - d.bit_length()
    mn, md = (n, d << k) if k >= 0 else (n << -k, d)
    if 3 * mn > 4 * md:
        k += 1
        md <<= 1
    elif 3 * mn < 2 * md:
        k -= 1
        mn <<= 1
    s, e = _atanh_series(mn - md, mn + md, w)
    if k:
        l2, l2e = _ln2_fixed(w)
        s += k * l2
        e += abs(k) * l2e
    return s, e


def _exp_series(r: int, w: int) -> tuple[int, int]:
    # exp(r / 2**w) for |r / 2**w| <= 1/2
    one = 1 << w
    s, term, j = one, one, 1
    while term:
        term = (term * r >> w) // j
        s += term
        j += 1
    return s, 2 * j + 6


def _sincos_series(r: int, w: int, want_sin: bool) -> tuple[int, int]:
    # sin or cos of r / 2**w for |r / 2**w| <= 1
    one = 1 << w
    if want_sin:
        term, s, j = r, r, 1
    else:
        term, s, j = one, one, 0
    k = 0
    while term:
        term = -((term * r >> w) * r >> w) // ((j + 1) * (j + 2))
        s += term
        j += 2
        k += 1
    return s, 3 * k + 6


# ---------------------------------------------------------------------------
# public certified functions


def _wbits(bits: int, extra: int = 0) -> int:
    return bits + _GUARD + extra


def interval_pi(bits: int = DEFAULT_BITS) -> Interval:
    w = _wbits(bits)
    s, e = _pi_fixed(w)
    return _from_fixed(s, e, w, bits)


def _log_point(x: Fraction, bits: int) -> Interval:
    if x <= 0:
        raise ValueError("log of a non-positive number")
    if x == 1:
        return Interval.exact(0, bits)
    extra = abs(x.numerator.bit_length() - x.denominator.bit_length()).bit_length()
    w = _wbits(bits, extra)
    s, e = _log_fixed(x, w)
    return _from_fixed(s, e, w, bits)


def interval_log(x, bits: int = DEFAULT_BITS) -> Interval:
    """Certified natural logarithm of a positive rational or interval."""
    if isinstance(x, Interval):
        if x.lo <= 0:
            raise ValueError("log of an interval reaching zero")
        lo = _log_point(x.lo, bits)
        hi = lo if x.hi == x.lo else _log_point(x.hi, bits)
        return Interval(lo.lo, hi.hi, bits)
    return _log_point(Fraction(x), bits)


def _atan_point(x: Fraction, bits: int) -> Interval:
    if x == 0:
        return Interval.exact(0, bits)
    w = _wbits(bits)
    s, e = _atan_fixed(x, w)
    return _from_fixed(s, e, w, bits)


def interval_atan(x, bits: int = DEFAULT_BITS) -> Interval:
    if isinstance(x, Interval):
        lo = _atan_point(x.lo, bits)
        hi = lo if x.hi == x.lo else _atan_point(x.hi, bits)
        return Interval(lo.lo, hi.hi, bits)
    return _atan_point(Fraction(x), bits)


def interval_atan2(v: Number, u: Number, bits: int = DEFAULT_BITS) -> Interval:
    """Certified ``atan(v/u)`` for ``u > 0``.

    >>> interval_atan2(1, 1).contains(interval_pi() / 4)
    True
    """
    if u == 0:
        raise ValueError("atan2 with u = 0 is not supported")
    if u < 0:
        raise ValueError("atan2 expects u > 0")
    return _atan_point(Fraction(v) / Fraction(u), bits)


def _exp_point(x: Fraction, bits: int) -> Interval:
    if x == 0:
        return Interval.exact(1, bits)
    # k = round(x / log 2), chosen with a crude estimate; correctness does not
    # depend on the choice, only the size of the reduced argument does.
    ln2_approx = Fraction(6243314768165359, 9007199254740992)
    k = round(x / ln2_approx)
    w = _wbits(bits, abs(k).bit_length() + 4)
    l2, l2e = _ln2_fixed(w)
    xs_lo = (x.numerator << w) // x.denominator
    xs_hi = xs_lo + 1
    # r = x - k log 2 lies in [r_lo, r_hi] (fixed point)
    if k >= 0:
        r_lo = xs_lo - k * (l2 + l2e)
        r_hi = xs_hi - k * (l2 - l2e)
    else:
        r_lo = xs_lo - k * (l2 - l2e)
        r_hi = xs_hi - k * (l2 + l2e)
    s_lo, e_lo = _exp_series(r_lo, w)
    s_hi, e_hi = _exp_series(r_hi, w)
    lo = _from_fixed(s_lo, e_lo, w, bits, k)
    hi = _from_fixed(s_hi, e_hi, w, bits, k)
    return Interval(max(lo.lo, Fraction(0)), hi.hi, bits)


def interval_exp(x, bits: int = DEFAULT_BITS) -> Interval:
    if isinstance(x, Interval):
        lo = _exp_point(x.lo, bits)
        hi = lo if x.hi == x.lo else _exp_point(x.hi, bits)
        return Interval(lo.lo, hi.hi, bits)
    return _exp_point(Fraction(x), bits)


def _reduce_quarter(x: Fraction, bits: int) -> tuple[int, int, int, int]:
    """Write x = j*pi/2 + r; returns (j, r_lo, r_hi, w) with r in fixed point."""
    jbits = max(0, x.numerator.bit_length() - x.denominator.bit_length() + 1)
    w = _wbits(bits, jbits + 4)
    ps, pe = _pi_fixed(w)
    xs_lo = (x.numerator << w) // x.denominator
    xs_hi = xs_lo + 1
    j = (4 * xs_lo + ps) // (2 * ps)
    # half pi in [(ps - pe)/2, (ps + pe)/2]
    if j >= 0:
        r_lo = xs_lo - (j * (ps + pe) + 1) // 2
        r_hi = xs_hi - (j * (ps - pe)) // 2
    else:
        r_lo = xs_lo - (j * (ps - pe)) // 2 - 1
        r_hi = xs_hi - (j * (ps + pe)) // 2 + 1
    return j, r_lo, r_hi, w


def _sin_cos_point(x: Fraction, bits: int, want_sin: bool) -> Interval:
    j, r_lo, r_hi, w = _reduce_quarter(x, bits)
    q = j % 4
    # sin(x) = [sin r, cos r, -sin r, -cos r][q]; cos(x) = sin(x + pi/2)
    if not want_sin:
        q = (q + 1) % 4
    use_sin = q in (0, 2)
    if use_sin:
        a, ae = _sincos_series(r_lo, w, True)
        b, be = _sincos_series(r_hi, w, True)
        val = Interval(_from_fixed(a, ae, w, bits).lo, _from_fixed(b, be, w, bits).hi, bits)
    else:
        a, ae = _sincos_series(r_lo, w, False)
        b, be = _sincos_series(r_hi, w, False)
        ia, ib = _from_fixed(a, ae, w, bits), _from_fixed(b, be, w, bits)
        lo = min(ia.lo, ib.lo)
        hi = max(ia.hi, ib.hi)
        if r_lo <= 0 <= r_hi:
            hi = max(hi, Fraction(1))
        val = Interval(lo, min(hi, Fraction(1)) if lo <= 1 else hi, bits)
    return -val if q >= 2 else val


def interval_sin(x, bits: int = DEFAULT_BITS) -> Interval:
    if isinstance(x, Interval):
        return _trig_interval(x, bits, True)
    return _sin_cos_point(Fraction(x), bits, True)


def interval_cos(x, bits: int = DEFAULT_BITS) -> Interval:
    if isinstance(x, Interval):
        return _trig_interval(x, bits, False)
    return _sin_cos_point(Fraction(x), bits, False)


def _trig_interval(x: Interval, bits: int, want_sin: bool) -> Interval:
    a = _sin_cos_point(x.lo, bits, want_sin)
    if x.lo == x.hi:
        return a
    b = _sin_cos_point(x.hi, bits, want_sin)
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    pi = interval_pi(bits)
    # extrema sit at pi/2 + k*pi (sin) or k*pi (cos)
    offset = Fraction(1, 2) if want_sin else Fraction(0)
    k_lo = int((x.lo / pi.hi) - offset) - 2
    k_hi = int((x.hi / pi.lo) - offset) + 2
    for k in range(k_lo, k_hi + 1):
        crit = pi * (k + offset) if k + offset != 0 else Interval.exact(0, bits)
        if crit.hi >= x.lo and crit.lo <= x.hi:
            if k % 2 == 0:
                hi = Fraction(1)
            else:
                lo = Fraction(-1)
    return Interval(max(lo, Fraction(-1)), min(hi, Fraction(1)), bits)


def interval_sqrt(x, bits: int = DEFAULT_BITS) -> Interval:
    from math import isqrt

    def point(q: Fraction, up: bool) -> Fraction:
        if q < 0:
            raise ValueError("sqrt of a negative number")
        w = _wbits(bits, max(0, -(q.numerator.bit_length() - q.denominator.bit_length()) // 2))
        m = isqrt((q.numerator << (2 * w)) // q.denominator)
        return Fraction(m + 1 if up else m, 1 << w)

    x = _as_interval(x, bits)
    return Interval(point(x.lo, False), point(x.hi, True), bits)


def refine(decide: Callable[[int], Optional[bool]], start_bits: int = DEFAULT_BITS,
           max_bits: int = MAX_BITS):
    """Re-run ``decide(bits)`` at doubling precision until it returns a verdict."""
    bits = start_bits
    while bits <= max_bits:
        verdict = decide(bits)
        if verdict is not None:
            return verdict
        bits *= 2
    raise PrecisionExhausted(f"undecided at {max_bits} bits")


def ceil_fraction(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def floor_fraction(q: Fraction) -> int:
    return q.numerator // q.denominator


def ilog_floor(n: int, base: int) -> int:
    """Largest k with base**k <= n (n >= 1)."""
    k, p = 0, base
    while p <= n:
        p *= base
        k += 1
    return k


def iroot_exact(n: int, k: int) -> Optional[int]:
    """Exact integer k-th root of n >= 0, or None."""
    if n < 0:
        return None
    if n < 2:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    return x if x ** k == n else None
