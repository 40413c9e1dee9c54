"""Factoring, two-square representations and (a, b) witnesses.

A representation ``c = u^2 + v^2`` is stored with the parity normalisation
used throughout the package: ``u`` even, ``v`` odd, both positive and coprime.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache

from .exact import GaussInt, gauss_pow


class FactorLimitExceeded(RuntimeError):
    """A cofactor resisted the configured Pollard-rho effort."""

    def __init__(self, n: int, partial: dict):
        super().__init__(f"could not split {n} within the configured effort")
        self.cofactor = n
        self.partial = partial


# ---------------------------------------------------------------------------
# primality

_SMALL_PRIMES = [p for p in range(2, 1000) if all(p % q for q in range(2, int(p ** 0.5) + 1))]
_MR_BASES_SMALL = (2, 3, 5, 7, 11, 13, 17)                    # n < 3.4e14
_MR_BASES_LARGE = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)  # n < 3.3e24
_DETERMINISTIC_LIMIT = 3317044064679887385961981


def _mr_round(n: int, d: int, s: int, a: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES[:25]:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < 341550071728321:
        bases = _MR_BASES_SMALL
    elif n < _DETERMINISTIC_LIMIT:
        bases = _MR_BASES_LARGE
    else:
        rng = random.Random(n)
        bases = _MR_BASES_LARGE + tuple(rng.randrange(2, n - 1) for _ in range(24))
    return all(_mr_round(n, d, s, a) for a in bases)


def primality_is_deterministic(n: int) -> bool:
    return n < _DETERMINISTIC_LIMIT


# ---------------------------------------------------------------------------
# factoring


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple  # ((prime, exponent), ...) with strictly increasing primes
    certified: bool = True  # False if some prime only passed a probabilistic test

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError("factors must be increasing primes with positive exponents")
            last = p
            prod *= p ** e
        if prod != self.n:
            raise ValueError("factorization does not multiply back to n")

    @property
    def primes(self) -> list:
        return [p for p, _ in self.factors]

    def is_prime_power(self) -> bool:
        return len(self.factors) == 1

    def as_list(self) -> list:
        return [tuple(f) for f in self.factors]


def _pollard_brent(n: int, max_iter: int, seed: int) -> int | None:
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    for _attempt in range(8):
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        iters = 0
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
            iters += r
            if iters > max_iter:
                break
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


DEFAULT_EFFORT = 1 << 20


def factor(n: int, effort: int = DEFAULT_EFFORT) -> Factorization:
    """Complete factorisation by trial division, Miller-Rabin and Pollard-Brent.

    ``effort`` bounds the number of rho iterations per cofactor; when it is
    exhausted ``FactorLimitExceeded`` is raised rather than returning a
    partial answer.
    """
    if n < 2:
        raise ValueError("factor expects n >= 2")
    found: dict = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
    certified = True
    stack = [m] if m > 1 else []
    while stack:
        k = stack.pop()
        if k == 1:
            continue
        if is_prime(k):
            certified = certified and primality_is_deterministic(k)
            found[k] = found.get(k, 0) + 1
            continue
        r = math.isqrt(k)
        if r * r == k:
            stack += [r, r]
            continue
        d = _pollard_brent(k, effort, seed=k & 0xFFFFFFFF)
        if d is None:
            raise FactorLimitExceeded(k, dict(found))
        stack += [d, k // d]
    return Factorization(n, tuple(sorted(found.items())), certified)


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True, order=True)
class Representation:
    c: int
    u: int
    v: int

    def __post_init__(self):
        if self.u <= 0 or self.v <= 0:
            raise ValueError("u and v must be positive")
        if self.u % 2 or self.v % 2 == 0:
            raise ValueError("need u even and v odd")
        if self.u * self.u + self.v * self.v != self.c:
            raise ValueError("u^2 + v^2 != c")
        if math.gcd(self.u, self.v) != 1:
            raise ValueError("u and v must be coprime")

    @property
    def eps(self) -> GaussInt:
        return GaussInt(self.u, self.v)


@dataclass(frozen=True)
class SolutionWitness:
    rep: Representation
    r: int
    a: int
    b: int

    @property
    def c(self) -> int:
        return self.rep.c

    def check(self) -> bool:
        return self.a * self.a + self.b * self.b == self.c ** self.r


def sqrt_minus_one(p: int) -> int:
    """A square root of -1 modulo a prime p = 1 (mod 4)."""
    if p % 4 != 1:
        raise ValueError("need p = 1 (mod 4)")
    q = (p - 1) // 4
    for a in range(2, p):
        t = pow(a, q, p)
        if t * t % p == p - 1:
            return t
    raise ValueError(f"{p} is not prime")


def tonelli_shanks(n: int, p: int) -> int:
    """Square root of a quadratic residue n modulo an odd prime p."""
    n %= p
    if n == 0:
        return 0
    if pow(n, (p - 1) // 2, p) != 1:
        raise ValueError("not a quadratic residue")
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@lru_cache(maxsize=4096)
def cornacchia_prime(p: int) -> tuple[int, int]:
    """``(x, y)`` with ``x^2 + y^2 = p`` for a prime ``p = 1 (mod 4)``, x even."""
    t = tonelli_shanks(p - 1, p) if p % 8 == 1 else sqrt_minus_one(p)
    a, b = p, t
    limit = math.isqrt(p)
    while b > limit:
        a, b = b, a % b
    x = b
    y = math.isqrt(p - x * x)
    if x * x + y * y != p:
        raise ArithmeticError(f"Cornacchia failed for {p}")
    return (x, y) if x % 2 == 0 else (y, x)


def _normalise(g: GaussInt, c: int) -> Representation | None:
    a, b = abs(g.re), abs(g.im)
    if a == 0 or b == 0:
        return None
    u, v = (a, b) if a % 2 == 0 else (b, a)
    if u % 2 or v % 2 == 0 or math.gcd(u, v) != 1:
        return None
    return Representation(c, u, v)


def cornacchia_all(c: int, fac: Factorization | None = None) -> list:
    """All primitive representations of ``c`` with u even, v odd, sorted by u."""
    if c < 5 or c % 2 == 0:
        return []
    if fac is None:
        fac = factor(c)
    if fac.n != c:
        raise ValueError("factorization is for a different number")
    gaussian = []
    for p, e in fac.factors:
        if p % 4 != 1:
            return []
        x, y = cornacchia_prime(p)
        gaussian.append((gauss_pow(GaussInt(x, y), e), e))
    # The first prime keeps a fixed orientation; conjugating every factor
    # gives the same unordered pair.
    out = set()
    first, rest = gaussian[0][0], gaussian[1:]
    for mask in range(1 << len(rest)):
        g = first
        for i, (pi, _) in enumerate(rest):
            g = g * (pi.conj() if mask >> i & 1 else pi)
        rep = _normalise(g, c)
        if rep is not None:
            out.add(rep)
    return sorted(out, key=lambda rp: rp.u)


def decompose(c: int, effort: int = DEFAULT_EFFORT) -> list:
    if c < 2:
        raise ValueError("c must be at least 2")
    return cornacchia_all(c, factor(c, effort))


def brute_force_representations(limit: int) -> dict:
    """Map c -> sorted list of (u, v) for every primitive u^2 + v^2 <= limit."""
    table: dict = {}
    for u in range(2, math.isqrt(limit) + 1, 2):
        uu = u * u
        for v in range(1, math.isqrt(limit - uu) + 1, 2):
            if math.gcd(u, v) == 1:
                table.setdefault(uu + v * v, []).append((u, v))
    for lst in table.values():
        lst.sort()
    return table


def brute_force_single(c: int) -> list:
    out = []
    for u in range(2, math.isqrt(c) + 1, 2):
        w = c - u * u
        v = math.isqrt(w)
        if v * v == w and v % 2 == 1 and math.gcd(u, v) == 1:
            out.append((u, v))
    return out


def witness_from(rep: Representation, r: int) -> SolutionWitness:
    """``a = |Re eps^r|`` and ``b = |Im eps^r|`` for odd ``r``."""
    if r < 1 or r % 2 == 0:
        raise ValueError("r must be odd and positive")
    g = gauss_pow(rep.eps, r)
    w = SolutionWitness(rep, r, abs(g.re), abs(g.im))
    assert w.check()
    return w


@dataclass(frozen=True)
class FilterResult:
    passes: bool
    reasons: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.passes


C_FLOOR = 85


def residue_class_filter(c: int, fac: Factorization | None = None) -> FilterResult:
    """Admissible values of c: c = 5 (mod 8), c >= 85 and not a prime power."""
    if c < 2:
        raise ValueError("c must be at least 2")
    reasons = []
    if c % 8 != 5:
        reasons.append("c not 5 mod 8")
    if c < C_FLOOR:
        reasons.append(f"c < {C_FLOOR}")
    if not reasons:
        fac = fac or factor(c)
        if fac.is_prime_power():
            reasons.append("c is a prime power")
    return FilterResult(not reasons, tuple(reasons))
