"""Linear forms in two logarithms attached to a two-square representation.

For c = u^2 + v^2 put alpha = eps / conj(eps) with eps = u + iv.  Then
|alpha| = 1, arg(alpha) = 2*xi with xi = atan(v/u), and for an exponent n the
form is Lambda = n log(alpha) - k log(-1), with k chosen so that |Lambda| is
minimal.  The lower bound machinery below evaluates an explicit two-logarithm
estimate (the "Laurent conditions" I, II, III) with outward-rounded intervals.

Parameter search is done in floating point (numpy) and every parameter set
that is reported as a result is re-certified with intervals.
"""
from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Optional

import numpy as np

from .certificates import Certificate, register_replay
from .exact import (DEFAULT_BITS, Interval, PrecisionExhausted, ceil_fraction,
                    floor_fraction, interval_atan2, interval_exp, interval_log,
                    interval_pi, interval_sin, interval_sqrt, refine)
from .representations import Representation

# ---------------------------------------------------------------------------
# certified helpers


def log_int(n: int, bits: int = DEFAULT_BITS) -> Interval:
    """Certified log of a positive integer of any size (top bits only)."""
    if n <= 0:
        raise ValueError("log of non-positive integer")
    shift = max(0, n.bit_length() - (bits + 64))
    if shift == 0:
        return interval_log(n, bits)
    top = n >> shift
    body = interval_log(Interval(Fraction(top), Fraction(top + 1), bits), bits)
    return body + interval_log(2, bits) * shift


@lru_cache(maxsize=64)
def _superfactorial(k_max: int) -> int:
    """prod_{k=1}^{k_max} k!"""
    out, f = 1, 1
    for k in range(1, k_max + 1):
        f *= k
        out *= f
    return out


@lru_cache(maxsize=256)
def log_factorial_product(K: int, bits: int = DEFAULT_BITS) -> Interval:
    """log prod_{k=1}^{K-1} k!, from the exact integer."""
    return log_int(_superfactorial(K - 1), bits)


@lru_cache(maxsize=256)
def c_of_n(N: int, bits: int = DEFAULT_BITS) -> Interval:
    """(2/N) log(N! N^(1-N) (e^N + (e-1)^N))."""
    log_nf = log_int(math.factorial(N), bits)
    # log(e^N + (e-1)^N) = N + log(1 + (1 - 1/e)^N)
    q = 1 - interval_exp(-1, bits)
    tail = interval_log(1 + q ** N, bits)
    inner = log_nf - interval_log(N, bits) * (N - 1) + N + tail
    return inner * Fraction(2, N)


# ---------------------------------------------------------------------------
# the form


@dataclass(frozen=True)
class LinearFormInstance:
    """Lambda = n log(alpha) - k log(-1) for alpha = eps / conj(eps).

    ``ell`` records the rotation alpha' = alpha * i^(-ell) that brings
    |arg alpha'| below pi/4; in rotated terms the form is
    n log(alpha') - k_rot * log(i) with k_rot = 2k - n*ell.
    """
    rep: Representation
    n: int
    k: int
    ell: int
    rotated: bool

    @property
    def c(self) -> int:
        return self.rep.c

    def height(self, bits: int = DEFAULT_BITS) -> Interval:
        return interval_log(self.c, bits) * Fraction(1, 2)

    def xi(self, bits: int = DEFAULT_BITS) -> Interval:
        return interval_atan2(self.rep.v, self.rep.u, bits)

    def arg_alpha(self, bits: int = DEFAULT_BITS) -> Interval:
        """Argument of the (possibly rotated) alpha."""
        t = self.xi(bits) * 2
        if self.rotated:
            t = t - interval_pi(bits) * Fraction(self.ell, 2)
        return t

    @property
    def k_rot(self) -> int:
        return 2 * self.k - self.n * self.ell if self.rotated else 2 * self.k

    def lam(self, bits: int = DEFAULT_BITS) -> Interval:
        """Signed value of Lambda / i, i.e. n*arg(alpha) - k_rot*pi/2."""
        return self.arg_alpha(bits) * self.n - interval_pi(bits) * Fraction(self.k_rot, 2)

    def abs_lam(self, bits: int = DEFAULT_BITS) -> Interval:
        return abs(self.lam(bits))


def _nearest_multiple(x_of_bits, what: str) -> int:
    """round(x) for x given as a function bits -> Interval; x is never a half-integer."""
    def decide(bits):
        x = x_of_bits(bits)
        lo, hi = floor_fraction(x.lo + Fraction(1, 2)), floor_fraction(x.hi + Fraction(1, 2))
        return lo if lo == hi else None
    try:
        return refine(decide)
    except PrecisionExhausted:
        raise PrecisionExhausted(f"cannot round {what}") from None


def build_form(rep: Representation, n: int, rotate: bool = True) -> LinearFormInstance:
    if n < 1:
        raise ValueError("n must be positive")
    # alpha is a root of unity only if c = 1 or u*v = 0; excluded by the type
    assert rep.c > 1 and rep.u * rep.v != 0
    k = _nearest_multiple(lambda b: interval_atan2(rep.v, rep.u, b) * (2 * n) / interval_pi(b),
                          "n*theta/pi")
    ell = 0
    if rotate:
        # arg alpha = 2 xi lies in (0, pi); rotate by a multiple of pi/2
        ell = _nearest_multiple(lambda b: interval_atan2(rep.v, rep.u, b) * 4 / interval_pi(b),
                                "2*arg/pi")
    return LinearFormInstance(rep, n, k, ell, rotate)


# ---------------------------------------------------------------------------
# parameters and verdicts


@dataclass(frozen=True)
class LaurentParams:
    K: int
    L: int
    R1: int
    R2: int
    S1: int
    S2: int
    rho: Fraction
    mu: Fraction
    m: Optional[Fraction] = None

    def __post_init__(self):
        object.__setattr__(self, "rho", Fraction(self.rho))
        object.__setattr__(self, "mu", Fraction(self.mu))
        if self.m is not None:
            object.__setattr__(self, "m", Fraction(self.m))
        if self.K < 3 or self.L < 2:
            raise ValueError("need K >= 3 and L >= 2")
        if min(self.R1, self.R2, self.S1, self.S2) < 1:
            raise ValueError("R_i, S_i must be positive")
        if self.rho <= 1 or not Fraction(1, 3) <= self.mu <= 1:
            raise ValueError("need rho > 1 and 1/3 <= mu <= 1")

    @property
    def R(self) -> int:
        return self.R1 + self.R2 - 1

    @property
    def S(self) -> int:
        return self.S1 + self.S2 - 1

    @property
    def N(self) -> int:
        return self.K * self.L

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("K", "L", "R1", "R2", "S1", "S2")}
        d.update(rho=str(self.rho), mu=str(self.mu), m=None if self.m is None else str(self.m))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "LaurentParams":
        return cls(d["K"], d["L"], d["R1"], d["R2"], d["S1"], d["S2"], Fraction(d["rho"]),
                   Fraction(d["mu"]), None if d.get("m") is None else Fraction(d["m"]))

    @classmethod
    def from_rule(cls, L: int, rho, mu, m, R1: int, S1: int, a1: float, a2: float) -> "LaurentParams":
        """K = ceil(m L a1 a2), R2 = ceil(sqrt(m) L a2), S2 = ceil((1+(K-1)L)/R2).

        a1, a2 are taken as upper endpoints (floats are fine: the rule only
        fixes integers, soundness comes from the later certification).
        """
        m = Fraction(m)
        K = math.ceil(float(m) * L * a1 * a2)
        R2 = math.ceil(math.sqrt(m) * L * a2)
        S2 = -((-(1 + (K - 1) * L)) // R2)
        return cls(K, L, R1, R2, S1, S2, Fraction(rho), Fraction(mu), m)


def admissible_a(rho: Fraction, c: int, bits: int = DEFAULT_BITS, arg_bound=None) -> tuple[Interval, Interval]:
    """Minimal admissible a1, a2 with alpha_1 = alpha (|arg| <= pi/4 unless
    ``arg_bound`` is given), alpha_2 = i, D = 1, log|alpha_i| = 0."""
    pi = interval_pi(bits)
    arg = pi / 4 if arg_bound is None else arg_bound
    a1 = arg * rho + interval_log(c, bits)
    a2 = pi * rho / 2
    return a1, a2


def card_products(R1: int, S1: int) -> int:
    """Card {alpha^r i^s}: alpha is not a root of unity and i has order 4."""
    return R1 * min(S1, 4)


def card_combinations(R2: int, S2: int, b1: int, b2: int) -> int:
    """Card {r b2 + s b1 : 0 <= r < R2, 0 <= s < S2} by exact enumeration."""
    return len({r * b2 + s * b1 for r in range(R2) for s in range(S2)})


def condition_iii_lhs(p: LaurentParams, a1: Interval, a2: Interval, b1: int, b2: int,
                      bits: int = DEFAULT_BITS) -> Interval:
    K, L, R, S, N = p.K, p.L, p.R, p.S, p.N
    g = Fraction(1, 4) - Fraction(N, 12 * R * S)
    sigma = (1 + 2 * p.mu - p.mu * p.mu) / 2
    log_rho = interval_log(p.rho, bits)
    log_b = (interval_log(Fraction((R - 1) * b2 + (S - 1) * b1, 2), bits)
             - log_factorial_product(K, bits) * Fraction(2, K * K - K))
    return (log_rho * (K * (sigma * L - 1))
            - interval_log(N, bits) * 2
            - log_b * (K - 1)
            - (a1 * R + a2 * S) * (g * L))


def unwinding_exponent(p: LaurentParams, bits: int = DEFAULT_BITS) -> Interval:
    """E with |Lambda| >= exp(-E), valid for b1, b2 >= 1.

    From |Lambda'| >= rho^(-mu K L): either |Lambda| is already at least
    min(2b2/(LS), 2b1/(LR)), or both exponential factors are <= e and
    |Lambda| >= rho^(-mu K L) * 2 / (e max(LS, LR)).
    """
    big = max(p.L * p.S, p.L * p.R)
    return (interval_log(p.rho, bits) * (p.mu * p.K * p.L)
            + interval_log(Fraction(big, 2), bits) + 1)


@dataclass
class LaurentVerdict:
    params: LaurentParams
    b1: int
    b2: int
    c: int
    conditions: dict
    lhs: Interval
    rhs: Interval
    bound_exponent: Interval            # mu K L log rho
    unwind: Optional[Interval] = None   # E, populated only when certified
    theta: Optional[Interval] = None    # E / (b1 log c)
    notes: list = field(default_factory=list)
    arg_bound: Optional[Fraction] = None   # None means pi/4
    class_info: Optional[dict] = None      # {"n_lo", "g_max"} for class-level verdicts

    @property
    def certified(self) -> bool:
        return all(self.conditions.values())

    @property
    def failed(self) -> list:
        return [k for k, v in self.conditions.items() if not v]

    @property
    def lambda_lower(self) -> Optional[str]:
        if not self.certified:
            return None
        return f"log|Lambda| >= -{float(self.unwind.hi):.6f}"

    def certificate(self, claim: str = "laurent") -> Certificate:
        return Certificate(
            claim=claim, module="linear_forms",
            inputs={"c": self.c, "b1": self.b1, "b2": self.b2,
                    "arg_bound": None if self.arg_bound is None else str(self.arg_bound),
                    "class": self.class_info},
            parameters=self.params.as_dict(),
            verdict="certified" if self.certified else "condition-failed:" + ",".join(self.failed),
            assumptions=["external: two-logarithm lower bound (conditions I-III)"] + self.notes,
            trace=[{"conditions": self.conditions,
                    "lhs": self.lhs, "rhs": self.rhs,
                    "exponent_interval": self.bound_exponent,
                    "unwind": self.unwind, "theta": self.theta}],
        )


def _verdict(p, a1, a2, b1, b2, c, card_ii, bits, notes) -> LaurentVerdict:
    cond_i = card_products(p.R1, p.S1) >= p.L
    cond_ii = card_ii > (p.K - 1) * p.L
    lhs = condition_iii_lhs(p, a1, a2, b1, b2, bits)
    rhs = c_of_n(p.N, bits)
    cond_iii = lhs.definitely_gt(rhs)
    if not cond_iii and not lhs.definitely_lt(rhs):
        if bits < 4096:
            return _verdict(p, a1, a2, b1, b2, c, card_ii, bits * 2, notes)
        raise PrecisionExhausted("condition III undecided")
    ok = cond_i and cond_ii and cond_iii
    v = LaurentVerdict(p, b1, b2, c, {"I": cond_i, "II": cond_ii, "III": cond_iii}, lhs, rhs,
                       interval_log(p.rho, bits) * (p.mu * p.K * p.L), notes=list(notes))
    if ok:
        v.unwind = unwinding_exponent(p, bits)
        v.theta = v.unwind / (interval_log(c, bits) * b1)
    return v


def laurent_verdict(inst: LinearFormInstance, params: LaurentParams, b1: Optional[int] = None,
                    b2: Optional[int] = None, bits: int = DEFAULT_BITS) -> LaurentVerdict:
    """Concrete verdict for one form; b1 = n and b2 = |k_rot| by default.

    Uses the instance's own |arg alpha| for a1 (after rotation), and counts
    condition II exactly.
    """
    b1 = inst.n if b1 is None else b1
    b2 = abs(inst.k_rot) if b2 is None else b2
    if b1 < 1 or b2 < 1:
        raise ValueError("b1 and b2 must be positive")
    arg = abs(inst.arg_alpha(bits))
    a1, a2 = admissible_a(params.rho, inst.c, bits, arg_bound=Interval(arg.hi, arg.hi, bits))
    if params.R2 * params.S2 > 10 ** 6:
        raise ValueError("exact enumeration for condition II limited to 10^6 pairs")
    card = card_combinations(params.R2, params.S2, b1, b2)
    v = _verdict(params, a1, a2, b1, b2, inst.c, card, bits, [])
    v.arg_bound = arg.hi
    return v


def class_verdict(c: int, n_lo: int, n_hi: int, params: LaurentParams, g_max: int = 4,
                  bits: int = DEFAULT_BITS) -> LaurentVerdict:
    """Verdict covering every representation of c and every b1 in [n_lo, n_hi].

    The unknown k enters through b2 <= (b1+1)/2 (worst case for b).  Condition
    II is certified by R2 <= b1/gcd(b1, b2) for gcd <= g_max; larger gcds are
    covered by the Liouville estimate |Lambda| >= c^(-n/(g_max+1)).
    Condition III is monotone in b1, so checking b1 = n_hi covers the block.
    The reported theta uses n_lo.
    """
    if not 3 <= n_lo <= n_hi:
        raise ValueError("need 3 <= n_lo <= n_hi")
    a1, a2 = admissible_a(params.rho, c, bits)
    b2 = (n_hi + 1) // 2
    ii_ok = params.R2 * g_max <= n_lo
    card = params.R2 * params.S2 if ii_ok else 0
    notes = [f"class: all k with gcd(n,k) <= {g_max}; gcd > {g_max} by Liouville",
             f"block b1 in [{n_lo}, {n_hi}]"]
    v = _verdict(params, a1, a2, n_hi, b2, c, card, bits, notes)
    v.b1 = n_hi
    v.class_info = {"n_lo": n_lo, "g_max": g_max}
    if v.certified:
        v.theta = v.unwind / (interval_log(c, bits) * n_lo)
        liouville = Fraction(1, g_max + 1)
        if v.theta.hi < liouville:
            v.theta = Interval(liouville, liouville, bits)
            v.notes.append("theta raised to the Liouville exponent")
    return v


# ---------------------------------------------------------------------------
# floating point search


_KMAX = 2000
_LGF = np.array([math.lgamma(k + 1) for k in range(_KMAX + 1)])
_SLF = np.concatenate([[0.0], np.cumsum(_LGF[:_KMAX])])   # _SLF[K] = sum_{k<K} log k!


def _cn_float(N):
    N = np.asarray(N, dtype=float)
    lg = np.array([math.lgamma(x + 1) for x in N.ravel()]).reshape(N.shape)
    return (2 / N) * (lg - (N - 1) * np.log(N) + N + np.log1p((1 - 1 / math.e) ** N))


@dataclass(frozen=True)
class SearchGrid:
    L: tuple = tuple(range(4, 15))
    rho: tuple = tuple(x / 4 for x in range(16, 65))
    mu: tuple = (0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7)
    k_range: tuple = (3, _KMAX)

    def around(self, p: LaurentParams) -> "SearchGrid":
        r = float(p.rho)
        mu = float(p.mu)
        return SearchGrid(
            L=tuple(x for x in (p.L - 1, p.L, p.L + 1) if x >= 2),
            rho=tuple(r + d / 4 for d in range(-6, 7) if r + d / 4 > 1.5),
            mu=tuple(round(mu + d, 2) for d in (-0.05, 0, 0.05) if 0.34 <= mu + d <= 1),
            k_range=(max(3, p.K - 250), min(_KMAX, p.K + 250)),
        )


def _r1s1_options(L: int):
    return sorted({(-(-L // 4), 4), (-(-L // 2), 2), (L, 1)})


def optimize_params(c: int, b1: int, b2: Optional[int] = None, r2_cap: Optional[int] = None,
                    grid: SearchGrid = SearchGrid(), margin: float = 1e-6) -> Optional[LaurentParams]:
    """Minimise the unwinding exponent E subject to condition III (floats).

    K and rho are vectorised; R2 is taken near the balancing value
    sqrt((1+(K-1)L) a2/a1).  Returns None when nothing in the grid is feasible.
    """
    b2 = (b1 + 1) // 2 if b2 is None else b2
    r2_cap = b1 if r2_cap is None else r2_cap
    lc = math.log(c)
    K = np.arange(grid.k_range[0], grid.k_range[1], dtype=float)[None, :]
    rho = np.array(grid.rho, dtype=float)[:, None]
    a1 = rho * math.pi / 4 + lc
    a2 = rho * math.pi / 2
    lrho = np.log(rho)
    slf = _SLF[K.astype(int)]
    best = None
    for L in grid.L:
        N = K * L
        cn = _cn_float(N)
        M = 1 + (K - 1) * L
        t = np.sqrt(M * a2 / a1)
        for mu in grid.mu:
            sig = (1 + 2 * mu - mu * mu) / 2
            for R1, S1 in _r1s1_options(L):
                for dR in (-1, 0, 1, 2):
                    R2 = np.clip(np.floor(t) + dR, 1, r2_cap)
                    S2 = np.ceil(M / R2)
                    R, S = R1 + R2 - 1, S1 + S2 - 1
                    g = 0.25 - N / (12 * R * S)
                    lb = np.log(((R - 1) * b2 + (S - 1) * b1) / 2) - 2 / (K * K - K) * slf
                    lhs = (K * (sig * L - 1) * lrho - 2 * np.log(N) - (K - 1) * lb
                           - g * L * (R * a1 + S * a2) - cn)
                    ok = lhs > margin * (1 + np.abs(lhs))
                    if not ok.any():
                        continue
                    E = mu * K * L * lrho + np.log(np.maximum(L * S, L * R) / 2) + 1
                    E = np.where(ok, E, np.inf)
                    i, j = np.unravel_index(int(np.argmin(E)), E.shape)
                    key = (float(E[i, j]), L, float(rho[i, 0]), mu, int(K[0, j]))
                    if best is None or key < best[0]:
                        best = (key, LaurentParams(int(K[0, j]), L, R1, int(R2[i, j]), S1,
                                                   int(S2[i, j]), Fraction(grid.rho[i]),
                                                   Fraction(str(mu))))
    return None if best is None else best[1]


# ---------------------------------------------------------------------------
# theta profile and exponent thresholds


class ThresholdNotFound(RuntimeError):
    pass


@dataclass
class ProfileBlock:
    lo: int
    hi: int
    params: LaurentParams
    E_hi: Fraction        # certified upper end of the unwinding exponent


@dataclass
class ThetaProfile:
    """Certified covering of [n_min, cap] by blocks with a common exponent E.

    For any n in a block, |Lambda| >= exp(-E) >= c^(-theta n) with
    theta = E / (n log c).  Beyond ``cap`` the profile relies on an external
    assumption (recorded in ``assumptions``).
    """
    c: int
    g_max: int
    blocks: list
    cap: int
    log_c_lo: Fraction
    assumptions: list = field(default_factory=list)

    def theta_uniform(self, n0: int) -> Fraction:
        """Upper bound for theta valid for every n >= n0 (up to the cap)."""
        if n0 < self.blocks[0].lo:
            raise ValueError(f"profile starts at {self.blocks[0].lo}")
        his = [b.hi for b in self.blocks]
        j = bisect_left(his, n0)
        if j >= len(self.blocks):
            raise ValueError("n0 beyond cap")
        worst = Fraction(0)
        for i in range(j, len(self.blocks)):
            b = self.blocks[i]
            start = max(n0, b.lo)
            worst = max(worst, b.E_hi / (start * self.log_c_lo))
        return max(worst, Fraction(1, self.g_max + 1))

    def mu_uniform(self, n0: int) -> Optional[Fraction]:
        """mu with min{X, Y} >= c^(n/mu) for all n >= n0, or None if theta >= 1/2.

        1/mu = 1/2 - theta - log(pi)/(n0 log c), rounded to a safe rational.
        """
        inv = (Fraction(1, 2) - self.theta_uniform(n0)
               - Fraction(11448, 10000) / (n0 * self.log_c_lo))   # log pi < 1.1448
        return None if inv <= 0 else 1 / inv

    def to_dict(self) -> dict:
        return {"c": self.c, "g_max": self.g_max, "cap": self.cap,
                "log_c_lo": str(self.log_c_lo), "assumptions": self.assumptions,
                "blocks": [{"lo": b.lo, "hi": b.hi, "params": b.params.as_dict(),
                            "E_hi": str(b.E_hi)} for b in self.blocks]}

    @classmethod
    def from_dict(cls, d: dict) -> "ThetaProfile":
        blocks = [ProfileBlock(b["lo"], b["hi"], LaurentParams.from_dict(b["params"]), Fraction(b["E_hi"]))
                  for b in d["blocks"]]
        return cls(d["c"], d["g_max"], blocks, d["cap"], Fraction(d["log_c_lo"]), list(d["assumptions"]))

    def verify(self, bits: int = DEFAULT_BITS) -> list:
        """Re-certify every block; returns the (lo, hi) of blocks that fail,
        including those whose stored E_hi is below the recomputed one."""
        bad = []
        if self.log_c_lo > interval_log(self.c, bits).lo:
            return [("log_c_lo", None)]
        for b in self.blocks:
            v = class_verdict(self.c, b.lo, b.hi, b.params, self.g_max, bits)
            if not v.certified or v.unwind.hi > b.E_hi:
                bad.append((b.lo, b.hi))
        return bad


def _ladder(n_min: int, cap: int, fine_until: int, fine: float, coarse: float) -> list:
    pts, n = [], n_min
    while n < cap:
        ratio = fine if n < fine_until else coarse
        nxt = max(n + 2, int(n * ratio))
        nxt += 1 - nxt % 2
        n = min(nxt, cap)
        pts.append(n)
    return pts


def build_profile(c: int, n_min: int = 101, cap: int = 55001, g_max: int = 4,
                  fine: float = 1.01, coarse: float = 1.15, fine_until: int = 1600,
                  bits: int = DEFAULT_BITS, progress=None) -> ThetaProfile:
    """Optimise and certify parameters on a geometric ladder of b1 values."""
    pts = [n_min] + _ladder(n_min, cap, fine_until, fine, coarse)
    blocks, prev = [], None
    grid = SearchGrid()
    for lo, hi in zip(pts, pts[1:]):
        cand = optimize_params(c, hi, r2_cap=lo // g_max,
                               grid=grid if prev is None else grid.around(prev))
        if cand is None and prev is not None:
            cand = optimize_params(c, hi, r2_cap=lo // g_max, grid=grid)
        if cand is None:
            prev = None
            continue
        v = class_verdict(c, lo, hi, cand, g_max, bits)
        bump = 0
        while not v.certified and bump < 8:      # razor-edge: nudge K
            bump += 1
            cand = replace(cand, K=cand.K + 1, S2=-(-(1 + cand.K * cand.L) // cand.R2))
            v = class_verdict(c, lo, hi, cand, g_max, bits)
        if not v.certified:
            prev = None
            continue
        blocks.append(ProfileBlock(lo, hi, cand, v.unwind.hi))
        prev = cand
        if progress:
            progress(lo, hi, cand, float(v.unwind.hi / (interval_log(c, bits).lo * lo)))
    # keep the maximal contiguous tail ending at cap
    tail = []
    for b in reversed(blocks):
        if tail and b.hi != tail[-1].lo:
            break
        tail.append(b)
    tail.reverse()
    if not tail:
        raise ThresholdNotFound("no certified block")
    return ThetaProfile(c, g_max, tail, cap, interval_log(c, bits).lo,
                        [f"n > {cap}: external three-parameter estimate for two logarithms",
                         "larger c: estimate sampled as non-increasing in c, not certified"])


@dataclass
class ThresholdResult:
    target: str
    y_floor: int
    bound: int
    mu1: Fraction
    mu2: Fraction
    r_floor: Optional[int] = None   # second-step lower bound on r (z target)

    def certificate(self, c: int) -> Certificate:
        return Certificate(
            claim="exponent-threshold", module="linear_forms",
            inputs={"c_min": c, "target": self.target, "y_floor": self.y_floor},
            parameters={"mu1": self.mu1, "mu2": self.mu2, "r_floor": self.r_floor},
            verdict=f"{self.target}<={self.bound}",
            assumptions=["profile covering up to its cap; beyond it external"],
            trace=[])


def _r_ok(prof: ThetaProfile, n0: int, y: int):
    mu = prof.mu_uniform(n0)
    return mu is not None and mu * mu <= 2 * y, mu


def _z_ok(prof: ThetaProfile, z0: int, y: int):
    mu1 = prof.mu_uniform(z0)
    if mu1 is None:
        return False, None, None, None
    # a >= c^(z/mu1) and 2z < mu1 r give r > 2 z0 / mu1
    r0 = floor_fraction(2 * z0 / mu1) + 1
    r0 += 1 - r0 % 2
    if r0 >= z0:
        return False, mu1, None, r0
    if r0 < prof.blocks[0].lo:
        return False, mu1, None, r0
    mu2 = prof.mu_uniform(r0)
    return (mu2 is not None and mu1 * mu2 <= 2 * y), mu1, mu2, r0


def exponent_threshold(profile: ThetaProfile, target: str, y_floor: int) -> ThresholdResult:
    """Smallest odd B such that every odd n > B is excluded by the profile.

    r-target: b >= c^(r/mu) and a >= c^(z/mu) with mu = mu(B+2) and mu^2 <= 2y.
    z-target: two passes, first mu1 at z, which forces r > 2z/mu1, then mu2 at
    that r floor, requiring mu1 * mu2 <= 2y.
    """
    if target not in ("r", "z"):
        raise ValueError("target must be 'r' or 'z'")
    lo_n = profile.blocks[0].lo
    check = (lambda n: _r_ok(profile, n, y_floor)[0]) if target == "r" else \
        (lambda n: _z_ok(profile, n, y_floor)[0])
    # the predicates are monotone in n up to the profile's resolution; scan
    # downward from the first passing ladder point to the exact odd boundary
    start = None
    for b in profile.blocks:
        if check(b.lo):
            start = b.lo
            break
    if start is None:
        raise ThresholdNotFound(f"no threshold below cap {profile.cap}")
    for b in profile.blocks:                 # verify everything above start
        if b.lo > start and not check(b.lo):
            start = b.lo
    n = start
    while n - 2 >= lo_n and check(n - 2):
        n -= 2
    B = n - 2
    if target == "r":
        _, mu = _r_ok(profile, n, y_floor)
        return ThresholdResult("r", y_floor, B, mu, mu)
    _, mu1, mu2, r0 = _z_ok(profile, n, y_floor)
    return ThresholdResult("z", y_floor, B, mu1, mu2, r0)


# ---------------------------------------------------------------------------
# parameter search with the explicit rule


@dataclass
class SearchResult:
    params: LaurentParams
    feasible: bool
    theta: Optional[Fraction]
    slack: float                      # float value of LHS - c(N) for III
    evaluated: list                   # (rho, mu, m, feasible, theta or None)


def _rule_eval(c: int, b1: int, b2: int, L, rho, mu, m, R1, S1):
    a1 = float(rho) * math.pi / 4 + math.log(c)
    a2 = float(rho) * math.pi / 2
    p = LaurentParams.from_rule(L, rho, mu, m, R1, S1, a1, a2)
    K, R, S, N = p.K, p.R, p.S, p.N
    sig = (1 + 2 * float(mu) - float(mu) ** 2) / 2
    lb = math.log(((R - 1) * b2 + (S - 1) * b1) / 2) - 2 / (K * K - K) * float(_SLF[K])
    g = 0.25 - N / (12 * R * S)
    lhs = (K * (sig * L - 1) * math.log(rho) - 2 * math.log(N) - (K - 1) * lb
           - g * L * (R * a1 + S * a2) - float(_cn_float(np.array([N]))[0]))
    return p, lhs


def param_search(c: int, b1: int, rho_grid, mu_grid, m_grid, L: int = 8, R1: int = 4,
                 S1: int = 2, b2: Optional[int] = None, bits: int = DEFAULT_BITS) -> SearchResult:
    """Exhaustive grid over (rho, mu, m) with K, R2, S2 fixed by the rule.

    Deterministic: ties broken by the (rho, mu, m) tuple.  Every feasible
    point is certified with intervals; the best certified theta wins.  With
    no feasible point the least-infeasible one is returned.
    """
    b2 = (b1 + 1) // 2 if b2 is None else b2
    evaluated, best, least_bad = [], None, None
    for rho in sorted(map(Fraction, rho_grid)):
        for mu in sorted(map(Fraction, mu_grid)):
            for m in sorted(map(Fraction, m_grid)):
                p, slack = _rule_eval(c, b1, b2, L, rho, mu, m, R1, S1)
                theta = None
                if slack > -1e-6 and p.K < _KMAX:
                    a1, a2 = admissible_a(p.rho, c, bits)
                    card = card_combinations(p.R2, p.S2, b1, b2) if p.R2 * p.S2 <= 10 ** 6 else 0
                    v = _verdict(p, a1, a2, b1, b2, c, card, bits, [])
                    if v.certified:
                        theta = v.theta.hi
                evaluated.append((rho, mu, m, theta is not None, theta))
                key = (theta, (rho, mu, m))
                if theta is not None and (best is None or key < best[0]):
                    best = (key, p, slack)
                if least_bad is None or slack > least_bad[1]:
                    least_bad = (p, slack)
    if best is not None:
        return SearchResult(best[1], True, best[0][0], best[2], evaluated)
    return SearchResult(least_bad[0], False, None, least_bad[1], evaluated)


# ---------------------------------------------------------------------------
# angle minima via continued fractions


def continued_fraction(x_of_bits, q_max: int, bits: int = DEFAULT_BITS):
    """Partial quotients and convergents p/q of x (given as bits -> Interval)
    until the denominator exceeds q_max.  Raises PrecisionExhausted if the
    expansion cannot be certified up to 16384 bits."""
    while True:
        x = x_of_bits(bits)
        quotients, convs = [], []
        p0, q0, p1, q1 = 0, 1, 1, 0
        lo, hi = x.lo, x.hi
        ok = True
        while True:
            a_lo, a_hi = floor_fraction(lo), floor_fraction(hi)
            if a_lo != a_hi:
                ok = False
                break
            a = a_lo
            p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
            quotients.append(a)
            convs.append((p1, q1))
            if q1 > q_max:
                break
            flo, fhi = lo - a, hi - a
            if flo <= 0:
                ok = flo == fhi == 0   # rational x: expansion ended
                break
            lo, hi = 1 / fhi, 1 / flo
        if ok:
            return quotients, convs
        if bits >= 16384:
            raise PrecisionExhausted("continued fraction undecided")
        bits *= 2


@dataclass
class AngleBound:
    lower: Fraction        # certified lower bound of min |2 n xi - k pi|
    support: int           # convergent denominator carrying the bound
    exact_support: bool    # support is itself an admissible odd n
    n_max: int


def dist_to_int(x: Interval) -> Interval:
    k = floor_fraction(x.mid + Fraction(1, 2))
    return abs(x - k)


def angle_min_lower_bound(rep: Representation, n_max: int, bits: int = DEFAULT_BITS) -> AngleBound:
    """Certified lower bound for min over odd 3 <= n <= n_max of |2 n xi - k pi|.

    With x = 2 xi / pi, the quantity is pi * ||n x||.  Best approximation:
    ||n x|| >= ||q_j x|| for all n < q_{j+1}, where q_j are convergent
    denominators.  The bound is pi * ||q_j x|| for the largest q_j <= n_max.
    """
    if n_max < 3 or n_max > 10 ** 6:
        raise ValueError("need 3 <= n_max <= 10^6")
    xf = lambda b: interval_atan2(rep.v, rep.u, b) * 2 / interval_pi(b)
    _, convs = continued_fraction(xf, n_max, bits)
    qs = [q for _, q in convs if 1 <= q <= n_max]
    q = max(qs)

    def decide(b):
        d = dist_to_int(xf(b) * q)
        return d if d.lo > 0 and d.width < d.lo / 16 else None
    d = refine(decide, bits)
    lower = (d * interval_pi(d.bits)).lo
    return AngleBound(lower, q, q % 2 == 1 and q >= 3, n_max)


def angle_direct_min(rep: Representation, n_max: int, bits: int = DEFAULT_BITS) -> tuple:
    """Oracle: interval minimum over odd 3 <= n <= n_max; returns (Interval, n)."""
    x = interval_atan2(rep.v, rep.u, bits) * 2 / interval_pi(bits)
    best = None
    for n in range(3, n_max + 1, 2):
        d = dist_to_int(x * n) * interval_pi(bits)
        if best is None or d.hi < best[0].hi:
            best = (d, n)
    return best


# ---------------------------------------------------------------------------
# min{X, Y} statements


@dataclass
class MinXYBound:
    n: int
    Z: int
    lambda_lower: Fraction
    pi_form: Fraction                # Z^{n/2} lambda / pi, rounded down
    clamp_form: Fraction             # printed 0.99 constant
    clamp_form_corrected: Fraction   # constant 0.4999
    clamped: bool


def min_xy_bound(inst: LinearFormInstance, lambda_lower, bits: int = DEFAULT_BITS) -> MinXYBound:
    """Both lower bounds for min{X, Y} = Z^{n/2} |sin(|Lambda|/2)|.

    sin t >= 2t/pi on [0, pi/2] gives the pi form.  For the clamped form the
    true constant near |Lambda| -> 0 is 1/2 (sin t ~ t with t = |Lambda|/2);
    the 0.99 constant is reported alongside the corrected 0.4999.
    """
    lam = Fraction(lambda_lower)
    Z, n = inst.c, inst.n
    zpow = interval_sqrt(Fraction(Z ** n), bits)
    pi_form = (zpow * lam / interval_pi(bits)).lo
    clamp = min(lam, Fraction(1, 1000))
    return MinXYBound(n, Z, lam, pi_form, (zpow * clamp * Fraction(99, 100)).lo,
                      (zpow * clamp * Fraction(4999, 10000)).lo, lam > Fraction(1, 1000))


def min_xy_actual(inst: LinearFormInstance) -> int:
    e = inst.rep.eps ** inst.n
    return min(abs(e.re), abs(e.im))


def clamp_counterexample(max_c: int = 2000, n_max: int = 400):
    """Search small (rep, n) where min{X, Y} < 0.99 Z^{n/2} min{|Lambda|, 0.001}."""
    from .representations import decompose
    for c in range(5, max_c, 4):
        try:
            reps = decompose(c)
        except Exception:
            continue
        for rep in reps:
            for n in range(1, n_max + 1, 2):
                inst = build_form(rep, n)
                lam = inst.abs_lam(256)
                if lam.hi >= Fraction(1, 1000):
                    continue
                actual = min_xy_actual(inst)
                bound = min_xy_bound(inst, lam.lo, 256)
                if actual < bound.clamp_form:
                    return rep, n, actual, bound
    return None


# ---------------------------------------------------------------------------
# replay


@register_replay("laurent")
def _replay_laurent(cert: Certificate) -> str:
    p = LaurentParams.from_dict(cert.parameters)
    i = cert.inputs
    arg = i.get("arg_bound")
    a1, a2 = admissible_a(p.rho, i["c"], arg_bound=None if arg is None else Interval.exact(Fraction(arg)))
    cls = i.get("class")
    if cls:
        card = p.R2 * p.S2 if p.R2 * cls["g_max"] <= cls["n_lo"] else 0
    else:
        card = card_combinations(p.R2, p.S2, i["b1"], i["b2"])
    v = _verdict(p, a1, a2, i["b1"], i["b2"], i["c"], card, DEFAULT_BITS, [])
    return "certified" if v.certified else "condition-failed:" + ",".join(v.failed)


def load_profile(c: int) -> ThetaProfile:
    """The profile shipped in package data for this c (FileNotFoundError otherwise)."""
    text = resources.files("expdio.data").joinpath(f"theta_profile_{c}.json").read_text()
    return ThetaProfile.from_dict(json.loads(text))


@register_replay("exponent-threshold")
def _replay_threshold(cert: Certificate) -> str:
    i = cert.inputs
    res = exponent_threshold(load_profile(i["c_min"]), i["target"], i["y_floor"])
    return f"{res.target}<={res.bound}"
