"""Lagrange's X^n + Y^n identity, Lucas/Lehmer terms and primitive divisors."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Optional

from .certificates import Certificate, register_replay
from .exact import GaussInt, gauss_pow
from .representations import (
    FactorLimitExceeded,
    Representation,
    factor,
    witness_from,
)


# ---------------------------------------------------------------------------
# Lagrange coefficients


@lru_cache(maxsize=None)
def lagrange_coeff(n: int, j: int) -> int:
    """Coefficient of (-XY)^j (X+Y)^(n-2j) in X^n + Y^n."""
    if n < 1:
        raise ValueError("n must be positive")
    if j < 0 or 2 * j > n:
        return 0
    if j == 0:
        return 1
    # (n-j-1)! n / ((n-2j)! j!) = n/(n-j) * C(n-j, j)
    num = n * math.comb(n - j, j)
    q, rem = divmod(num, n - j)
    assert rem == 0
    return q


def lagrange_table(n_max: int) -> dict:
    """Coefficients built only from the recurrence c_{n+1,j} = c_{n,j} + c_{n-1,j-1}."""
    table = {(1, 0): 1, (2, 0): 1, (2, 1): 2}
    for n in range(2, n_max):
        for j in range(0, (n + 1) // 2 + 1):
            val = table.get((n, j), 0) + table.get((n - 1, j - 1), 0)
            if val:
                table[(n + 1, j)] = val
    return table


def _bmul(p: dict, q: dict) -> dict:
    out: dict = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def lagrange_expand(n: int) -> bool:
    """Expand sum_j c_{n,j} (-XY)^j (X+Y)^(n-2j) and compare with X^n + Y^n."""
    if n < 1:
        raise ValueError("n must be positive")
    total: dict = {}
    s = {(1, 0): 1, (0, 1): 1}
    mxy = {(1, 1): -1}
    s_pows = [{(0, 0): 1}]
    for _ in range(n):
        s_pows.append(_bmul(s_pows[-1], s))
    m_pow = {(0, 0): 1}
    for j in range(n // 2 + 1):
        term = _bmul(m_pow, s_pows[n - 2 * j])
        cj = lagrange_coeff(n, j)
        for k, c in term.items():
            total[k] = total.get(k, 0) + cj * c
        m_pow = _bmul(m_pow, mxy)
    total = {k: c for k, c in total.items() if c}
    return total == {(n, 0): 1, (0, n): 1}


def p_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def coeff_valuation_bound(n: int, j: int, p: int) -> bool:
    """Check v_p(c_{n,j}) >= v_p(n) - (n - 2j)/(p - 1) exactly."""
    if not (0 <= 2 * j <= n - 1):
        raise ValueError("need 0 <= j <= (n-1)/2")
    if p < 3:
        raise ValueError("p must be an odd prime")
    lhs = p_valuation(lagrange_coeff(n, j), p)
    return Fraction(lhs) >= p_valuation(n, p) - Fraction(n - 2 * j, p - 1)


# ---------------------------------------------------------------------------
# Lucas and Lehmer pairs


@dataclass(frozen=True)
class LucasPair:
    alpha: GaussInt
    beta: GaussInt
    kind: str  # "lucas" or "lehmer"

    @classmethod
    def lucas(cls, u: int, v: int) -> "LucasPair":
        return cls(GaussInt(u, v), GaussInt(u, -v), "lucas")

    @classmethod
    def lehmer(cls, u: int, v: int) -> "LucasPair":
        return cls(GaussInt(u, v), GaussInt(-u, v), "lehmer")

    @property
    def u(self) -> int:
        return abs(self.alpha.re)

    @property
    def v(self) -> int:
        return abs(self.alpha.im)


def lucas_term(pair: LucasPair, r: int) -> int:
    """U_r for a Lucas pair, or the Lehmer term with the usual odd/even split.

    For the Lucas pair (u+vi, u-vi) we have U_r = Im(eps^r)/v, so that
    b = v|U_r|.  For the Lehmer pair (u+vi, -u+vi) the term is
    Re(eps^r)/u for odd r and Im(eps^r)/(2uv) for even r.
    """
    if r < 1:
        raise ValueError("r must be positive")
    u, v = pair.alpha.re, pair.alpha.im
    g = gauss_pow(pair.alpha, r)
    if pair.kind == "lucas":
        q, rem = divmod(g.im, v)
    elif r % 2:
        q, rem = divmod(g.re, u)
    else:
        q, rem = divmod(g.im, 2 * u * v)
    assert rem == 0
    return q


def _divisor_base(pair: LucasPair) -> int:
    u, v = pair.u, pair.v
    return 4 * v * v if pair.kind == "lucas" else 16 * u * u * v * v


def _strip(n: int, against: int) -> int:
    g = math.gcd(n, against)
    while g > 1:
        n //= g
        g = math.gcd(n, g)
    return n


@dataclass
class PrimitiveDivisorReport:
    kind: str
    u: int
    v: int
    r: int
    term: int
    primitive_part: int
    primitive_primes: Optional[list] = None
    defective: bool = False
    inconclusive: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "u": self.u, "v": self.v, "r": self.r,
            "term": str(self.term), "primitive_part": str(self.primitive_part),
            "primitive_primes": None if self.primitive_primes is None
            else [str(p) for p in self.primitive_primes],
            "defective": self.defective, "inconclusive": self.inconclusive,
        }


def primitive_divisor_report(pair: LucasPair, r: int, effort: int = 1 << 16,
                             factor_part: bool = True) -> PrimitiveDivisorReport:
    """Primes of the r-th term that divide no earlier term nor (alpha-beta)^2.

    The primitive part is obtained by stripping every prime shared with the
    earlier terms and the discriminant-type factor, so the defective flag is
    decided exactly even when the primitive part itself is too large to
    factor; in that case the prime list is left empty and the report is
    marked inconclusive.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    term = lucas_term(pair, r)
    part = _strip(abs(term), _divisor_base(pair))
    for k in range(1, r):
        if part == 1:
            break
        part = _strip(part, abs(lucas_term(pair, k)))
    rep = PrimitiveDivisorReport(pair.kind, pair.u, pair.v, r, term, part)
    if part == 1:
        rep.primitive_primes = []
        rep.defective = True
        return rep
    if not factor_part:
        return rep
    try:
        rep.primitive_primes = factor(part, effort).primes
    except FactorLimitExceeded:
        rep.primitive_primes = None
        rep.inconclusive = True
    return rep


def lucas_terms(pair: LucasPair, r_max: int) -> list:
    """[U_1, ..., U_r_max] from successive powers of alpha."""
    out, g = [], GaussInt(1, 0)
    u, v = pair.alpha.re, pair.alpha.im
    for r in range(1, r_max + 1):
        g = g * pair.alpha
        if pair.kind == "lucas":
            out.append(g.im // v)
        elif r % 2:
            out.append(g.re // u)
        else:
            out.append(g.im // (2 * u * v))
    return out


def scan_defective(max_norm: int, r_max: int, kinds=("lucas", "lehmer")) -> list:
    """All defective terms with index 2..r_max for pairs with u even, v odd,
    gcd(u, v) = 1 and u^2 + v^2 <= max_norm."""
    rows = []
    for u in range(2, math.isqrt(max_norm) + 1, 2):
        for v in range(1, math.isqrt(max_norm - u * u) + 1, 2):
            if math.gcd(u, v) != 1:
                continue
            for kind in kinds:
                pair = LucasPair.lucas(u, v) if kind == "lucas" else LucasPair.lehmer(u, v)
                terms = lucas_terms(pair, r_max)
                base = _divisor_base(pair)
                for r in range(2, r_max + 1):
                    part = _strip(abs(terms[r - 1]), base)
                    for k in range(r - 1):
                        if part == 1:
                            break
                        part = _strip(part, abs(terms[k]))
                    if part == 1:
                        rows.append((kind, u, v, r, terms[r - 1]))
    return rows


DATA_FILE = "defective_terms.csv"


def load_defective_table() -> list:
    """Rows of the bundled table of locally verified defective terms."""
    text = resources.files("expdio.data").joinpath(DATA_FILE).read_text()
    rows = []
    for rec in csv.DictReader(line for line in text.splitlines() if not line.startswith("#")):
        rows.append({
            "kind": rec["kind"], "u": int(rec["u"]), "v": int(rec["v"]),
            "r": int(rec["r"]), "term": int(rec["term"]), "provenance": rec["provenance"],
        })
    return rows


# ---------------------------------------------------------------------------
# congruence and valuation filters on the second representation


@dataclass
class PrimeClause:
    p: int
    v_p_v1: int
    exempt: bool
    passes: bool
    note: str = ""


@dataclass
class CongruenceVerdict:
    verdict: str  # "pass", "reject" or "inconclusive"
    clauses: list = field(default_factory=list)
    identity_holds: Optional[bool] = None
    c_lower_bounds: dict = field(default_factory=dict)


def congruence_filters(rep1: Representation, z: int, y: int, effort: int = 1 << 16) -> CongruenceVerdict:
    """Necessary conditions on (u1, v1, z, y) coming from b^(y/2) = |Im eps1^z|.

    * every prime p | v1 with p not dividing z must satisfy v_p(v1) >= y/2;
    * y v_p(b) = 2 (v_p(z) + v_p(v1)) must admit an integer v_p(b) >= 1;
    * the lower bound c > p^(y - 2 v_p(z)) recorded per prime.
    The congruence Im eps1^z = +-z v1 c^((z-1)/2) (mod v1^3) is an identity
    and is evaluated as a self-check.
    """
    if y < 6 or y % 4 != 2:
        raise ValueError("need y = 2 (mod 4), y >= 6")
    if z % 2 == 0:
        raise ValueError("z must be odd")
    v1, c = rep1.v, rep1.c
    out = CongruenceVerdict("pass")
    if v1 == 1:
        return out
    try:
        primes = factor(v1, effort).primes
    except FactorLimitExceeded:
        out.verdict = "inconclusive"
        return out
    for p in primes:
        e = p_valuation(v1, p)
        vz = p_valuation(z, p)
        if vz:
            clause = PrimeClause(p, e, True, True, "p divides z")
        else:
            ok = 2 * e >= y
            clause = PrimeClause(p, e, False, ok, "" if ok else f"v_{p}(v1) = {e} < y/2")
        num = 2 * (vz + e)
        if num % y:
            clause.passes = False
            clause.note = (clause.note + "; " if clause.note else "") + \
                f"y v_p(b) = {num} has no integer solution"
        out.clauses.append(clause)
        out.c_lower_bounds[p] = p ** max(0, y - 2 * vz)
    if not all(cl.passes for cl in out.clauses):
        out.verdict = "reject"
    g = gauss_pow(rep1.eps, z)
    m = v1 ** 3
    target = z * v1 * pow(c, (z - 1) // 2, m) % m
    out.identity_holds = g.im % m in (target, (-target) % m)
    return out


def c_lower_bound_from_valuation(y: int, vp_z_max: int, p: int = 3) -> int:
    """c > v1^2 >= p^(y - 2 vp_z_max) when p | v1 and v_p(z) <= vp_z_max."""
    return p ** max(0, y - 2 * vp_z_max)


# ---------------------------------------------------------------------------
# prime-power exclusions


def _prime_power_base(n: int) -> Optional[int]:
    if n < 2:
        return None
    fac = factor(n)
    return fac.factors[0][0] if fac.is_prime_power() else None


def _standing_violations(a: int, b: int, c: int) -> list:
    bad = []
    if a % 4 != 2:
        bad.append(f"a = {a} is not 2 mod 4")
    if b % 4 != 3:
        bad.append(f"b = {b} is not 3 mod 4")
    if c % 8 != 5:
        bad.append(f"c = {c} is not 5 mod 8")
    if c < 85:
        bad.append(f"c = {c} < 85")
    if _prime_power_base(c) is not None:
        bad.append(f"c = {c} is a prime power")
    return bad


DEFECTIVE_INDICES_LUCAS = (3, 5, 7, 13)


def prime_power_exclusion(which: str, rep: Representation, r: int):
    """Instance-level certificate that a prime-power a, b or c cannot occur.

    The verdict is ``excluded`` when some concrete condition fails for this
    instance, ``not-applicable`` when the quantity is not a prime power, and
    ``inconclusive`` when only the external defective-term classification
    would rule the instance out.
    """
    if which not in ("a", "b", "c"):
        raise ValueError("which must be one of a, b, c")
    w = witness_from(rep, r)
    a, b, c = w.a, w.b, rep.c
    value = {"a": a, "b": b, "c": c}[which]
    violations: list = []
    notes: list = []
    assumptions: list = []
    trace: list = [{"a": str(a), "b": str(b), "c": str(c)}]
    base = _prime_power_base(value)
    if base is None:
        verdict = "not-applicable"
        notes.append(f"{which} = {value} is not a prime power")
    else:
        if which == "c":
            violations.append(f"c = {base}^k is a prime power")
            assumptions.append("external: a prime-power c has one primitive representation and "
                               "the resulting Lucas term has no primitive divisor")
        elif which == "b":
            if rep.v == 1:
                notes.append("v = 1, the case covered by the v = 1 exclusion")
            elif rep.v % base:
                violations.append(f"p = {base} does not divide v although b = v|U_r| = p^s")
            pd = primitive_divisor_report(LucasPair.lucas(rep.u, rep.v), r) if r >= 2 else None
            if pd is not None:
                trace.append(pd.to_dict())
                if not pd.defective and rep.v % base == 0:
                    violations.append("U_r has a primitive divisor although its primes divide v")
                elif pd.defective:
                    notes.append(f"U_{r} = {pd.term} is defective")
                    if r not in DEFECTIVE_INDICES_LUCAS:
                        notes.append(f"index {r} lies outside (3, 5, 7, 13)")
                    assumptions.append("external: Lucas defective-term classification")
        else:
            if a % 4 == 0:
                violations.append(f"a = {a} is a power of 2 above 2, hence 0 mod 4")
            pd = primitive_divisor_report(LucasPair.lehmer(rep.u, rep.v), r) if r >= 2 else None
            if pd is not None:
                trace.append(pd.to_dict())
                if pd.defective:
                    notes.append(f"Lehmer term {pd.term} is defective")
                    assumptions.append("external: Lehmer defective-term classification")
        violations.extend(_standing_violations(a, b, c))
        verdict = "excluded" if violations else "inconclusive"
    trace.append({"violations": violations, "notes": notes})
    return Certificate(
        claim="prime-power-exclusion", module="lucas",
        inputs={"which": which, "u": rep.u, "v": rep.v, "r": r}, parameters={},
        verdict=verdict, assumptions=assumptions, trace=trace,
    )


@register_replay("prime-power-exclusion")
def _replay_prime_power(cert) -> str:
    i = cert.inputs
    u, v = i["u"], i["v"]
    rep = Representation(u * u + v * v, u, v)
    return prime_power_exclusion(i["which"], rep, i["r"]).verdict
