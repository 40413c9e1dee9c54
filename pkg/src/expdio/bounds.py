"""A small forward-chaining engine over inequality facts.

Facts live in a fixed vocabulary (a, b, c, r, y, z, u, v, u1, v1, plus a few
derived quantities such as ``y-2z`` or ``c^(1/y)``).  Each rule is a plain
function from a snapshot of the store to new facts.  Rounds are synchronous:
every rule sees the same snapshot, and the outputs are merged in a canonical
order, so the fixed point does not depend on the order of the rule list.

Numeric constants are never copied from print; they are recomputed with
intervals (see ``rederive_constants``).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .certificates import Certificate, register_replay
from .exact import (Interval, ceil_fraction, floor_fraction, ilog_floor, interval_exp,
                    interval_log, interval_pi, interval_sqrt)
from .representations import Representation, is_prime, witness_from

BITS = 160

INT_SUBJECTS = {"a", "b", "c", "r", "y", "z", "u", "v", "u1", "v1", "y-2z"}
UPPER, LOWER = "<=", ">="


class DivergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# facts


@dataclass(frozen=True)
class Fact:
    subject: str
    relation: str               # "<=", ">=", "mod", "flag"
    value: object               # Fraction/int; (residue, modulus) for mod; True for flag
    rule: str = "seed"
    premises: tuple = ()
    assumptions: tuple = ()

    @property
    def key(self) -> str:
        if self.relation == "mod":
            return f"{self.subject} mod {self.value[1]}"
        if self.relation == "flag":
            return f"flag:{self.subject}"
        return f"{self.subject}{self.relation}"

    def to_dict(self) -> dict:
        if self.relation == "mod":
            val = list(self.value)
        elif self.relation == "flag":
            val = True
        else:
            val = str(self.value)
        return {"subject": self.subject, "relation": self.relation, "value": val,
                "rule": self.rule, "premises": list(self.premises),
                "assumptions": list(self.assumptions)}

    @classmethod
    def from_dict(cls, d: dict) -> "Fact":
        rel = d["relation"]
        if rel == "mod":
            val = tuple(d["value"])
        elif rel == "flag":
            val = True
        else:
            val = Fraction(d["value"])
            if val.denominator == 1:
                val = int(val)
        return cls(d["subject"], rel, val, d.get("rule", "seed"), tuple(d.get("premises", ())),
                   tuple(d.get("assumptions", ())))

    def __str__(self):
        if self.relation == "mod":
            return f"{self.subject} = {self.value[0]} (mod {self.value[1]})"
        if self.relation == "flag":
            return f"[{self.subject}]"
        v = self.value
        if isinstance(v, int) and abs(v) > 10 ** 15:
            v = f"~10^{len(str(v)) - 1}"
        elif isinstance(v, Fraction) and v.denominator > 10 ** 6:
            v = f"{float(v):.7g}"
        return f"{self.subject} {self.relation} {v}"


def le(subject, value, rule, premises=(), assumptions=()) -> Fact:
    return Fact(subject, UPPER, value, rule, tuple(premises), tuple(assumptions))


def ge(subject, value, rule, premises=(), assumptions=()) -> Fact:
    return Fact(subject, LOWER, value, rule, tuple(premises), tuple(assumptions))


def strict_upper(x) -> int:
    """Largest integer < x."""
    x = Fraction(x)
    return ceil_fraction(x) - 1


def strict_lower(x) -> int:
    """Smallest integer > x."""
    return floor_fraction(Fraction(x)) + 1


@dataclass
class Contradiction:
    reason: str
    rule: str
    premises: tuple
    assumptions: tuple = ()

    def to_dict(self) -> dict:
        return {"reason": self.reason, "rule": self.rule, "premises": list(self.premises),
                "assumptions": list(self.assumptions)}


def _better(new: Fact, old: Optional[Fact]) -> bool:
    if old is None:
        return True
    if new.relation == UPPER:
        return new.value < old.value
    if new.relation == LOWER:
        return new.value > old.value
    return False


def _canon(f: Fact):
    """Sort key; tighter values first, then rule name, so merges are canonical."""
    if f.relation == UPPER:
        v = f.value
    elif f.relation == LOWER:
        v = -f.value
    else:
        v = 0
    return (f.key, v, f.rule, f.premises, f.assumptions)


class Store:
    def __init__(self, facts: Iterable[Fact] = ()):
        self.facts: dict = {}
        for f in facts:
            self.add(f)

    def add(self, f: Fact) -> bool:
        if f.subject in INT_SUBJECTS and f.relation in (UPPER, LOWER):
            v = Fraction(f.value)
            v = floor_fraction(v) if f.relation == UPPER else ceil_fraction(v)
            f = Fact(f.subject, f.relation, v, f.rule, f.premises, f.assumptions)
        old = self.facts.get(f.key)
        if _better(f, old):
            self.facts[f.key] = f
            return True
        return False

    def get(self, key: str) -> Optional[Fact]:
        return self.facts.get(key)

    def lo(self, s: str):
        f = self.facts.get(s + LOWER)
        return None if f is None else f.value

    def hi(self, s: str):
        f = self.facts.get(s + UPPER)
        return None if f is None else f.value

    def flag(self, name: str) -> bool:
        return f"flag:{name}" in self.facts

    def mod(self, s: str, m: int):
        f = self.facts.get(f"{s} mod {m}")
        return None if f is None else f.value[0]

    def copy(self) -> "Store":
        s = Store()
        s.facts = dict(self.facts)
        return s

    def __len__(self):
        return len(self.facts)

    def snapshot(self) -> dict:
        return {k: f.to_dict() for k, f in sorted(self.facts.items())}


# ---------------------------------------------------------------------------
# threshold rows (exponent bounds coming from two-logarithm estimates)


@dataclass(frozen=True)
class ThresholdRow:
    table: str
    y_floor: int
    c_min: int
    r_max: Optional[int]
    z_max: Optional[int]
    hypothesis: Optional[str] = None
    source: str = "published"

    @property
    def terminal(self) -> bool:
        return self.r_max is None and self.z_max is None

    def applies(self, s: Store) -> bool:
        y, c = s.lo("y"), s.lo("c")
        if y is None or c is None or y < self.y_floor or c < self.c_min:
            return False
        return self.hypothesis is None or s.flag(self.hypothesis)

    @property
    def name(self) -> str:
        return f"{self.table}[y>={self.y_floor}]"


C0 = 4 * 10 ** 10 + 5

SKEW_U1V1 = "min(u1/v1,v1/u1)<=1/100"
SKEW_UV = "min(u/v,v/u)<=1/100"
B_BIG = "b>=c^((r-1)/2)"
T_ONE = "t=1"
V_ONE = "v=1"


def _rows() -> list:
    rows = []
    for y, r, z in ((6, 769, 983), (10, 539, 759), (14, 461, 681), (18, 419, 647),
                    (22, 395, 627), (602, 263, 539)):
        rows.append(ThresholdRow("window", y, C0, r, z))
    rows.append(ThresholdRow("skew", 6, C0, 659, 845, SKEW_U1V1))
    rows.append(ThresholdRow("skew-uv", 6, C0, 553, 705, SKEW_UV))
    for y, r, z in ((6, 101, 299), (10, 47, 227), (14, 31, 209), (18, 23, 197), (22, 19, 189),
                    (30, 13, 185), (50, 7, 161), (70, 5, 155), (98, 3, 147)):
        rows.append(ThresholdRow("b-large", y, C0, r, z, B_BIG))
    rows.append(ThresholdRow("b-large", 142, C0, None, None, B_BIG))
    for y, r in ((6, 101), (10, 47), (14, 29), (18, 19), (22, 17), (26, 13), (30, 11), (38, 9),
                 (42, 7), (50, 5), (66, 3)):
        rows.append(ThresholdRow("t-one", y, C0, r, None, T_ONE))
    rows.append(ThresholdRow("t-one", 102, C0, None, None, T_ONE))
    for y, r, z in ((102, 181, 373), (302, 157, 329), (602, 149, 319)):
        rows.append(ThresholdRow("high-y", y, 3 ** (y - 10), r, z))
    rows.append(ThresholdRow("high-y", 38, 3 ** 28, 239, None))
    return rows


PUBLISHED_ROWS = tuple(_rows())


def computed_rows(profile, y_floors=(6, 10, 14, 18, 22, 602)) -> list:
    """window-style rows recomputed from a certified theta profile."""
    from .linear_forms import exponent_threshold
    out = []
    for y in y_floors:
        r = exponent_threshold(profile, "r", y).bound
        z = exponent_threshold(profile, "z", y).bound
        out.append(ThresholdRow("window", y, profile.c, r, z, source="computed"))
    return out


# ---------------------------------------------------------------------------
# certified numeric helpers


def _pi(bits=BITS) -> Interval:
    return interval_pi(bits)


def log_stretch(r: int, bits=BITS) -> Interval:
    """log(1 + (r+1)^2/pi^2)."""
    p = _pi(bits)
    return interval_log(1 + Fraction((r + 1) ** 2) / (p * p), bits)


def v_floor(c: int, r: int, bits=BITS) -> int:
    """Smallest odd v with (r+1)^2 v^2 >= pi^2 (c - v^2), i.e. the first v for
    which the 'small angle' branch is unavailable."""
    p2 = _pi(bits) ** 2
    target = p2 * c / (p2 + (r + 1) ** 2)     # v^2 >= target
    v = math.isqrt(floor_fraction(target.lo))
    v = max(1, v - 2)
    v += 1 - v % 2
    # sound: the first v that could satisfy the inequality
    while v * v < target.lo:
        v += 2
    return v


def b_floor_continuous(c: int, r: int, bits=BITS) -> Fraction:
    """pi sqrt(c) / sqrt((r+1)^2 + pi^2), rounded down."""
    p = _pi(bits)
    return (p * interval_sqrt(Interval.exact(c, bits), bits)
            / interval_sqrt(p * p + (r + 1) ** 2, bits)).lo


def lambda_prime_delta(c: int, bits=BITS) -> Interval:
    """-log(1 - c^-2) / log c."""
    return -interval_log(1 - Fraction(1, c * c), bits) / interval_log(c, bits)


# ---------------------------------------------------------------------------
# rules used by the engine. Each takes (store, ctx) and returns a list of
# Facts and Contradictions.


@dataclass
class Context:
    rows: tuple = PUBLISHED_ROWS
    depth: int = 0
    seeds: tuple = ()
    split_points: tuple = (602,)
    rules: Optional[list] = None
    cache: dict = field(default_factory=dict)


def rule_parity_engine(s: Store, ctx) -> list:
    if s.lo("c") is None:
        return []
    p = ("c>=",)
    return [ge("y", 6, "parity", p), Fact("y", "mod", (2, 4), "parity", p),
            ge("r", 3, "parity", p), Fact("r", "mod", (1, 2), "parity", p),
            ge("z", 5, "parity", p), Fact("z", "mod", (1, 2), "parity", p),
            Fact("c", "mod", (5, 8), "parity", p), ge("c", 85, "parity", p),
            Fact("b", "mod", (3, 4), "parity", p), Fact("a", "mod", (2, 4), "parity", p)]


def _round_to_class(v: int, res: int, m: int, up: bool) -> int:
    if up:
        return v + (res - v) % m
    return v - (v - res) % m


def rule_residues(s: Store, ctx) -> list:
    out = []
    for key, f in list(s.facts.items()):
        if f.relation != "mod":
            continue
        res, m = f.value
        for rel, up in ((LOWER, True), (UPPER, False)):
            b = s.get(f.subject + rel)
            if b is None:
                continue
            nv = _round_to_class(b.value, res, m, up)
            if nv != b.value:
                out.append(Fact(f.subject, rel, nv, "residue", (b.key, key)))
    return out


def rule_order(s: Store, ctx) -> list:
    out = []
    if s.lo("r") is not None:
        out.append(ge("z", s.lo("r") + 2, "order(z>r)", ("r>=",)))
    if s.hi("z") is not None:
        out.append(le("r", s.hi("z") - 2, "order(z>r)", ("z<=",)))
    for sub in ("r", "y", "z", "c", "b", "a", "u", "v", "u1", "v1", "y-2z"):
        lo, hi = s.lo(sub), s.hi(sub)
        if lo is not None and hi is not None and lo > hi:
            return out + [Contradiction(f"{sub}: {lo} > {hi}", "bounds-meet",
                                        (sub + LOWER, sub + UPPER))]
    return out


def rule_rows(s: Store, ctx) -> list:
    out = []
    for row in ctx.rows:
        if not row.applies(s):
            continue
        prem = ["y>=", "c>="] + ([f"flag:{row.hypothesis}"] if row.hypothesis else [])
        tag = (f"{row.source}: {row.name}",)
        if row.terminal:
            out.append(Contradiction(f"no solution for y >= {row.y_floor} under {row.hypothesis}",
                                     row.name, tuple(prem), tag))
            continue
        if row.r_max is not None:
            out.append(le("r", row.r_max, row.name, prem, tag))
        if row.z_max is not None:
            out.append(le("z", row.z_max, row.name, prem, tag))
    return out


def rule_b_angle_engine(s: Store, ctx) -> list:
    c, r = s.lo("c"), s.hi("r")
    if c is None or r is None:
        return []
    v = v_floor(c, r)
    cont = b_floor_continuous(c, r)
    prem = ("c>=", "r<=")
    return [ge("b", min(c, v), "b-angle", prem), ge("b", cont, "b-floor(b)", prem),
            ge("v", 1, "b-angle", prem)]


def rule_b_floor_engine(s: Store, ctx) -> list:
    z, r, b = s.hi("z"), s.hi("r"), s.lo("b")
    if z is None or r is None or b is None or b < 2:
        return []
    bound = (log_stretch(r) / interval_log(b, BITS) + 2) * z
    return [le("y", strict_upper(bound.hi), "b-floor(y)", ("z<=", "r<=", "b>="))]


def rule_lambda_prime_engine(s: Store, ctx) -> list:
    c, r = s.lo("c"), s.hi("r")
    if c is None or r is None:
        return []
    delta = lambda_prime_delta(c)
    val = ((2 - delta) * Fraction(2, r)).lo
    return [Fact("lambda'", LOWER, val, "lambda-prime", ("c>=", "r<="))]


def rule_skew_engine(s: Store, ctx) -> list:
    c = s.lo("c")
    if c is None:
        return []
    # z bound available under the skew hypothesis (independent of whether it holds)
    zs = [row.z_max for row in ctx.rows
          if row.hypothesis == SKEW_U1V1 and row.z_max is not None and c >= row.c_min]
    if not zs:
        return []
    z_skew = min(zs)
    ratio = min(Fraction(1, 100), (_pi() / (2 * (z_skew + 1))).lo)
    m = interval_sqrt(Interval.exact(c, BITS) / (1 + ratio * ratio), BITS) * ratio
    mn = ceil_fraction(m.lo)
    prem = ("c>=",)
    tag = (f"z <= {z_skew} under the skew hypothesis",)
    return [Fact("min(u1/v1,v1/u1)", LOWER, ratio, "skew", prem, tag),
            ge("u1", mn, "skew", prem, tag), ge("v1", mn, "skew", prem, tag)]


def rule_t_split_engine(s: Store, ctx) -> list:
    r, y, zlo = s.hi("r"), s.hi("y"), s.lo("z")
    out = []
    if r is not None and y is not None:
        out.append(le("z", Fraction(r * y, 2) - 2, "t-split(ry/2=z+2t)", ("r<=", "y<=")))
    if zlo is not None and y is not None:
        out.append(ge("r", Fraction(2 * (zlo + 2), y), "t-split(ry/2=z+2t)", ("z>=", "y<=")))
    if zlo is not None and r is not None:
        out.append(ge("y", Fraction(2 * (zlo + 2), r), "t-split(ry/2=z+2t)", ("z>=", "r<=")))
    return out


def _c_boost(y_lo: int, z_hi: int):
    """min over odd primes p of p^(y - 2 floor(log_p z_hi)), with its prime."""
    best = None
    for p in range(3, max(z_hi, 3) + 1, 2):
        if not is_prime(p):
            continue
        k = ilog_floor(z_hi, p)
        e = y_lo - 2 * k
        val = p ** e if e > 0 else 1
        if best is None or val < best[0]:
            best = (val, p, k)
        if k == 0:
            break
    return best


def rule_high_y_engine(s: Store, ctx) -> list:
    out = []
    y, z, v1, c = s.lo("y"), s.hi("z"), s.lo("v1"), s.lo("c")
    if y is None or z is None or v1 is None or v1 < 2 or c is None:
        return out
    val, p, k = _c_boost(y, z)
    prem = ("y>=", "z<=", "v1>=")
    # c > v1^2 >= p^(y - 2 v_p(z)) from the valuation identity
    out.append(ge("c", val + 1, "high-y(valuation)", prem))
    k3 = 2 * ilog_floor(z, 3)
    if p == 3:
        out.append(Fact("c:3^(y-k)", UPPER, k3, "high-y(valuation)", prem))
    kk = s.hi("c:3^(y-k)")
    if kk is not None and y > kk:
        # c^(1/y) >= 3^(1 - k/y) for all y >= y_lo
        base = interval_exp(interval_log(3, BITS) * (1 - Fraction(kk, y)), BITS).lo
        if y >= 34:
            out.append(Fact("c^(1/y)", LOWER, base, "high-y(c>base^y)", ("c:3^(y-k)<=", "y>=")))
    base = s.lo("c^(1/y)")
    if base is not None and base > 2:
        b4 = Interval.exact(base, BITS) ** 4
        out.append(Fact("a/b", LOWER, interval_sqrt(b4 - 1, BITS).lo, "high-y(a>kb)", ("c^(1/y)>=",)))
        # b^y > (1 - 1e-20) c^z > (1 - 1e-20) base^(yz)  =>  b^(1/z) > base * (1-1e-20)^(1/(yz))
        bz = Fraction(floor_fraction(Fraction(base) * 1000 * (1 - Fraction(1, 10 ** 19))), 1000)
        out.append(Fact("b^(1/z)", LOWER, bz, "high-y(b>base^z)", ("c^(1/y)>=",)))
    bz = s.lo("b^(1/z)")
    r = s.hi("r")
    if bz is not None and bz > 1 and r is not None:
        off = log_stretch(r) / interval_log(bz, BITS)
        out.append(le("y-2z", strict_upper(off.hi), "high-y(y<2z+off)", ("b^(1/z)>=", "r<=")))
    yz = s.hi("y-2z")
    if yz is not None and yz <= 12:
        tag = ("published: y = 2z+12 and y = 2z+8 eliminated (argued similarly, not re-run)",)
        out.append(le("y-2z", 4, "high-y(published)", ("y-2z<=",), tag))
        if y >= 34:
            tag2 = ("published: y = 2z+4 eliminated for y >= 34; y = 2z by Darmon-Merel",)
            out.append(le("y-2z", -4, "high-y(published)", ("y-2z<=", "y>="), tag2))
    if s.hi("y-2z") is not None:
        out.append(le("y", 2 * z + s.hi("y-2z"), "high-y(y<=2z+k)", ("y-2z<=", "z<=")))
    return out


def rule_case_split(s: Store, ctx) -> list:
    """y < p or y >= p; the second branch is derived in a nested context."""
    if ctx.depth > 0:
        return []
    out = []
    ylo, yhi = s.lo("y"), s.hi("y")
    for p in ctx.split_points:
        if yhi is None or ylo is None or ylo >= p or yhi < p:
            continue
        key = ("split", p)
        if key not in ctx.cache:
            seeds = list(ctx.seeds) + [ge("y", p, f"case y>={p}")]
            sub = derive_all(seeds, rules=ctx.rules, rows=ctx.rows, depth=ctx.depth + 1)
            ctx.cache[key] = sub
        sub = ctx.cache[key]
        below = _round_to_class(p - 1, 2, 4, False)
        tags = tuple(sub.assumptions())
        if sub.contradictions:
            out.append(le("y", below, f"case-split@{p}", ("y<=",), tags))
        elif sub.store.hi("y") is not None:
            out.append(le("y", max(below, sub.store.hi("y")), f"case-split@{p}", ("y<=",), tags))
    return out


def rule_v_one_engine(s: Store, ctx) -> list:
    if not s.flag(V_ONE):
        return []
    c, r, y = s.lo("c"), s.hi("r"), s.hi("y")
    if c is None or r is None or y is None:
        return []
    # u^2 = c - 1 and u^2 + r^2 <= r(r-1)y/2 + z < r^2 y / 2
    if 2 * (c - 1) >= r * r * y:
        return [Contradiction(f"u^2 >= {c - 1} > r^2 y/2 with r <= {r}, y <= {y}", "v-one",
                              ("flag:v=1", "c>=", "r<=", "y<="))]
    return []


def rule_external_engine(s: Store, ctx) -> list:
    """Fires only once y, z (and optionally r) are pinned to single values."""
    y = s.lo("y") if s.lo("y") == s.hi("y") else None
    z = s.lo("z") if s.lo("z") == s.hi("z") else None
    r = s.lo("r") if s.lo("r") == s.hi("r") else None
    if y is None or z is None:
        return []
    out = []
    res = external_filters(y, z, r)
    for reason, tag in res.exclusions:
        out.append(Contradiction(reason, "external", ("y>=", "y<=", "z>=", "z<="), (tag,)))
    return out


def rule_mu_pair_engine(s: Store, ctx) -> list:
    m1, m2, y = s.hi("mu1^2"), s.hi("mu2^2"), s.lo("y")
    if m1 is None or m2 is None or y is None:
        return []
    if m1 * m2 <= 4 * y * y:
        return [Contradiction(f"mu1 mu2 <= 2y (squares {m1}*{m2} <= {4 * y * y})", "mu-pair(c)",
                              ("mu1^2<=", "mu2^2<=", "y>="))]
    return []


DEFAULT_RULES = [rule_parity_engine, rule_residues, rule_order, rule_rows, rule_b_angle_engine,
                 rule_b_floor_engine, rule_lambda_prime_engine, rule_skew_engine, rule_t_split_engine,
                 rule_high_y_engine, rule_case_split, rule_v_one_engine, rule_external_engine,
                 rule_mu_pair_engine]

RULES_BY_NAME = {f.__name__: f for f in DEFAULT_RULES}


# ---------------------------------------------------------------------------
# driver


@dataclass
class Derivation:
    store: Store
    contradictions: list
    rounds: int
    log: list            # (round, Fact) in merge order

    @property
    def facts(self) -> dict:
        return self.store.facts

    def fixed_point(self) -> dict:
        return self.store.snapshot()

    def ancestors(self, keys: Iterable[str]) -> list:
        seen, stack = [], list(keys)
        while stack:
            k = stack.pop()
            if k in seen or k not in self.store.facts:
                continue
            seen.append(k)
            stack.extend(self.store.facts[k].premises)
        return sorted(seen)

    def assumptions(self) -> list:
        tags = set()
        for f in self.store.facts.values():
            tags.update(f.assumptions)
        for c in self.contradictions:
            tags.update(c.assumptions)
        return sorted(tags)


def derive_all(seeds: Iterable[Fact], rules: Optional[list] = None, rows=PUBLISHED_ROWS,
               depth: int = 0, cap: int = 10 ** 4, max_rounds: int = 200) -> Derivation:
    seeds = tuple(seeds)
    rules = list(DEFAULT_RULES if rules is None else rules)
    ctx = Context(rows=tuple(rows), depth=depth, seeds=seeds, rules=rules)
    store = Store(seeds)
    log = [(0, f) for f in sorted(store.facts.values(), key=_canon)]
    for rnd in range(1, max_rounds + 1):
        snap = store.copy()
        produced, contras = [], []
        for rule in rules:
            for item in rule(snap, ctx):
                (contras if isinstance(item, Contradiction) else produced).append(item)
        if contras:
            contras.sort(key=lambda c: (c.rule, c.reason))
            return Derivation(store, contras, rnd, log)
        changed = False
        for f in sorted(produced, key=_canon):
            if store.add(f):
                changed = True
                log.append((rnd, store.get(f.key)))
        if len(store) > cap:
            raise DivergenceError(f"more than {cap} facts")
        if not changed:
            return Derivation(store, [], rnd, log)
    raise DivergenceError("no fixed point within the round limit")


def exclusion_certificate(seeds: list, rules: Optional[list] = None,
                          rows=PUBLISHED_ROWS) -> Optional[Certificate]:
    d = derive_all(seeds, rules, rows)
    if not d.contradictions:
        return None
    first = d.contradictions[0]
    chain = d.ancestors(first.premises)
    rule_names = [f.__name__ for f in (rules or DEFAULT_RULES)]
    return Certificate(
        claim="exclusion", module="bounds",
        inputs={"seeds": [f.to_dict() for f in seeds]},
        parameters={"rules": rule_names, "rows": "published" if rows is PUBLISHED_ROWS else "custom"},
        verdict="contradiction:" + first.rule,
        assumptions=d.assumptions(),
        trace=[d.store.facts[k].to_dict() for k in chain] + [c.to_dict() for c in d.contradictions],
    )


@register_replay("exclusion")
def _replay_exclusion(cert: Certificate) -> str:
    seeds = [Fact.from_dict(f) for f in cert.inputs["seeds"]]
    rules = [RULES_BY_NAME[n] for n in cert.parameters["rules"]]
    d = derive_all(seeds, rules)
    return "contradiction:" + d.contradictions[0].rule if d.contradictions else "no-contradiction"


# ---------------------------------------------------------------------------
# direct (non-engine) rule forms with concrete inputs


@dataclass
class RuleOutput:
    ok: bool                      # False means the candidate is rejected / contradiction
    facts: list = field(default_factory=list)
    reasons: list = field(default_factory=list)


def rule_parity(y: int, z: int) -> RuleOutput:
    reasons = []
    if y < 6:
        reasons.append("y < 6")
    if y % 4 != 2:
        reasons.append("y != 2 (mod 4)")
    if z % 2 == 0:
        reasons.append("z even")
    facts = [] if reasons else [ge("y", 6, "parity"), Fact("y", "mod", (2, 4), "parity"),
                                Fact("z", "mod", (1, 2), "parity")]
    return RuleOutput(not reasons, facts, reasons)


@dataclass(frozen=True)
class Surd:
    """coef * sqrt(radicand); only its square is ever compared."""
    coef: Fraction
    radicand: int = 1

    def square(self) -> Fraction:
        return Fraction(self.coef) ** 2 * self.radicand


def _sq(x) -> Fraction:
    return x.square() if isinstance(x, Surd) else Fraction(x) ** 2


def rule_mu_pair(mu1, mu2, y: int) -> RuleOutput:
    """a >= c^(z/mu1) gives 2z < mu1 r; b >= c^(r/mu2) gives y r < mu2 z.
    Both together are impossible when mu1 mu2 <= 2y (compared via squares)."""
    s1, s2 = _sq(mu1), _sq(mu2)
    facts = [Fact("(z/r)^2", "<", s1 / 4, "mu-pair(a)"),
             Fact("(r/z)^2", "<", s2 / (y * y), "mu-pair(b)")]
    excl = s1 * s2 <= 4 * y * y
    return RuleOutput(not excl, facts, ["mu1 mu2 <= 2y: conditions exclusive"] if excl else [])


def rule_mu_single(mu1, r: int, z: int) -> RuleOutput:
    """Part a alone: 2z < mu1 r must hold; with z > r, mu1 = 2 is contradictory."""
    ok = 4 * z * z < _sq(mu1) * r * r
    return RuleOutput(ok, [], [] if ok else [f"2z < mu r fails for z={z}, r={r}"])


def rule_b_angle(rep: Representation, r: int, bits=BITS) -> RuleOutput:
    """b >= v c^((r-1)/2) when (r+1) v < pi u (certified); b >= v always."""
    if r < 3 or r % 2 == 0:
        raise ValueError("r must be odd >= 3")
    lhs = Interval.exact((r + 1) * rep.v, bits)
    rhs = _pi(bits) * rep.u
    cmp = lhs.compare(rhs)
    if cmp is None:
        from .exact import PrecisionExhausted
        raise PrecisionExhausted("(r+1) v versus pi u undecided")
    facts = [ge("b", rep.v, "b-angle(always)")]
    if cmp < 0:
        facts.append(ge("b", rep.v * rep.c ** ((r - 1) // 2), "b-angle(small angle)"))
    return RuleOutput(True, facts, ["small-angle branch" if cmp < 0 else "branch off"])


def rule_b_floor(r: int, z: int, b_lower, c: int, bits=BITS) -> RuleOutput:
    """Lower bound on b from c, and the y bound y < z(2 + log(1+(r+1)^2/pi^2)/log b)."""
    const = log_stretch(r, bits)
    b_lower = Fraction(b_lower)
    ybound = (const / interval_log(b_lower, bits) + 2) * z
    facts = [ge("b", b_floor_continuous(c, r, bits), "b-floor(b)"),
             le("y", strict_upper(ybound.hi), "b-floor(y)")]
    return RuleOutput(True, facts, [f"log(1+(r+1)^2/pi^2) in [{float(const.lo):.6f}, {float(const.hi):.6f}]"])


def rule_lambda_prime(c: int, b: int, r: int, z: int, bits=BITS) -> RuleOutput:
    """lambda' > (log c/log b)(z - r - delta) and > (2/r)(2 - delta),
    delta = -log(1 - c^-2)/log c re-derived."""
    if z < r + 2:
        return RuleOutput(False, [], ["z >= r + 2 required"])
    delta = lambda_prime_delta(c, bits)
    first = (interval_log(c, bits) / interval_log(b, bits) * (z - r - delta)).lo
    second = ((2 - delta) * Fraction(2, r)).lo
    return RuleOutput(True, [Fact("lambda'", ">", first, "lambda-prime"), Fact("lambda'", ">", second, "lambda-prime")],
                      [f"delta <= {float(delta.hi):.3e}"])


def rule_v_one(rep: Representation, r: int, y: int, z: int, r_max: int = 769,
               y_max: int = 1778) -> Certificate:
    """Congruence chain for v = 1 and the size test u^2 >= r^2 y / 2."""
    if rep.v != 1:
        return Certificate("v-one", "bounds", {"c": rep.c, "u": rep.u, "v": rep.v, "r": r},
                           {}, "not-applicable", [], [{"reason": "v != 1"}])
    u = rep.u
    w = witness_from(rep, r)
    a, b = w.a, w.b
    m3, m4 = u ** 3, u ** 4
    checks = {
        "a = +-r u (mod u^3)": (a - r * u) % m3 == 0 or (a + r * u) % m3 == 0,
        "b = +-(1 - C(r,2) u^2) (mod u^4)": any((b - s * (1 - math.comb(r, 2) * u * u)) % m4 == 0
                                                for s in (1, -1)),
    }
    # c^z = 1 + z u^2 (mod u^4) needs z u^2 * u^2 ... ; checked exactly
    checks["c^z = 1 + z u^2 (mod u^4)"] = (pow(rep.c, z, m4) - 1 - z * u * u) % m4 == 0
    size_excl = 2 * u * u >= r_max * r_max * y_max
    verdict = "excluded" if size_excl else "inconclusive"
    return Certificate("v-one", "bounds",
                       {"c": rep.c, "u": u, "v": 1, "r": r, "y": y, "z": z},
                       {"r_max": r_max, "y_max": y_max},
                       verdict, [],
                       [{"congruences": checks, "u^2": u * u, "r_max^2 y_max/2": Fraction(r_max * r_max * y_max, 2)}])


@register_replay("v-one")
def _replay_v_one(cert: Certificate) -> str:
    i, p = cert.inputs, cert.parameters
    rep = Representation(i["c"], i["u"], i["v"])
    return rule_v_one(rep, i["r"], i.get("y", 6), i.get("z", 5), p.get("r_max", 769),
                      p.get("y_max", 1778)).verdict


def rule_skew(rep: Representation, which: str, z_skew: int = 845, c_min: Optional[int] = None,
                    bits=BITS) -> RuleOutput:
    """Ratio lower bound min(u/v, v/u) >= pi/(2(z_skew+1)) and min(u, v) bound."""
    if which not in ("uv", "u1v1"):
        raise ValueError("which must be 'uv' or 'u1v1'")
    c = rep.c if c_min is None else c_min
    ratio = min(Fraction(1, 100), (_pi(bits) / (2 * (z_skew + 1))).lo)
    mn = ceil_fraction((interval_sqrt(Interval.exact(c, bits) / (1 + ratio * ratio), bits) * ratio).lo)
    actual = min(Fraction(rep.u, rep.v), Fraction(rep.v, rep.u))
    facts = [Fact(f"min-ratio({which})", LOWER, ratio, "skew"),
             ge("min(" + which + ")", mn, "skew")]
    ok = actual >= ratio
    return RuleOutput(ok, facts, [] if ok else [f"ratio {float(actual):.6g} below {float(ratio):.6g}"])


def rule_t_split(r: int, y: int, z: int, b: Optional[int] = None, c: Optional[int] = None) -> RuleOutput:
    """ry/2 = z + 2t with t >= 1; t = 1 triggers the conditional table."""
    if r % 2 == 0 or z % 2 == 0 or y % 4 != 2:
        return RuleOutput(False, [], ["parity: r, z odd and y = 2 (mod 4) required"])
    lhs = r * y // 2
    diff = lhs - z
    if diff <= 0 or diff % 2:
        return RuleOutput(False, [], [f"ry/2 - z = {diff} is not a positive even number"])
    t = diff // 2
    facts = [Fact("t", "=", t, "t-split"), Fact("ry/2", "mod", (1, 2), "t-split")]
    if t == 1:
        rows = [row for row in PUBLISHED_ROWS if row.hypothesis == T_ONE and y >= row.y_floor]
        if rows:
            best = max(rows, key=lambda rw: rw.y_floor)
            if best.terminal:
                return RuleOutput(False, facts, [f"t = 1 and y >= {best.y_floor}: no solution"])
            facts.append(le("r", best.r_max, best.name, (), (f"published: {best.name}",)))
            if r > best.r_max:
                return RuleOutput(False, facts, [f"r = {r} > {best.r_max}"])
    if b is not None and c is not None:
        # b < c^(r/2 - 2/y)  <=>  b^y < c^(ry/2 - 2)
        if not b ** y < c ** (lhs - 2):
            return RuleOutput(False, facts, ["b < c^(r/2 - 2/y) fails"])
    return RuleOutput(True, facts, [])


CHEN_LIST = (6, 10, 14, 18, 30, 42, 50, 54, 62, 70, 90, 98, 126, 150, 162, 186, 210, 250, 270,
             294, 310, 350, 378, 434, 450, 486, 490, 558, 630)


def chen_covered(y: int) -> bool:
    """True when y has a prime factor p with 7 < p < 10^7, p != 31."""
    n, p = y, 2
    primes = set()
    while p * p <= n:
        while n % p == 0:
            primes.add(p)
            n //= p
        p += 1
    if n > 1:
        primes.add(n)
    return any(7 < q < 10 ** 7 and q != 31 for q in primes)


def chen_survivors(y_max: int = 634) -> list:
    return [y for y in range(6, y_max + 1, 4) if not chen_covered(y)]


@dataclass
class ExternalResult:
    exclusions: list          # (reason, assumption tag)

    @property
    def excluded(self) -> bool:
        return bool(self.exclusions)


def external_filters(y: int, z: int, r: Optional[int] = None) -> ExternalResult:
    out = []
    if z % 3 == 0 and chen_covered(y):
        out.append((f"3 | z and y = {y} has a prime factor in (7, 10^7) other than 31",
                    "external: Chen, A^2 + B^(2p) = C^3"))
    if r is not None and z % r == 0 and math.gcd(y // 2, z // r) > 1:
        out.append((f"r | z and gcd(y/2, z/r) = {math.gcd(y // 2, z // r)} > 1",
                    "external: Mignotte-Petho, X^m - X = Y^n - Y"))
    if math.gcd(y, z) > 3:
        out.append((f"gcd(y, z) = {math.gcd(y, z)} > 3", "external: Darmon-Merel, X^n + Y^n = Z^2"))
    return ExternalResult(out)


def rule_external_filters(y: int, z: int, r: Optional[int] = None) -> RuleOutput:
    res = external_filters(y, z, r)
    return RuleOutput(not res.excluded, [], [reason for reason, _ in res.exclusions])


# ---------------------------------------------------------------------------
# constants and tables


@dataclass
class ConstantCheck:
    name: str
    printed: str
    interval: Interval
    tolerance: Fraction
    exact: Optional[int] = None

    @property
    def ok(self) -> bool:
        if self.exact is not None:
            return str(self.exact) == self.printed
        p = Fraction(self.printed)
        return p - self.tolerance <= self.interval.lo and self.interval.hi <= p + self.tolerance

    def line(self) -> str:
        val = self.exact if self.exact is not None else \
            f"[{float(self.interval.lo):.7g}, {float(self.interval.hi):.7g}]"
        return f"{self.name:<28} printed {self.printed:<9} derived {val}  {'ok' if self.ok else 'DEVIATES'}"


def _ulp(printed: str) -> Fraction:
    if "." not in printed:
        return Fraction(1)
    return Fraction(1, 10 ** len(printed.split(".")[1]))


def rederive_constants(c_min: int = C0, bits=BITS) -> list:
    pi = _pi(bits)
    out = []

    def add(name, printed, iv, exact=None):
        out.append(ConstantCheck(name, printed, iv, _ulp(printed), exact))

    add("log(1+462^2/pi^2)", "9.982", log_stretch(461, bits))
    add("log(1+264^2/pi^2)", "8.863", log_stretch(263, bits))
    add("log(1+396^2/pi^2)/log 2.171", "12.5",
        log_stretch(395, bits) / interval_log(Fraction("2.171"), bits))
    base = interval_exp(interval_log(3, bits) * Fraction(12, 17), bits)       # 3^(1 - 5/17)
    add("3^(12/17)", "2.1716", base)
    add("sqrt(2.1716^4 - 1)", "4.608", interval_sqrt(Interval.exact(Fraction("2.1716"), bits) ** 4 - 1, bits))
    ratio = pi / (2 * 846)
    add("pi/(2*846)", "0.001856", ratio)
    rlo = Fraction("0.001856")
    mn = interval_sqrt(Interval.exact(c_min, bits) / (1 + rlo * rlo), bits) * rlo
    add("ceil(0.001856 sqrt(c/(1+r^2)))", "372", mn, ceil_fraction(mn.lo) if ceil_fraction(mn.lo) == ceil_fraction(mn.hi) else None)
    y1778 = (Interval.exact(Fraction("8.863"), bits) / interval_log(925, bits) + 2) * 539
    add("539 (2 + 8.863/log 925)", "1778", y1778, ceil_fraction(y1778.hi))
    add("2*319 - 4", "634", Interval.exact(634, bits), 2 * 319 - 4)
    return out


def b_floor_report(c_min: int = C0, r_max: int = 769) -> dict:
    """Re-derivation of the elementary b floor: smallest admissible v and the
    size of u/v where the small-angle branch is guaranteed."""
    v = v_floor(c_min, r_max)
    return {"c_min": c_min, "r_max": r_max, "b_floor": min(c_min, v),
            "pi/(r_max+1)": float(math.pi / (r_max + 1)),
            "printed": 925, "agrees": min(c_min, v) >= 925}


def bounds_table(rows=PUBLISHED_ROWS) -> tuple[str, str]:
    """(text, csv) reproduction of the y-floor tables."""
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["table", "hypothesis", "y_floor", "c_min", "r_max", "z_max", "source"])
    lines = []
    current = None
    for row in rows:
        cm = str(row.c_min) if row.c_min < 10 ** 15 else f"3^{round(math.log(row.c_min, 3))}"
        w.writerow([row.table, row.hypothesis or "", row.y_floor, cm,
                    "" if row.r_max is None else row.r_max,
                    "" if row.z_max is None else row.z_max, row.source])
        head = f"{row.table}" + (f"  (under {row.hypothesis})" if row.hypothesis else "")
        if head != current:
            lines.append(head)
            current = head
        if row.terminal:
            rhs = "no solution"
        else:
            parts = []
            if row.r_max is not None:
                parts.append(f"r<={row.r_max}")
            if row.z_max is not None:
                parts.append(f"z<={row.z_max}")
            rhs = " ".join(parts)
        lines.append(f"  y >= {row.y_floor:<4} c >= {cm:<14} => {rhs}   [{row.source}]")
    return "\n".join(lines) + "\n", buf.getvalue()
