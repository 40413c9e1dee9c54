"""Desk-scale sweep over c: for every admissible c, show that no small
exponent pair survives and that every larger exponent is covered by the
angle estimate a > c^(z/(2 sqrt 3)), b > c^(r/(2 sqrt 3)).

Per c the battery is:

1. residue filter (c = 5 mod 8, c >= 85, not a prime power, every odd prime
   factor = 1 mod 4);
2. all primitive representations c = u^2 + v^2;
3. for each representation, a continued-fraction check that
   ||n x|| > c^(-tau n) for odd 11 <= n <= n_cap, where x = 2 xi / pi and
   tau = 1/2 - 1/(2 sqrt 3); n failing the check are recorded as exceptions;
4. exact Gaussian-integer checks for every exponent pair (r, z) not
   eliminated by step 3 together with mu1 mu2 = 12 <= 2y.

Work is split into shards; the merge is a commutative fold so the report
digest does not depend on worker count or completion order.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .certificates import Certificate, register_replay
from .exact import PrecisionExhausted, gauss_pow, interval_atan2, interval_pi
from .linear_forms import continued_fraction
from .representations import (C_FLOOR, Factorization, FactorLimitExceeded, Representation,
                              cornacchia_all, factor)

TAU_LO = Fraction(2113, 10000)       # <= 1/2 - 1/(2 sqrt 3) = 0.21132...
SMALL_R = (3, 5, 7, 9)
LMN_NOTE = "external: three-parameter linear-form estimate covers n > n_cap"
DIGEST_MOD = 1 << 256


class ConfigError(ValueError):
    pass


@dataclass
class SweepConfig:
    c_min: int = C_FLOOR
    c_max: int = 10 ** 7
    n_cap: int = 55000               # angle check certified up to here
    r_max: Optional[int] = None      # exponent window; None means n_cap
    z_max: Optional[int] = None
    y_menu: Optional[list] = None    # None: every y = 2 (mod 4), y >= 6
    factor_effort: int = 200000
    precision_bits: int = 128
    width: int = 1
    shard_size: Optional[int] = None  # None: tuned to ~1 s on a warm-up shard
    output_dir: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.c_min < C_FLOOR:
            raise ConfigError(f"c_min must be >= {C_FLOOR}")
        if self.c_max < self.c_min:
            raise ConfigError("c_max must be >= c_min")
        if self.n_cap < 11:
            raise ConfigError("n_cap must be >= 11")
        r, z = self.window
        if r % 2 == 0 or z % 2 == 0 or z <= r or r < 3:
            raise ConfigError("window needs odd r_max >= 3 and odd z_max > r_max")
        if self.y_menu is not None:
            bad = [y for y in self.y_menu if y < 6 or y % 4 != 2]
            if bad:
                raise ConfigError(f"y menu entries must be = 2 (mod 4) and >= 6: {bad}")
        if self.width < 1:
            raise ConfigError("width must be positive")
        if self.shard_size is not None and self.shard_size < 1:
            raise ConfigError("shard_size must be positive")

    @property
    def window(self) -> tuple:
        top = self.n_cap if self.n_cap % 2 else self.n_cap - 1
        z = self.z_max if self.z_max is not None else top
        r = self.r_max if self.r_max is not None else z - 2
        return r, z

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            return cls(**d)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    @classmethod
    def load(cls, path) -> "SweepConfig":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        return asdict(self)

    def effective_width(self) -> int:
        env = os.environ.get("EXPDIO_WORKERS")
        if env:
            try:
                w = int(env)
            except ValueError as e:
                raise ConfigError("EXPDIO_WORKERS must be an integer") from e
            if w < 1:
                raise ConfigError("EXPDIO_WORKERS must be positive")
            return w
        return self.width


# ---------------------------------------------------------------------------
# per-c battery


def _dyadic_safe(t: int, n: int, Q: int, k: int) -> bool:
    """t * c^(tau n) > Q, using c >= 2^k and tau >= TAU_LO."""
    e = (k * TAU_LO * n).__floor__()
    return t << e > Q


def angle_exceptions(rep: Representation, n_cap: int, bits: int = 128) -> list:
    """Odd n in [11, n_cap] for which ||n x|| > c^(-tau n) is not certified.

    Any n with ||n x|| < 1/(2n) is t q_j for a convergent denominator q_j
    (Legendre), and then ||n x|| = t ||q_j x|| >= t / (q_j + q_{j+1}).
    Since c^(-tau n) < 1/(2n) for n >= 11 and c >= 85, every other n is safe.
    """
    c = rep.c
    k = c.bit_length() - 1
    assert _dyadic_safe(1, 11, 22, k), "Legendre range needs c^(tau 11) > 22"
    xf = lambda b: interval_atan2(rep.v, rep.u, b) * 2 / interval_pi(b)
    _, convs = continued_fraction(xf, n_cap, bits)
    qs = [q for _, q in convs]
    out = set()
    for j in range(len(qs) - 1):
        q, Q = qs[j], qs[j] + qs[j + 1]
        if q > n_cap:
            break
        t = max(1, -(-11 // q))
        while t * q <= n_cap and not _dyadic_safe(t, t * q, Q, k):
            if (t * q) % 2:
                out.add(t * q)
            t += 1
    return sorted(out)


def _powers(rep: Representation, ns) -> dict:
    """n -> (|Re eps^n|, |Im eps^n|) for the requested n."""
    out = {}
    for n in sorted(set(ns)):
        g = gauss_pow(rep.eps, n)
        out[n] = (abs(g.re), abs(g.im))
    return out


def candidate_pairs(exc_r: list, exc_z: list, r_max: int, z_max: int) -> list:
    """Exponent pairs (r, z) not eliminated by the angle check.

    If z >= 11 is not exceptional then a > c^(z/(2 sqrt 3)), so 2z < 2 sqrt3 r,
    i.e. z^2 < 3 r^2.  If r >= 11 is not exceptional then b > c^(r/(2 sqrt 3)),
    so y r < 2 sqrt3 z, and y >= 6 gives 3 r^2 < z^2.
    Both together are impossible, so one of r, z is small or exceptional.
    """
    ez, er = set(exc_z), set(exc_r)
    pairs = set()

    def z_ok(r, z):      # z allowed given a-side information
        return z <= 9 or z in ez or z * z < 3 * r * r

    def r_ok(r, z):      # r allowed given b-side information
        return r <= 9 or r in er or 3 * r * r < z * z

    rs = [r for r in SMALL_R if r <= r_max] + sorted(x for x in er if x <= r_max)
    for r in rs:
        zhi = min(z_max, max(9, math.isqrt(3 * r * r) + 1))
        for z in range(r + 2, zhi + 1, 2):
            if z_ok(r, z) and r_ok(r, z):
                pairs.add((r, z))
        for z in ez:
            if r < z <= z_max and r_ok(r, z):
                pairs.add((r, z))
    for z in ez:
        if z > z_max:
            continue
        for r in range(11, z, 2):
            if r <= r_max and 3 * r * r < z * z:
                pairs.add((r, z))
    return sorted(pairs)


def _y_from(b: int, Y: int, y_menu) -> Optional[int]:
    """y with b^(y/2) = Y, y = 2 (mod 4), y >= 6 (and in the menu)."""
    if b < 2 or Y < b:
        return None
    h, p = 1, b
    while p < Y:
        p *= b
        h += 1
    if p != Y:
        return None
    y = 2 * h
    if y < 6 or y % 4 != 2:
        return None
    if y_menu is not None and y not in y_menu:
        return None
    return y


@dataclass
class CRecord:
    c: int
    reps: list
    exceptions: list
    pairs: int
    survivors: list

    def key(self) -> str:
        return json.dumps([self.c, self.reps, self.exceptions, self.survivors], separators=(",", ":"))


def process_c(c: int, cfg: SweepConfig, fac: Optional[Factorization] = None) -> Optional[CRecord]:
    """Full battery for one c; None when c fails the residue filter or has
    no primitive representation."""
    if c % 8 != 5 or c < C_FLOOR:
        return None
    fac = fac or factor(c, cfg.factor_effort)
    if fac.is_prime_power():
        return None
    reps = cornacchia_all(c, fac)
    if not reps:
        return None
    r_max, z_max = cfg.window
    excs = [angle_exceptions(rep, cfg.n_cap, cfg.precision_bits) for rep in reps]
    survivors, n_pairs = [], 0
    for i, R in enumerate(reps):
        for j, R1 in enumerate(reps):
            pairs = candidate_pairs(excs[i], excs[j], r_max, z_max)
            n_pairs += len(pairs)
            if not pairs:
                continue
            pr = _powers(R, [r for r, _ in pairs])
            pz = _powers(R1, [z for _, z in pairs])
            for r, z in pairs:
                a, b = pr[r]
                a1, Y = pz[z]
                if a != a1:
                    continue
                y = _y_from(b, Y, cfg.y_menu)
                if y is not None:
                    survivors.append({"c": c, "r": r, "z": z, "y": y, "a": a, "b": b,
                                      "rep": [R.u, R.v], "rep1": [R1.u, R1.v]})
    return CRecord(c, [[R.u, R.v] for R in reps], excs, n_pairs, survivors)


# ---------------------------------------------------------------------------
# shards


def _odd_primes(limit: int) -> np.ndarray:
    s = np.ones(limit + 1, dtype=bool)
    s[:2] = False
    s[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if s[i]:
            s[i * i::2 * i] = False
    return np.nonzero(s)[0][1:]


def prefilter(lo: int, hi: int) -> np.ndarray:
    """c in [lo, hi) with c = 5 (mod 8) and no prime factor = 3 (mod 4)."""
    first = lo + (5 - lo) % 8
    if first >= hi:
        return np.zeros(0, dtype=np.int64)
    c = np.arange(first, hi, 8, dtype=np.int64)
    rem = c.copy()
    bad = np.zeros(len(c), dtype=bool)
    for p in _odd_primes(math.isqrt(hi - 1) + 1):
        p = int(p)
        hit = rem % p == 0
        if not hit.any():
            continue
        if p % 4 == 3:
            bad |= hit
            continue
        while hit.any():
            rem[hit] //= p
            hit = rem % p == 0
    bad |= rem % 4 == 3
    return c[~bad]


@dataclass
class ShardResult:
    lo: int
    hi: int
    admissible: int = 0
    reps: int = 0
    exceptions: int = 0
    pairs: int = 0
    survivors: list = field(default_factory=list)
    quarantined: list = field(default_factory=list)
    digest: int = 0

    @property
    def status(self) -> str:
        return "failed" if self.quarantined else "done"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["digest"] = format(self.digest, "064x")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ShardResult":
        d = dict(d)
        d["digest"] = int(d["digest"], 16)
        return cls(**d)


def _h(s: str) -> int:
    return int.from_bytes(hashlib.sha256(s.encode()).digest(), "big")


def run_shard(lo: int, hi: int, cfg: SweepConfig,
              hook: Optional[Callable[[int], None]] = None) -> ShardResult:
    res = ShardResult(lo, hi)
    for c in prefilter(lo, hi):
        c = int(c)
        try:
            if hook is not None:
                hook(c)
            rec = process_c(c, cfg)
        except (FactorLimitExceeded, PrecisionExhausted, ArithmeticError) as e:
            res.quarantined.append({"c": c, "error": f"{type(e).__name__}: {e}"})
            continue
        if rec is None:
            continue
        res.admissible += 1
        res.reps += len(rec.reps)
        res.exceptions += sum(len(e) for e in rec.exceptions)
        res.pairs += rec.pairs
        res.survivors.extend(rec.survivors)
        res.digest = (res.digest + _h(rec.key())) % DIGEST_MOD
    return res


def merge(a: "SweepReport", s: ShardResult) -> "SweepReport":
    """Commutative, associative fold of a shard into a report."""
    a.admissible += s.admissible
    a.reps += s.reps
    a.exceptions += s.exceptions
    a.pairs += s.pairs
    a.survivors = sorted(a.survivors + s.survivors, key=lambda x: (x["c"], x["r"], x["z"]))
    a.quarantined = sorted(a.quarantined + s.quarantined, key=lambda x: x["c"])
    a.digest = (a.digest + s.digest) % DIGEST_MOD
    a.shards_done += 1
    return a


@dataclass
class SweepReport:
    c_min: int
    c_max: int
    admissible: int = 0
    reps: int = 0
    exceptions: int = 0
    pairs: int = 0
    survivors: list = field(default_factory=list)
    quarantined: list = field(default_factory=list)
    digest: int = 0
    shards_total: int = 0
    shards_done: int = 0
    assumptions: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def status(self) -> str:
        if self.shards_done < self.shards_total or self.quarantined:
            return "incomplete"
        if self.survivors:
            return "survivors"
        return "verified"

    @property
    def digest_hex(self) -> str:
        return format(self.digest, "064x")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["digest"] = self.digest_hex
        d["status"] = self.status
        return d

    def summary(self) -> str:
        lines = [f"range [{self.c_min}, {self.c_max}): {self.status}",
                 f"  admissible c: {self.admissible}  representations: {self.reps}",
                 f"  angle exceptions: {self.exceptions}  exponent pairs checked: {self.pairs}",
                 f"  survivors: {len(self.survivors)}  quarantined: {len(self.quarantined)}",
                 f"  shards: {self.shards_done}/{self.shards_total}  digest: {self.digest_hex[:16]}"]
        for s in self.survivors:
            lines.append(f"  SURVIVOR {s}")
        for q in self.quarantined:
            lines.append(f"  QUARANTINED c={q['c']}: {q['error']}")
        for a in self.assumptions:
            lines.append(f"  assumption: {a}")
        return "\n".join(lines)


def make_shards(cfg: SweepConfig) -> list:
    size = cfg.shard_size or tune_shard_size(cfg)
    size = max(8, size - size % 8)
    return [(lo, min(lo + size, cfg.c_max)) for lo in range(cfg.c_min, cfg.c_max, size)]


def tune_shard_size(cfg: SweepConfig, target: float = 1.0, probe: int = 20000) -> int:
    """Shard length giving roughly ``target`` seconds, from a warm-up run."""
    lo = cfg.c_min
    hi = min(cfg.c_max, lo + probe)
    if hi <= lo:
        return probe
    t = time.perf_counter()
    run_shard(lo, hi, cfg)
    dt = max(time.perf_counter() - t, 1e-3)
    return int(min(10 ** 6, max(10 ** 4, (hi - lo) * target / dt)))


def shard_certificate(s: ShardResult, cfg: SweepConfig) -> Certificate:
    return Certificate(
        claim="sweep-shard", module="sweep",
        inputs={"lo": s.lo, "hi": s.hi},
        parameters={k: v for k, v in cfg.to_dict().items()
                    if k in ("n_cap", "r_max", "z_max", "y_menu", "factor_effort", "precision_bits")},
        verdict=f"{s.status};survivors={len(s.survivors)};digest={format(s.digest, '064x')}",
        assumptions=[LMN_NOTE],
        trace=[{"admissible": s.admissible, "reps": s.reps, "exceptions": s.exceptions,
                "pairs": s.pairs, "survivors": s.survivors, "quarantined": s.quarantined}],
    )


@register_replay("sweep-shard")
def _replay_shard(cert: Certificate) -> str:
    cfg = SweepConfig(c_min=max(C_FLOOR, cert.inputs["lo"]), c_max=cert.inputs["hi"], **cert.parameters)
    s = run_shard(cert.inputs["lo"], cert.inputs["hi"], cfg)
    return f"{s.status};survivors={len(s.survivors)};digest={format(s.digest, '064x')}"


def _write_json(path: Path, obj) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(obj, indent=1, sort_keys=True))
    tmp.replace(path)


def _run_one(args):
    lo, hi, cfg_d = args
    return run_shard(lo, hi, SweepConfig.from_dict(cfg_d)).to_dict()


def sweep(cfg: SweepConfig, resume: bool = False, max_shards: Optional[int] = None,
          progress: Optional[Callable[[SweepReport], None]] = None,
          hook: Optional[Callable[[int], None]] = None) -> SweepReport:
    """Run (or resume) a sweep.  ``max_shards`` stops early, leaving the
    state file ready for ``resume``.  ``hook`` is called per c (width 1 only)."""
    t0 = time.perf_counter()
    out = Path(cfg.output_dir) if cfg.output_dir else None
    state_path = out / "state.json" if out else None
    done: dict = {}
    if resume:
        if state_path is None or not state_path.exists():
            raise ConfigError("resume needs an output_dir with a state file")
        state = json.loads(state_path.read_text())
        if (state["config"]["c_min"], state["config"]["c_max"]) != (cfg.c_min, cfg.c_max):
            raise ConfigError("state file belongs to a different range")
        shards = [tuple(s) for s in state["shards"]]
        for d in state["results"]:
            done[(d["lo"], d["hi"])] = ShardResult.from_dict(d)
    else:
        shards = make_shards(cfg) if cfg.c_max > cfg.c_min else []
    if out:
        out.mkdir(parents=True, exist_ok=True)

    report = SweepReport(cfg.c_min, cfg.c_max, shards_total=len(shards), assumptions=[LMN_NOTE])
    for s in done.values():
        merge(report, s)
    todo = [s for s in shards if s not in done]
    if max_shards is not None:
        todo = todo[:max_shards]

    def record(res: ShardResult):
        done[(res.lo, res.hi)] = res
        merge(report, res)
        if state_path:
            _write_json(state_path, {"config": cfg.to_dict(), "shards": [list(s) for s in shards],
                                     "results": [r.to_dict() for _, r in sorted(done.items())]})
        if progress:
            progress(report)

    width = cfg.effective_width()
    if width == 1 or len(todo) <= 1:
        for lo, hi in todo:
            record(run_shard(lo, hi, cfg, hook))
    else:
        with ProcessPoolExecutor(max_workers=width) as ex:
            futs = [ex.submit(_run_one, (lo, hi, cfg.to_dict())) for lo, hi in todo]
            for f in as_completed(futs):
                record(ShardResult.from_dict(f.result()))

    report.elapsed = time.perf_counter() - t0
    if out:
        _write_json(out / "report.json", report.to_dict())
        certs = [shard_certificate(r, cfg).to_dict() for _, r in sorted(done.items())]
        _write_json(out / "certificates.json", certs)
    return report
