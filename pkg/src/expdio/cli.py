"""Command-line entry points.

Exit codes: 0 ok, 1 verification failed, 2 configuration error,
3 inconclusive.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_INCONCLUSIVE = 0, 1, 2, 3

DEFAULT_C = 4 * 10 ** 10 + 5


def _print(*a):
    print(*a, flush=True)


def cmd_decompose(args) -> int:
    from .representations import FactorLimitExceeded, decompose
    try:
        reps = decompose(args.c, args.effort)
    except FactorLimitExceeded as e:
        _print(f"factoring effort exceeded: {e}")
        return EXIT_INCONCLUSIVE
    _print(" / ".join(f"{r.u} {r.v}" for r in reps) if reps else "no primitive representation")
    return EXIT_OK


def cmd_witness(args) -> int:
    from .representations import Representation, witness_from
    try:
        rep = Representation(args.u * args.u + args.v * args.v, args.u, args.v)
        w = witness_from(rep, args.r)
    except ValueError as e:
        _print(f"error: {e}")
        return EXIT_CONFIG
    ok = w.check()
    _print(f"a={w.a} b={w.b} c={w.c} check={'OK' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILED


def _load_params(text: str):
    from .linear_forms import LaurentParams
    try:
        d = json.loads(text)
    except json.JSONDecodeError:
        with open(text) as fh:
            d = json.load(fh)
    return LaurentParams.from_dict(d)


def cmd_laurent(args) -> int:
    from .exact import interval_log, interval_pi
    from .linear_forms import LaurentParams, admissible_a, class_verdict
    c = args.c_min
    try:
        if args.rule:
            L, rho, mu, m, R1, S1 = args.rule.split(",")
            a1, a2 = admissible_a(Fraction(rho), c)
            params = LaurentParams.from_rule(int(L), Fraction(rho), Fraction(mu), Fraction(m),
                                             int(R1), int(S1), float(a1.hi), float(a2.hi))
        elif args.params:
            params = _load_params(args.params)
        else:
            _print("error: give --params or --rule")
            return EXIT_CONFIG
    except (ValueError, KeyError, OSError) as e:
        _print(f"error: {e}")
        return EXIT_CONFIG
    n_hi = args.n_hi if args.n_hi is not None else args.n_lo
    v = class_verdict(c, args.n_lo, n_hi, params, args.g_max)
    _print(v.certificate().to_json())
    if v.certified:
        _print(f"certified: theta <= {float(v.theta.hi):.6f} for b1 in [{args.n_lo}, {n_hi}]")
        return EXIT_OK
    _print(f"not certified: conditions {','.join(v.failed)} fail "
           f"(III: lhs {float(v.lhs.mid):.3f} vs c(N) {float(v.rhs.mid):.3f})")
    return EXIT_FAILED


def _profile(c: int, rebuild: bool, verify: bool):
    from .linear_forms import build_profile, load_profile
    if not rebuild:
        try:
            prof = load_profile(c)
            if verify:
                bad = prof.verify()
                if bad:
                    raise RuntimeError(f"stored profile fails re-certification at {bad[:3]}")
            return prof, "stored" + (" (re-certified)" if verify else "")
        except FileNotFoundError:
            pass
    return build_profile(c), "built"


def cmd_thresholds(args) -> int:
    from .bounds import PUBLISHED_ROWS
    from .linear_forms import ThresholdNotFound, exponent_threshold
    if args.source == "published":
        rows = [r for r in PUBLISHED_ROWS if r.table == "window" and r.y_floor <= args.y_floor
                and args.c_min >= r.c_min]
        if not rows:
            _print("no published row applies")
            return EXIT_INCONCLUSIVE
        row = max(rows, key=lambda r: r.y_floor)
        _print(f"r<={row.r_max} z<={row.z_max}")
        return EXIT_OK
    try:
        prof, how = _profile(args.c_min, args.rebuild, args.verify)
        r = exponent_threshold(prof, "r", args.y_floor)
        z = exponent_threshold(prof, "z", args.y_floor)
    except (ThresholdNotFound, RuntimeError) as e:
        _print(f"inconclusive: {e}")
        return EXIT_INCONCLUSIVE
    _print(f"r<={r.bound} z<={z.bound}")
    _print(f"# computed from a {how} certified profile at c={args.c_min}; "
           f"mu(r)={float(r.mu1):.4f}, mu1(z)={float(z.mu1):.4f}, mu2(z)={float(z.mu2):.4f}")
    return EXIT_OK


def cmd_bounds_table(args) -> int:
    from .bounds import PUBLISHED_ROWS, bounds_table, computed_rows, rederive_constants
    rows = list(PUBLISHED_ROWS)
    if args.computed:
        prof, _ = _profile(DEFAULT_C, False, False)
        rows = computed_rows(prof) + rows
    text, csv_text = bounds_table(rows)
    _print(csv_text if args.csv else text)
    if args.constants:
        checks = rederive_constants()
        for ch in checks:
            _print(ch.line())
        if not all(ch.ok for ch in checks):
            return EXIT_FAILED
    return EXIT_OK


def cmd_dls(args) -> int:
    from .curves import dls_certify
    try:
        cert = dls_certify(args.y, args.z, args.r)
    except ValueError as e:
        _print(f"error: {e}")
        return EXIT_CONFIG
    _print(cert.certificate().to_json())
    _print(f"verdict: {cert.verdict}")
    return EXIT_OK if cert.verdict == "irreducible+positive-genus" else EXIT_INCONCLUSIVE


def cmd_lucas_check(args) -> int:
    from .lucas import LucasPair, primitive_divisor_report
    try:
        pair = LucasPair.lehmer(args.u, args.v) if args.lehmer else LucasPair.lucas(args.u, args.v)
        rep = primitive_divisor_report(pair, args.r)
    except ValueError as e:
        _print(f"error: {e}")
        return EXIT_CONFIG
    _print(json.dumps(rep.to_dict(), indent=2))
    if rep.inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_sweep(args) -> int:
    from .sweep import ConfigError, SweepConfig, sweep
    try:
        cfg = SweepConfig.load(args.config)
        if args.output_dir:
            cfg.output_dir = args.output_dir
        report = sweep(cfg, resume=args.resume,
                       progress=(lambda r: print(f"  shard {r.shards_done}/{r.shards_total}",
                                                 file=sys.stderr)) if args.verbose else None)
    except ConfigError as e:
        _print(f"config error: {e}")
        return EXIT_CONFIG
    _print(report.summary())
    return {"verified": EXIT_OK, "survivors": EXIT_FAILED}.get(report.status, EXIT_INCONCLUSIVE)


def cmd_replay(args) -> int:
    from .certificates import Certificate, replay
    with open(args.file) as fh:
        data = json.load(fh)
    certs = data if isinstance(data, list) else [data]
    ok = True
    for d in certs:
        good = replay(Certificate.from_dict(d))
        ok &= good
        _print(f"{d['claim']}: {'replayed' if good else 'MISMATCH'}")
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="expdio", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("decompose", help="primitive representations c = u^2 + v^2")
    s.add_argument("c", type=int)
    s.add_argument("--effort", type=int, default=200000)
    s.set_defaults(fn=cmd_decompose)

    s = sub.add_parser("witness", help="(a, b) with a^2 + b^2 = (u^2+v^2)^r")
    s.add_argument("u", type=int)
    s.add_argument("v", type=int)
    s.add_argument("r", type=int)
    s.set_defaults(fn=cmd_witness)

    s = sub.add_parser("laurent", help="class-level two-logarithm verdict")
    s.add_argument("--c-min", type=int, default=DEFAULT_C)
    s.add_argument("--params", help="JSON object or file with K, L, R1, R2, S1, S2, rho, mu")
    s.add_argument("--rule", help="L,rho,mu,m,R1,S1: derive K, R2, S2 by the sizing rule")
    s.add_argument("--n-lo", type=int, default=771)
    s.add_argument("--n-hi", type=int)
    s.add_argument("--g-max", type=int, default=4)
    s.set_defaults(fn=cmd_laurent)

    s = sub.add_parser("thresholds", help="r and z bounds for a y floor")
    s.add_argument("--y-floor", type=int, required=True)
    s.add_argument("--c-min", type=int, default=DEFAULT_C)
    s.add_argument("--source", choices=("computed", "published"), default="computed")
    s.add_argument("--rebuild", action="store_true", help="recompute the profile from scratch")
    s.add_argument("--verify", action="store_true", help="re-certify a stored profile")
    s.set_defaults(fn=cmd_thresholds)

    s = sub.add_parser("bounds-table", help="threshold tables as text or CSV")
    s.add_argument("--csv", action="store_true")
    s.add_argument("--computed", action="store_true", help="prepend rows computed from the profile")
    s.add_argument("--constants", action="store_true", help="re-derive the printed constants")
    s.set_defaults(fn=cmd_bounds_table)

    s = sub.add_parser("dls", help="irreducibility/genus criterion for b^y - b^2 = c^z - c^r")
    s.add_argument("y", type=int)
    s.add_argument("z", type=int)
    s.add_argument("r", type=int)
    s.set_defaults(fn=cmd_dls)

    s = sub.add_parser("lucas-check", help="primitive divisor report for the r-th term")
    s.add_argument("u", type=int)
    s.add_argument("v", type=int)
    s.add_argument("r", type=int)
    s.add_argument("--lehmer", action="store_true")
    s.set_defaults(fn=cmd_lucas_check)

    s = sub.add_parser("sweep", help="desk-scale sweep over c")
    s.add_argument("--config", required=True)
    s.add_argument("--resume", action="store_true")
    s.add_argument("--output-dir")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(fn=cmd_sweep)

    s = sub.add_parser("replay", help="recompute the verdict of stored certificates")
    s.add_argument("file")
    s.set_defaults(fn=cmd_replay)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
