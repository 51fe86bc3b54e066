"""Command-line front end.

Every command writes machine-readable rows (CSV by default, TSV or JSON on
request) to stdout or --output, and keeps progress, timings and schema
notes on stderr, so the data stream is byte-identical for identical
configuration regardless of thread count.

Exit codes: 0 success; 1 argument/precondition error; 2 computation error
(undecidable floor, unreachable precision target); 3 selftest failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from decimal import Decimal
from fractions import Fraction

import mpmath
import numpy as np
from mpmath import mp

from . import __version__
from .divisors import divisor_count, divisor_sieve, divisor_summatory
from .errors import ComputationError
from .exponents import (
    error_term,
    exponent_fit,
    improvement_region_check,
    scan,
    theta_feng,
    theta_new,
)
from .floors import Exponent, floor_inv_pow, floor_x_over_pow, psi_value
from .harmonic import ExpSumSpec, exp_sum_divisor, fejer_bound_array, h_range, _trig
from .mainterm import dc_constant, dc_partial, tail_bound
from .sums import optimal_N, sum_blocked, sum_direct

SCHEMA_VERSION = 1

ENV_THREADS = "DIVSUM_THREADS"
ENV_PRECISION = "DIVSUM_PRECISION"


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def parse_int(text: str) -> int:
    """Exact integer parsing, accepting 1_000_000 and 1e8 style input."""
    d = Decimal(str(text).strip().replace("_", ""))
    n = int(d)
    if n != d:
        raise ValueError(f"{text!r} is not an integer")
    return n


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 24)
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, int, float, str)):
        return v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, 24)
    return str(v)


def emit_rows(header, rows, fmt: str, stream) -> None:
    if fmt == "json":
        payload = [
            {k: _json_value(v) for k, v in zip(header, row)} for row in rows
        ]
        json.dump(payload, stream, indent=1)
        stream.write("\n")
        return
    writer = csv.writer(stream, delimiter="\t" if fmt == "tsv" else ",", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _load_config(path: str) -> dict:
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            k, v = line.split("=", 1)
            cfg[k.strip()] = v.strip()
    return cfg


def _resolve_exponent(args) -> Exponent:
    if getattr(args, "real_c", None) is not None:
        return Exponent.real(args.real_c, prec=args.c_bits)
    return Exponent.parse(args.c)


def _resolve_settings(args) -> None:
    """flags > config file > environment > defaults"""
    cfg = _load_config(args.config) if args.config else {}
    if args.threads is None:
        raw = cfg.get("threads", os.environ.get(ENV_THREADS, "1"))
        args.threads = max(1, int(raw))
    if args.precision is None:
        raw = cfg.get("precision", os.environ.get(ENV_PRECISION, "128"))
        args.precision = max(64, int(raw))
    if args.format is None:
        args.format = cfg.get("format", "csv")
    if args.format not in ("csv", "tsv", "json"):
        raise ValueError(f"unknown output format {args.format!r}")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_sum(args, out) -> int:
    c = _resolve_exponent(args)
    x = parse_int(args.x)
    t0 = time.perf_counter()
    direct = sum_direct(x, c, jobs=args.threads)
    t1 = time.perf_counter()
    n = parse_int(args.N) if args.N is not None else optimal_N(x, c)
    blocked = sum_blocked(x, c, n, jobs=args.threads)
    t2 = time.perf_counter()
    _diag(f"# timings: direct {t1 - t0:.3f}s, blocked {t2 - t1:.3f}s")
    header = [
        "x", "c", "n_limit", "N", "value_direct", "value_blocked",
        "agree", "work_direct", "work_blocked",
    ]
    rows = [[
        x, str(c), direct.n_limit, n, direct.value, blocked.value,
        direct.value == blocked.value, direct.work_units, blocked.work_units,
    ]]
    emit_rows(header, rows, args.format, out)
    return 0 if direct.value == blocked.value else 2


def cmd_theta(args, out) -> int:
    cs = [Exponent.parse(tok) for tok in args.c_grid.split(",")] if args.c_grid else [
        Exponent.parse(args.c)
    ]
    header = ["c", "theta_new", "theta_feng", "verdict", "theta_new_decimal", "theta_feng_decimal"]
    rows = []
    for c in cs:
        tn, tf = theta_new(c), theta_feng(c)
        rows.append([str(c), tn, tf, improvement_region_check(c), float(tn), float(tf)])
    emit_rows(header, rows, args.format, out)
    return 0


def cmd_dc(args, out) -> int:
    c = _resolve_exponent(args)
    cv = dc_constant(c, float(args.target_error), prec=args.precision)
    header = ["c", "K", "value", "bound"]
    rows = [[str(c), cv.truncation_K, cv.value, cv.error_bound]]
    emit_rows(header, rows, args.format, out)
    return 0


def _scan_grid(args) -> list[int]:
    if args.x_grid:
        xs = sorted(parse_int(tok) for tok in args.x_grid.split(","))
        return xs
    lo, hi, pts = parse_int(args.x_min), parse_int(args.x_max), int(args.points)
    if pts < 2 or hi <= lo:
        raise ValueError("need x_max > x_min and at least 2 points")
    xs = sorted(
        {int(round(math.exp(math.log(lo) + (math.log(hi) - math.log(lo)) * i / (pts - 1))))
         for i in range(pts)}
    )
    return xs


def cmd_error_scan(args, out) -> int:
    c = _resolve_exponent(args)
    xs = _scan_grid(args)

    def progress(sample):
        _diag(f"# x={sample.x} E={sample.error:.6g}")

    samples = scan(xs, c, float(args.target_error), prec=args.precision,
                   jobs=args.threads, progress=progress)
    header = ["x", "S", "main", "bound", "E"]
    rows = [[s.x, s.sum_value, s.main_value, s.main_bound, s.error] for s in samples]
    emit_rows(header, rows, args.format, out)
    if len(samples) >= 5 and max(xs) >= 100 * min(xs):
        fit = exponent_fit(samples)
        _diag(
            f"# fit: slope={fit.slope:.6f} r2={fit.r_squared:.4f} "
            f"(compare theta_new={float(theta_new(c)):.4f}, theta_feng={float(theta_feng(c)):.4f})"
        )
    return 0


def cmd_expsum(args, out) -> int:
    c = _resolve_exponent(args)
    x = parse_int(args.x)
    ds = [parse_int(tok) for tok in args.D_grid.split(",")]
    header = ["D", "h", "abs_sum", "denominator", "ratio", "in_range"]
    rows = []
    for d in ds:
        hr = h_range(d, x, c)
        if args.h_grid:
            hs = [parse_int(tok) for tok in args.h_grid.split(",")]
        elif hr.is_empty:
            hs = list(range(1, args.per_D + 1))
        else:
            lo = int(math.ceil(hr.lower))
            hi = max(lo, int(math.floor(hr.upper)))
            hs = sorted({min(hi, lo + round(i * (hi - lo) / max(1, args.per_D - 1)))
                         for i in range(args.per_D)})
        for h in hs:
            spec = ExpSumSpec(D=d, h=h, x=x, c=c, delta=args.delta)
            mag = abs(exp_sum_divisor(spec, prec=args.precision))
            s = 1.0 / float(c)
            denom = math.exp((0.5 - s / 3.0) * math.log(d) + math.log(h) / 3.0
                             + (s / 3.0) * math.log(x))
            rows.append([d, h, mag, denom, mag / denom,
                         (not hr.is_empty) and hr.lower <= h <= hr.upper])
        _diag(f"# D={d} window=[{hr.lower:.4g}, {hr.upper:.4g}] empty={hr.is_empty}")
    emit_rows(header, rows, args.format, out)
    return 0


def cmd_psi_check(args, out) -> int:
    hs = [int(tok) for tok in args.H_grid.split(",")]
    rng = np.random.default_rng(int(args.seed))
    xs = rng.random(int(args.samples))
    header = ["H", "max_observed_error", "max_bound", "pass"]
    rows = []
    ok_all = True
    for H in hs:
        approx = _trig(H).evaluate_array(xs)
        ps = xs - np.floor(xs) - 0.5
        bounds = fejer_bound_array(xs, H)
        err = np.abs(ps - approx)
        ok = bool((err <= bounds + 1e-12).all())
        ok_all &= ok
        rows.append([H, float(err.max()), float(bounds.max()), ok])
    emit_rows(header, rows, args.format, out)
    return 0 if ok_all else 2


def _selftest_suites(threads: int):
    def divisor_small():
        for n in range(1, 513):
            brute = sum(1 for d in range(1, n + 1) if n % d == 0)
            assert divisor_count(n) == brute
        tab = divisor_sieve(1, 512)
        assert [tab[i] for i in range(512)] == [divisor_count(n) for n in range(1, 513)]

    def divisor_window():
        tab = divisor_sieve(999991, 10**6)
        assert [tab[i] for i in range(10)] == [divisor_count(999991 + i) for i in range(10)]

    def summatory():
        run = 0
        for t in range(1, 257):
            run += divisor_count(t)
            assert divisor_summatory(t) == run
        t = 10**4
        r = math.isqrt(t)
        assert divisor_summatory(t) == 2 * sum(t // n for n in range(1, r + 1)) - r * r

    def floors_adjunction():
        rng = np.random.default_rng(7)
        for (p, q) in [(1, 2), (2, 3), (1, 1), (3, 2), (2, 1)]:
            c = Exponent.rational(p, q)
            for _ in range(400):
                x = int(rng.integers(1, 10**5))
                n = int(rng.integers(1, 60))
                k = int(rng.integers(1, 60))
                assert (floor_x_over_pow(x, n, c) >= k) == (floor_inv_pow(x, k, c) >= n)

    def sums_equivalence():
        for cf in ("1/2", "2/3", "1", "3/2", "2"):
            c = Exponent.parse(cf)
            for x in range(1, 121):
                sd = sum_direct(x, c).value
                cands = {1, 2}
                if x >= 2:
                    cands.add(optimal_N(x, c))
                for n in sorted(cands):
                    try:
                        sb = sum_blocked(x, c, n).value
                    except ValueError:
                        continue
                    assert sb == sd, (cf, x, n)
        a = sum_blocked(10**5, 1, optimal_N(10**5, 1), jobs=1).value
        b = sum_blocked(10**5, 1, optimal_N(10**5, 1), jobs=threads, segment=1 << 12).value
        assert a == b == sum_direct(10**5, 1, jobs=threads).value

    def vaaler_majorant():
        rng = np.random.default_rng(20240801)
        xs = rng.random(2000)
        for H in (4, 16, 64):
            approx = _trig(H).evaluate_array(xs)
            ps = xs - np.floor(xs) - 0.5
            assert (np.abs(ps - approx) <= fejer_bound_array(xs, H) + 1e-12).all()

    def mainterm_quick():
        assert dc_partial(1, 3) == 1
        cv = dc_constant(1, 1e-6)
        p5 = dc_partial(1, 10**5)
        assert p5 <= cv.value + cv.error_bound + 1e-9
        assert cv.value - cv.error_bound <= p5 + tail_bound(1, 10**5) + 1e-9

    def theta_identities():
        assert theta_new(1) == Fraction(5, 11)
        assert theta_new(Fraction(2, 3)) == Fraction(15, 28)
        assert theta_feng(Fraction(2, 11)) == Fraction(11, 14)
        assert theta_new(Fraction(2, 9)) == theta_feng(Fraction(2, 9)) == Fraction(99, 130)
        assert improvement_region_check(1) == "new_better"

    def psi_basics():
        assert psi_value(0.5) == 0.0
        assert psi_value(1.0) == -0.5
        assert psi_value(2.75) == 0.25

    return [
        ("divisor-small", divisor_small),
        ("divisor-window", divisor_window),
        ("summatory-hyperbola", summatory),
        ("floors-adjunction", floors_adjunction),
        ("sums-equivalence", sums_equivalence),
        ("vaaler-majorant", vaaler_majorant),
        ("mainterm-certified", mainterm_quick),
        ("theta-identities", theta_identities),
        ("psi-values", psi_basics),
    ]


def cmd_selftest(args, out) -> int:
    failures = 0
    for name, fn in _selftest_suites(args.threads):
        try:
            fn()
        except Exception as exc:  # report, keep going
            failures += 1
            print(f"FAIL {name}: {exc}", file=out)
        else:
            print(f"ok {name}", file=out)
    print(f"selftest: {'pass' if failures == 0 else 'fail'}", file=out)
    return 0 if failures == 0 else 3


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_c_flags(p, default=None):
    p.add_argument("--c", default=default,
                   help="exponent c as 'p/q' or a finite decimal (kept exact)")
    p.add_argument("--real-c", default=None, metavar="VALUE",
                   help="interval mode: treat c as a real known to --c-bits bits")
    p.add_argument("--c-bits", type=int, default=256)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="divsum",
        description="Exact divisor floor sums, certified main terms, and "
                    "sawtooth/exponential-sum diagnostics.",
    )
    ap.add_argument("--version", action="version", version=f"divsum {__version__}")
    ap.add_argument("--format", choices=("csv", "tsv", "json"), default=None,
                    help="data-stream format (default csv)")
    ap.add_argument("--output", default=None, help="write data rows to this file")
    ap.add_argument("--threads", type=int, default=None,
                    help=f"worker threads (env {ENV_THREADS}; results are identical)")
    ap.add_argument("--precision", type=int, default=None,
                    help=f"working precision in bits (env {ENV_PRECISION}, default 128)")
    ap.add_argument("--config", default=None, help="key=value settings file")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sum", help="evaluate the floor sum by both routes")
    _add_c_flags(p, default="1")
    p.add_argument("--x", required=True)
    p.add_argument("--N", default=None, help="blocked split (default: optimal)")
    p.set_defaults(func=cmd_sum)

    p = sub.add_parser("theta", help="error-exponent table")
    _add_c_flags(p, default="1")
    p.add_argument("--c-grid", default=None, help="comma-separated c values")
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("dc", help="certified main-term constant")
    _add_c_flags(p, default="1")
    p.add_argument("--target-error", default="1e-6")
    p.set_defaults(func=cmd_dc)

    p = sub.add_parser("error-scan", help="E(x) over a grid of x")
    _add_c_flags(p, default="1")
    p.add_argument("--x-grid", default=None, help="comma-separated x values")
    p.add_argument("--x-min", default="10000")
    p.add_argument("--x-max", default="1000000")
    p.add_argument("--points", default="7")
    p.add_argument("--target-error", default="0.25",
                   help="certified main-term bound target (must be < 0.5)")
    p.set_defaults(func=cmd_error_scan)

    p = sub.add_parser("expsum", help="dyadic exponential sums and bound ratios")
    _add_c_flags(p, default="1")
    p.add_argument("--x", required=True)
    p.add_argument("--D-grid", required=True, help="comma-separated dyadic bases")
    p.add_argument("--h-grid", default=None, help="explicit h values (default: in-range)")
    p.add_argument("--per-D", type=int, default=5, help="h samples per D when automatic")
    p.add_argument("--delta", type=int, default=0, choices=(0, 1))
    p.set_defaults(func=cmd_expsum)

    p = sub.add_parser("psi-check", help="sawtooth approximation majorant check")
    p.add_argument("--H-grid", default="4,16,64,256")
    p.add_argument("--samples", default="10000")
    p.add_argument("--seed", default="20240801")
    p.set_defaults(func=cmd_psi_check)

    p = sub.add_parser("selftest", help="run the built-in oracle suites")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        _resolve_settings(args)
        _diag(f"# divsum {__version__} schema v{SCHEMA_VERSION} command={args.command}")
        mp.prec = max(args.precision, 128)
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                return args.func(args, fh)
        return args.func(args, sys.stdout)
    except (ValueError, OSError) as exc:
        _diag(f"error: {exc}")
        return 1
    except ComputationError as exc:
        _diag(f"computation error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
