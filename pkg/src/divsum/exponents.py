"""Error-exponent formulas, error-term measurement, and slope fitting.

The remainder E(x) = S(x; c) - d_c x^(1/c) is bounded by x^(theta+eps)
with piecewise-rational theta.  Two competing exponents are implemented:

    theta_new(c)  = (2c+2)/(2c^2+5c+2)  for 0 < c < 2/3,  else 5/(5c+6)
    theta_feng(c) = 2/(3c+2)            for 0 < c < 2/11, else 11/(11c+12)

Both are exact fractions for rational c, so branch continuity, the
crossover at c = 2/9, and the strict improvement above it are all checked
with integer arithmetic.

error_term() measures E(x) with the sum oracle-checked (direct vs blocked
where affordable, two distinct blocked splits otherwise) and the main term
certified tightly enough that E is determined to less than one unit.
exponent_fit() runs an ordinary least-squares fit of log|E| against log x,
the empirical probe of theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import mpmath
from mpmath import mp

from .errors import ComputationError
from .floors import Exponent
from .mainterm import CertifiedValue, dc_constant, main_term
from .sums import optimal_N, sum_blocked, sum_direct, validate_split

NEW_BETTER = "new_better"
EQUAL = "equal"
FENG_BETTER = "feng_better"

# direct cross-check is run whenever the n-range is at most this long
DIRECT_CHECK_LIMIT = 1 << 27


def _theta_branches(c, low_cut: Fraction, low, high):
    """Dispatch on rational vs real c with branch functions low/high."""
    c = Exponent.coerce(c)
    if c.is_rational:
        cf = c.as_fraction()
        return low(cf) if cf < low_cut else high(cf)
    with mp.workprec(max(c.prec, 64)):
        cf = +mp.mpf(c.approx)
        cut = mp.mpf(low_cut.numerator) / low_cut.denominator
        return +(low(cf) if cf < cut else high(cf))


def theta_new(c):
    """Improved error exponent; exact Fraction for rational c."""
    return _theta_branches(
        c,
        Fraction(2, 3),
        lambda cf: (2 * cf + 2) / (2 * cf * cf + 5 * cf + 2),
        lambda cf: 5 / (5 * cf + 6),
    )


def theta_feng(c):
    """Comparison error exponent; exact Fraction for rational c."""
    return _theta_branches(
        c,
        Fraction(2, 11),
        lambda cf: 2 / (3 * cf + 2),
        lambda cf: 11 / (11 * cf + 12),
    )


def improvement_region_check(c) -> str:
    """Exact comparison of the two exponents at c."""
    tn, tf = theta_new(c), theta_feng(c)
    if tn < tf:
        return NEW_BETTER
    if tn == tf:
        return EQUAL
    return FENG_BETTER


@dataclass(frozen=True)
class ErrorSample:
    """One measured remainder E(x) = S(x; c) - d_c x^(1/c)."""

    x: int
    c: Exponent
    sum_value: int
    main_value: float
    main_bound: float
    error: float
    abs_error: float


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    samples_used: int
    floored: int  # samples with |E| < 1 pinned to 1 before the log


def error_term(
    x: int,
    c,
    target_error,
    *,
    prec: int = 128,
    jobs: int = 1,
    _dc: Optional[CertifiedValue] = None,
) -> ErrorSample:
    """E(x) with a certified main term; target_error bounds the main term.

    The certified bound must come out below 0.5 so the integer part of E
    is pinned down; otherwise a ComputationError asks for a smaller
    target_error.
    """
    x = int(x)
    if x < 1:
        raise ValueError("x must be a positive integer")
    c = Exponent.coerce(c)
    target = float(target_error)
    if not 0 < target < 0.5:
        raise ValueError("target_error must lie in (0, 0.5)")

    with mp.workprec(prec + 32):
        s = mp.mpf(c.q) / c.p if c.is_rational else 1 / mp.mpf(c.approx)
        xp = mp.power(x, s)
        dc_target = mp.mpf(target) / (2 * xp)
    dc = _dc if _dc is not None else dc_constant(c, dc_target, prec=prec)

    with mp.workprec(prec + 32):
        main = dc.value * xp
        bound = dc.error_bound * xp + (abs(main) + 1) * mp.mpf(2) ** (8 - prec)
    if not bound < 0.5:
        raise ComputationError(
            f"certified main-term bound {mpmath.nstr(bound, 4)} at x={x} is too "
            "large to determine E(x); lower target_error"
        )

    sval = _oracle_checked_sum(x, c, jobs=jobs)
    with mp.workprec(prec + 32):
        err = float(mp.mpf(sval) - main)
    return ErrorSample(
        x=x,
        c=c,
        sum_value=sval,
        main_value=float(main),
        main_bound=float(bound),
        error=err,
        abs_error=abs(err),
    )


def _oracle_checked_sum(x: int, c: Exponent, jobs: int = 1) -> int:
    """S(x; c) with an internal cross-check before it is trusted."""
    if x < 2:
        return sum_direct(x, c, jobs=jobs).value
    n1 = optimal_N(x, c)
    blocked = sum_blocked(x, c, n1, jobs=jobs)
    if blocked.n_limit <= DIRECT_CHECK_LIMIT:
        other = sum_direct(x, c, jobs=jobs)
    else:
        # direct is unaffordable: replay the blocked route at a different split
        n2 = max(1, n1 // 2) if n1 > 1 else 2
        try:
            validate_split(x, c, n2)
        except ValueError:
            n2 = 1
        other = sum_blocked(x, c, n2, jobs=jobs)
    if other.value != blocked.value:
        raise ComputationError(
            f"sum evaluators disagree at x={x}, c={c}: "
            f"{blocked.value} (blocked N={n1}) vs {other.value} ({other.method})"
        )
    return blocked.value


def scan(
    x_grid: Sequence[int],
    c,
    target_error,
    *,
    prec: int = 128,
    jobs: int = 1,
    progress=None,
) -> list[ErrorSample]:
    """error_term over a sorted grid; duplicates computed once, emitted twice."""
    xs = [int(x) for x in x_grid]
    if any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("x_grid must be sorted ascending")
    if not xs:
        return []
    c = Exponent.coerce(c)
    target = float(target_error)

    # one constant serves the whole grid: certify at the largest x
    with mp.workprec(prec + 32):
        s = mp.mpf(c.q) / c.p if c.is_rational else 1 / mp.mpf(c.approx)
        dc_target = mp.mpf(target) / (2 * mp.power(max(xs), s))
    dc = dc_constant(c, dc_target, prec=prec)

    cache: dict[int, ErrorSample] = {}
    out = []
    for x in xs:
        if x not in cache:
            cache[x] = error_term(x, c, target, prec=prec, jobs=jobs, _dc=dc)
            if progress is not None:
                progress(cache[x])
        out.append(cache[x])
    return out


def exponent_fit(samples: Sequence[ErrorSample]) -> FitResult:
    """Least-squares slope of log|E| vs log x (|E| floored at 1)."""
    if len(samples) < 5:
        raise ValueError("need at least 5 samples")
    xs = [s.x for s in samples]
    if max(xs) < 100 * min(xs):
        raise ValueError("samples must span at least two decades in x")
    floored = sum(1 for s in samples if s.abs_error < 1.0)
    lx = [math.log(s.x) for s in samples]
    ly = [math.log(max(s.abs_error, 1.0)) for s in samples]
    n = len(samples)
    mx = math.fsum(lx) / n
    my = math.fsum(ly) / n
    sxx = math.fsum((u - mx) ** 2 for u in lx)
    sxy = math.fsum((u - mx) * (v - my) for u, v in zip(lx, ly))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = math.fsum((v - (slope * u + intercept)) ** 2 for u, v in zip(lx, ly))
    ss_tot = math.fsum((v - my) ** 2 for v in ly)
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return FitResult(
        slope=slope,
        intercept=intercept,
        r_squared=r2,
        samples_used=n,
        floored=floored,
    )
