"""Exact evaluation of the divisor floor sum by two independent routes.

    S(x; c) = sum_{n <= [x^(1/c)]} d([x / n^c])

The two evaluators must agree exactly for every valid input, which makes
each the oracle for the other:

  * sum_direct  -- the defining n-loop.  Split at B = [x^(1/(c+1))]: for
    n <= B the arguments [x/n^c] are large and scattered (pointwise
    divisor counts); for n > B they drop below x^(1/(c+1)), so a single
    sieve table covers every lookup.

  * sum_blocked -- reindex by k = [x/n^c].  For k >= 1,
        k <= x/n^c < k+1  <=>  (x/(k+1))^(1/c) < n <= (x/k)^(1/c),
    so with a(k) = [(x/k)^(1/c)] clamped to the window (N, n_limit],
    each k contributes d(k) * (A(k) - A(k+1)).  k runs over
    [x / n_limit^c] .. [x / (N+1)^c] in ascending sieve segments.

Every floor is exact (see floors), so both values are exact integers and
partitioned/parallel evaluation is bitwise identical to sequential.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from .divisors import (
    DEFAULT_SEGMENT_LENGTH,
    divisor_count,
    divisor_count_batch,
    divisor_sieve,
    iter_divisor_segments,
)
from .floors import (
    Exponent,
    floor_inv_pow,
    floor_x_over_pow,
    introot,
    vec_floor_inv_pow,
    vec_floor_x_over_pow,
    vector_safe,
)

_CHUNK = DEFAULT_SEGMENT_LENGTH


@dataclass(frozen=True)
class SumResult:
    """Exact value of S(x; c) plus provenance and work accounting."""

    value: int
    method: str  # "direct" or "blocked"
    x: int
    c: Exponent
    n_limit: int
    split_N: Optional[int]
    work_units: int  # floor evaluations performed


def _check_x(x) -> int:
    x = int(x)
    if x < 1:
        raise ValueError("x must be a positive integer")
    return x


def n_limit_for(x: int, c) -> int:
    """[x^(1/c)], the length of the defining n-range."""
    return floor_inv_pow(_check_x(x), 1, Exponent.coerce(c))


def blocked_split_bound(x: int, c) -> int:
    """Largest admissible N, i.e. the largest integer < x^(1/(c+1))."""
    x = _check_x(x)
    c = Exponent.coerce(c)
    if c.is_rational:
        m = c.p + c.q
        u = introot(x**c.q, m)
        return u - 1 if u**m == x**c.q else u
    c1 = Exponent.real(c.approx + 1, c.prec)
    return floor_inv_pow(x, 1, c1)  # exact integer boundary would raise


def _map_sum(fn, tasks, jobs: int) -> int:
    if jobs <= 1 or len(tasks) <= 1:
        return sum(fn(t) for t in tasks)
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return sum(ex.map(fn, tasks))


def _divisor_sum_of(values) -> int:
    """sum of d(v) over scattered values (batch when int64-safe)."""
    if isinstance(values, np.ndarray):
        return int(divisor_count_batch(values).sum())
    vals = [int(v) for v in values]
    if not vals:
        return 0
    if max(vals) < 2**63:
        return int(divisor_count_batch(np.array(vals, dtype=np.int64)).sum())
    return sum(divisor_count(v) for v in vals)


def _chunk_ranges(lo: int, hi: int, chunk: int):
    a = lo
    out = []
    while a <= hi:
        b = min(a + chunk - 1, hi)
        out.append((a, b))
        a = b + 1
    return out


def sum_direct(x: int, c, *, jobs: int = 1) -> SumResult:
    """S(x; c) by the defining n-loop; every floor exact."""
    x = _check_x(x)
    c = Exponent.coerce(c)
    nl = floor_inv_pow(x, 1, c)

    if not c.is_rational:
        total = 0
        for n in range(1, nl + 1):
            total += divisor_count(floor_x_over_pow(x, n, c))
        return SumResult(total, "direct", x, c, nl, None, nl)

    p, q = c.p, c.q
    B = min(introot(x**q, p + q), nl)  # head/tail split at [x^(1/(c+1))]
    fast = vector_safe(x, q)

    def head_floors(a: int, b: int):
        if fast:
            return vec_floor_x_over_pow(x, np.arange(a, b + 1, dtype=np.int64), p, q)
        return [floor_x_over_pow(x, n, c) for n in range(a, b + 1)]

    total = 0
    for a, b in _chunk_ranges(1, B, _CHUNK):
        total += _divisor_sum_of(head_floors(a, b))

    if B < nl:
        # tail arguments are <= [x/(B+1)^c] < x^(1/(c+1)) <= B+1: one table
        table = divisor_sieve(1, floor_x_over_pow(x, B + 1, c)).values

        def tail_chunk(rng) -> int:
            a, b = rng
            ks = np.asarray(head_floors(a, b), dtype=np.int64)
            return int(table[ks - 1].sum())

        total += _map_sum(tail_chunk, _chunk_ranges(B + 1, nl, _CHUNK), jobs)

    return SumResult(total, "direct", x, c, nl, None, nl)


def validate_split(x: int, c, N) -> int:
    """Check the window precondition 1 <= N < x^(1/(c+1)); return N."""
    x = _check_x(x)
    c = Exponent.coerce(c)
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    if c.is_rational:
        ok = N ** (c.p + c.q) < x**c.q
    else:
        ok = N <= blocked_split_bound(x, c)
    if not ok:
        raise ValueError(f"N={N} is outside [1, x^(1/(c+1))) for x={x}, c={c}")
    return N


def sum_blocked(x: int, c, N, *, jobs: int = 1, segment: int = _CHUNK) -> SumResult:
    """S(x; c) via the k-reindexed block method; equals sum_direct exactly."""
    x = _check_x(x)
    c = Exponent.coerce(c)
    N = validate_split(x, c, N)
    nl = floor_inv_pow(x, 1, c)

    # S1: the short head, term by term
    if c.is_rational and vector_safe(x, c.q):
        head = vec_floor_x_over_pow(x, np.arange(1, N + 1, dtype=np.int64), c.p, c.q)
    else:
        head = [floor_x_over_pow(x, n, c) for n in range(1, N + 1)]
    s1 = _divisor_sum_of(head)
    work = N

    # S2: k-blocks over [x/n_limit^c] .. [x/(N+1)^c]
    k_lo = floor_x_over_pow(x, nl, c)
    k_hi = floor_x_over_pow(x, N + 1, c) if N + 1 <= nl else 0
    s2 = 0
    if k_hi >= k_lo:
        fast = c.is_rational and vector_safe(x, c.q)

        def a_values(a: int, b: int) -> np.ndarray:
            """Clamped a(k) = [(x/k)^(1/c)] for k in [a, b]."""
            if fast:
                vals = vec_floor_inv_pow(x, np.arange(a, b + 1, dtype=np.int64), c.p, c.q)
            else:
                vals = np.array(
                    [floor_inv_pow(x, k, c) for k in range(a, b + 1)], dtype=np.int64
                )
            return np.clip(vals, N, nl)

        def block(rng) -> int:
            a, b = rng
            av = a_values(a, b + 1)
            counts = av[:-1] - av[1:]
            d = divisor_sieve(a, b).values
            return int((d * counts).sum())

        ranges = _chunk_ranges(k_lo, k_hi, segment)
        s2 = _map_sum(block, ranges, jobs)
        work += (k_hi - k_lo + 1) + len(ranges)

    return SumResult(s1 + s2, "blocked", x, c, nl, N, work)


def optimal_N(x: int, c) -> int:
    """The analysis-optimal split N, clamped into [1, x^(1/(c+1)))."""
    x = _check_x(x)
    if x < 2:
        raise ValueError("optimal_N requires x >= 2")
    c = Exponent.coerce(c)
    if c.is_rational:
        cf = c.as_fraction()
        if cf < Fraction(2, 3):
            e = (2 * (1 + cf)) / (2 * cf * cf + 5 * cf + 2)
        else:
            e = Fraction(5, 1) / (5 * cf + 6)
        n = introot(x**e.numerator, e.denominator)
    else:
        cf = c.approx
        with mpmath.workprec(max(c.prec, 64)):
            if cf < mpmath.mpf(2) / 3:
                e = (2 * (1 + cf)) / (2 * cf * cf + 5 * cf + 2)
            else:
                e = 5 / (5 * cf + 6)
            n = int(mpmath.floor(mpmath.power(x, e)))
    return max(1, min(n, max(blocked_split_bound(x, c), 1)))
