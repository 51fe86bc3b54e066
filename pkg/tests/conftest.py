"""Shared brute-force oracles.

These stay deliberately naive and independent of the library's own
algorithms: divisors by enumeration, floors by integer inequalities walked
from zero, sums by the defining double loop.
"""

from fractions import Fraction

import pytest


def brute_divisor_count(n: int) -> int:
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def brute_floor_ratio_pow(x: int, n: int, p: int, q: int) -> int:
    """[x / n^(p/q)] by walking k upward through k^q n^p <= x^q."""
    k = 0
    while (k + 1) ** q * n**p <= x**q:
        k += 1
    return k


def brute_floor_inv_pow(x: int, k: int, p: int, q: int) -> int:
    """[(x/k)^(q/p)] by walking n upward through n^p k^q <= x^q."""
    n = 0
    while (n + 1) ** p * k**q <= x**q:
        n += 1
    return n


def brute_floor_sum(x: int, cf: Fraction) -> int:
    """S(x; c) straight from the definition, all integer arithmetic."""
    p, q = cf.numerator, cf.denominator
    total = 0
    n = 1
    while n**p <= x**q:  # n <= x^(1/c)
        total += brute_divisor_count(brute_floor_ratio_pow(x, n, p, q))
        n += 1
    return total


def exact_frac_pow(x: int, k: int, m: int, delta: int) -> Fraction:
    """Fractional part of x^m / (k+delta)^m as an exact rational."""
    r = Fraction(x**m, (k + delta) ** m)
    return r - (r.numerator // r.denominator)


@pytest.fixture(scope="session")
def rng():
    import numpy as np

    return np.random.default_rng(987654321)
