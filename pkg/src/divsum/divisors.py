"""Exact divisor-function arithmetic.

Three routes to d(n), kept independent so they can cross-check each other:

  * divisor_count(n)       -- pointwise trial division by cached primes
  * divisor_sieve(lo, hi)  -- segmented table over a window [lo, hi]
  * divisor_summatory(t)   -- D(t) = sum_{n<=t} d(n) via the hyperbola
                              identity D(t) = 2*sum_{n<=sqrt(t)} [t/n] - [sqrt(t)]^2

The sieve uses the sqrt-pairing form of the segmented method: divisors of n
come in pairs (q, n/q) with q <= sqrt(n), so it is enough to walk multiples
of every q <= sqrt(hi), adding 2 per hit with n >= q^2 and subtracting 1 at
the perfect square n = q^2.  Only O(sqrt(hi)) slice passes are needed per
segment, and disjoint segments are independent.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import ResourceLimitError

# Largest window a single sieve call will materialize (entries).
MAX_SEGMENT_LENGTH = 1 << 26
# Default chunk for callers that stream a long k-range segment by segment.
DEFAULT_SEGMENT_LENGTH = 1 << 22

_prime_lock = threading.Lock()
_prime_limit = 0
_primes = np.zeros(0, dtype=np.int64)


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit, from a cached Eratosthenes sieve (grow-only)."""
    global _prime_limit, _primes
    if limit <= _prime_limit:
        return _primes[: np.searchsorted(_primes, limit, side="right")]
    with _prime_lock:
        if limit > _prime_limit:
            top = max(limit, 2 * _prime_limit, 1 << 16)
            flags = np.ones(top + 1, dtype=bool)
            flags[:2] = False
            for p in range(2, math.isqrt(top) + 1):
                if flags[p]:
                    flags[p * p :: p] = False
            _primes = np.nonzero(flags)[0].astype(np.int64)
            _prime_limit = top
    return _primes[: np.searchsorted(_primes, limit, side="right")]


def divisor_count(n: int) -> int:
    """Number of positive divisors of n, by trial division."""
    n = int(n)
    if n < 1:
        raise ValueError("divisor_count requires n >= 1")
    if n == 1:
        return 1
    d = 1
    rem = n
    for p in primes_upto(math.isqrt(n)):
        p = int(p)
        if p * p > rem:
            break
        if rem % p == 0:
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            d *= e + 1
    if rem > 1:
        # no factor <= sqrt(original n) remains, so rem is prime
        d *= 2
    return d


def divisor_count_batch(values) -> np.ndarray:
    """Vectorized divisor_count for an int64 array of scattered values."""
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        return np.zeros(0, dtype=np.int64)
    if v.min() < 1:
        raise ValueError("divisor_count requires n >= 1")
    rem = v.copy()
    d = np.ones(v.size, dtype=np.int64)
    top = int(rem.max())
    for p in primes_upto(math.isqrt(top)):
        p = int(p)
        if p * p > top:
            break
        hits = np.nonzero(rem % p == 0)[0]
        if hits.size:
            for i in hits:
                e = 0
                r = int(rem[i])
                while r % p == 0:
                    r //= p
                    e += 1
                rem[i] = r
                d[i] *= e + 1
            top = int(rem.max())
    d[rem > 1] *= 2
    return d


@dataclass(frozen=True)
class DivisorTable:
    """d(n) over the contiguous window [lo, hi]; values[i] = d(lo + i)."""

    lo: int
    hi: int
    values: np.ndarray

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __getitem__(self, i):
        return int(self.values[i])


def divisor_sieve(lo: int, hi: int) -> DivisorTable:
    """Segmented divisor-count table for the window [lo, hi]."""
    lo, hi = int(lo), int(hi)
    if lo < 1:
        raise ValueError("divisor_sieve requires lo >= 1")
    if hi < lo:
        raise ValueError("divisor_sieve requires lo <= hi")
    length = hi - lo + 1
    if length > MAX_SEGMENT_LENGTH:
        raise ResourceLimitError(
            f"segment of {length} entries exceeds MAX_SEGMENT_LENGTH={MAX_SEGMENT_LENGTH}; "
            "sieve in chunks instead"
        )
    vals = np.zeros(length, dtype=np.int64)
    for q in range(1, math.isqrt(hi) + 1):
        qq = q * q
        start = max(qq, lo + (-lo) % q)
        if start <= hi:
            vals[start - lo :: q] += 2
        if lo <= qq <= hi:
            vals[qq - lo] -= 1
    return DivisorTable(lo=lo, hi=hi, values=vals)


def iter_divisor_segments(lo: int, hi: int, segment: int = DEFAULT_SEGMENT_LENGTH):
    """Yield DivisorTable chunks covering [lo, hi] in ascending order."""
    if segment < 1:
        raise ValueError("segment must be positive")
    a = int(lo)
    hi = int(hi)
    while a <= hi:
        b = min(a + segment - 1, hi)
        yield divisor_sieve(a, b)
        a = b + 1


# numpy path for D(t) is safe while the partial sums stay well inside int64
_SUMMATORY_VECTOR_MAX = 10**14


def divisor_summatory(t: int) -> int:
    """D(t) = sum_{n<=t} d(n), exactly, in O(sqrt(t)) operations."""
    t = int(t)
    if t < 1:
        raise ValueError("divisor_summatory requires t >= 1")
    r = math.isqrt(t)
    if 10**4 < t <= _SUMMATORY_VECTOR_MAX:
        n = np.arange(1, r + 1, dtype=np.int64)
        s = int(np.add.reduce(t // n))
    else:
        s = 0
        for n in range(1, r + 1):
            s += t // n
    return 2 * s - r * r
