"""Sawtooth approximation by trigonometric polynomials, and the
divisor-twisted oscillating sums built from it.

The degree-H approximation of psi(t) = t - [t] - 1/2 is

    psi(x) ~ -sum_{1<=|h|<=H} Phi(h/(H+1)) e(hx) / (2 pi i h)
           = -sum_{h=1}^{H} Phi(h/(H+1)) sin(2 pi h x) / (pi h)

with taper Phi(t) = pi t (1-|t|) cot(pi t) + |t| (cot, not cos: the cos
variant violates 0 < Phi(t) < 1 near t = 0 and breaks the remainder
majorant below).  The remainder R_H(x) = psi(x) - approximation satisfies
the pointwise Fejer-kernel majorant

    |R_H(x)| <= (1/(2H+2)) sum_{|h|<=H} (1 - |h|/(H+1)) e(hx)
             = (1/(2H+2)) * (1/(H+1)) * (sin(pi (H+1) x) / sin(pi x))^2  >= 0.

On top of psi sit the dyadic-block sums used in the error analysis:

    psi_sum:          sum_{D<k<=2D} d(k) psi((x/(k+delta))^(1/c))
    exp_sum_divisor:  sum_{D<k<=2D} d(k) e(h (x/(k+delta))^(1/c))

Phases are evaluated at >= 128-bit precision (exactly, via modular
arithmetic, when 1/c is a positive integer) and rounded once; sums are
accumulated with exactly-rounded fsum so results do not depend on
chunking or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import mpmath
import numpy as np
from mpmath import mp

from .divisors import divisor_sieve, iter_divisor_segments
from .floors import Exponent

PHASE_PREC = 128  # default bits for phase fractional parts
_TWO_PI = 2.0 * math.pi


def vaaler_phi(t: float) -> float:
    """Taper Phi(t) = pi t (1-|t|) cot(pi t) + |t| on (-1, 1); Phi(0) = 1."""
    t = float(t)
    z = abs(t)
    if z >= 1.0:
        raise ValueError("vaaler_phi requires |t| < 1")
    if z < 2.0**-10:
        # pi z cot(pi z) = 1 - (pi z)^2/3 - (pi z)^4/45 - 2 (pi z)^6/945 - ...
        w = (math.pi * z) ** 2
        zcot = 1.0 - w / 3.0 - w * w / 45.0 - 2.0 * w**3 / 945.0
    else:
        zcot = math.pi * z / math.tan(math.pi * z)
    return (1.0 - z) * zcot + z


@dataclass(frozen=True)
class TrigApprox:
    """Degree-H trigonometric approximation of psi with tapered coefficients."""

    H: int
    tapers: np.ndarray  # tapers[h-1] = Phi(h/(H+1)) for h = 1..H

    @classmethod
    def build(cls, H: int) -> "TrigApprox":
        H = int(H)
        if H < 1:
            raise ValueError("H must be >= 1")
        tapers = np.array([vaaler_phi(h / (H + 1)) for h in range(1, H + 1)])
        return cls(H=H, tapers=tapers)

    def coefficient(self, h: int) -> complex:
        """Coefficient of e(hx): -Phi(h/(H+1)) / (2 pi i h), h in [-H,H]\\{0}."""
        if h == 0 or abs(h) > self.H:
            raise ValueError("h must satisfy 1 <= |h| <= H")
        return -self.tapers[abs(h) - 1] / (2j * math.pi * h)

    def evaluate(self, x: float) -> float:
        """The real trig-polynomial value at x."""
        h = np.arange(1, self.H + 1)
        return -float(np.sum(self.tapers * np.sin(_TWO_PI * h * float(x)) / (math.pi * h)))

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.float64)
        out = np.zeros_like(xs)
        for h in range(1, self.H + 1):
            out -= self.tapers[h - 1] / (math.pi * h) * np.sin(_TWO_PI * h * xs)
        return out


@lru_cache(maxsize=64)
def _trig(H: int) -> TrigApprox:
    return TrigApprox.build(H)


def vaaler_psi_approx(x: float, H: int) -> float:
    """Value of the degree-H approximation of psi at x."""
    return _trig(int(H)).evaluate(x)


def fejer_bound(x: float, H: int) -> float:
    """Pointwise majorant of |psi(x) - vaaler_psi_approx(x, H)|; >= 0."""
    H = int(H)
    if H < 1:
        raise ValueError("H must be >= 1")
    n = H + 1
    y = float(x) % 1.0
    if y == 0.0:
        return 0.5  # kernel peak: n^2/n scaled by 1/(2n)
    r = math.sin(math.pi * n * y) / math.sin(math.pi * y)
    return (r * r) / (2.0 * n * n)


def fejer_bound_array(xs: np.ndarray, H: int) -> np.ndarray:
    H = int(H)
    n = H + 1
    y = np.asarray(xs, dtype=np.float64) % 1.0
    s = np.sin(math.pi * y)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sin(math.pi * n * y) / s
    out = (r * r) / (2.0 * n * n)
    out[s == 0.0] = 0.5
    return out


class HRange(NamedTuple):
    """Admissible h-window for the dyadic exponential-sum estimate."""

    lower: float
    upper: float

    @property
    def is_empty(self) -> bool:
        return self.lower > self.upper


def h_range(D: int, x: int, c) -> HRange:
    """(max(1, D^(3/4+1/c)/x^(1/c)), D^(3/2+1/c)/x^(1/c))."""
    if D < 1 or x < 1:
        raise ValueError("D and x must be >= 1")
    s = float(1.0 / float(Exponent.coerce(c)))
    ls = s * (math.log(D) - math.log(x))
    lower = max(1.0, math.exp(0.75 * math.log(D) + ls))
    upper = math.exp(1.5 * math.log(D) + ls)
    return HRange(lower, upper)


@dataclass(frozen=True)
class ExpSumSpec:
    """One dyadic divisor-twisted exponential sum: D < k <= 2D, phase
    h * (x/(k+delta))^(1/c)."""

    D: int
    h: int
    x: int
    c: Exponent
    delta: int = 0

    def __post_init__(self):
        if self.D < 2:
            raise ValueError("D must be >= 2")
        if self.h < 1:
            raise ValueError("h must be >= 1")
        if self.x < 1:
            raise ValueError("x must be >= 1")
        if self.delta not in (0, 1):
            raise ValueError("delta must be 0 or 1")
        object.__setattr__(self, "c", Exponent.coerce(self.c))


def _phase_fracs(x: int, c: Exponent, D: int, delta: int, h: int, prec: int) -> np.ndarray:
    """frac(h * (x/(k+delta))^(1/c)) for D < k <= 2D, as float64.

    When c = 1/m the ratio is the rational h x^m / (k+delta)^m and the
    fractional part is exact modular arithmetic; otherwise each phase is
    reduced mod 1 at `prec` bits before rounding to float.
    """
    ks = np.arange(D + 1, 2 * D + 1, dtype=np.int64)
    if c.is_rational and c.p == 1:
        m = c.q
        num = h * x**m
        if num < 1 << 62 and (2 * D + 1) ** m < 1 << 62:
            den = (ks + delta) ** m
            return (num % den) / den.astype(np.float64)
        return np.array(
            [(num % (int(k) + delta) ** m) / float((int(k) + delta) ** m) for k in ks]
        )
    out = np.empty(len(ks), dtype=np.float64)
    with mp.workprec(prec):
        if c.is_rational:
            s = mp.mpf(c.q) / c.p
        else:
            s = 1 / +mp.mpf(c.approx)
        lx = mp.log(x)
        for i, k in enumerate(ks.tolist()):
            y = mp.exp(s * (lx - mp.log(k + delta)))
            out[i] = float(mp.frac(h * mp.frac(y)))
    return out


def psi_sum(x: int, c, D: int, delta: int, prec: int = PHASE_PREC) -> float:
    """sum_{D<k<=2D} d(k) psi((x/(k+delta))^(1/c)), phases at high precision."""
    x, D = int(x), int(D)
    if D < 1:
        raise ValueError("D must be >= 1")
    if 2 * D > x:
        raise ValueError("need 2D <= x for a meaningful k-range")
    if delta not in (0, 1):
        raise ValueError("delta must be 0 or 1")
    c = Exponent.coerce(c)
    fr = _phase_fracs(x, c, D, delta, h=1, prec=prec)
    terms = []
    off = 0
    for seg in iter_divisor_segments(D + 1, 2 * D):
        d = seg.values.astype(np.float64)
        terms.append(d * (fr[off : off + len(d)] - 0.5))
        off += len(d)
    return math.fsum(np.concatenate(terms).tolist())


def exp_sum_divisor(spec: ExpSumSpec, prec: int = PHASE_PREC) -> complex:
    """sum_{D<k<=2D} d(k) e(h (x/(k+delta))^(1/c)) as a complex number."""
    c = spec.c
    exact = c.is_rational and c.p == 1
    z = _exp_sum_at(spec, prec)
    # heavy cancellation amplifies phase error: redo with doubled precision
    if not exact and abs(z) < spec.D**0.25:
        z = _exp_sum_at(spec, 2 * prec)
    return z


def _exp_sum_at(spec: ExpSumSpec, prec: int) -> complex:
    fr = _phase_fracs(spec.x, spec.c, spec.D, spec.delta, spec.h, prec)
    re_parts = []
    im_parts = []
    off = 0
    for seg in iter_divisor_segments(spec.D + 1, 2 * spec.D):
        d = seg.values.astype(np.float64)
        ang = _TWO_PI * fr[off : off + len(d)]
        re_parts.append(d * np.cos(ang))
        im_parts.append(d * np.sin(ang))
        off += len(d)
    re = math.fsum(np.concatenate(re_parts).tolist())
    im = math.fsum(np.concatenate(im_parts).tolist())
    return complex(re, im)


def jutila_ratio(spec: ExpSumSpec, prec: int = PHASE_PREC) -> float:
    """|exp sum| / (D^(1/2-1/(3c)) h^(1/3) x^(1/(3c))): the empirical constant
    the dyadic estimate asserts is bounded up to x^epsilon."""
    s = float(1.0 / float(spec.c))
    denom = math.exp(
        (0.5 - s / 3.0) * math.log(spec.D)
        + math.log(spec.h) / 3.0
        + (s / 3.0) * math.log(spec.x)
    )
    return abs(exp_sum_divisor(spec, prec=prec)) / denom


def dyadic_divisor_total(D: int) -> int:
    """sum_{D<k<=2D} d(k), the trivial bound for the block sums."""
    return int(divisor_sieve(D + 1, 2 * D).values.sum())
