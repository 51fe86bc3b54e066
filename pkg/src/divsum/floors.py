"""Provably correct floors of x/n^c and (x/k)^(1/c).

For a rational exponent c = p/q the floors are *defined* by integer
inequalities and never touch floating point:

    [x / n^c]       = max{ k >= 0 : k^q * n^p <= x^q }
    [(x/k)^(1/c)]   = max{ n >= 0 : n^p * k^q <= x^q }

Both reduce to an integer root:  max{ r : r^m <= a }  with a = x^q // n^p
(resp. x^q // k^q), since r^m <= a/b  <=>  r^m <= [a/b] for integer r^m.
introot() seeds the root with a float guess where safe and then verifies
r and r+1 with exact big-integer arithmetic, so every returned floor is
certified by the defining inequality.

For a real (irrational) exponent the value is bracketed with interval
arithmetic; the working precision doubles until the interval stops
straddling an integer or the cap is reached, in which case
UndecidableFloorError is raised rather than guessing a side.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

from .errors import UndecidableFloorError

REAL_DEFAULT_PREC = 256
REAL_PREC_DOUBLINGS = 4


class Exponent:
    """Positive exponent c: an exact rational p/q, or a flagged real.

    A real exponent carries a high-precision point value plus its precision
    in bits; downstream interval arithmetic treats it as an interval of
    width 2^(1-prec) around that value.
    """

    __slots__ = ("kind", "p", "q", "approx", "prec")

    def __init__(self, kind, p=None, q=None, approx=None, prec=None):
        self.kind = kind
        self.p = p
        self.q = q
        self.approx = approx
        self.prec = prec

    @classmethod
    def rational(cls, p: int, q: int = 1) -> "Exponent":
        if q == 0:
            raise ValueError("zero denominator")
        f = Fraction(p, q)
        if f <= 0:
            raise ValueError("exponent c must be positive")
        return cls("rational", p=f.numerator, q=f.denominator)

    @classmethod
    def real(cls, value, prec: int = REAL_DEFAULT_PREC) -> "Exponent":
        if prec < 8:
            raise ValueError("precision must be at least 8 bits")
        with mpmath.workprec(prec):
            approx = mpmath.mpf(value)
        if approx <= 0:
            raise ValueError("exponent c must be positive")
        return cls("real", approx=approx, prec=prec)

    @classmethod
    def parse(cls, text: str) -> "Exponent":
        """Parse "p/q" or a finite decimal string into an exact rational."""
        return cls.rational(Fraction(text.strip()))

    @classmethod
    def coerce(cls, c) -> "Exponent":
        if isinstance(c, Exponent):
            return c
        if isinstance(c, bool):
            raise TypeError("exponent cannot be a bool")
        if isinstance(c, int):
            return cls.rational(c)
        if isinstance(c, Fraction):
            return cls.rational(c.numerator, c.denominator)
        if isinstance(c, str):
            return cls.parse(c)
        raise TypeError(
            f"cannot coerce {type(c).__name__} to an Exponent; pass an int, "
            "Fraction or 'p/q' string to keep c exact, or use Exponent.real()"
        )

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("real exponent has no exact fraction")
        return Fraction(self.p, self.q)

    def inverse_fraction(self) -> Fraction:
        """1/c as an exact fraction (rational case only)."""
        if not self.is_rational:
            raise ValueError("real exponent has no exact fraction")
        return Fraction(self.q, self.p)

    def __float__(self) -> float:
        if self.is_rational:
            return self.p / self.q
        return float(self.approx)

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.p) if self.q == 1 else f"{self.p}/{self.q}"
        return f"real({mpmath.nstr(self.approx, 20)}@{self.prec}b)"

    __repr__ = __str__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Exponent):
            return NotImplemented
        if self.kind != other.kind:
            return False
        if self.is_rational:
            return self.p == other.p and self.q == other.q
        return self.approx == other.approx and self.prec == other.prec

    def __hash__(self) -> int:
        if self.is_rational:
            return hash((self.p, self.q))
        return hash((str(self.approx), self.prec))


def introot(a: int, m: int) -> int:
    """Largest r >= 0 with r^m <= a, for integers a >= 0, m >= 1."""
    if m < 1:
        raise ValueError("root order must be >= 1")
    if a < 0:
        raise ValueError("introot requires a >= 0")
    if m == 1 or a < 2:
        return a
    if m == 2:
        return math.isqrt(a)
    if a.bit_length() >= m:  # else a^(1/m) < 2, i.e. r = 1
        if a.bit_length() <= min(50 * m, 960):
            # root fits well inside a float mantissa: guess is off by <= ~2
            r = int(a ** (1.0 / m))
        else:
            # Newton iteration from a power-of-two upper bound
            r = 1 << ((a.bit_length() - 1) // m + 1)
            while True:
                y = ((m - 1) * r + a // r ** (m - 1)) // m
                if y >= r:
                    break
                r = y
    else:
        r = 1
    # exact verification of the defining inequality
    while r > 0 and r**m > a:
        r -= 1
    while (r + 1) ** m <= a:
        r += 1
    return r


def floor_x_over_pow(x: int, n: int, c) -> int:
    """Exact [x / n^c] for integers x, n >= 1."""
    x, n = int(x), int(n)
    if x < 1 or n < 1:
        raise ValueError("floor_x_over_pow requires x >= 1 and n >= 1")
    c = Exponent.coerce(c)
    if c.is_rational:
        if n == 1:
            return x
        if c.q == 1:
            return x // n**c.p
        return introot(x**c.q // n**c.p, c.q)
    return _floor_real(x, n, c, inverse=False)


def floor_inv_pow(x: int, k: int, c) -> int:
    """Exact [(x/k)^(1/c)] for integers x, k >= 1."""
    x, k = int(x), int(k)
    if x < 1 or k < 1:
        raise ValueError("floor_inv_pow requires x >= 1 and k >= 1")
    c = Exponent.coerce(c)
    if c.is_rational:
        if c.p == 1:
            return x**c.q // k**c.q
        return introot(x**c.q // k**c.q, c.p)
    return _floor_real(x, k, c, inverse=True)


def psi_value(t: float) -> float:
    """Sawtooth psi(t) = t - [t] - 1/2, in [-1/2, 1/2)."""
    t = float(t)
    if not math.isfinite(t):
        raise ValueError("psi_value requires a finite argument")
    return t - math.floor(t) - 0.5


def _floor_real(x: int, base: int, c: Exponent, inverse: bool) -> int:
    """Interval-certified floor for a real exponent.

    inverse=False computes [x / base^c]; inverse=True computes
    [(x/base)^(1/c)].  Doubles the working precision until the enclosing
    interval avoids integer boundaries, then floors.
    """
    if base == 1 and not inverse:
        return x
    half_width = mpmath.mpf(2) ** (1 - c.prec)
    prec = max(c.prec, 64)
    for _ in range(REAL_PREC_DOUBLINGS + 1):
        ctx = mpmath.ctx_iv.MPIntervalContext()
        ctx.prec = prec
        ci = ctx.mpf([c.approx - half_width, c.approx + half_width])
        if inverse:
            v = ctx.exp((ctx.log(x) - ctx.log(base)) / ci)
        else:
            v = ctx.exp(ctx.log(x) - ci * ctx.log(base))
        lo = int(mpmath.floor(v.a))
        hi = int(mpmath.floor(v.b))
        if lo == hi:
            return lo
        prec *= 2
    raise UndecidableFloorError(
        f"floor of {'(x/k)^(1/c)' if inverse else 'x/n^c'} with x={x}, "
        f"base={base}, c={c} is indistinguishable from an integer at "
        f"{prec // 2} bits"
    )


# ---------------------------------------------------------------------------
# int64 vector kernels (used by the sum evaluators)
#
# Callers must ensure x**q <= 2**60 so that every verification product
# (r + 1)^m stays below 2^63.  Results are bitwise identical to the scalar
# routes above; tests assert this on random inputs.
# ---------------------------------------------------------------------------

VECTOR_SAFE_LIMIT = 1 << 60


def vector_safe(x: int, q: int) -> bool:
    return x**q <= VECTOR_SAFE_LIMIT


def _fix_root(r: np.ndarray, t: np.ndarray, m: int) -> np.ndarray:
    """Exact in-place correction of a near-root guess r for r^m <= t."""
    while True:
        over = r**m > t
        if not over.any():
            break
        r[over] -= 1
    while True:
        under = (r + 1) ** m <= t
        if not under.any():
            break
        r[under] += 1
    return r


def vec_floor_x_over_pow(x: int, n: np.ndarray, p: int, q: int) -> np.ndarray:
    """[x / n^c] elementwise for c = p/q, n an int64 array."""
    t = x**q // n**p
    if q == 1:
        return t
    r = np.power(t.astype(np.float64), 1.0 / q).astype(np.int64)
    np.maximum(r, 0, out=r)
    return _fix_root(r, t, q)


def vec_floor_inv_pow(x: int, k: np.ndarray, p: int, q: int) -> np.ndarray:
    """[(x/k)^(1/c)] elementwise for c = p/q, k an int64 array."""
    t = x**q // k**q
    if p == 1:
        return t
    r = np.power(t.astype(np.float64), 1.0 / p).astype(np.int64)
    np.maximum(r, 0, out=r)
    return _fix_root(r, t, p)
