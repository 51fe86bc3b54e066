"""Certified evaluation of the main-term constant and the main term.

The constant is

    d_c = sum_{k>=1} d(k) * g(k),   g(t) = t^(-s) - (t+1)^(-s),  s = 1/c > 0.

All terms are positive, so partial sums increase monotonically to d_c.
Truncating at K leaves the tail T(K) = sum_{k>K} d(k) g(k).  Discrete Abel
summation turns it into an integral against the summatory function D
(which is constant on [k, k+1)):

    T(K) = -D(K) g(L) + integral_L^inf D(t) (-g'(t)) dt,        L = K+1.

Substituting D(t) = t log t + (2g0 - 1) t + Delta(t) with g0 = Euler's
constant, and integrating the smooth part back by parts:

    T(K) = g(L) * (L log L + (2g0 - 1) L - D(K))  +  I1(L)  +  E(L)

    I1(L)  = integral_L^inf (log t + 2g0) g(t) dt
    |E(L)| <= C_D * J(L),
    J(L)   = sqrt(L) g(L) + 1/2 * integral_L^inf t^(-1/2) g(t) dt

where |Delta(t)| <= C_D sqrt(t) for t >= 1.  I1 and the half-power integral
are evaluated by the binomial expansion g(t) = sum_{j>=1} a_j t^(-s-j) with
a Lagrange remainder |rho_m(t)| <= b_m t^(-s-m) (valid for every t >= 1),
leaving only integral_L^inf t^(-beta) dt and integral_L^inf t^(-beta) log t dt
in closed form.  D(K) is exact (hyperbola identity), so the only
inequalities in the reported bound are the Delta envelope, the two series
remainders, and a rounding allowance.

A certified value therefore reports

    value = dc_partial(c, K) + g(L)(L log L + (2g0-1)L - D(K)) + I1_mid(L)
    bound = C_D * J_hi(L) + I1_rem(L) + rounding allowance

and d_c is guaranteed to lie in [value - bound, value + bound].
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import mpmath
from mpmath import mp
from mpmath.libmp import from_int, from_rational, fone, fzero, mpf_add, mpf_mul_int, mpf_pow, mpf_sub

from .divisors import divisor_summatory, iter_divisor_segments
from .errors import ResourceLimitError
from .floors import Exponent

# Envelope constant for |D(t) - t log t - (2*gamma - 1) t| <= C_D * sqrt(t).
# The empirical maximum of the ratio is 0.96069... at t = 12 and decreases
# afterwards (tests check t <= 10^4 exhaustively and sample up to 10^8);
# 1.0 is the safety margin on top of that.
REMAINDER_ENVELOPE = 1.0

DEFAULT_PREC = 128
_SERIES_TERMS = 8  # binomial terms kept before the Lagrange remainder
_MAX_TRUNCATION = 1 << 27  # refuse partial sums beyond this K


@dataclass(frozen=True)
class CertifiedValue:
    """A value with a rigorous two-sided error bound."""

    value: mpmath.mpf
    error_bound: mpmath.mpf
    truncation_K: int

    def __str__(self) -> str:
        return f"{mpmath.nstr(self.value, 20)} ± {mpmath.nstr(self.error_bound, 5)} (K={self.truncation_K})"


def _inv_exponent(c: Exponent):
    """s = 1/c at the current working precision."""
    if c.is_rational:
        return mp.mpf(c.q) / c.p
    return +mp.mpf(c.approx)


def summatory_remainder(t: int):
    """Delta(t) = D(t) - t log t - (2*gamma - 1) t, with exact D(t)."""
    d = divisor_summatory(t)
    with mp.workprec(96):
        return +(mp.mpf(d) - t * mp.log(t) - (2 * mp.euler - 1) * t)


def dc_partial(c, K: int, prec: int = DEFAULT_PREC):
    """sum_{k<=K} d(k) (k^(-s) - (k+1)^(-s)) at >= 128-bit working precision."""
    c = Exponent.coerce(c)
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    prec = max(int(prec), DEFAULT_PREC)
    # hot loop in mpmath's raw mpf representation; identical rounding mode
    with mp.workprec(prec + 32):
        wp = mp.prec
        neg_s = (-_inv_exponent(c))._mpf_
        s_int = c.q if (c.is_rational and c.p == 1) else None  # s = 1/c integer
        total = fzero
        prev = fone  # k^(-s) carried forward, starting at k = 1
        k = 1
        for seg in iter_divisor_segments(1, K):
            for d in seg.values.tolist():
                if s_int is not None:
                    nxt = from_rational(1, (k + 1) ** s_int, wp, "n")
                else:
                    nxt = mpf_pow(from_int(k + 1), neg_s, wp, "n")
                total = mpf_add(
                    total, mpf_mul_int(mpf_sub(prev, nxt, wp, "n"), d, wp, "n"), wp, "n"
                )
                prev = nxt
                k += 1
        result = +mpmath.mpf(total)
    with mp.workprec(prec):
        return +result


def _g_of(L, s):
    """g(L) = L^(-s) - (L+1)^(-s), cancellation-free."""
    return -mp.power(L, -s) * mp.expm1(-s * mp.log1p(mp.mpf(1) / L))


def _tail_parts(c: Exponent, K: int):
    """(correction, bound) for the tail beyond K, at the ambient precision."""
    s = _inv_exponent(c)
    L = mp.mpf(K + 1)
    g0 = mp.euler
    gL = _g_of(L, s)
    DK = divisor_summatory(K)

    # binomial coefficients of g(t) = sum_j a_j t^(-s-j) + rho_m
    a = []
    coef = s
    sign = 1
    for j in range(1, _SERIES_TERMS):
        a.append(sign * coef)
        coef = coef * (s + j) / (j + 1)
        sign = -sign
    b_m = abs(coef)  # |rho_m(t)| <= b_m t^(-s-m)

    logL = mp.log(L)

    def tail_power(beta):
        # integral_L^inf t^(-beta) dt
        return mp.power(L, 1 - beta) / (beta - 1)

    def tail_power_log(beta):
        # integral_L^inf (log t + 2*g0) t^(-beta) dt
        return mp.power(L, 1 - beta) * (
            logL / (beta - 1) + 1 / (beta - 1) ** 2 + 2 * g0 / (beta - 1)
        )

    i1_mid = mp.fsum(a[j - 1] * tail_power_log(s + j) for j in range(1, _SERIES_TERMS))
    i1_rem = b_m * tail_power_log(s + _SERIES_TERMS)
    half_mid = mp.fsum(
        a[j - 1] * tail_power(s + j + mp.mpf(1) / 2) for j in range(1, _SERIES_TERMS)
    )
    half_rem = b_m * tail_power(s + _SERIES_TERMS + mp.mpf(1) / 2)

    j_hi = mp.sqrt(L) * gL + (half_mid + half_rem) / 2
    correction = gL * (L * logL + (2 * g0 - 1) * L - DK) + i1_mid
    bound = REMAINDER_ENVELOPE * j_hi + i1_rem
    return correction, bound


def dc_certified(c, K: int, prec: int = DEFAULT_PREC) -> CertifiedValue:
    """Certified d_c from truncation point K: partial sum + tail enclosure."""
    c = Exponent.coerce(c)
    K = int(K)
    if K < 1:
        raise ValueError("K must be >= 1")
    prec = max(int(prec), DEFAULT_PREC)
    partial = dc_partial(c, K, prec=prec)
    with mp.workprec(prec + 32):
        correction, bound = _tail_parts(c, K)
        value = partial + correction
        # rounding allowance: a few ulp per operation over the whole pipeline
        bound += (abs(value) + 1) * mp.mpf(2) ** (8 - prec)
        value, bound = +value, +bound
    with mp.workprec(prec):
        return CertifiedValue(+value, +bound, K)


def tail_bound(c, K: int, prec: int = DEFAULT_PREC):
    """Rigorous bound on d_c - dc_partial(c, K) (cheap: no partial sum)."""
    c = Exponent.coerce(c)
    with mp.workprec(max(int(prec), DEFAULT_PREC) + 32):
        correction, bound = _tail_parts(c, int(K))
        return +(abs(correction) + bound)


_dc_cache: dict = {}
_dc_lock = threading.Lock()


def dc_constant(c, target_error, prec: int = DEFAULT_PREC) -> CertifiedValue:
    """Certified d_c with error bound <= target_error (K doubles until met)."""
    c = Exponent.coerce(c)
    target = mp.mpf(target_error)
    if not target > 0:
        raise ValueError("target_error must be positive")
    key = (c, float(target), max(int(prec), DEFAULT_PREC))
    with _dc_lock:
        hit = _dc_cache.get(key)
    if hit is not None:
        return hit

    K = 64
    with mp.workprec(max(int(prec), DEFAULT_PREC) + 32):
        while True:
            _, bound = _tail_parts(c, K)
            if bound + mp.mpf(2) ** (8 - prec) <= target:
                break
            if K >= _MAX_TRUNCATION:
                raise ResourceLimitError(
                    f"target_error={mpmath.nstr(target, 5)} needs a truncation "
                    f"beyond K={_MAX_TRUNCATION} for c={c}"
                )
            K *= 2
    result = dc_certified(c, K, prec=prec)
    if result.error_bound > target:
        raise ResourceLimitError("rounding allowance exceeded the requested target")
    with _dc_lock:
        _dc_cache[key] = result
    return result


def main_term(x: int, c, target_error, prec: int = DEFAULT_PREC) -> CertifiedValue:
    """d_c * x^(1/c) with a propagated certified bound."""
    x = int(x)
    if x < 1:
        raise ValueError("x must be a positive integer")
    c = Exponent.coerce(c)
    prec = max(int(prec), DEFAULT_PREC)
    dc = dc_constant(c, target_error, prec=prec)
    with mp.workprec(prec + 32):
        xp = mp.power(x, _inv_exponent(c))
        value = dc.value * xp
        bound = dc.error_bound * xp + (abs(value) + 1) * mp.mpf(2) ** (8 - prec)
        value, bound = +value, +bound
    with mp.workprec(prec):
        return CertifiedValue(+value, +bound, dc.truncation_K)
