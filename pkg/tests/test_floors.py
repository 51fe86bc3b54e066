import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from mpmath import mp

from divsum.errors import UndecidableFloorError
from divsum.floors import (
    Exponent,
    floor_inv_pow,
    floor_x_over_pow,
    introot,
    psi_value,
    vec_floor_inv_pow,
    vec_floor_x_over_pow,
    vector_safe,
)

from conftest import brute_floor_inv_pow, brute_floor_ratio_pow

SPEC_C = [Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2), Fraction(2)]


class TestExponent:
    def test_parse_forms(self):
        assert Exponent.parse("3/2") == Exponent.rational(3, 2)
        assert Exponent.parse("1.5") == Exponent.rational(3, 2)
        assert Exponent.parse("2") == Exponent.rational(2)
        assert str(Exponent.parse("10/4")) == "5/2"  # reduced

    def test_coerce(self):
        assert Exponent.coerce(2).as_fraction() == 2
        assert Exponent.coerce(Fraction(7, 3)).inverse_fraction() == Fraction(3, 7)
        with pytest.raises(TypeError):
            Exponent.coerce(1.5)  # floats must go through real() or a string

    def test_positive_only(self):
        with pytest.raises(ValueError):
            Exponent.rational(-1, 2)
        with pytest.raises(ValueError):
            Exponent.rational(0)
        with pytest.raises(ValueError):
            Exponent.real("-0.5")

    def test_real_carries_precision(self):
        c = Exponent.real("0.75", prec=192)
        assert not c.is_rational
        assert c.prec == 192
        assert float(c) == 0.75


class TestIntroot:
    def test_exact_powers(self):
        assert introot(10**55, 11) == 10**5
        assert introot(2**60, 3) == 2**20
        assert introot((10**20 + 3) ** 7, 7) == 10**20 + 3
        assert introot((10**20 + 3) ** 7 - 1, 7) == 10**20 + 2

    def test_small_and_edges(self):
        assert introot(0, 5) == 0
        assert introot(1, 5) == 1
        assert introot(7, 1) == 7
        assert introot(80, 4) == 2  # 3^4 = 81 > 80
        with pytest.raises(ValueError):
            introot(-1, 2)
        with pytest.raises(ValueError):
            introot(4, 0)

    def test_defining_inequality_random(self, rng):
        for _ in range(5000):
            a = int(rng.integers(0, 10**12))
            m = int(rng.integers(1, 10))
            r = introot(a, m)
            assert r**m <= a < (r + 1) ** m

    def test_huge_newton_path(self):
        a = 3**4001  # bit length > 960 forces the bigint Newton branch
        r = introot(a, 5)
        assert r**5 <= a < (r + 1) ** 5


class TestRationalFloors:
    def test_spec_examples(self):
        assert floor_x_over_pow(100, 3, 2) == 11
        assert floor_x_over_pow(4, 1, 1) == 4
        # verified: 31622^2 * 10^3 <= 10^12 < 31623^2 * 10^3
        k = floor_x_over_pow(10**6, 10, "3/2")
        assert k == 31622
        assert k**2 * 10**3 <= (10**6) ** 2 < (k + 1) ** 2 * 10**3

        assert floor_inv_pow(4, 1, 1) == 4
        # adjoint: 10^3 * 31622^2 <= 10^12 < 11^3 * 31622^2
        n = floor_inv_pow(10**6, 31622, "3/2")
        assert n == 10
        assert n**3 * 31622**2 <= (10**6) ** 2 < (n + 1) ** 3 * 31622**2
        assert floor_inv_pow(100, 5, 2) == 4

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            floor_x_over_pow(0, 1, 1)
        with pytest.raises(ValueError):
            floor_inv_pow(5, 0, 1)

    def test_matches_brute_walk(self, rng):
        for cf in SPEC_C:
            p, q = cf.numerator, cf.denominator
            c = Exponent.rational(p, q)
            for _ in range(150):
                x = int(rng.integers(1, 3000))
                n = int(rng.integers(1, 40))
                k = int(rng.integers(1, 40))
                assert floor_x_over_pow(x, n, c) == brute_floor_ratio_pow(x, n, p, q)
                assert floor_inv_pow(x, k, c) == brute_floor_inv_pow(x, k, p, q)

    def test_galois_adjunction(self, rng):
        for cf in SPEC_C:
            c = Exponent.rational(cf.numerator, cf.denominator)
            for _ in range(2000):
                x = int(rng.integers(1, 10**5))
                n = int(rng.integers(1, 64))
                k = int(rng.integers(1, 64))
                assert (floor_x_over_pow(x, n, c) >= k) == (floor_inv_pow(x, k, c) >= n)

    def test_agreement_with_512bit_evaluation(self, rng):
        # high-precision oracle: locate the floor with 512-bit arithmetic,
        # then certify the candidate with the exact integer inequality
        cs = [Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(3, 2), Fraction(2), Fraction(5, 2)]
        with mp.workprec(512):
            for _ in range(10000):
                cf = cs[int(rng.integers(0, len(cs)))]
                p, q = cf.numerator, cf.denominator
                x = int(rng.integers(1, 10**9))
                n = int(rng.integers(1, 10**4))
                guess = int(mpmath.floor(mp.mpf(x) / mp.mpf(n) ** (mp.mpf(p) / q)))
                while guess**q * n**p > x**q:
                    guess -= 1
                while (guess + 1) ** q * n**p <= x**q:
                    guess += 1
                assert floor_x_over_pow(x, n, Exponent.rational(p, q)) == guess


class TestRealFloors:
    def test_matches_rational_counterpart(self):
        c_rat = Exponent.parse("3/2")
        c_real = Exponent.real("1.5", 256)
        for x, n in [(10**6, 10), (999, 7), (123456, 3)]:
            assert floor_x_over_pow(x, n, c_real) == floor_x_over_pow(x, n, c_rat)
        for x, k in [(10**6, 31622), (999, 31), (123456, 2)]:
            assert floor_inv_pow(x, k, c_real) == floor_inv_pow(x, k, c_rat)

    def test_irrational_exponent_against_high_precision(self):
        with mp.workprec(600):
            c = Exponent.real(mpmath.sqrt(2), 256)
            for x, n in [(10**6, 7), (5000, 3), (123, 2)]:
                ref = int(mpmath.floor(mp.mpf(x) / mp.mpf(n) ** mpmath.sqrt(2)))
                assert floor_x_over_pow(x, n, c) == ref

    def test_exact_integer_value_is_undecidable(self):
        # 4 / 2^2 = 1 sits exactly on an integer: no precision can separate it
        c = Exponent.real("2", 256)
        with pytest.raises(UndecidableFloorError):
            floor_x_over_pow(4, 2, c)

    def test_n_equal_one_shortcut(self):
        c = Exponent.real("2", 256)
        assert floor_x_over_pow(77, 1, c) == 77


class TestPsiValue:
    def test_examples(self):
        assert psi_value(0.5) == 0.0
        assert psi_value(1.0) == -0.5
        assert psi_value(2.75) == 0.25

    def test_range_and_periodicity(self, rng):
        for t in rng.uniform(-50, 50, size=2000).tolist():
            v = psi_value(t)
            assert -0.5 <= v < 0.5
            assert abs(psi_value(t + 1) - v) < 1e-9

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            psi_value(float("inf"))


class TestVectorKernels:
    def test_match_scalar(self, rng):
        for cf in [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1),
                   Fraction(3, 2), Fraction(2), Fraction(5, 2)]:
            p, q = cf.numerator, cf.denominator
            x = int(rng.integers(1, 10**6))
            if not vector_safe(x, q):
                continue
            arr = np.arange(1, 500, dtype=np.int64)
            got = vec_floor_x_over_pow(x, arr, p, q)
            want = [floor_x_over_pow(x, int(n), Exponent.rational(p, q)) for n in arr]
            assert got.tolist() == want
            got2 = vec_floor_inv_pow(x, arr, p, q)
            want2 = [floor_inv_pow(x, int(k), Exponent.rational(p, q)) for k in arr]
            assert got2.tolist() == want2
