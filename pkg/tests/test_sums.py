from fractions import Fraction

import pytest

from divsum.floors import Exponent
from divsum.sums import (
    blocked_split_bound,
    n_limit_for,
    optimal_N,
    sum_blocked,
    sum_direct,
    validate_split,
)

from conftest import brute_floor_sum

ORACLE_C = ["1/3", "1/2", "2/3", "1", "3/2", "2", "5/2"]

# frozen regression anchors, first computed from brute_floor_sum / the
# direct evaluator and cross-checked blocked
FROZEN = {
    (4, "1"): 7,       # d(4)+d(2)+d(1)+d(1) = 3+2+1+1
    (10, "1"): 17,     # 4+2+2+2+2+1+1+1+1+1
    (100, "1"): 191,   # brute_floor_sum(100, 1)
    (10**4, "1"): 18970,
    (10**6, "1"): 1881642,
    (10**6, "3/2"): 24280,
    (10**8, "1"): 188094703,
}


def test_direct_spec_examples():
    assert sum_direct(4, 1).value == 7
    assert sum_direct(10, 1).value == 17
    for c in ORACLE_C:
        assert sum_direct(1, c).value == 1  # single term d(1)


def test_direct_matches_definition_brute():
    for cstr in ORACLE_C:
        cf = Fraction(cstr)
        for x in [1, 2, 3, 5, 7, 10, 16, 29, 50, 81, 120]:
            if x**cf.denominator > (3 * 10**5) ** cf.numerator:
                continue  # brute n-range x^(1/c) too long to walk
            assert sum_direct(x, cstr).value == brute_floor_sum(x, cf), (cstr, x)


def test_blocked_equals_direct_small_everything():
    for cstr in ORACLE_C:
        c = Exponent.parse(cstr)
        for x in range(1, 121):
            want = sum_direct(x, c).value
            nmax = blocked_split_bound(x, c)
            cands = {1, 2, nmax}
            if x >= 2:
                cands.add(optimal_N(x, c))
            for n in sorted(cands):
                if 1 <= n <= nmax:
                    assert sum_blocked(x, c, n).value == want, (cstr, x, n)
                else:
                    with pytest.raises(ValueError):
                        sum_blocked(x, c, n)


def test_blocked_spec_examples():
    assert sum_blocked(10, 1, 2).value == 17
    assert sum_blocked(4, 1, 1).value == 7
    assert sum_blocked(10**6, "3/2", 10).value == sum_direct(10**6, "3/2").value


def test_equivalence_random_sample(rng):
    work_cap = 10**6
    for cstr in ORACLE_C:
        c = Exponent.parse(cstr)
        cf = float(Fraction(cstr))
        xmax = min(10**6, max(2, int(work_cap**cf)))
        for _ in range(15):
            x = int(rng.integers(1, xmax + 1))
            want = sum_direct(x, c).value
            nmax = blocked_split_bound(x, c)
            cands = {1, 2}
            if x >= 2:
                cands.add(optimal_N(x, c))
            for n in sorted(cands):
                if n <= nmax:
                    assert sum_blocked(x, c, n).value == want, (cstr, x, n)


def test_frozen_values():
    for (x, cstr), want in FROZEN.items():
        r = sum_blocked(x, cstr, optimal_N(x, cstr))
        assert r.value == want, (x, cstr)


def test_growth_in_x():
    # S is NOT locally monotone (d fluctuates): S(6)=11 > S(7)=10 at c=1.
    # The sound growth property is along doubling strides.
    assert sum_direct(6, 1).value == 11 and sum_direct(7, 1).value == 10
    for x in range(1, 400):
        assert sum_direct(2 * x, 1).value > sum_direct(x, 1).value
    for x in range(1, 200):
        assert sum_direct(2 * x, "3/2").value > sum_direct(x, "3/2").value


def test_result_metadata():
    r = sum_direct(10, 1)
    assert (r.method, r.x, r.n_limit, r.split_N) == ("direct", 10, 10, None)
    b = sum_blocked(10, 1, 2)
    assert (b.method, b.split_N) == ("blocked", 2)
    assert b.n_limit == n_limit_for(10, 1) == 10


def test_work_counters_logged(capsys):
    d = sum_direct(10**6, 1)
    b = sum_blocked(10**6, 1, optimal_N(10**6, 1))
    print(f"work units at x=1e6, c=1: direct={d.work_units} blocked={b.work_units}")
    # performance property (logged, per contract): blocked does far less work
    assert d.work_units == 10**6
    assert b.work_units < d.work_units


def test_jobs_bitwise_identical():
    base = sum_blocked(10**6, 1, 2).value
    assert sum_blocked(10**6, 1, 2, jobs=4, segment=1 << 14).value == base
    assert sum_direct(10**6, 1, jobs=4).value == sum_direct(10**6, 1).value


def test_optimal_split_examples():
    # exponent 5/11 at c=1: [10^(55/11)] = 10^5 exactly
    assert optimal_N(10**11, 1) == 100000
    assert optimal_N(2, 1) >= 1
    # both branch formulas coincide at c = 2/3
    cf = Fraction(2, 3)
    low = (2 * (1 + cf)) / (2 * cf * cf + 5 * cf + 2)
    high = Fraction(5, 1) / (5 * cf + 6)
    assert low == high == Fraction(15, 28)


def test_optimal_split_in_window(rng):
    for cstr in ORACLE_C:
        c = Exponent.parse(cstr)
        for _ in range(25):
            x = int(rng.integers(2, 10**9))
            n = optimal_N(x, c)
            assert 1 <= n
            assert n <= max(blocked_split_bound(x, c), 1)


def test_split_validation():
    with pytest.raises(ValueError):
        validate_split(10, Exponent.rational(1), 100)  # spec: rejected
    with pytest.raises(ValueError):
        validate_split(10, Exponent.rational(1), 0)
    with pytest.raises(ValueError):
        sum_blocked(1, 1, 1)  # x = 1 admits no valid window
    assert validate_split(10, Exponent.rational(1), 2) == 2


def test_real_exponent_routes():
    # x values chosen so no x/n^(3/2) lands exactly on an integer (a true
    # integer boundary is undecidable in interval mode, by design)
    c = Exponent.real("1.5", 256)
    for x in [1, 7, 50, 401]:
        assert sum_direct(x, c).value == sum_direct(x, "3/2").value
    assert sum_blocked(401, c, 2).value == sum_direct(401, "3/2").value


def test_real_exponent_boundary_is_undecidable():
    from divsum.errors import UndecidableFloorError

    # 400 / 4^(3/2) = 50 exactly: interval mode must refuse, not guess
    with pytest.raises(UndecidableFloorError):
        sum_direct(400, Exponent.real("1.5", 256))
