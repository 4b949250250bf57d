import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bvexplicit import oracles
from bvexplicit.arith_tables import (
    BudgetError,
    TableRangeError,
    b_coefficient,
    bk_second_moment,
    bk_series,
    build_lambda_table,
    build_moebius_table,
    divisors,
    euler_phi,
    least_prime_divisor,
    pi_counts,
    primes_up_to,
    psi,
    psi_progression,
    totients,
)


def test_prime_powers_up_to_ten():
    t = build_lambda_table(10)
    flagged = {n for n in range(11) if t.base[n] > 0}
    assert flagged == {2, 3, 4, 5, 7, 8, 9}
    assert t.exponent[8] == 3 and t.base[9] == 3


def test_psi_small_values():
    t = build_lambda_table(200)
    assert psi(t, 1.9) == 0.0
    assert psi(t, 10) == pytest.approx(7.832015, abs=1e-6)
    assert psi(t, 10.7) == psi(t, 10)
    assert psi(t, 113) / 113 == pytest.approx(1.03883, abs=1e-5)


def test_psi_progression_examples(table):
    assert psi_progression(table, 10, 3, 1) == pytest.approx(math.log(2) + math.log(7), abs=1e-12)
    assert psi_progression(table, 10, 1, 0) == pytest.approx(psi(table, 10), abs=1e-12)


def test_range_errors(table):
    with pytest.raises(TableRangeError):
        psi(table, table.x_max + 1)
    with pytest.raises(TableRangeError):
        pi_counts(table, 1.5, 1, 0)


def test_budget_rejected():
    with pytest.raises(BudgetError):
        build_lambda_table(10 ** 6, mem_budget=1000)


def test_lambda_matches_trial_division(table):
    lam = table.von_mangoldt()
    for n in range(1, 10 ** 4 + 1):
        assert lam[n] == oracles.von_mangoldt(n)


def test_psi_monotone_with_log_p_jumps(table):
    d = np.diff(table.psi_cumulative)
    assert (d >= 0).all()
    n = np.arange(1, table.x_max + 1)
    is_pp = table.base[1:] > 0
    assert np.allclose(d[is_pp], np.log(table.base[1:][is_pp]), atol=1e-9)
    assert (d[~is_pp] == 0).all()
    assert table.psi_cumulative[-1] <= 1.03883 * table.x_max
    assert len(n) == len(d)


def test_segmented_sieve_agrees_with_one_segment():
    a = primes_up_to(50_000, segment=1 << 20)
    b = primes_up_to(50_000, segment=1000)
    assert np.array_equal(a, b)
    assert len(a) == 5133


@given(st.integers(1, 10 ** 4), st.integers(1, 60))
def test_progressions_partition_psi(y, q):
    t = _TABLE
    total = math.fsum(psi_progression(t, y, q, a) for a in range(q))
    assert total == pytest.approx(psi(t, y), abs=1e-8)


_TABLE = build_lambda_table(10 ** 4)


def test_pi_counts_at_ten(table):
    c = pi_counts(table, 10, 3, 1)
    assert c.pi == 4
    assert c.pi1 == pytest.approx(4 + 1 + 1 / 3, abs=1e-12)
    assert c.pi_progression == 1           # only 7
    assert c.pi1_progression == pytest.approx(1.5)  # 4 and 7


def test_chebyshev_pi_at_ten_thousand(table):
    c = pi_counts(table, 10 ** 4, 1, 0)
    assert c.pi == 1229
    assert c.pi < 1.25506 * 1e4 / math.log(1e4)


def test_pi1_minus_pi_below_twice_root(table):
    for y in range(2, table.x_max + 1, 37):
        c = pi_counts(table, y, 1, 0)
        assert c.pi1 - c.pi < 2 * math.sqrt(y)


def test_least_prime_divisor():
    assert least_prime_divisor(15) == 3
    assert least_prime_divisor(7) == 7
    assert least_prime_divisor(1) == math.inf


def test_totients_and_phi():
    phi = totients(200)
    for n in range(1, 201):
        assert phi[n] == oracles.phi(n) == euler_phi(n)


def test_moebius_definition(mu):
    assert mu[1] == 1
    for n in range(1, 2001):
        assert mu[n] == oracles.moebius(n)


def test_moebius_divisor_sum(mu):
    sums = np.zeros(mu.limit + 1, dtype=np.int64)
    for d in range(1, mu.limit + 1):
        sums[d::d] += mu[d]
    assert sums[1] == 1
    assert (sums[2:] == 0).all()


@given(st.integers(1, 100), st.integers(1, 100))
def test_moebius_multiplicative(m, n):
    if math.gcd(m, n) == 1:
        assert _MU[m * n] == _MU[m] * _MU[n]


_MU = build_moebius_table(10 ** 4)


def test_divisors():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert divisors(1) == [1]


def test_b_coefficient_examples(mu):
    assert b_coefficient(6, 3, mu) == -1
    assert b_coefficient(1, 7.5, mu) == 1
    assert b_coefficient(12, 12, mu) == 0
    with pytest.raises(TableRangeError):
        b_coefficient(50, 40, build_moebius_table(10))


@given(st.integers(1, 500), st.floats(1, 600))
def test_b_coefficient_properties(k, V):
    b = b_coefficient(k, V, _MU)
    assert b == oracles.b_coefficient(k, V)
    assert abs(b) <= sum(1 for d in divisors(k) if d <= V)
    if V >= k:
        assert b == (1 if k == 1 else 0)


def test_bk_series_matches_pointwise(mu):
    b = bk_series(300, 17.5, mu)
    assert all(b[k] == b_coefficient(k, 17.5, mu) for k in range(1, 301))


def test_bk_second_moment_examples():
    s = bk_second_moment(10, 2)
    assert list(s.values[1:]) == [1 - (k % 2 == 0) for k in range(1, 11)]
    assert s.second_moment == 5
    assert bk_second_moment(10, 1).second_moment == 10
    with pytest.raises(BudgetError):
        bk_second_moment(10 ** 6, 50, mem_budget=100)
    with pytest.raises(ValueError):
        bk_second_moment(0, 2)
