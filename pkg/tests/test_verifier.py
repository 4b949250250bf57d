import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bvexplicit import oracles
from bvexplicit.dirichlet import character_group, enumerate_primitive, evaluate
from bvexplicit.verifier import (
    CSV_COLUMNS,
    SUITES,
    BoundReport,
    GridPoint,
    GridSpec,
    SuiteOptions,
    Workspace,
    bk_moment_check,
    bk_trend_check,
    bv_check,
    bv_lhs,
    bv_point_check,
    counting_checks,
    gap_bound_check,
    large_sieve_check,
    large_sieve_lhs,
    large_sieve_suite,
    oracle_crosscheck,
    partial_summation_terms,
    reports_to_csv,
    reports_to_json,
    run_suite,
    scan_rows,
    scan_to_csv,
    si_bound_check,
    summation_checks,
    vaughan_check,
    vaughan_lhs,
)


def brute_bv_lhs(x, Q, Q1):
    from bvexplicit.arith_tables import least_prime_divisor
    total = 0.0
    for q in range(1, math.floor(Q) + 1):
        if least_prime_divisor(q) <= Q1:
            continue
        phi = oracles.phi(q)
        worst = 0.0
        for y in range(2, math.floor(x) + 1):
            p = oracles.psi(y)
            for a in range(q):
                if math.gcd(a, q) == 1:
                    worst = max(worst, abs(oracles.psi_progression(y, q, a) - p / phi))
        total += worst
    return total


def test_report_semantics():
    r = BoundReport("t", {"x": 1.0}, 2.0, 3.0)
    assert r.passed and r.ratio == pytest.approx(2 / 3)
    assert not BoundReport("t", {}, 3.0, 2.0).passed
    assert BoundReport("t", {}, 0.0, 0.0).passed and BoundReport("t", {}, 0.0, 0.0).ratio == 0.0
    assert BoundReport("t", {}, 1.0, 0.0).ratio == math.inf


@given(st.floats(0, 1e12), st.floats(1e-6, 1e12), st.booleans())
def test_report_round_trip(lhs, rhs, strict):
    r = BoundReport("n", {"x": 10.0, "rule": "x^1/2"}, lhs, rhs, strict, ["note"])
    d = json.loads(json.dumps(r.to_dict()))
    back = BoundReport.from_dict(d)
    again = back.to_dict()
    if d["lhs"] != d["rhs"]:
        assert again == d
    else:
        # a near-tie can round to equality; only the pass flag may then differ
        assert {k: v for k, v in again.items() if k != "pass"} == {k: v for k, v in d.items() if k != "pass"}
    assert d["pass"] == (lhs <= rhs)
    assert d["wall_time"] is None


def test_default_grid_points_are_admissible():
    pts = GridSpec().points()
    assert pts
    for p in pts:
        assert p.x >= 4 and 1 <= p.Q1 <= p.Q <= math.sqrt(p.x) * (1 + 1e-12)


@given(st.lists(st.integers(4, 10 ** 7), min_size=1, max_size=4),
       st.lists(st.sampled_from(["x^1/3", "x^1/2", "x^1/2/2", "logpow:4", "3", "0.5"]), min_size=1, max_size=3),
       st.lists(st.sampled_from(["1", "2", "Q^1/2", "7.5"]), min_size=1, max_size=3))
def test_any_grid_only_yields_admissible_points(xs, qr, q1r):
    g = GridSpec(tuple(xs), tuple(qr), tuple(q1r))
    for p in g.points():
        assert p.x >= 4 and 1 <= p.Q1 <= p.Q <= math.sqrt(p.x) * (1 + 1e-12)
    assert GridSpec.from_dict(json.loads(json.dumps(g.to_dict()))) == g


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec((2,)).validate()
    with pytest.raises(ValueError):
        GridSpec((100,), ("nonsense",)).validate()
    with pytest.raises(ValueError):
        GridSpec((100,), ("logpow:2",)).validate()


def test_bv_lhs_small_cases(ws):
    assert bv_lhs(10, 1, 1, ws) == 0.0
    assert bv_lhs(20, 3, 1, ws) == pytest.approx(brute_bv_lhs(20, 3, 1), abs=1e-9)
    assert bv_lhs(60, 7, 2, ws) == pytest.approx(brute_bv_lhs(60, 7, 2), abs=1e-9)


def test_bv_lhs_monotone(ws):
    x = 5000
    Qs = [2, 5, 10, 30, 70]
    for Q1 in (1, 2, 3):
        vals = [bv_lhs(x, Q, Q1, ws) for Q in Qs]
        assert vals == sorted(vals)
    for Q in Qs:
        vals = [bv_lhs(x, Q, Q1, ws) for Q1 in (1, 2, 3, 5)]
        assert vals == sorted(vals, reverse=True)


def test_bv_point_reports(ws):
    p = GridPoint(1e4, 100, 1, "x^1/2", "1")
    reps = bv_point_check(p, ws)
    assert reps[0].name == "bv_check" and reps[0].passed
    assert reps[0].rhs == pytest.approx(ws.consts.c1 * 289_310 * math.log(1e4) ** 3.5, rel=1e-4)
    assert reps[1].name == "bv_check.rhs_72_vs_92" and reps[1].strict and reps[1].passed


def test_bv_check_over_small_grid(ws):
    reps = bv_check(GridSpec((100, 1000, 10 ** 4)), ws)
    assert all(r.passed for r in reps if r.strict)


def test_vaughan_edge_cases(ws):
    (r,) = vaughan_check(1000, 0.5, ws)
    assert r.lhs == 0.0 and r.passed
    reps = vaughan_check(1000, 1.5, ws)
    assert {r.name for r in reps} >= {"vaughan_check.psi_le_A0x", "vaughan_check.q1_term_is_psi"}
    assert all(r.passed for r in reps)
    reps = vaughan_check(1000, 2 * math.sqrt(1000), ws)
    assert any(r.name == "vaughan_check.lambda_sq_le_psi_log" for r in reps)
    assert all(r.passed for r in reps)


def test_vaughan_lhs_against_direct_sums(ws):
    x, Q = 300, 10
    want = 0.0
    for q in range(1, Q + 1):
        for chi in enumerate_primitive(q):
            acc, best = 0j, 0.0
            for n in range(1, x + 1):
                acc += oracles.von_mangoldt(n) * evaluate(chi, n)
                best = max(best, abs(acc))
            want += q / oracles.phi(q) * best
    assert vaughan_lhs(x, Q, ws) == pytest.approx(want, abs=1e-8)


def test_large_sieve_Q_one():
    rng = np.random.default_rng(0)
    a = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    assert large_sieve_lhs(1, 5, a) == pytest.approx(abs(a.sum()) ** 2)
    (r,) = large_sieve_check(1, 5, 40, a)
    assert r.passed
    with pytest.raises(ValueError):
        large_sieve_check(1, 5, 41, a)


def test_large_sieve_spike_closed_form():
    m, Q = 37, 12
    a = np.zeros(50)
    a[m - 1] = 1.0
    want = sum(q / oracles.phi(q) * len(enumerate_primitive(q)) for q in range(1, Q + 1) if math.gcd(m, q) == 1)
    assert large_sieve_lhs(Q, 0, a) == pytest.approx(want)


def test_large_sieve_random_instances():
    reps = large_sieve_suite(15, seed=4)
    assert len(reps) == 15 and all(r.passed for r in reps)


def test_si_bounds_small(ws):
    reps = si_bound_check(1000, 10, ws)
    names = {r.name for r in reps}
    assert {"si_bound_check.S1", "si_bound_check.S4", "si_bound_check.triangle"} <= names
    assert all(r.passed for r in reps)


def test_bk_reports():
    strict, window = bk_moment_check(10 ** 4, 50)
    assert not strict.strict and window.passed
    (info,) = bk_moment_check(10, 1, window=False)
    assert info.params["second_moment"] == 10 and not info.passed and not info.strict
    (trend,) = bk_trend_check((10 ** 3, 10 ** 4), 20)
    assert trend.name == "bk_moment_check.trend"


def test_counting_and_gap(ws):
    reps = counting_checks(1e4, ws)
    assert [r.name for r in reps] == ["counting.inv_phi_sum", "counting.chebyshev_pi", "counting.pi1_minus_pi"]
    assert all(r.passed for r in reps)
    (g,) = gap_bound_check(2000, 30, ws)
    assert g.passed


def test_inv_phi_sum_at_ten(consts):
    s = math.fsum(1 / oracles.phi(k) for k in range(1, 11))
    assert s == pytest.approx(4.5833, abs=1e-4)
    assert s <= consts.E0 * math.log(10 * math.e)


def test_summation_checks(ws):
    reps = summation_checks(1e4, 100, 1, ws)
    by = {r.name: r for r in reps}
    assert all(r.passed for r in reps if r.strict)
    assert not by["summation.integral_f_dt_t"].strict
    direct, summed = partial_summation_terms(1e4, 100, 1, ws)
    assert abs(direct - summed) <= 1e-9 * direct


def test_pi_bound_uses_c2(ws):
    by = {r.name: r for r in summation_checks(1e4, 100, 1, ws)}
    assert by["summation.pi_bound"].passed
    assert ws.consts.c2 == pytest.approx(1 + 2 * ws.consts.c1 / math.log(2))


def test_oracle_crosscheck_small(ws):
    reps = oracle_crosscheck(10, ws, seed=3)
    assert {r.name.split(".")[1] for r in reps} == {"psi", "psi_progression", "psi_twisted", "b_k", "vaughan_S_i"}
    assert all(r.passed for r in reps)


def test_serialization_is_deterministic(ws):
    opts = SuiteOptions(grid=GridSpec((100, 1000)), si_xs=(100,), vaughan_xs=(1000,), sieve_instances=5,
                        oracle_samples=5, bk_Y=10 ** 4, identity_n=1000, identity_pairs=1)
    a = run_suite("bv", ws, opts) + run_suite("summation", ws, opts)
    b = run_suite("bv", ws, opts) + run_suite("summation", ws, opts)
    assert reports_to_json(a) == reports_to_json(b)
    assert reports_to_csv(a) == reports_to_csv(b)
    assert reports_to_csv(a).splitlines()[0] == ",".join(CSV_COLUMNS)
    assert json.loads(reports_to_json(a, timings=True))["reports"][0]["wall_time"] is not None


def test_parallel_matches_serial(consts):
    serial = Workspace(3000, consts, jobs=1)
    par = Workspace(3000, consts, jobs=2)
    assert np.array_equal(serial.progression_errors(3000, 40), par.progression_errors(3000, 40))
    assert np.array_equal(serial.primitive_maxima(3000, 20), par.primitive_maxima(3000, 20))


def test_run_suite_rejects_unknown(ws):
    assert "summation" in SUITES
    with pytest.raises(ValueError):
        run_suite("nope", ws)


def test_scan_rows(ws):
    rows = scan_rows(GridSpec((100, 10 ** 4)), ws)
    assert all(r[-1] < 1 for r in rows)
    csv = scan_to_csv(rows)
    assert csv.splitlines()[0] == "x,Q,Q1,lhs,rhs_72,rhs_92,ratio"
    assert scan_to_csv([]) == "x,Q,Q1,lhs,rhs_72,rhs_92,ratio\n"
