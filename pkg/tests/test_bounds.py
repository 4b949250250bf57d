import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from bvexplicit import bounds
from bvexplicit.bounds import (
    F_log92,
    F_main,
    a0_scan,
    c0_closed_form,
    compute_constants,
    constant_identities,
    delta_f,
    delta_f_majorant,
    e0_interval,
    f_vaughan,
    integral_f,
    integral_f_majorant,
    pol_log,
    real_root,
    rhs_log72,
    rhs_log92,
    s4_bound,
    s123_bounds,
    vaughan_rhs,
)

valid_points = st.floats(4, 1e12).flatmap(
    lambda x: st.floats(1, math.sqrt(x)).flatmap(
        lambda Q: st.floats(1, Q).map(lambda Q1: (x, Q, Q1))))


def test_real_root_snaps_exact_powers():
    assert real_root(10 ** 6, 3) == 100.0
    assert real_root(10 ** 4, 2) == 100.0
    assert real_root(10, 3) == pytest.approx(10 ** (1 / 3))


def test_a0_scan():
    A0, arg = a0_scan()
    assert arg == 113
    assert A0 == pytest.approx(1.03883, abs=1e-5)
    with pytest.raises(ValueError):
        a0_scan(200)


def test_e0_interval_brackets_product():
    lo, hi = e0_interval(10 ** 6)
    assert lo < hi < lo * math.exp(1.01e-6)
    lo2, hi2 = e0_interval(10 ** 4)
    assert lo2 <= lo and hi <= hi2


def test_constants_derivation(consts):
    assert consts.A0_argmax == 113
    assert consts.c3 == 2.64 and not consts.c3_overridden
    assert consts.c4 == pytest.approx(consts.c3 / math.log(2) * math.sqrt(2 * consts.A0))
    assert consts.c1 == pytest.approx(1.25 * consts.E0 * consts.c0 + 1)
    assert consts.c2 == pytest.approx(1 + 2 * consts.c1 / math.log(2))
    assert consts.c0_closed_form == pytest.approx(c0_closed_form(consts.A0))
    assert set(consts.provenance) >= {"A0", "E0", "c0", "c1", "c2", "c3", "c4", "L", "C"}
    assert all(r < 1e-9 for r in constant_identities(consts).values())
    json.loads(consts.to_json())


def test_c3_override_propagates():
    k = compute_constants(c3_override=3.0)
    assert k.c3_overridden
    assert k.c4 == pytest.approx(3.0 / math.log(2) * math.sqrt(2 * k.A0))
    with pytest.raises(ValueError):
        compute_constants(e0_prime_limit=10)


def test_F_example():
    assert F_main(1e4, 100, 1) == pytest.approx(289_310, rel=1e-4)
    assert F_main(1e4, 50, 50) == pytest.approx(14 * 1e4 / 50 + 4 * 100 * 50 + 15 * 1e4 ** (2 / 3) * 50 ** 0.5)
    with pytest.raises(ValueError):
        F_main(1e4, 200, 1)


def test_F_log92_at_equal_moduli():
    x, Q = 1e4, 30.0
    assert F_log92(x, Q, Q) - (4 * x / Q + 4 * x ** 0.5 * Q + 18 * x ** (2 / 3) * Q ** 0.5) == pytest.approx(5 * x ** (5 / 6))


def test_f_vaughan_examples():
    assert f_vaughan(4, 1) == pytest.approx(28 + 4 + 5 * 4 ** (2 / 3) + 4 * 4 ** (5 / 6))
    assert f_vaughan(4, 1) == pytest.approx(57.3, abs=0.1)
    x, Q = 1e6, 1e3
    retyped = 7 * x + 2 * Q * Q * math.sqrt(x) + 5 * Q * math.sqrt(Q) * x ** (2 / 3) + 4 * Q * x ** (5 / 6)
    assert f_vaughan(x, Q) == pytest.approx(retyped, rel=1e-14)
    assert f_vaughan(100, 1e9) / 1e18 == pytest.approx(2 * 10, rel=1e-3)


@given(valid_points)
def test_formulas_positive_and_monotone_in_Q1(p):
    x, Q, Q1 = p
    assert F_main(x, Q, Q1) > 0 and F_log92(x, Q, Q1) > 0
    assert F_main(x, Q, Q1) >= F_main(x, Q, Q) * (1 - 1e-12)
    if math.log(x) >= 3.5:
        assert rhs_log72(x, Q, Q1, 42.0) < rhs_log92(x, Q, Q1, 42.0)


@given(valid_points)
def test_delta_f_majorant(p):
    x, Q, Q1 = p
    assert delta_f(x, Q, Q1) <= delta_f_majorant(x, Q, Q1) * (1 + 1e-12)


@pytest.mark.parametrize("x,Q,Q1", [(1e4, 100, 1), (1e5, 316.2, 2), (1e3, 10, 3.16), (1e8, 1e4, 1)])
def test_integral_closed_form_against_quadrature(x, Q, Q1):
    for power in (1, 2):
        numeric, _ = quad(lambda t: f_vaughan(x, t) / t ** power, Q1, Q, epsabs=0, epsrel=1e-10, limit=200)
        assert integral_f(x, Q, Q1, power) == pytest.approx(numeric, rel=1e-8)
    assert integral_f(x, Q, Q1, 2) < integral_f_majorant(x, Q, Q1)
    with pytest.raises(ValueError):
        integral_f(x, Q, Q1, 3)


def test_pol_log_members():
    x, Q = 4.0, 2.0
    U = V = 4 ** (1 / 3)
    pol, log_ = pol_log(x, Q, U, V)
    assert pol > 4 * x
    assert log_ >= math.log(4 * x) * math.log(2 * x / V) ** 1.5


@pytest.mark.parametrize("x", [1e3, 1e4, 1e6, 1e9])
def test_log_factor_bounded_for_large_Q(x):
    Q = real_root(x, 2)
    p = x ** (2 / 3) / Q
    _, log_ = pol_log(x, Q, p, p)
    assert log_ <= 2 ** 4 / 3 ** 1.5 * math.log(x) ** 2.5


def test_s123_and_s4(consts):
    b1, b2, b3p, b3pp = s123_bounds(1e3, 10, 10, 10, consts)
    assert b1 == pytest.approx(consts.A0 * 1000)
    assert b1 == pytest.approx(1038.83, abs=0.05)
    assert b2 > 1e3 * math.log(1e3) ** 2
    assert b3p > 0 and b3pp > 0
    vals = [s4_bound(x, 10, 10, 10, consts) for x in (1e3, 2e3, 1e4)]
    assert vals == sorted(vals)


def test_vaughan_rhs_scales_with_c0(consts):
    assert vaughan_rhs(1e4, 10, 2 * consts.c0) == pytest.approx(2 * vaughan_rhs(1e4, 10, consts.c0))


def test_reference_values_recorded():
    assert bounds.REFERENCE_VALUES["c1"] == 42.140461
    assert bounds.MOMENT_L == 0.440729 and bounds.MOMENT_C == 0.000023
