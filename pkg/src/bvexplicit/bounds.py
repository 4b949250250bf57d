"""Explicit constants and the right-hand-side bound formulas."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .arith_tables import build_lambda_table, primes_up_to

LOG2 = math.log(2)

# Cited constants for the second moment of b_k.
MOMENT_L = 0.440729
MOMENT_C = 0.000023
C3_DEFAULT = 2.64
CHEBYSHEV_PI = 1.25506

# Published reference values, used only for comparison.
REFERENCE_VALUES = {
    "A0": 1.03883,
    "E0": 1.943596,
    "c0": 16.93375,
    "c1": 42.140461,
}


def real_root(x: float, k: int) -> float:
    """x**(1/k), snapped to the exact integer root when there is one."""
    r = x ** (1.0 / k)
    ri = round(r)
    if float(x).is_integer() and ri ** k == int(x):
        return float(ri)
    return r


@dataclass(frozen=True)
class ExplicitConstants:
    A0: float
    A0_argmax: int
    E0: float
    E0_interval: tuple[float, float]
    e0_prime_limit: int
    c0: float
    c0_closed_form: float
    c1: float
    c2: float
    c3: float
    c4: float
    L: float = MOMENT_L
    C: float = MOMENT_C
    c3_overridden: bool = False
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def a0_scan(scan_limit: int = 10_000) -> tuple[float, int]:
    """max psi(n)/n over integers n <= scan_limit and its argmax.

    psi(t)/t decreases between prime powers, so the supremum over real
    t in (0, scan_limit] is attained at an integer.
    """
    table = build_lambda_table(scan_limit)
    n = np.arange(1, scan_limit + 1)
    ratio = table.psi_cumulative[1:] / n
    i = int(np.argmax(ratio))
    arg = int(n[i])
    if 2 * arg > scan_limit:
        raise ValueError(f"scan limit {scan_limit} too small to certify the argmax {arg}")
    return float(ratio[i]), arg


def e0_interval(prime_limit: int) -> tuple[float, float]:
    """Bounds for prod_p (1 + 1/(p(p-1))).

    The tail over p > P satisfies sum log(1 + 1/(p(p-1))) <= sum_{n>P} 1/(n(n-1)) = 1/P.
    """
    ps = primes_up_to(prime_limit).astype(np.float64)
    log_prod = math.fsum(np.log1p(1.0 / (ps * (ps - 1))))
    return math.exp(log_prod), math.exp(log_prod + 1.0 / prime_limit)


def c4_from(c3: float, A0: float) -> float:
    return c3 / LOG2 * math.sqrt(2 * A0)


def c0_closed_form(A0: float) -> float:
    """An alternative closed form for c_0; it does not match c0_from (see README)."""
    return (math.sqrt(2 * A0) * 2 ** 5 / (3 ** 1.5 * math.pi * LOG2 ** 2)
            * (2 + math.log(LOG2) / math.log(4 / 3)))


def c0_from(c4: float) -> float:
    """c_0 = c_4 * 2^4 / 3^(3/2): the Log_1 factor applied to c_4."""
    return c4 * 2 ** 4 / 3 ** 1.5


def c1_from(E0: float, c0: float) -> float:
    return 1.25 * E0 * c0 + 1


def c2_from(c1: float) -> float:
    return 1 + 2 * c1 / LOG2


def compute_constants(e0_prime_limit: int = 10 ** 6, c3_override: float | None = None,
                      a0_scan_limit: int = 10_000) -> ExplicitConstants:
    if e0_prime_limit < 1000:
        raise ValueError("e0_prime_limit must be at least 1000")
    A0, arg = a0_scan(a0_scan_limit)
    lo, hi = e0_interval(e0_prime_limit)
    E0 = lo
    c3 = C3_DEFAULT if c3_override is None else float(c3_override)
    c4 = c4_from(c3, A0)
    c0 = c0_from(c4)
    c1 = c1_from(E0, c0)
    provenance = {
        "A0": f"max psi(n)/n over n <= {a0_scan_limit}, attained at n = {arg}",
        "E0": f"product over p <= {e0_prime_limit}; tail factor at most exp(1/{e0_prime_limit})",
        "c3": "override" if c3_override is not None else "literature value 2.64",
        "c4": "(c3 / log 2) * sqrt(2 A0)",
        "c0": "c4 * 2^4 / 3^(3/2)",
        "c0_closed_form": "alternative closed form, reported for comparison",
        "c1": "5/4 E0 c0 + 1",
        "c2": "1 + 2 c1 / log 2",
        "L": "cited",
        "C": "cited",
    }
    return ExplicitConstants(
        A0=A0, A0_argmax=arg, E0=E0, E0_interval=(lo, hi), e0_prime_limit=e0_prime_limit,
        c0=c0, c0_closed_form=c0_closed_form(A0), c1=c1, c2=c2_from(c1), c3=c3, c4=c4,
        c3_overridden=c3_override is not None, provenance=provenance,
    )


def constant_identities(k: ExplicitConstants) -> dict[str, float]:
    """Relative residuals of the defining relations between the constants."""
    def rel(a, b):
        return abs(a - b) / abs(b)
    return {
        "c1 = 5/4 E0 c0 + 1": rel(k.c1, c1_from(k.E0, k.c0)),
        "c2 = 1 + 2 c1/log 2": rel(k.c2, c2_from(k.c1)),
        "c4 = c3/log 2 sqrt(2 A0)": rel(k.c4, c4_from(k.c3, k.A0)),
        "c4 = max(A0, c3/log 2, c4)": rel(k.c4, max(k.A0, k.c3 / LOG2, c4_from(k.c3, k.A0))),
        "c0 = 2^4/3^(3/2) c4": rel(k.c0, c0_from(k.c4)),
    }


def _check_domain(x, Q, Q1):
    if not (x >= 4 and 1 <= Q1 <= Q <= math.sqrt(x) * (1 + 1e-12)):
        raise ValueError(f"need x >= 4 and 1 <= Q1 <= Q <= sqrt(x); got x={x}, Q={Q}, Q1={Q1}")


def F_main(x: float, Q: float, Q1: float) -> float:
    _check_domain(x, Q, Q1)
    return 14 * x / Q1 + 4 * x ** 0.5 * Q + 15 * x ** (2 / 3) * Q ** 0.5 + 4 * x ** (5 / 6) * math.log(Q / Q1)


def F_log92(x: float, Q: float, Q1: float) -> float:
    """The earlier envelope, paired with (log x)^(9/2)."""
    _check_domain(x, Q, Q1)
    return 4 * x / Q1 + 4 * x ** 0.5 * Q + 18 * x ** (2 / 3) * Q ** 0.5 + 5 * x ** (5 / 6) * (1 + math.log(Q / Q1))


def rhs_log72(x: float, Q: float, Q1: float, c1: float) -> float:
    return c1 * F_main(x, Q, Q1) * math.log(x) ** 3.5


def rhs_log92(x: float, Q: float, Q1: float, c1: float) -> float:
    return c1 * F_log92(x, Q, Q1) * math.log(x) ** 4.5


def simplified_rhs(x: float, Q1: float, B: float, c1: float) -> float:
    """Simplified bound for Q = x^(1/2) / (log x)^B."""
    L = math.log(x)
    return c1 * (14 * x / Q1 * L ** 3.5 + 19 * x * L ** (3.5 - B))


def f_vaughan(x: float, Q: float) -> float:
    return 7 * x + 2 * Q ** 2 * x ** 0.5 + 5 * Q ** 1.5 * x ** (2 / 3) + 4 * Q * x ** (5 / 6)


def vaughan_rhs(x: float, Q: float, c0: float) -> float:
    return c0 * f_vaughan(x, Q) * math.log(x) ** 2.5


def pol_log(x: float, Q: float, U: float, V: float) -> tuple[float, float]:
    s2 = math.sqrt(2)
    pol = (4 * x + 2 * Q ** 2 * x ** 0.5 + U * Q ** 2 + Q ** 2.5 * (U + V)
           + s2 * Q ** 0.5 * x / U ** 0.5 + s2 * Q * x / U ** 0.5
           + Q * x ** 0.5 * U ** 0.5 * V ** 0.5 + Q * x / V ** 0.5)
    log4x = math.log(4 * x)
    log_ = max(
        math.log(x * V) ** 2,
        math.log(x * U) ** 2,
        math.log(2 * U * V) ** 2 * log4x,
        math.log(2 * x / V) ** 1.5 * log4x,
    )
    return pol, log_


def s4_bound(x: float, Q: float, U: float, V: float, consts: ExplicitConstants) -> float:
    return (consts.c3 / LOG2 * math.sqrt(2 * consts.A0)
            * (x + math.sqrt(2) * Q ** 0.5 * x / U ** 0.5 + Q * x / V ** 0.5 + Q ** 2 * x ** 0.5)
            * math.log(4 * x) * math.log(2 * x / V) ** 1.5)


def s123_bounds(x: float, Q: float, U: float, V: float, consts: ExplicitConstants) -> tuple[float, float, float, float]:
    b1 = consts.A0 * U * Q ** 2
    b2 = (x + Q ** 2.5 * V) * math.log(x * V) ** 2
    b3p = (x + Q ** 2.5 * U) * math.log(x * U) ** 2
    b3pp = (consts.c3 / LOG2
            * (x + Q * x ** 0.5 * U ** 0.5 * V ** 0.5 + math.sqrt(2) * Q * x / U ** 0.5 + Q ** 2 * x ** 0.5)
            * math.log(2 * U * V) ** 2 * math.log(4 * x))
    return b1, b2, b3p, b3pp


def delta_f(x: float, Q: float, Q1: float) -> float:
    return f_vaughan(x, Q) / Q - f_vaughan(x, Q1) / Q1


def delta_f_majorant(x: float, Q: float, Q1: float) -> float:
    return 7 * x / Q1 + 2 * x ** 0.5 * Q + 5 * x ** (2 / 3) * Q ** 0.5


def integral_f(x: float, Q: float, Q1: float, power: int = 2) -> float:
    """Closed form of int_{Q1}^{Q} f(x, t) t^(-power) dt for power in {1, 2}."""
    if power == 2:
        return (7 * x * (1 / Q1 - 1 / Q) + 2 * x ** 0.5 * (Q - Q1)
                + 10 * x ** (2 / 3) * (Q ** 0.5 - Q1 ** 0.5) + 4 * x ** (5 / 6) * math.log(Q / Q1))
    if power == 1:
        return (7 * x * math.log(Q / Q1) + x ** 0.5 * (Q ** 2 - Q1 ** 2)
                + 10 / 3 * x ** (2 / 3) * (Q ** 1.5 - Q1 ** 1.5) + 4 * x ** (5 / 6) * (Q - Q1))
    raise ValueError("power must be 1 or 2")


def integral_f_majorant(x: float, Q: float, Q1: float) -> float:
    return 7 * x / Q1 + 2 * x ** 0.5 * Q + 10 * x ** (2 / 3) * Q ** 0.5 + 4 * x ** (5 / 6) * math.log(Q / Q1)
