"""Inequality checks producing :class:`BoundReport` rows.

A :class:`Workspace` owns the immutable tables and caches shared by all
checks.  Every check function returns ``BoundReport`` objects; reports are
*strict* (a failure is a failure) unless their hypothesis is only
asymptotic, in which case they are informational.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import bounds, oracles
from ._summation import compensated_cumsum
from .arith_tables import (
    DEFAULT_MEM_BUDGET,
    bk_second_moment,
    bk_series,
    build_lambda_table,
    build_moebius_table,
    least_prime_divisor,
    psi_progression,
    totients,
)
from .bounds import ExplicitConstants, compute_constants, real_root
from .dirichlet import (
    character_group,
    conductor,
    evaluate,
    primitive_exponents,
    twisted_maxima,
)
from .vaughan import (
    block_sigmas,
    choose_params,
    dyadic_blocks,
    s_partial_sums,
    script_S_all,
    vaughan_arrays,
    verify_identity,
)

C3_NOTE = "c3-sensitive"


@dataclass
class BoundReport:
    name: str
    params: dict
    lhs: float
    rhs: float
    strict: bool = True
    notes: list[str] = field(default_factory=list)
    wall_time: float | None = None

    @property
    def passed(self) -> bool:
        return bool(self.lhs <= self.rhs)

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    def to_dict(self, timings: bool = False) -> dict:
        lhs, rhs = _fmt(float(self.lhs)), _fmt(float(self.rhs))
        # ratio from the rounded sides, so a parsed report re-serializes identically
        return {
            "name": self.name,
            "params": {k: _fmt(v) for k, v in self.params.items()},
            "lhs": lhs,
            "rhs": rhs,
            "ratio": _fmt(BoundReport("", {}, lhs, rhs).ratio),
            "pass": self.passed,
            "strict": self.strict,
            "notes": list(self.notes),
            "wall_time": _fmt(self.wall_time) if timings and self.wall_time is not None else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> BoundReport:
        return cls(d["name"], dict(d["params"]), d["lhs"], d["rhs"], d.get("strict", True),
                   list(d.get("notes", [])), d.get("wall_time"))


def _fmt(v):
    """Round floats to 12 significant digits so outputs diff cleanly."""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if not math.isfinite(v) else float(f"{v:.12g}")
    if isinstance(v, np.integer):
        return int(v)
    return v


# ---------------------------------------------------------------- grid

_Q_RULES = {
    "x^1/3": lambda x: real_root(x, 3),
    "x^1/2": lambda x: real_root(x, 2),
    "x^1/2/2": lambda x: real_root(x, 2) / 2,
}


def _parse_q(rule: str, x: float) -> float:
    if rule in _Q_RULES:
        return _Q_RULES[rule](x)
    if rule.startswith("logpow:"):
        B = float(rule.split(":", 1)[1])
        return real_root(x, 2) / math.log(x) ** B
    return float(rule)


def _parse_q1(rule: str, Q: float) -> float:
    if rule == "Q^1/2":
        return math.sqrt(Q)
    return float(rule)


@dataclass(frozen=True)
class GridPoint:
    x: float
    Q: float
    Q1: float
    q_rule: str = ""
    q1_rule: str = ""

    @property
    def log_power_B(self) -> float | None:
        return float(self.q_rule.split(":", 1)[1]) if self.q_rule.startswith("logpow:") else None


@dataclass(frozen=True)
class GridSpec:
    xs: tuple = (100, 1000, 10_000, 100_000)
    q_rules: tuple = ("x^1/3", "x^1/2/2", "x^1/2")
    q1_rules: tuple = ("1", "2", "Q^1/2")

    def validate(self) -> None:
        for x in self.xs:
            if not x >= 4:
                raise ValueError(f"grid x={x} violates x >= 4")
        for r in self.q_rules:
            if r not in _Q_RULES and not r.startswith("logpow:"):
                float(r)
            if r.startswith("logpow:") and not float(r.split(":", 1)[1]) > 3.5:
                raise ValueError("logpow rule needs B > 7/2")
        for r in self.q1_rules:
            if r != "Q^1/2":
                float(r)

    def points(self) -> list[GridPoint]:
        """Grid points meeting x >= 4 and 1 <= Q1 <= Q <= sqrt(x); others are dropped."""
        self.validate()
        out = []
        for x in self.xs:
            for qr in self.q_rules:
                Q = _parse_q(qr, x)
                for q1r in self.q1_rules:
                    Q1 = _parse_q1(q1r, Q)
                    if 1 <= Q1 <= Q <= real_root(x, 2):
                        out.append(GridPoint(x, Q, Q1, qr, q1r))
        return out

    def to_dict(self) -> dict:
        return {"xs": list(self.xs), "q_rules": list(self.q_rules), "q1_rules": list(self.q1_rules)}

    @classmethod
    def from_dict(cls, d: dict) -> GridSpec:
        xs = tuple(int(v) if float(v).is_integer() else float(v) for v in d.get("xs", cls.xs))
        return cls(xs, tuple(d.get("q_rules", cls.q_rules)), tuple(d.get("q1_rules", cls.q1_rules)))


# ---------------------------------------------------------------- workspace

def _ordered_map(fn: Callable, items: Iterable, jobs: int) -> list:
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, *zip(*items)))


class Workspace:
    """Tables, constants and per-x caches shared by the checks."""

    def __init__(self, x_max: int, consts: ExplicitConstants | None = None, *, c3: float | None = None,
                 e0_limit: int = 10 ** 6, jobs: int = 1, mem_budget: int = DEFAULT_MEM_BUDGET):
        self.x_max = int(x_max)
        self.table = build_lambda_table(self.x_max, mem_budget=mem_budget)
        self.mu = build_moebius_table(self.x_max)
        self.phi = totients(self.x_max)
        self.consts = consts if consts is not None else compute_constants(e0_limit, c3)
        self.jobs = jobs
        self.mem_budget = mem_budget
        self._prog: dict = {}
        self._prim: dict = {}

    # per-q cached quantities -------------------------------------------

    def progression_errors(self, x: float, qmax: int, kind: str = "psi") -> np.ndarray:
        """E[q] = max_{2<=y<=x} max_{(a,q)=1} |psi(y;q,a) - psi(y)/phi(q)| for q <= qmax.

        With ``kind="pi"`` prime counts replace psi.
        """
        key = (float(x), kind)
        have = self._prog.get(key, np.zeros(1))
        if len(have) > qmax:
            return have
        pp, logs = self.table.prime_powers_upto(x)
        if kind == "psi":
            pts, w = pp, logs
        elif kind == "pi":
            sel = self.table.exponent[pp] == 1
            pts, w = pp[sel], np.ones(int(sel.sum()))
        else:
            raise ValueError(kind)
        new = _ordered_map(_progression_error, [(q, pts, w) for q in range(len(have), qmax + 1)], self.jobs)
        out = np.concatenate([have, np.array(new, dtype=float)])
        self._prog[key] = out
        return out

    def primitive_maxima(self, x: float, qmax: int) -> np.ndarray:
        """P[q] = sum over primitive chi mod q of max_{y<=x} |psi(y, chi)|."""
        key = float(x)
        have = self._prim.get(key, np.zeros(1))
        if len(have) > qmax:
            return have
        new = _ordered_map(_primitive_max_sum, [(q, x, self.table) for q in range(len(have), qmax + 1)], self.jobs)
        out = np.concatenate([have, np.array(new, dtype=float)])
        self._prim[key] = out
        return out

    def admissible(self, Q: float, Q1: float) -> list[int]:
        return [q for q in range(1, math.floor(Q) + 1) if least_prime_divisor(q) > Q1]


def _progression_error(q: int, pts: np.ndarray, w: np.ndarray) -> float:
    if q == 1 or len(pts) == 0:
        return 0.0
    A = np.zeros((len(pts), q))
    A[np.arange(len(pts)), pts % q] = w
    cum = compensated_cumsum(A)
    total = compensated_cumsum(w)
    units = np.gcd(np.arange(q), q) == 1
    phi_q = int(units.sum())
    return float(np.abs(cum[:, units] - total[:, None] / phi_q).max())


def _primitive_max_sum(q: int, x: float, table) -> float:
    exps = primitive_exponents(q)
    if len(exps) == 0:
        return 0.0
    return math.fsum(twisted_maxima(character_group(q), exps, x, table))


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        reports = fn(*args, **kwargs)
        dt = time.perf_counter() - t0
        for r in reports:
            r.wall_time = dt / max(len(reports), 1)
        return reports
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------- progression sums

def bv_lhs(x: float, Q: float, Q1: float, ws: Workspace, kind: str = "psi") -> float:
    """sum_{q<=Q, l(q)>Q1} max_{2<=y<=x} max_{(a,q)=1} |psi(y;q,a) - psi(y)/phi(q)|."""
    E = ws.progression_errors(x, math.floor(Q), kind)
    return math.fsum(E[q] for q in ws.admissible(Q, Q1))


def _point_params(p: GridPoint) -> dict:
    return {"x": p.x, "Q": p.Q, "Q1": p.Q1, "Q_rule": p.q_rule, "Q1_rule": p.q1_rule}


@_timed
def bv_point_check(p: GridPoint, ws: Workspace) -> list[BoundReport]:
    k = ws.consts
    lhs = bv_lhs(p.x, p.Q, p.Q1, ws)
    rhs72 = bounds.rhs_log72(p.x, p.Q, p.Q1, k.c1)
    rhs92 = bounds.rhs_log92(p.x, p.Q, p.Q1, k.c1)
    params = _point_params(p)
    out = [BoundReport("bv_check", params, lhs, rhs72, notes=[C3_NOTE])]
    # rhs_72 < rhs_92 is forced termwise once log x >= 14/4.
    forced = math.log(p.x) >= 3.5
    out.append(BoundReport("bv_check.rhs_72_vs_92", params, rhs72, rhs92, strict=forced,
                           notes=["termwise forced" if forced else "not forced: log x < 7/2"]))
    if p.log_power_B is not None:
        out.append(BoundReport("bv_check.simplified", dict(params, B=p.log_power_B), lhs,
                               bounds.simplified_rhs(p.x, p.Q1, p.log_power_B, k.c1), notes=[C3_NOTE]))
    return out


SCAN_COLUMNS = ("x", "Q", "Q1", "lhs", "rhs_72", "rhs_92", "ratio")


def scan_rows(grid: GridSpec, ws: Workspace) -> list[tuple]:
    """(x, Q, Q1, lhs, rhs_72, rhs_92, lhs/rhs_72) per grid point, in grid order."""
    rows = []
    for p in grid.points():
        lhs = bv_lhs(p.x, p.Q, p.Q1, ws)
        r72 = bounds.rhs_log72(p.x, p.Q, p.Q1, ws.consts.c1)
        r92 = bounds.rhs_log92(p.x, p.Q, p.Q1, ws.consts.c1)
        rows.append((p.x, p.Q, p.Q1, lhs, r72, r92, lhs / r72))
    return rows


def scan_to_csv(rows: list[tuple]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_COLUMNS)
    for row in rows:
        w.writerow([_g(float(v)) for v in row])
    return buf.getvalue()


def bv_check(grid: GridSpec, ws: Workspace) -> list[BoundReport]:
    reports = []
    for p in grid.points():
        reports.extend(bv_point_check(p, ws))
    return reports


# ---------------------------------------------------------------- twisted sums

def vaughan_lhs(x: float, Q: float, ws: Workspace) -> float:
    """sum_{q<=Q} q/phi(q) sum*_chi max_{y<=x} |psi(y, chi)|."""
    if Q < 1:
        return 0.0
    P = ws.primitive_maxima(x, math.floor(Q))
    return math.fsum(q / ws.phi[q] * P[q] for q in range(1, math.floor(Q) + 1))


@_timed
def vaughan_check(x: float, Q: float, ws: Workspace) -> list[BoundReport]:
    k = ws.consts
    params = {"x": x, "Q": Q}
    lhs = vaughan_lhs(x, Q, ws)
    out = [BoundReport("vaughan_check", params, lhs, bounds.vaughan_rhs(x, Q, k.c0), notes=[C3_NOTE])]
    psi_x = float(ws.table.psi_cumulative[math.floor(x)])
    if Q < 1:
        out[0].notes.append("Q < 1: empty sum")
    elif Q < 2:
        out[0].notes.append("1 <= Q < 2: only q = 1")
        out.append(BoundReport("vaughan_check.psi_le_A0x", params, psi_x, k.A0 * x))
        out.append(BoundReport("vaughan_check.q1_term_is_psi", params, abs(lhs - psi_x), 1e-9 * psi_x))
    elif Q > real_root(x, 2):
        out[0].notes.append("Q > sqrt(x)")
        pp, logs = ws.table.prime_powers_upto(x)
        lam2 = math.fsum(logs ** 2)
        out.append(BoundReport("vaughan_check.lambda_sq_le_psi_log", params, lam2, psi_x * math.log(x)))
        out.append(BoundReport("vaughan_check.psi_log_le_A0xlog", params, psi_x * math.log(x),
                               k.A0 * x * math.log(x)))
    return out


# ---------------------------------------------------------------- large sieve

def large_sieve_lhs(Q: float, m0: int, coefficients: np.ndarray) -> float:
    a = np.asarray(coefficients, dtype=complex)
    m = np.arange(m0 + 1, m0 + 1 + len(a))
    total = []
    for q in range(1, math.floor(Q) + 1):
        exps = primitive_exponents(q)
        if len(exps) == 0:
            continue
        group = character_group(q)
        sums = group.value_table(exps)[:, m % q] @ a
        total.append(q / group.order * math.fsum(np.abs(sums) ** 2))
    return math.fsum(total)


@_timed
def large_sieve_check(Q: float, m0: int, M: int, coefficients: np.ndarray) -> list[BoundReport]:
    a = np.asarray(coefficients, dtype=complex)
    if len(a) != M:
        raise ValueError("need exactly M coefficients")
    lhs = large_sieve_lhs(Q, m0, a)
    rhs = (M + Q ** 2) * math.fsum(np.abs(a) ** 2)
    return [BoundReport("large_sieve_check", {"Q": Q, "m0": m0, "M": M}, lhs, rhs)]


def large_sieve_suite(n_instances: int = 100, seed: int = 20261015) -> list[BoundReport]:
    rng = np.random.default_rng(seed)
    reports = []
    for _ in range(n_instances):
        Q = int(rng.integers(1, 21))
        M = int(rng.integers(1, 1001))
        m0 = int(rng.integers(0, 1001))
        a = rng.standard_normal(M) + 1j * rng.standard_normal(M)
        reports.extend(large_sieve_check(Q, m0, M, a))
    return reports


# ---------------------------------------------------------------- S_i bounds

@_timed
def si_bound_check(x: float, Q: float, ws: Workspace) -> list[BoundReport]:
    k = ws.consts
    p = choose_params(x, Q)
    U, V = p.U, p.V
    params = {"x": x, "Q": Q, "U": U, "V": V}
    N = math.floor(x)
    arrays = vaughan_arrays(N, U, V, ws.table, ws.mu)
    S = script_S_all(x, Q, p, ws.table, ws.mu, arrays)
    b1, b2, b3p, b3pp = bounds.s123_bounds(x, Q, U, V, k)
    out = [
        BoundReport("si_bound_check.S1", params, S[0], b1),
        BoundReport("si_bound_check.S2", params, S[1], b2),
        BoundReport("si_bound_check.S3", params, S[2], b3p + b3pp, notes=[C3_NOTE]),
        BoundReport("si_bound_check.S4", params, S[3], bounds.s4_bound(x, Q, U, V, k), notes=[C3_NOTE]),
    ]
    total = vaughan_lhs(x, Q, ws)
    out.append(BoundReport("si_bound_check.triangle", params, total, math.fsum(S)))
    pol, log_ = bounds.pol_log(x, Q, U, V)
    out.append(BoundReport("si_bound_check.polylog", params, total, k.c4 * pol * log_, notes=[C3_NOTE]))
    L = math.log(x)
    if Q >= real_root(x, 3):
        out.append(BoundReport("si_bound_check.Log1", params, log_, 2 ** 4 / 3 ** 1.5 * L ** 2.5))
    else:
        out.append(BoundReport("si_bound_check.Log2", params, log_, 2 * (7 / 6) ** 1.5 * L ** 2.5))
    out.append(_dyadic_bookkeeping(x, U, V, ws, params))
    return out


def _dyadic_bookkeeping(x, U, V, ws, params) -> BoundReport:
    """Worst ratio over the block-structure claims; each must be <= 1."""
    blocks = dyadic_blocks(x, max(U, 1.0), max(V, 1.0))
    ratios = [len(blocks) / (math.log(2 * x / V) / math.log(2))]
    b = bk_series(max(1, math.floor(x)), V, ws.mu)
    for blk in blocks:
        _, sigma2 = block_sigmas(blk, ws.table, b)
        ratios.append(blk.M_count / blk.M)
        ratios.append(blk.K_count / (x / blk.M))
        ratios.append(sigma2 / (2 * ws.consts.A0 * blk.M * math.log(2 * blk.M)))
    return BoundReport("si_bound_check.dyadic_blocks", dict(params, blocks=len(blocks)), max(ratios), 1.0)


# ---------------------------------------------------------------- b_k second moment

@_timed
def bk_moment_check(Y: int, V: float, ws: Workspace | None = None, window: bool = True) -> list[BoundReport]:
    L, C = bounds.MOMENT_L, bounds.MOMENT_C
    series = bk_second_moment(Y, V, ws.mu if ws is not None and ws.mu.limit >= V else None)
    s = series.second_moment
    params = {"Y": Y, "V": V, "second_moment": s, "ratio": s / Y}
    out = [BoundReport("bk_moment_check.strict_asymptotic", params, abs(s - L * Y), C * Y + V ** 2, strict=False,
                       notes=["informational: hypothesis is 'V large enough'"])]
    if window:
        out.append(BoundReport("bk_moment_check.window", params, abs(s / Y - 0.45), 0.15,
                               notes=["desk-scale window [0.30, 0.60]"]))
    return out


def bk_trend_check(Ys=(10 ** 4, 10 ** 5, 10 ** 6), V: float = 50) -> list[BoundReport]:
    L = bounds.MOMENT_L
    b = bk_series(max(Ys), V)
    sq = np.cumsum(b * b)
    ratios = [int(sq[Y]) / Y for Y in Ys]
    dist = [abs(r - L) for r in ratios]
    params = {"V": V, **{f"ratio_{Y}": r for Y, r in zip(Ys, ratios)}}
    return [BoundReport("bk_moment_check.trend", params, dist[-1], dist[0],
                        notes=["net movement toward L from first to last Y"])]


# ---------------------------------------------------------------- partial summation

def _worst(name, params, pairs, strict=True, notes=()):
    """Report for the pair (lhs, rhs) with the largest lhs/rhs ratio."""
    lhs, rhs, where = max(pairs, key=lambda t: t[0] / t[1])
    return BoundReport(name, dict(params, at=where), lhs, rhs, strict=strict, notes=list(notes))


@_timed
def counting_checks(x: float, ws: Workspace) -> list[BoundReport]:
    """Checks depending only on x: the phi-sum, Chebyshev's pi bound, pi_1 - pi."""
    k = ws.consts
    N = math.floor(x)
    params = {"x": x}
    t = np.arange(1, N + 1)
    inv_phi = np.cumsum(1.0 / ws.phi[1:N + 1])
    rhs = k.E0 * (1 + np.log(t))
    i = int(np.argmax(inv_phi / rhs))
    out = [BoundReport("counting.inv_phi_sum", dict(params, at=int(t[i])), float(inv_phi[i]), float(rhs[i]))]

    pp, _ = ws.table.prime_powers_upto(N)
    exps = ws.table.exponent[pp].astype(np.int64)
    ys = np.arange(2, N + 1)
    idx = np.searchsorted(pp, ys, side="right")
    pi = np.concatenate(([0], np.cumsum(exps == 1)))[idx]
    pi1 = np.concatenate(([0.0], compensated_cumsum(1.0 / exps)))[idx]
    cheb = bounds.CHEBYSHEV_PI * ys / np.log(ys)
    i = int(np.argmax(pi / cheb))
    out.append(BoundReport("counting.chebyshev_pi", dict(params, at=int(ys[i])), float(pi[i]), float(cheb[i])))
    gap = pi1 - pi
    root = 2 * np.sqrt(ys)
    i = int(np.argmax(gap / root))
    out.append(BoundReport("counting.pi1_minus_pi", dict(params, at=int(ys[i])), float(gap[i]), float(root[i])))
    return out


def gap_bound_check(x: float, qmax: int, ws: Workspace) -> list[BoundReport]:
    """|psi'(y, chi*) - psi'(y, chi)| <= (log q y)^2 for every chi mod q <= qmax, 2 <= y <= x."""
    t0 = time.perf_counter()
    pp, logs = ws.table.prime_powers_upto(x)
    worst = (0.0, 1.0, None)
    for q in range(1, qmax + 1):
        bad = np.array([math.gcd(int(n), q) > 1 for n in pp], dtype=bool) if q > 1 else np.zeros(len(pp), bool)
        jumps, jl = pp[bad], logs[bad]
        group = character_group(q)
        for chi in group.characters():
            if len(jumps) == 0:
                continue
            star = conductor(chi).primitive
            # chi vanishes at these n, so the difference is sum Lambda(n) chi*(n).
            vals = star.values()[jumps % star.modulus] * jl
            diff = np.abs(compensated_cumsum(vals))
            bound = np.log(q * jumps.astype(float)) ** 2
            j = int(np.argmax(diff / bound))
            if diff[j] / bound[j] > worst[0] / worst[1]:
                worst = (float(diff[j]), float(bound[j]), (q, chi.exponents, int(jumps[j])))
    lhs, rhs, where = worst
    at = {} if where is None else {"q": where[0], "chi": str(where[1]), "y": where[2]}
    rep = BoundReport("counting.gap_bound", dict({"x": x, "qmax": qmax}, **at), lhs, max(rhs, 1e-300))
    rep.wall_time = time.perf_counter() - t0
    return [rep]


def n_and_r_sums(x: float, Q: float, Q1: float, ws: Workspace) -> tuple[float, float]:
    """(N, R_sum): N = sum_{q<=Q,l(q)>Q1} 1/phi(q) sum_chi max|psi'(y,chi*)|, R_sum its primitive form.

    A character mod q with conductor q* > 1 contributes the primitive
    maximum for chi* mod q*; principal characters contribute 0.
    """
    P = ws.primitive_maxima(x, math.floor(Q))
    adm = ws.admissible(Q, Q1)
    n_terms = []
    for q in adm:
        inner = math.fsum(P[d] for d in range(2, q + 1) if q % d == 0)
        n_terms.append(inner / ws.phi[q])
    r_terms = [P[q] / ws.phi[q] for q in adm if q > 1]
    return math.fsum(n_terms), math.fsum(r_terms)


def partial_summation_terms(x: float, Q: float, Q1: float, ws: Workspace) -> tuple[float, float]:
    """Both sides of sum_{Q1<q<=Q} R(q)/q = T(Q)/Q - T(Q1)/Q1 + int_{Q1}^{Q} T(t) dt/t^2.

    R(q) = q/phi(q) * P(q) and T(t) = sum_{q<=t} R(q); the integral is
    evaluated exactly on each interval where T is constant.
    """
    P = ws.primitive_maxima(x, math.floor(Q))
    R = np.array([0.0] + [q / ws.phi[q] * P[q] for q in range(1, math.floor(Q) + 1)])
    T = np.cumsum(R)

    def T_at(t):
        return T[math.floor(t)]

    direct = math.fsum(R[q] / q for q in range(math.floor(Q1) + 1, math.floor(Q) + 1))
    pieces = [T_at(Q) / Q, -T_at(Q1) / Q1]
    a = Q1
    while a < Q:
        b = min(math.floor(a) + 1, Q)
        pieces.append(T_at(a) * (1 / a - 1 / b))
        a = b
    return direct, math.fsum(pieces)


@_timed
def summation_checks(x: float, Q: float, Q1: float, ws: Workspace) -> list[BoundReport]:
    k = ws.consts
    L = math.log(x)
    params = {"x": x, "Q": Q, "Q1": Q1}
    F = bounds.F_main(x, Q, Q1)
    out = []

    pairs = []
    for qs in range(1, math.floor(Q) + 1):
        kmax = math.floor(Q / qs)
        lhs = math.fsum(1.0 / ws.phi[kk * qs] for kk in range(1, kmax + 1))
        pairs.append((lhs, 5 * k.E0 / (4 * ws.phi[qs]) * L, qs))
    out.append(_worst("summation.inv_phi_kq", params, pairs))

    M = bv_lhs(x, Q, Q1, ws)
    trivial = Q * math.log(Q * x) ** 2
    final = bounds.rhs_log72(x, Q, Q1, k.c1)
    out.append(BoundReport("summation.trivial_term", params, trivial, final, notes=[C3_NOTE]))

    N_sum, R_sum = n_and_r_sums(x, Q, Q1, ws)
    out.append(BoundReport("summation.M_le_trivial_plus_N", params, M, trivial + N_sum))
    out.append(BoundReport("summation.N_le_R", params, N_sum, 5 * k.E0 / 4 * L * R_sum))
    out.append(BoundReport("summation.R_sum_bound", params, R_sum,
                           4 * (k.c1 - 1) / (5 * k.E0) * F * L ** 2.5, notes=[C3_NOTE]))
    out.append(BoundReport("summation.N_bound_72", params, N_sum, (k.c1 - 1) * F * L ** 3.5, notes=[C3_NOTE]))
    out.append(BoundReport("summation.N_bound_log4", params, N_sum, (k.c1 - 1) * F * L ** 4,
                           strict=False, notes=["informational: (log x)^4 variant", C3_NOTE]))
    out.append(BoundReport("summation.N_bound_log52", params, N_sum,
                           4 * (k.c1 - 1) / (5 * k.E0) * F * L ** 2.5, strict=False,
                           notes=["informational: (log x)^(5/2) variant", C3_NOTE]))

    direct, summed = partial_summation_terms(x, Q, Q1, ws)
    out.append(BoundReport("summation.partial_summation_identity", params, abs(direct - summed),
                           1e-9 * max(1.0, abs(direct))))
    dlt, dlt_maj = bounds.delta_f(x, Q, Q1), bounds.delta_f_majorant(x, Q, Q1)
    integ = bounds.integral_f(x, Q, Q1, power=2)
    out.append(BoundReport("summation.partial_summation_bound", params, direct,
                           k.c0 * (dlt + integ) * L ** 2.5, notes=[C3_NOTE]))
    out.append(BoundReport("summation.delta_f", params, dlt, dlt_maj))
    out.append(BoundReport("summation.integral_f_dt_t2", params, integ, bounds.integral_f_majorant(x, Q, Q1)))
    out.append(BoundReport("summation.integral_f_dt_t", params, bounds.integral_f(x, Q, Q1, power=1),
                           bounds.integral_f_majorant(x, Q, Q1), strict=False,
                           notes=["informational: dt/t kernel; partial summation yields dt/t^2"]))

    pi_lhs = bv_lhs(x, Q, Q1, ws, kind="pi")
    out.append(BoundReport("summation.pi_bound", params, pi_lhs, k.c2 * F * L ** 3.5, notes=[C3_NOTE]))
    adm = ws.admissible(Q, Q1)
    extra = 2 * math.sqrt(x) * math.fsum(1 + 1 / ws.phi[q] for q in adm)
    out.append(BoundReport("summation.pi_partial_summation", params, pi_lhs, 2 / math.log(2) * M + extra))
    out.append(BoundReport("summation.pi_extra_term", params, extra, 2 * k.c1 / math.log(2) * F * L ** 3.5,
                           notes=[C3_NOTE]))
    return out


# ---------------------------------------------------------------- oracles

def oracle_crosscheck(sample_size: int, ws: Workspace, seed: int = 7) -> list[BoundReport]:
    """Fast paths against the naive definitions on random small inputs."""
    rng = np.random.default_rng(seed)
    tol = 1e-6
    top = min(ws.x_max, 1000)
    out = []

    def add(name, devs, t0, **params):
        r = BoundReport(f"oracle_crosscheck.{name}", dict(params, samples=len(devs)), max(devs, default=0.0), tol)
        r.wall_time = time.perf_counter() - t0
        out.append(r)

    t0 = time.perf_counter()
    devs = []
    for _ in range(sample_size):
        y = int(rng.integers(1, top + 1))
        devs.append(abs(float(ws.table.psi_cumulative[y]) - oracles.psi(y)))
    add("psi", devs, t0)

    t0 = time.perf_counter()
    devs = []
    for _ in range(sample_size):
        y, q = int(rng.integers(1, top + 1)), int(rng.integers(1, 31))
        a = int(rng.integers(0, q))
        devs.append(abs(psi_progression(ws.table, y, q, a) - oracles.psi_progression(y, q, a)))
    add("psi_progression", devs, t0)

    t0 = time.perf_counter()
    devs = []
    for _ in range(max(1, sample_size // 2)):
        q = int(rng.integers(1, 31))
        group = character_group(q)
        row = group.all_exponents()[int(rng.integers(0, group.order))]
        chi = group.character(row)
        y = int(rng.integers(1, min(top, 500) + 1))
        pp, logs = ws.table.prime_powers_upto(y)
        fast = compensated_cumsum(chi.values()[pp % q] * logs)
        fast_val = complex(fast[-1]) if len(fast) else 0j
        devs.append(abs(fast_val - oracles.psi_twisted(y, lambda n: evaluate(chi, n))))
    add("psi_twisted", devs, t0)

    t0 = time.perf_counter()
    devs = []
    for _ in range(sample_size):
        Y = int(rng.integers(1, 301))
        V = float(rng.integers(1, 51))
        b = bk_series(Y, V, ws.mu)
        kk = int(rng.integers(1, Y + 1))
        devs.append(abs(int(b[kk]) - oracles.b_coefficient(kk, V)))
    add("b_k", devs, t0)

    t0 = time.perf_counter()
    devs = []
    n_max = min(500, ws.x_max)
    for _ in range(max(1, sample_size // 10)):
        U = float(rng.uniform(1, 30))
        V = float(rng.uniform(1, 30))
        arrays = vaughan_arrays(n_max, U, V, ws.table, ws.mu)
        naive = np.array([(0.0,) * 4] + [oracles.vaughan_lambdas(n, U, V) for n in range(1, n_max + 1)]).T
        devs.append(float(np.abs(arrays.components - naive).max()))
        q = int(rng.integers(1, 21))
        group = character_group(q)
        chi = group.character(group.all_exponents()[int(rng.integers(0, group.order))])
        fast = s_partial_sums(arrays, chi)
        for i in range(4):
            acc, dev = 0j, 0.0
            for n in range(1, n_max + 1):
                acc += naive[i, n] * evaluate(chi, n)
                dev = max(dev, abs(acc - fast[i, n]))
            devs.append(dev)
    add("vaughan_S_i", devs, t0, n_max=n_max)
    return out


@_timed
def identity_check(n_max: int, n_pairs: int, ws: Workspace, seed: int = 11) -> list[BoundReport]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_pairs):
        U, V = float(rng.uniform(1, 100)), float(rng.uniform(1, 100))
        res = verify_identity(n_max, U, V, ws.table, ws.mu)
        out.append(BoundReport("vaughan_identity", {"n_max": n_max, "U": U, "V": V}, res, 1e-9))
    return out



# ---------------------------------------------------------------- suites

SUITES = ("bv", "vaughan", "sieve", "si", "bk", "summation", "oracle")


@dataclass(frozen=True)
class SuiteOptions:
    grid: GridSpec = GridSpec()
    si_xs: tuple = (100, 1000, 10_000)
    vaughan_xs: tuple = (1000, 10_000)
    gap_qmax: int = 100
    sieve_instances: int = 100
    oracle_samples: int = 50
    bk_Y: int = 10 ** 6
    bk_V: float = 50
    identity_n: int = 10 ** 4
    identity_pairs: int = 5
    seed: int = 20261015


def required_x_max(opts: SuiteOptions) -> int:
    xs = list(opts.grid.xs) + list(opts.si_xs) + list(opts.vaughan_xs) + [opts.identity_n, 1000]
    return int(math.floor(max(xs)))


def run_suite(suite: str, ws: Workspace, opts: SuiteOptions = SuiteOptions(), sink: list | None = None) -> list[BoundReport]:
    """Run one named suite (or ``"all"``), appending reports to ``sink`` as they are produced."""
    sink = [] if sink is None else sink
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}")
        _RUNNERS[name](ws, opts, sink)
    return sink


def _run_bv(ws, opts, sink):
    for p in opts.grid.points():
        sink.extend(bv_point_check(p, ws))


def _run_vaughan(ws, opts, sink):
    for x in opts.vaughan_xs:
        for Q in (real_root(x, 3), real_root(x, 2), 0.5, 1.5, 2 * real_root(x, 2)):
            sink.extend(vaughan_check(x, Q, ws))


def _run_sieve(ws, opts, sink):
    sink.extend(large_sieve_suite(opts.sieve_instances, opts.seed))
    rng = np.random.default_rng(opts.seed + 1)
    a = rng.standard_normal(200) + 1j * rng.standard_normal(200)
    sink.extend(large_sieve_check(1, 0, 200, a))
    spike = np.zeros(50)
    spike[36] = 1.0
    sink.extend(large_sieve_check(12, 0, 50, spike))


def _si_points(opts):
    pts = []
    for x in opts.si_xs:
        for rule in opts.grid.q_rules:
            Q = _parse_q(rule, x)
            if 2 <= Q <= real_root(x, 2):
                pts.append((x, Q))
    return pts


def _run_si(ws, opts, sink):
    for x, Q in _si_points(opts):
        sink.extend(si_bound_check(x, Q, ws))


def _run_bk(ws, opts, sink):
    sink.extend(bk_moment_check(opts.bk_Y, opts.bk_V, ws))
    sink.extend(bk_moment_check(10, 1, ws, window=False))
    Ys = tuple(Y for Y in (10 ** 4, 10 ** 5, 10 ** 6) if Y <= opts.bk_Y)
    if len(Ys) >= 2:
        sink.extend(bk_trend_check(Ys, opts.bk_V))


def _run_summation(ws, opts, sink):
    xs = sorted({p.x for p in opts.grid.points()})
    for x in xs:
        sink.extend(counting_checks(x, ws))
    if xs:
        sink.extend(gap_bound_check(max(xs), opts.gap_qmax, ws))
    for p in opts.grid.points():
        sink.extend(summation_checks(p.x, p.Q, p.Q1, ws))


def _run_oracle(ws, opts, sink):
    sink.extend(oracle_crosscheck(opts.oracle_samples, ws, seed=opts.seed))
    sink.extend(identity_check(opts.identity_n, opts.identity_pairs, ws, seed=opts.seed))


_RUNNERS = {
    "bv": _run_bv, "vaughan": _run_vaughan, "sieve": _run_sieve, "si": _run_si,
    "bk": _run_bk, "summation": _run_summation, "oracle": _run_oracle,
}


def reports_to_json(reports: list[BoundReport], timings: bool = False) -> str:
    return json.dumps({"reports": [r.to_dict(timings) for r in reports]}, indent=1) + "\n"


CSV_COLUMNS = ("name", "params", "lhs", "rhs", "ratio", "pass", "strict", "notes", "wall_time")


def reports_to_csv(reports: list[BoundReport], timings: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        d = r.to_dict(timings)
        w.writerow([
            d["name"], json.dumps(d["params"], sort_keys=True), _g(d["lhs"]), _g(d["rhs"]), _g(d["ratio"]),
            d["pass"], d["strict"], "; ".join(d["notes"]), "" if d["wall_time"] is None else _g(d["wall_time"]),
        ])
    return buf.getvalue()


def _g(v) -> str:
    return f"{v:.12g}"
