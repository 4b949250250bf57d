"""Vaughan's identity and the S_i decomposition of psi(y, chi).

For cutoffs U, V the von Mangoldt function splits as
``Lambda = lambda_1 + lambda_2 + lambda_3 + lambda_4`` with

* lambda_1(n) = Lambda(n) for n <= U, else 0
* lambda_2(n) = sum_{hd = n, d <= V} mu(d) log h
* lambda_3(n) = -sum_{mdr = n, m <= U, d <= V} Lambda(m) mu(d)
* lambda_4(n) = -sum_{mk = n, m > U, k > V} Lambda(m) b_k

where b_k = sum_{d | k, d <= V} mu(d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._summation import compensated_cumsum
from .arith_tables import LambdaTable, MoebiusTable, TableRangeError, bk_series, divisors
from .bounds import real_root
from .dirichlet import DirichletCharacter, character_group, primitive_exponents

_CHUNK_ELEMENTS = 1 << 21


@dataclass(frozen=True)
class VaughanParams:
    x: float
    Q: float
    U: float
    V: float


def choose_params(x: float, Q: float) -> VaughanParams:
    """U = V = x^(2/3)/Q when Q >= x^(1/3), otherwise U = V = x^(1/3)."""
    if x < 4:
        raise ValueError("x must be at least 4")
    if Q <= 0:
        raise ValueError("Q must be positive")
    cube = real_root(x, 3)
    u = cube * cube / Q if Q >= cube else cube
    return VaughanParams(x, Q, u, u)


@dataclass(frozen=True)
class VaughanDecomposition:
    n: int
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float

    @property
    def total(self) -> float:
        return math.fsum((self.lambda1, self.lambda2, self.lambda3, self.lambda4))


def _require(table: LambdaTable, mu: MoebiusTable, n: int):
    if n > table.x_max or n > mu.limit:
        raise TableRangeError(f"tables do not cover n={n}")


def lambda_components(n: int, U: float, V: float, table: LambdaTable, mu: MoebiusTable) -> VaughanDecomposition:
    """The four Vaughan components at a single n, by divisor enumeration."""
    if n < 1:
        raise ValueError("n must be positive")
    _require(table, mu, n)
    divs = divisors(n)
    lam = table.lambda_at
    l1 = lam(n) if n <= U else 0.0
    l2 = math.fsum(int(mu[d]) * math.log(n // d) for d in divs if d <= V)
    l3_terms = []
    l4_terms = []
    for m in divs:
        lm = lam(m)
        if lm == 0.0:
            continue
        k = n // m
        if m <= U:
            # sum over d | k, d <= V of mu(d); r = k / d is then forced.
            l3_terms.append(lm * sum(int(mu[d]) for d in divisors(k) if d <= V))
        elif k > V:
            l4_terms.append(lm * sum(int(mu[d]) for d in divisors(k) if d <= V))
    return VaughanDecomposition(n, l1, l2, -math.fsum(l3_terms), -math.fsum(l4_terms))


@dataclass(frozen=True, eq=False)
class VaughanArrays:
    """lambda_1..lambda_4 for n = 0..N as dense arrays (index 0 unused)."""

    N: int
    U: float
    V: float
    components: np.ndarray  # shape (4, N + 1)


def vaughan_arrays(N: int, U: float, V: float, table: LambdaTable, mu: MoebiusTable) -> VaughanArrays:
    """Sieve all four components up to N."""
    _require(table, mu, min(N, max(1, math.floor(V))))
    if N > table.x_max:
        raise TableRangeError(f"tables do not cover N={N}")
    lam = table.von_mangoldt()[:N + 1]
    logs = np.log(np.maximum(np.arange(N + 1), 1))
    comp = np.zeros((4, N + 1))

    top_u = min(math.floor(U), N)
    comp[0, :top_u + 1] = lam[:top_u + 1]

    top_v = min(math.floor(V), N)
    for d in range(1, top_v + 1):
        m = int(mu[d])
        if m:
            h = N // d
            comp[1, d::d] += m * logs[1:h + 1]

    # c(j) = sum_{md = j, m <= U, d <= V} Lambda(m) mu(d); lambda_3 = -(c * 1).
    top_j = min(top_u * top_v, N)
    c = np.zeros(top_j + 1)
    mu_v = np.asarray(mu.mu[:top_v + 1], dtype=np.float64)
    pp, pl = table.prime_powers_upto(top_u)
    for m, lm in zip(pp.tolist(), pl.tolist()):
        dmax = min(top_v, top_j // m)
        if dmax >= 1:
            c[m * np.arange(1, dmax + 1)] += lm * mu_v[1:dmax + 1]
    for j in np.flatnonzero(c).tolist():
        comp[2, j::j] -= c[j]

    # lambda_4: m > U prime powers, k > V.
    m_pp, m_logs = table.prime_powers_upto(N)
    keep = m_pp > U
    m_pp, m_logs = m_pp[keep], m_logs[keep]
    if len(m_pp):
        kmax = N // int(m_pp[0])
        b = bk_series(max(kmax, 1), V, mu)
        for k in range(top_v + 1, kmax + 1):
            if b[k] == 0:
                continue
            stop = np.searchsorted(m_pp, N // k, side="right")
            comp[3, m_pp[:stop] * k] -= m_logs[:stop] * b[k]
    return VaughanArrays(N, U, V, comp)


def verify_identity(x_max: int, U: float, V: float, table: LambdaTable, mu: MoebiusTable) -> float:
    """max_{n <= x_max} |lambda_1 + ... + lambda_4 - Lambda(n)|."""
    arrays = vaughan_arrays(x_max, U, V, table, mu)
    lam = table.von_mangoldt()[:x_max + 1]
    return float(np.abs(arrays.components.sum(axis=0) - lam)[1:].max())


def s_partial_sums(arrays: VaughanArrays, chi: DirichletCharacter, y_max: int | None = None) -> np.ndarray:
    """S_i(y, chi) for i = 1..4 and integer y = 0..y_max, shape (4, y_max + 1)."""
    y_max = arrays.N if y_max is None else y_max
    n = np.arange(1, y_max + 1)
    vals = chi.values()[n % chi.modulus]
    out = np.zeros((4, y_max + 1), dtype=complex)
    out[:, 1:] = compensated_cumsum((arrays.components[:, 1:y_max + 1] * vals).T).T
    return out


def script_S_all(x: float, Q: float, params: VaughanParams, table: LambdaTable, mu: MoebiusTable,
                 arrays: VaughanArrays | None = None) -> np.ndarray:
    """(S_1, ..., S_4) aggregates: sum_{q <= Q} q/phi(q) sum*_chi max_{y <= x} |S_i(y, chi)|."""
    N = math.floor(x)
    if arrays is None:
        arrays = vaughan_arrays(N, params.U, params.V, table, mu)
    totals = np.zeros(4)
    n = np.arange(1, N + 1)
    comps = arrays.components[:, 1:N + 1]
    for q in range(1, math.floor(Q) + 1):
        exps = primitive_exponents(q)
        if len(exps) == 0:
            continue
        group = character_group(q)
        per_q = np.zeros(4)
        step = max(1, _CHUNK_ELEMENTS // max(N, 1))
        for lo in range(0, len(exps), step):
            vt = group.value_table(exps[lo:lo + step])[:, n % q]
            for i in range(4):
                sums = compensated_cumsum((vt * comps[i]).T)
                per_q[i] += np.abs(sums).max(axis=0).sum() if N else 0.0
        totals += q / group.order * per_q
    return totals


def script_S(i: int, x: float, Q: float, params: VaughanParams, table: LambdaTable, mu: MoebiusTable) -> float:
    if i not in (1, 2, 3, 4):
        raise ValueError("i must be 1..4")
    return float(script_S_all(x, Q, params, table, mu)[i - 1])


@dataclass(frozen=True)
class DyadicBlock:
    M: float
    m_low: float   # exclusive
    m_high: float  # inclusive
    k_low: float   # exclusive
    k_high: float  # inclusive
    M_count: int
    K_count: int


def dyadic_blocks(x: float, U: float, V: float) -> list[DyadicBlock]:
    """Blocks M = 2^a with U/2 < M <= x/V covering the m-range (U, x/V]."""
    if U < 1 or V < 1:
        raise ValueError("U and V must be at least 1")
    blocks = []
    M = 1.0
    while M <= U / 2:
        M *= 2
    while M <= x / V:
        lo, hi = max(M, U), min(2 * M, x / V)
        k_hi = x / M
        blocks.append(DyadicBlock(
            M, lo, hi, V, k_hi,
            max(0, math.floor(hi) - math.floor(lo)),
            max(0, math.floor(k_hi) - math.floor(V)),
        ))
        M *= 2
    return blocks


def block_sigmas(block: DyadicBlock, table: LambdaTable, b: np.ndarray) -> tuple[int, float]:
    """(sigma_1, sigma_2): sum of b_k^2 over the k-range and Lambda(m)^2 over the m-range."""
    k = np.arange(math.floor(block.k_low) + 1, math.floor(block.k_high) + 1)
    sigma1 = int(np.dot(b[k], b[k]))
    pp, logs = table.prime_powers_upto(block.m_high)
    sel = pp > block.m_low
    sigma2 = math.fsum(logs[sel] ** 2)
    return sigma1, sigma2
