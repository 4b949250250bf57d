"""Sieve-backed arithmetic functions.

The von Mangoldt function is stored structurally: for every ``n <= x_max``
the table records the prime ``p`` and exponent ``k`` with ``n = p**k`` (or
``0`` when ``n`` is not a prime power).  Logarithms are taken at query time
and the Chebyshev function is accumulated with compensated summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._summation import compensated_cumsum

DEFAULT_SEGMENT = 1 << 20
DEFAULT_MEM_BUDGET = 2 << 30

# Bytes per table entry: int32 base, int8 exponent, float64 psi.
_LAMBDA_BYTES_PER_ENTRY = 13


class BudgetError(MemoryError):
    """Requested table would exceed the configured memory budget."""


class TableRangeError(ValueError):
    """Query outside the range covered by a table."""


def primes_up_to(limit: int, segment: int = DEFAULT_SEGMENT) -> np.ndarray:
    """All primes ``<= limit`` via a segmented sieve of Eratosthenes."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    root = math.isqrt(limit)
    small = np.ones(root + 1, dtype=bool)
    small[:2] = False
    for p in range(2, math.isqrt(root) + 1):
        if small[p]:
            small[p * p::p] = False
    base = np.flatnonzero(small)

    chunks = []
    for lo in range(0, limit + 1, segment):
        hi = min(lo + segment, limit + 1)
        mark = np.ones(hi - lo, dtype=bool)
        if lo == 0:
            mark[:min(2, hi)] = False
        for p in base:
            p = int(p)
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            mark[start - lo::p] = False
        chunks.append(np.flatnonzero(mark) + lo)
    return np.concatenate(chunks).astype(np.int64)


@dataclass(frozen=True, eq=False)
class LambdaTable:
    """Prime-power structure of ``1..x_max`` with cumulative psi.

    ``base[n]`` is ``p`` when ``n = p**k`` and 0 otherwise; ``exponent[n]``
    is ``k``.  ``prime_powers`` lists the ``n`` with ``base[n] > 0`` in
    increasing order and ``log_base`` holds ``log p`` for each of them.
    """

    x_max: int
    base: np.ndarray
    exponent: np.ndarray
    psi_cumulative: np.ndarray
    prime_powers: np.ndarray
    log_base: np.ndarray

    def von_mangoldt(self) -> np.ndarray:
        """Dense array of Lambda(n), index 0..x_max."""
        out = np.zeros(self.x_max + 1)
        out[self.prime_powers] = self.log_base
        return out

    def lambda_at(self, n: int) -> float:
        p = int(self.base[n])
        return math.log(p) if p else 0.0

    def prime_powers_upto(self, y: float) -> tuple[np.ndarray, np.ndarray]:
        """(prime powers <= y, their log p)."""
        stop = np.searchsorted(self.prime_powers, math.floor(y), side="right")
        return self.prime_powers[:stop], self.log_base[:stop]

    def primes_upto(self, y: float) -> np.ndarray:
        pp, _ = self.prime_powers_upto(y)
        return pp[self.exponent[pp] == 1]

    def check_range(self, y: float, low: float = 0.0) -> int:
        if not (low <= y <= self.x_max):
            raise TableRangeError(f"y={y} outside [{low}, {self.x_max}]")
        return math.floor(y)


def build_lambda_table(
    x_max: int,
    segment: int = DEFAULT_SEGMENT,
    mem_budget: int = DEFAULT_MEM_BUDGET,
) -> LambdaTable:
    if x_max < 2:
        raise ValueError("x_max must be at least 2")
    need = _LAMBDA_BYTES_PER_ENTRY * (x_max + 1)
    if need > mem_budget:
        raise BudgetError(f"lambda table for x_max={x_max} needs ~{need} bytes > budget {mem_budget}")

    primes = primes_up_to(x_max, segment)
    base = np.zeros(x_max + 1, dtype=np.int32)
    exponent = np.zeros(x_max + 1, dtype=np.int8)
    base[primes] = primes
    exponent[primes] = 1
    k = 2
    while True:
        ps = primes[primes <= round(x_max ** (1.0 / k)) + 1]
        powers = ps ** k
        keep = powers <= x_max
        if not keep.any():
            break
        base[powers[keep]] = ps[keep]
        exponent[powers[keep]] = k
        k += 1

    prime_powers = np.flatnonzero(base).astype(np.int64)
    log_base = np.log(base[prime_powers].astype(np.float64))
    jumps = compensated_cumsum(log_base)
    # psi is constant between consecutive prime powers.
    counts = np.searchsorted(prime_powers, np.arange(x_max + 1), side="right")
    psi_cumulative = np.concatenate(([0.0], jumps))[counts]
    return LambdaTable(x_max, base, exponent, psi_cumulative, prime_powers, log_base)


def psi(table: LambdaTable, y: float) -> float:
    """Chebyshev psi(y) = sum of Lambda(n) for n <= y."""
    return float(table.psi_cumulative[table.check_range(y)])


def psi_progression(table: LambdaTable, y: float, q: int, a: int) -> float:
    """psi(y; q, a): Lambda summed over n <= y with n = a (mod q)."""
    table.check_range(y)
    if q < 1:
        raise ValueError("q must be positive")
    pp, logs = table.prime_powers_upto(y)
    return math.fsum(logs[pp % q == a % q])


class PiCounts(NamedTuple):
    pi: int
    pi_progression: int
    pi1: float
    pi1_progression: float


def pi_counts(table: LambdaTable, y: float, q: int, a: int) -> PiCounts:
    """Prime counts and the weighted count pi_1 = sum Lambda(n)/log n, n >= 2."""
    table.check_range(y, low=2)
    pp, _ = table.prime_powers_upto(y)
    k = table.exponent[pp].astype(np.int64)
    in_class = pp % q == a % q
    prime = k == 1
    return PiCounts(
        pi=int(prime.sum()),
        pi_progression=int((prime & in_class).sum()),
        pi1=math.fsum(1.0 / k),
        pi1_progression=math.fsum(1.0 / k[in_class]),
    )


def least_prime_divisor(q: int) -> float:
    """Smallest prime factor of q; ``math.inf`` for q = 1."""
    if q < 1:
        raise ValueError("q must be positive")
    if q == 1:
        return math.inf
    if q % 2 == 0:
        return 2
    d = 3
    while d * d <= q:
        if q % d == 0:
            return d
        d += 2
    return q


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] for 0 <= n <= limit, with spf[0] = 0 and spf[1] = 0."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_up_to(math.isqrt(limit)):
        p = int(p)
        block = spf[p * p::p]
        block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    return spf


def totients(limit: int) -> np.ndarray:
    """Euler phi for 0..limit (phi[0] = 0)."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit):
        p = int(p)
        phi[p::p] -= phi[p::p] // p
    return phi


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@dataclass(frozen=True, eq=False)
class MoebiusTable:
    limit: int
    mu: np.ndarray

    def __getitem__(self, n):
        return self.mu[n]


def build_moebius_table(limit: int) -> MoebiusTable:
    limit = max(int(limit), 1)
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_up_to(limit):
        p = int(p)
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p::p * p] = 0
    return MoebiusTable(limit, mu)


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def b_coefficient(k: int, V: float, mu: MoebiusTable) -> int:
    """b_k = sum of mu(d) over divisors d of k with d <= V."""
    if k < 1:
        raise ValueError("k must be positive")
    if mu.limit < min(k, math.floor(V)):
        raise TableRangeError(f"Moebius table limit {mu.limit} too small for k={k}, V={V}")
    return sum(int(mu[d]) for d in divisors(k) if d <= V)


@dataclass(frozen=True, eq=False)
class BkSeries:
    Y: int
    V: float
    values: np.ndarray  # index 0..Y, values[0] unused
    second_moment: int


def bk_series(Y: int, V: float, mu: MoebiusTable | None = None) -> np.ndarray:
    """b_k for k = 0..Y by a divisor sieve (exact integers)."""
    top = min(math.floor(V), Y)
    if mu is None or mu.limit < top:
        mu = build_moebius_table(top)
    b = np.zeros(Y + 1, dtype=np.int64)
    for d in range(1, top + 1):
        m = int(mu[d])
        if m:
            b[d::d] += m
    return b


def bk_second_moment(
    Y: int, V: float, mu: MoebiusTable | None = None, mem_budget: int = DEFAULT_MEM_BUDGET
) -> BkSeries:
    if Y < 1 or V < 1:
        raise ValueError("need Y >= 1 and V >= 1")
    if 8 * (Y + 1) > mem_budget:
        raise BudgetError(f"b_k series for Y={Y} exceeds memory budget")
    b = bk_series(Y, V, mu)
    return BkSeries(Y, V, b, int(np.dot(b[1:], b[1:])))
