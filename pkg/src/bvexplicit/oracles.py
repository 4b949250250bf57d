"""Deliberately naive reference implementations.

Everything here is written straight from the definitions with trial
division and plain loops, sharing no code with the sieve or vectorized
paths it is used to check.
"""

from __future__ import annotations

import math


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def von_mangoldt(n: int) -> float:
    if n < 2:
        return 0.0
    for p in range(2, n + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return math.log(p) if n == 1 else 0.0
    return 0.0


def moebius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


def phi(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def psi(y: float) -> float:
    return math.fsum(von_mangoldt(n) for n in range(1, math.floor(y) + 1))


def psi_progression(y: float, q: int, a: int) -> float:
    return math.fsum(von_mangoldt(n) for n in range(1, math.floor(y) + 1) if (n - a) % q == 0)


def psi_twisted(y: float, chi) -> complex:
    """sum_{n <= y} Lambda(n) chi(n), chi any callable."""
    total = 0j
    for n in range(1, math.floor(y) + 1):
        lam = von_mangoldt(n)
        if lam:
            total += lam * chi(n)
    return total


def b_coefficient(k: int, V: float) -> int:
    return sum(moebius(d) for d in range(1, k + 1) if k % d == 0 and d <= V)


def vaughan_lambdas(n: int, U: float, V: float) -> tuple[float, float, float, float]:
    """The four components by literal enumeration of factorizations of n."""
    lam1 = von_mangoldt(n) if n <= U else 0.0
    lam2 = sum(moebius(d) * math.log(n // d) for d in range(1, n + 1) if n % d == 0 and d <= V)
    lam3 = 0.0
    for m in range(1, n + 1):
        if n % m or m > U:
            continue
        for d in range(1, n // m + 1):
            if (n // m) % d == 0 and d <= V:
                lam3 -= von_mangoldt(m) * moebius(d)
    lam4 = 0.0
    for m in range(1, n + 1):
        if n % m == 0 and m > U and n // m > V:
            lam4 -= von_mangoldt(m) * b_coefficient(n // m, V)
    return lam1, lam2, lam3, lam4


def characters_by_brute_force(q: int) -> list[dict[int, complex]]:
    """All characters mod q as {unit: value}, found by searching homomorphisms.

    Only practical for very small q: values on each unit are drawn from the
    phi(q)-th roots of unity and kept when multiplicative.
    """
    units = [a for a in range(1, q + 1) if math.gcd(a, q) == 1] if q > 1 else [0]
    if q == 1:
        return [{0: 1 + 0j}]
    order = len(units)
    roots = [complex(math.cos(2 * math.pi * k / order), math.sin(2 * math.pi * k / order)) for k in range(order)]
    chars = [{1: 1 + 0j}]
    for u in units:
        if u == 1:
            continue
        grown = []
        for partial in chars:
            if u in partial:
                grown.append(partial)
                continue
            for r in roots:
                cand = dict(partial)
                cand[u] = r
                ok = True
                for a, va in list(cand.items()):
                    for b, vb in list(cand.items()):
                        c = a * b % q
                        if c in cand and abs(cand[c] - va * vb) > 1e-9:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    grown.append(cand)
        chars = grown
    # Close each partial assignment and drop duplicates.
    out = []
    for c in chars:
        if len(c) == order and all(abs(c[a * b % q] - c[a] * c[b]) < 1e-9 for a in units for b in units):
            if not any(all(abs(c[a] - d[a]) < 1e-9 for a in units) for d in out):
                out.append(c)
    return out
