"""Dirichlet characters modulo q.

The unit group (Z/qZ)* is decomposed by CRT into cyclic components: one per
odd prime power, generated by a primitive root, and for 2**e the pair
{-1, 5} (e >= 3) or {-1} (e = 2).  A character is an exponent vector ``c``
with one entry per component; its value at a unit ``n`` with discrete logs
``l_j(n)`` is ``exp(2*pi*i * sum_j c_j * l_j(n) / ord_j)``.  Rotations are
kept as exact integers modulo the group exponent and only converted to
complex numbers at the end.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._summation import compensated_cumsum
from .arith_tables import BudgetError, LambdaTable, TableRangeError

MAX_MODULUS = 1 << 22

# Cap on (characters x evaluation points) per vectorized chunk.
_CHUNK_ELEMENTS = 1 << 22


def factorize(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def _primitive_root_prime_power(p: int, e: int) -> int:
    pm1 = p - 1
    qs = [r for r, _ in factorize(pm1)]
    for g in range(2, p + 1):
        if all(pow(g, pm1 // r, p) != 1 for r in qs):
            break
    else:  # p == 2 never reaches here; p = 3 finds g = 2
        raise AssertionError
    if e >= 2 and pow(g, pm1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True, eq=False)
class CharacterGroup:
    """Character group of (Z/qZ)* with discrete-log tables.

    ``logs[r, j]`` is the discrete log of residue ``r`` on component ``j``
    (-1 for non-units).  ``component_prime[j]`` is the prime of the
    component, ``orders[j]`` its cyclic order.
    """

    modulus: int
    factors: tuple[tuple[int, int], ...]
    orders: tuple[int, ...]
    generators: tuple[int, ...]
    component_prime: tuple[int, ...]
    logs: np.ndarray = field(repr=False)
    exponent: int

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def units(self) -> np.ndarray:
        return np.flatnonzero(self.unit_mask)

    @property
    def unit_mask(self) -> np.ndarray:
        return np.gcd(np.arange(self.modulus), self.modulus) == 1

    def character(self, exponents) -> DirichletCharacter:
        exps = tuple(int(c) % o for c, o in zip(exponents, self.orders))
        if len(exps) != len(self.orders):
            raise ValueError("exponent vector has wrong length")
        return DirichletCharacter(self, exps)

    @property
    def principal(self) -> DirichletCharacter:
        return DirichletCharacter(self, (0,) * len(self.orders))

    def all_exponents(self) -> np.ndarray:
        if not self.orders:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*[np.arange(o) for o in self.orders], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)

    def characters(self) -> list[DirichletCharacter]:
        return [DirichletCharacter(self, tuple(int(c) for c in row)) for row in self.all_exponents()]

    def rotations(self, exponents: np.ndarray) -> np.ndarray:
        """Integer rotations t (mod exponent) for every residue; -1 off units."""
        exponents = np.atleast_2d(np.asarray(exponents, dtype=np.int64))
        if not self.orders:
            t = np.zeros((exponents.shape[0], self.modulus), dtype=np.int64)
        else:
            scale = np.array([self.exponent // o for o in self.orders], dtype=np.int64)
            logs = np.where(self.logs >= 0, self.logs, 0)
            t = ((exponents * scale) @ logs.T) % self.exponent
        t[:, ~self.unit_mask] = -1
        return t

    def value_table(self, exponents: np.ndarray) -> np.ndarray:
        """chi(r) for each character row and residue r in 0..q-1."""
        t = self.rotations(exponents)
        roots = _roots_of_unity(self.exponent)
        return np.where(t >= 0, roots[np.maximum(t, 0)], 0)


@lru_cache(maxsize=64)
def _roots_of_unity(L: int) -> np.ndarray:
    t = np.arange(L)
    roots = np.exp(2j * np.pi * t / L)
    # Exact values at the quarter turns.
    for k, v in ((0, 1), (1, 1j), (2, -1), (3, -1j)):
        if (k * L) % 4 == 0:
            roots[k * L // 4] = v
    return roots


def _local_logs(p: int, e: int) -> tuple[list[int], list[int], list[np.ndarray]]:
    """Generators, orders and discrete-log arrays (indexed mod p**e) for one prime power."""
    pe = p ** e
    if p != 2:
        g = _primitive_root_prime_power(p, e)
        order = pe // p * (p - 1)
        loc = np.full(pe, -1, dtype=np.int64)
        cur = 1
        for k in range(order):
            loc[cur] = k
            cur = cur * g % pe
        return [g], [order], [loc]
    if e == 1:
        return [], [], []
    if e == 2:
        loc = np.full(4, -1, dtype=np.int64)
        loc[1], loc[3] = 0, 1
        return [3], [2], [loc]
    half = pe // 4
    sign = np.full(pe, -1, dtype=np.int64)
    five = np.full(pe, -1, dtype=np.int64)
    cur = 1
    for k in range(half):
        sign[cur], five[cur] = 0, k
        sign[pe - cur], five[pe - cur] = 1, k
        cur = cur * 5 % pe
    return [pe - 1, 5], [2, half], [sign, five]


@lru_cache(maxsize=4096)
def character_group(q: int) -> CharacterGroup:
    if q < 1:
        raise ValueError("modulus must be positive")
    if q > MAX_MODULUS:
        raise BudgetError(f"modulus {q} exceeds factorization budget {MAX_MODULUS}")
    factors = factorize(q)
    residues = np.arange(q)
    orders, gens, comp_prime, columns = [], [], [], []
    for p, e in factors:
        pe = p ** e
        rest = q // pe
        local_gens, local_orders, local_logs = _local_logs(p, e)
        for g, o, loc in zip(local_gens, local_orders, local_logs):
            # CRT lift: g mod p**e, 1 mod the cofactor.
            lift = (g * rest * pow(rest, -1, pe) + pe * pow(pe, -1, rest)) % q if rest > 1 else g % q
            gens.append(lift)
            orders.append(o)
            comp_prime.append(p)
            columns.append(loc[residues % pe])
    if columns:
        logs = np.stack(columns, axis=1)
        logs[np.gcd(residues, q) != 1] = -1
    else:
        logs = np.zeros((q, 0), dtype=np.int64)
    exponent = math.lcm(*orders) if orders else 1
    return CharacterGroup(q, factors, tuple(orders), tuple(gens), tuple(comp_prime), logs, exponent)


@dataclass(frozen=True)
class DirichletCharacter:
    group: CharacterGroup
    exponents: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.group.modulus

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    def rotation(self, n: int) -> Fraction | None:
        """chi(n) = exp(2 pi i * rotation); None when gcd(n, q) > 1."""
        q = self.group.modulus
        if math.gcd(n, q) != 1:
            return None
        r = n % q
        turn = Fraction(0)
        for j, (c, o) in enumerate(zip(self.exponents, self.group.orders)):
            turn += Fraction(c * int(self.group.logs[r, j]), o)
        return turn - math.floor(turn)

    def __call__(self, n: int) -> complex:
        return evaluate(self, n)

    def values(self) -> np.ndarray:
        return self.group.value_table(np.array([self.exponents], dtype=np.int64).reshape(1, -1))[0]

    def __repr__(self):
        return f"DirichletCharacter(q={self.group.modulus}, exponents={self.exponents})"

    def __hash__(self):
        return hash((self.group.modulus, self.exponents))

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.group.modulus == other.group.modulus
            and self.exponents == other.exponents
        )


def evaluate(chi: DirichletCharacter, n: int) -> complex:
    turn = chi.rotation(n)
    if turn is None:
        return 0j
    exact = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}
    if turn in exact:
        return exact[turn]
    angle = 2 * math.pi * turn.numerator / turn.denominator
    return complex(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class ConductorData:
    conductor: int
    primitive: DirichletCharacter


def _local_conductors(orders, component_prime, exponents) -> dict[int, int]:
    """Prime -> exponent of that prime in the conductor."""
    by_prime: dict[int, list[tuple[int, int]]] = {}
    for c, o, p in zip(exponents, orders, component_prime):
        by_prime.setdefault(p, []).append((int(c) % o, o))
    out = {}
    for p, comps in by_prime.items():
        if p != 2:
            (c, o), = comps
            if c == 0:
                out[p] = 0
                continue
            char_order = o // math.gcd(c, o)
            s = 0
            while char_order % p == 0:
                char_order //= p
                s += 1
            out[p] = s + 1
        elif len(comps) == 1:
            out[2] = 2 if comps[0][0] else 0
        else:
            (ca, _), (cb, ob) = comps
            order_b = ob // math.gcd(cb, ob)
            s = order_b.bit_length() - 1
            out[2] = s + 2 if s >= 1 else (2 if ca else 0)
    return out


def conductor_modulus(chi: DirichletCharacter) -> int:
    return math.prod(p ** f for p, f in _local_conductors(chi.group.orders, chi.group.component_prime, chi.exponents).items())


def is_primitive(chi: DirichletCharacter) -> bool:
    return conductor_modulus(chi) == chi.modulus


def conductor(chi: DirichletCharacter) -> ConductorData:
    """Conductor q* and the primitive character mod q* inducing chi."""
    q = chi.modulus
    qs = conductor_modulus(chi)
    star = character_group(qs)
    exps = []
    for g, o in zip(star.generators, star.orders):
        n = g
        while math.gcd(n, q) != 1:
            n += qs
        c = chi.rotation(n) * o
        if c.denominator != 1:
            raise AssertionError("character does not factor through its conductor")
        exps.append(int(c) % o)
    return ConductorData(qs, DirichletCharacter(star, tuple(exps)))


def induce(chi_star: DirichletCharacter, q: int) -> DirichletCharacter:
    """The character mod q induced by chi_star (its modulus must divide q)."""
    qs = chi_star.modulus
    if q % qs:
        raise ValueError(f"{qs} does not divide {q}")
    group = character_group(q)
    exps = []
    for g, o in zip(group.generators, group.orders):
        c = chi_star.rotation(g % qs if qs > 1 else 0) * o
        if c.denominator != 1:
            raise AssertionError("inconsistent induction")
        exps.append(int(c) % o)
    return DirichletCharacter(group, tuple(exps))


def primitive_exponents(q: int) -> np.ndarray:
    """Exponent vectors (rows) of the primitive characters mod q."""
    group = character_group(q)
    per_prime: list[list[tuple[int, ...]]] = []
    j = 0
    for p, e in group.factors:
        ncomp = sum(1 for cp in group.component_prime if cp == p)
        orders = group.orders[j:j + ncomp]
        # For q = 2 * odd there are no components at 2 and nothing is primitive.
        per_prime.append([
            combo for combo in itertools.product(*[range(o) for o in orders])
            if _local_conductors(orders, (p,) * ncomp, combo).get(p, 0) == e
        ])
        j += ncomp
    rows = [sum(parts, ()) for parts in itertools.product(*per_prime)]
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(group.orders))


def enumerate_primitive(q: int) -> list[DirichletCharacter]:
    group = character_group(q)
    return [DirichletCharacter(group, tuple(int(c) for c in row)) for row in primitive_exponents(q)]


def _twisted_partial_sums(
    group: CharacterGroup, exponents: np.ndarray, pp: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    vt = group.value_table(exponents)
    return compensated_cumsum((vt[:, pp % group.modulus] * weights).T).T


def twisted_maxima(
    group: CharacterGroup,
    exponents: np.ndarray,
    x: float,
    table: LambdaTable,
    subtract_psi: np.ndarray | None = None,
) -> np.ndarray:
    """max over integer y <= x of |psi(y, chi)| for each exponent row.

    With ``subtract_psi`` (a boolean per row) the plain psi(y) is removed
    from the flagged rows, giving psi'(y, chi) for principal characters.
    """
    if x > table.x_max:
        raise TableRangeError(f"x={x} exceeds table range {table.x_max}")
    exponents = np.atleast_2d(np.asarray(exponents, dtype=np.int64))
    k = exponents.shape[0]
    pp, logs = table.prime_powers_upto(x)
    out = np.zeros(k)
    if len(pp) == 0 or k == 0:
        return out
    step = max(1, _CHUNK_ELEMENTS // len(pp))
    for lo in range(0, k, step):
        sums = _twisted_partial_sums(group, exponents[lo:lo + step], pp, logs)
        if subtract_psi is not None:
            flags = np.asarray(subtract_psi[lo:lo + step], dtype=bool)
            if flags.any():
                sums[flags] -= compensated_cumsum(logs)
        out[lo:lo + step] = np.abs(sums).max(axis=1)
    return out


def psi_twisted_max(chi: DirichletCharacter, x: float, table: LambdaTable) -> tuple[float, int]:
    """(max_{1 <= y <= x} |psi(y, chi)|, smallest integer y attaining it)."""
    if x > table.x_max or x < 1:
        raise TableRangeError(f"x={x} outside [1, {table.x_max}]")
    pp, logs = table.prime_powers_upto(x)
    if len(pp) == 0:
        return 0.0, 1
    exps = np.array([chi.exponents], dtype=np.int64).reshape(1, -1)
    mods = np.abs(_twisted_partial_sums(chi.group, exps, pp, logs)[0])
    i = int(np.argmax(mods))
    if mods[i] == 0.0:
        return 0.0, 1
    return float(mods[i]), int(pp[i])


def psi_prime_max(chi: DirichletCharacter, x: float, table: LambdaTable) -> float:
    """max over integer 2 <= y <= x of |psi'(y, chi)|."""
    if x < 2:
        raise TableRangeError("psi' maximum needs x >= 2")
    exps = np.array([chi.exponents], dtype=np.int64).reshape(1, -1)
    return float(twisted_maxima(chi.group, exps, x, table, subtract_psi=np.array([chi.is_principal]))[0])
