"""Integer and modular-arithmetic foundation.

Factorization into prime powers, CRT, cyclic unit-group structure modulo
odd prime powers, and reciprocal sums of primes in arithmetic progressions.
All values are immutable after construction and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from wudlab.errors import GuardExceededError, InvalidConfigError

# Deterministic Miller-Rabin witnesses, valid for n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_TRIAL_LIMIT = 10**6  # trial-divide with primes below this, MR the cofactor


@lru_cache(maxsize=8)
def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (simple Eratosthenes)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (valid far beyond word size)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FactoredModulus:
    """A positive integer with its canonical prime-power factorization."""

    q: int
    factors: tuple[tuple[int, int], ...]  # (prime, exponent), primes increasing
    phi: int
    omega: int

    def __post_init__(self):
        prod, phi = 1, 1
        last = 1
        for ell, e in self.factors:
            assert ell > last and e >= 1, "factors must be sorted with e >= 1"
            last = ell
            prod *= ell**e
            phi *= ell ** (e - 1) * (ell - 1)
        assert prod == self.q and phi == self.phi
        assert self.omega == len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def prime_powers(self) -> tuple[int, ...]:
        return tuple(ell**e for ell, e in self.factors)


def factor(n: int) -> FactoredModulus:
    """Canonical factorization of n >= 1. factor(1) has an empty factor list."""
    if n < 1:
        raise InvalidConfigError(f"cannot factor n={n}; need n >= 1")
    factors: list[tuple[int, int]] = []
    m = n
    for p in (2, 3, 5):
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
    p = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)  # step pattern coprime to 30
    i = 0
    while p * p <= m and p < _TRIAL_LIMIT:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += wheel[i]
        i = (i + 1) % 8
    if m > 1:
        if is_prime(m):
            factors.append((m, 1))
        else:
            # Cofactor with all prime factors >= 10^6: at most two of them
            # at word scale; fall back to a sqrt scan.
            r = math.isqrt(m)
            while m % r:
                r -= 1
            assert r > 1 and is_prime(r) and is_prime(m // r)
            small, big = sorted((r, m // r))
            if small == big:
                factors.append((small, 2))
            else:
                factors.extend([(small, 1), (big, 1)])
    factors.sort()
    phi = 1
    for ell, e in factors:
        phi *= ell ** (e - 1) * (ell - 1)
    return FactoredModulus(q=n, factors=tuple(factors), phi=phi, omega=len(factors))


def crt_solve(residues: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """Solve x = r_i (mod m_i) for pairwise coprime m_i.

    Returns (x, M) with 0 <= x < M = prod(m_i). Rejects non-coprime moduli,
    naming the offending pair.
    """
    if not residues:
        raise InvalidConfigError("crt_solve needs at least one congruence")
    x, m = residues[0][0] % residues[0][1], residues[0][1]
    for r_i, m_i in residues[1:]:
        g = math.gcd(m, m_i)
        if g != 1:
            raise InvalidConfigError(
                f"moduli {m} and {m_i} share factor {g}; CRT needs pairwise coprime moduli"
            )
        # x + m*t = r_i (mod m_i)
        t = (r_i - x) * pow(m, -1, m_i) % m_i
        x += m * t
        m *= m_i
    return x % m, m


@dataclass(frozen=True)
class UnitGroupView:
    """Cyclic unit group mod an odd prime power, with a discrete-log table.

    log_table[u] is the exponent r with g^r = u (mod ell^e), or -1 for
    non-units. The generator is the smallest one, for reproducibility.
    """

    ell: int
    e: int
    modulus: int
    generator: int
    order: int
    log_table: np.ndarray

    def log(self, u: int) -> int:
        r = int(self.log_table[u % self.modulus])
        if r < 0:
            raise InvalidConfigError(f"{u} is not a unit mod {self.modulus}")
        return r

    def pow_g(self, k: int) -> int:
        return pow(self.generator, k % self.order, self.modulus)


@lru_cache(maxsize=256)
def unit_group(ell: int, e: int, guard: int = 10**7) -> UnitGroupView:
    """UnitGroupView for (Z/ell^e)^* with ell an odd prime, e >= 1."""
    if ell == 2:
        raise InvalidConfigError("unit groups mod powers of 2 are not supported")
    if e < 1 or not is_prime(ell):
        raise InvalidConfigError(f"unit_group needs an odd prime and e >= 1, got ({ell}, {e})")
    m = ell**e
    order = ell ** (e - 1) * (ell - 1)
    if order > guard:
        raise GuardExceededError(f"phi({ell}^{e}) = {order} exceeds table guard {guard}")
    cofactors = [order // p for p, _ in factor(order).factors]
    g = None
    for cand in range(2, m):
        if cand % ell == 0:
            continue
        if all(pow(cand, c, m) != 1 for c in cofactors):
            g = cand
            break
    assert g is not None, "cyclic group must have a generator"
    table = np.full(m, -1, dtype=np.int64)
    u = 1
    for r in range(order):
        table[u] = r
        u = u * g % m
    assert u == 1, "generator order mismatch"
    return UnitGroupView(ell=ell, e=e, modulus=m, generator=g, order=order, log_table=table)


@dataclass(frozen=True)
class ProgressionSumReport:
    """sum_{p <= x, p = a (q)} 1/p against the Norton-Pomerance main term."""

    x: float
    q: int
    a: int
    sum: float
    least_prime: int | None
    predicted: float | None
    residual: float | None


def progression_prime_sums(x: float, q: int) -> dict[int, ProgressionSumReport]:
    """Reciprocal prime sums in every coprime class mod q, one prime pass.

    The main-term comparison is log log x / phi(q) + 1/p_{q,a}, with
    p_{q,a} the least prime in the class. q = 1 is the single class a = 0
    summing over all primes <= x.
    """
    if x < max(3, q):
        raise InvalidConfigError(f"need x >= max(3, q), got x={x}, q={q}")
    ps = primes_upto(int(x))
    loglogx = math.log(math.log(x))
    if q == 1:
        s = math.fsum(1.0 / p for p in ps)
        pred = loglogx + 0.5  # 1/p_{1,0} convention: least prime is 2
        return {
            0: ProgressionSumReport(
                x=x, q=1, a=0, sum=s, least_prime=2, predicted=pred, residual=s - pred
            )
        }
    classes = ps % q
    phi_q = factor(q).phi
    out: dict[int, ProgressionSumReport] = {}
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        sel = ps[classes == a]
        s = math.fsum(1.0 / p for p in sel)
        least = int(sel[0]) if sel.size else None
        if least is None:
            out[a] = ProgressionSumReport(x=x, q=q, a=a, sum=s, least_prime=None,
                                          predicted=None, residual=None)
        else:
            pred = loglogx / phi_q + 1.0 / least
            out[a] = ProgressionSumReport(x=x, q=q, a=a, sum=s, least_prime=least,
                                          predicted=pred, residual=s - pred)
    return out
