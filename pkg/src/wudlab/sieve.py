"""Segmented evaluation of f(n) mod q over ranges of n, with per-n factor
statistics: k-th largest prime factors with multiplicity, the convenient
classification, and the additive functions A(n) and A*(n).

The engine never materializes f(n) as a full integer; it carries residues
mod q and derived flags only. Each segment is processed with vectorized
numpy passes over the primes below sqrt(hi): exponents are divided out,
rule values f(p^e) mod q are multiplied in from a per-prime table, and the
largest prime factors are maintained in a small stack of slot arrays
(ascending prime order means each new prime factor pushes on top).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from wudlab.errors import GuardExceededError, InvalidConfigError
from wudlab.number_core import factor, primes_upto
from wudlab.poly import IntPoly

SIEVE_GUARD = 10**8
RECORD_GUARD = 10**6
DEFAULT_SEGMENT = 1 << 20

RULES = (
    "completely-multiplicative",   # f(p^e) = F(p)^e
    "polynomial-at-prime-powers",  # f(p^e) = F(p^e)
    "euler-like",                  # f(p^e) = p^(e-1) F(p)
    "custom-table",                # explicit (p, e) -> value for e >= 2
)


@dataclass(frozen=True)
class MultiplicativeSpec:
    """A multiplicative f pinned down by F at primes plus a prime-power rule.

    Every rule satisfies f(p) = F(p) and f(1) = 1; they differ only at
    proper prime powers, where the defining property leaves f free.
    """

    F: IntPoly
    rule: str = "euler-like"
    custom_table: dict[tuple[int, int], int] | None = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise InvalidConfigError(f"unknown rule {self.rule!r}; choose from {RULES}")
        if self.rule == "custom-table" and self.custom_table is None:
            raise InvalidConfigError("custom-table rule needs an explicit table")

    def value_at_prime_power(self, p: int, e: int, q: int) -> int:
        """f(p^e) mod q."""
        if e == 0:
            return 1 % q
        if e == 1:
            return self.F.eval_mod(p, q)
        if self.rule == "completely-multiplicative":
            return pow(self.F.eval_mod(p, q), e, q)
        if self.rule == "polynomial-at-prime-powers":
            return self.F.eval_mod(pow(p, e, q), q)
        if self.rule == "euler-like":
            return pow(p, e - 1, q) * self.F.eval_mod(p, q) % q
        try:
            return self.custom_table[(p, e)] % q
        except KeyError:
            raise InvalidConfigError(
                f"custom table has no entry for prime power ({p}, {e})"
            ) from None

    def prime_power_table(self, p: int, max_e: int, q: int) -> np.ndarray:
        return np.array(
            [self.value_at_prime_power(p, e, q) for e in range(max_e + 1)],
            dtype=np.int64,
        )

    def label(self) -> str:
        return f"{self.rule}({self.F})"


def f_mod(spec: MultiplicativeSpec, n: int, q: int) -> tuple[int, bool]:
    """(f(n) mod q, gcd(f(n), q) == 1), via the canonical factorization."""
    if n < 1:
        raise InvalidConfigError("f_mod needs n >= 1")
    val = 1 % q
    for p, e in factor(n).factors:
        val = val * spec.value_at_prime_power(p, e, q) % q
    return val, math.gcd(val, q) == 1


@dataclass(frozen=True)
class ConvenientParams:
    """x, delta and the derived cutoffs J, y, z of the convenient split."""

    x: float
    delta: float
    J: int
    y: float
    z: float

    @classmethod
    def from_x(cls, x: float, delta: float = 1.0, J: int | None = None,
               y: float | None = None) -> "ConvenientParams":
        """Derive J = floor(log log log x) and y = exp((log x)^(delta/2)).

        Explicit J/y overrides are allowed (any slowly growing J works for
        the heuristics; desk-scale x only ever reaches J = 1 naturally, and
        x <= e^(e^e) has no valid J at all without an override).
        """
        if not 0 < delta <= 1:
            raise InvalidConfigError(f"delta must be in (0, 1], got {delta}")
        logx = math.log(x)
        j_natural = math.floor(math.log(math.log(logx))) if logx > math.e**math.e else 0
        if J is None:
            if j_natural < 1:
                raise InvalidConfigError(
                    f"x={x} is too small for J >= 1; pass an explicit J override"
                )
            J = j_natural
        if J < 1:
            raise InvalidConfigError("J must be >= 1")
        if y is None:
            y = math.exp(logx ** (delta / 2))
        z = x ** (1.0 / math.log(logx)) if logx > 1 else x
        return cls(x=x, delta=delta, J=J, y=y, z=z)


@dataclass(frozen=True)
class FactorizationRecord:
    """Exact per-n factor data (the slow, per-n reference path)."""

    n: int
    prime_powers: tuple[tuple[int, int], ...]  # descending by p

    @classmethod
    def of(cls, n: int) -> "FactorizationRecord":
        return cls(n=n, prime_powers=tuple(reversed(factor(n).factors)))

    @property
    def Omega(self) -> int:
        return sum(e for _, e in self.prime_powers)

    def P(self, k: int) -> int:
        """k-th largest prime factor with multiplicity; 1 when Omega < k."""
        if k < 1:
            raise InvalidConfigError("P_k needs k >= 1")
        i = k
        for p, e in self.prime_powers:
            if i <= e:
                return p
            i -= e
        return 1

    def rough_smooth(self, y: float) -> tuple[int, int]:
        """(largest divisor on primes > y, largest divisor on primes <= y)."""
        rough = smooth = 1
        for p, e in self.prime_powers:
            if p > y:
                rough *= p**e
            else:
                smooth *= p**e
        return rough, smooth

    def L(self, y: float) -> float:
        """max(y, P(n)) -- the lower cutoff for primes appended to n."""
        return max(y, self.P(1))

    def is_convenient(self, params: ConvenientParams) -> bool:
        if self.n > params.x:
            return False
        tops = [self.P(k) for k in range(1, params.J + 2)]
        if tops[params.J - 1] <= params.y:
            return False
        return all(tops[i] != tops[i + 1] for i in range(params.J))

    def additive_sums(self) -> tuple[int, int]:
        """(A(n), A*(n)): sum and alternating sum of prime factors with
        multiplicity, largest first."""
        a = astar = 0
        j = 0
        for p, e in self.prime_powers:
            a += e * p
            for _ in range(e):
                astar += p if j % 2 == 0 else -p
                j += 1
        return a, astar


def additive_values(n: int, q: int) -> tuple[int, int]:
    """(A(n) mod q, A*(n) mod q). A(1) = A*(1) = 0 by the empty sum."""
    a, astar = FactorizationRecord.of(n).additive_sums()
    return a % q, astar % q


@dataclass
class SegmentData:
    """Vectorized per-n data for n in [lo, hi)."""

    lo: int
    hi: int
    q: int
    fmod: np.ndarray      # f(n) mod q
    coprime: np.ndarray   # gcd(f(n) mod q, q) == 1
    Omega: np.ndarray
    A: np.ndarray         # A(n), exact
    Astar: np.ndarray     # A*(n), exact signed
    slots: np.ndarray     # (k_slots, hi-lo): largest prime factors, descending

    @property
    def n(self) -> np.ndarray:
        return np.arange(self.lo, self.hi, dtype=np.int64)

    def P(self, k: int) -> np.ndarray:
        """P_k(n) for all n in the segment (1 where Omega < k)."""
        if k > self.slots.shape[0]:
            raise GuardExceededError(f"segment tracked only {self.slots.shape[0]} slots")
        return np.where(self.slots[k - 1] > 0, self.slots[k - 1], 1)

    def convenient(self, params: ConvenientParams) -> np.ndarray:
        J = params.J
        if J + 1 > self.slots.shape[0]:
            raise GuardExceededError("need k_slots >= J + 1 for the convenient flag")
        ok = self.slots[J - 1] > params.y
        for i in range(J):
            ok &= self.slots[i] != self.slots[i + 1]
        return ok


def _sieve_segment(spec: MultiplicativeSpec, q: int, lo: int, hi: int,
                   k_slots: int, small_primes: np.ndarray,
                   coprime_lookup: np.ndarray) -> SegmentData:
    size = hi - lo
    rem = np.arange(lo, hi, dtype=np.int64)
    fmod = np.full(size, 1 % q, dtype=np.int64)
    omega = np.zeros(size, dtype=np.int64)
    a_sum = np.zeros(size, dtype=np.int64)
    salt = np.zeros(size, dtype=np.int64)  # ascending-order alternating sum
    slots = np.zeros((k_slots, size), dtype=np.int64)

    def push(idx: np.ndarray, e: np.ndarray | int, p: int | np.ndarray) -> None:
        # new prime factors are >= all previous (ascending scan), so they
        # stack on top of the slot arrays
        if isinstance(e, int):
            s = min(e, k_slots)
            if s < k_slots:
                slots[s:, idx] = slots[:-s, idx]
            slots[:s, idx] = p
            return
        for ev in np.unique(e):
            sel = idx[e == ev]
            s = min(int(ev), k_slots)
            if s < k_slots:
                slots[s:, sel] = slots[:-s, sel]
            slots[:s, sel] = p

    for p in small_primes:
        p = int(p)
        if p * p >= hi:
            break
        start = -(lo // -p) * p  # first multiple of p in [lo, hi)
        if start >= hi:
            continue
        idx = np.arange(start - lo, size, p, dtype=np.int64)
        r = rem[idx] // p
        e = np.ones(idx.size, dtype=np.int64)
        active = np.nonzero(r % p == 0)[0]
        while active.size:
            r[active] //= p
            e[active] += 1
            active = active[r[active] % p == 0]
        rem[idx] = r
        max_e = int(e.max())
        tab = spec.prime_power_table(p, max_e, q)
        fmod[idx] = fmod[idx] * tab[e] % q
        a_sum[idx] += e * p
        sign = 1 - 2 * (omega[idx] & 1)
        salt[idx] += np.where((e & 1) == 1, sign * p, 0)
        omega[idx] += e
        push(idx, e, p)

    big = np.nonzero(rem > 1)[0]
    if big.size:
        pbig = rem[big]
        vals = np.zeros(big.size, dtype=np.int64)
        vb = pbig % q
        for c in reversed(spec.F.coeffs):
            vals = (vals * vb + c) % q
        fmod[big] = fmod[big] * vals % q
        a_sum[big] += pbig
        salt[big] += (1 - 2 * (omega[big] & 1)) * pbig
        omega[big] += 1
        push(big, 1, pbig)

    if lo <= 1 < hi:
        fmod[1 - lo] = 1 % q  # f(1) = 1
    astar = np.where(omega % 2 == 1, salt, -salt)
    coprime = coprime_lookup[fmod]
    return SegmentData(lo=lo, hi=hi, q=q, fmod=fmod, coprime=coprime,
                       Omega=omega, A=a_sum, Astar=astar, slots=slots)


def iter_segments(spec: MultiplicativeSpec, lo: int, hi: int, q: int,
                  k_slots: int = 4,
                  segment_size: int = DEFAULT_SEGMENT) -> Iterator[SegmentData]:
    """Process [lo, hi] (inclusive on both ends) in independent segments.

    Results are identical for any segmentation: each segment is a pure
    function of its own range.
    """
    if hi > SIEVE_GUARD:
        raise GuardExceededError(f"sieve guard {SIEVE_GUARD} exceeded by hi={hi}")
    if lo < 1:
        raise InvalidConfigError("sieve range starts at n >= 1")
    if q < 1:
        raise InvalidConfigError("modulus must be >= 1")
    small = primes_upto(math.isqrt(hi))
    coprime_lookup = np.gcd(np.arange(q, dtype=np.int64), q) == 1
    for seg_lo in range(lo, hi + 1, segment_size):
        seg_hi = min(seg_lo + segment_size, hi + 1)
        yield _sieve_segment(spec, q, seg_lo, seg_hi, k_slots, small, coprime_lookup)


@dataclass(frozen=True)
class SieveRecord:
    n: int
    f_mod_q: int
    coprime: bool
    Omega: int
    P1: int
    P2: int
    A_mod_q: int
    Astar_mod_q: int
    convenient: bool


def sieve_range(spec: MultiplicativeSpec, lo: int, hi: int, q: int,
                params: ConvenientParams,
                segment_size: int = DEFAULT_SEGMENT) -> Iterator[SieveRecord]:
    """Per-n records for n in [lo, hi]; for desk-scale record dumps."""
    if hi - lo + 1 > RECORD_GUARD:
        raise GuardExceededError(f"record streaming capped at {RECORD_GUARD} values")
    k_slots = max(params.J + 1, 2)
    for seg in iter_segments(spec, lo, hi, q, k_slots=k_slots,
                             segment_size=segment_size):
        conv = seg.convenient(params)
        p1, p2 = seg.P(1), seg.P(2)
        for i in range(seg.hi - seg.lo):
            yield SieveRecord(
                n=seg.lo + i,
                f_mod_q=int(seg.fmod[i]),
                coprime=bool(seg.coprime[i]),
                Omega=int(seg.Omega[i]),
                P1=int(p1[i]),
                P2=int(p2[i]),
                A_mod_q=int(seg.A[i] % q),
                Astar_mod_q=int(seg.Astar[i] % q),
                convenient=bool(conv[i]),
            )
