"""Smallest-prime-factor sieve and the multiplicative functions built on it.

Everything downstream (forms, witness sets, character experiments) factors
integers through a single immutable :class:`FactorSieve`, so factorization is
O(number of prime factors) per query.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

import numpy as np

# Hard cap on sieve size: fail loudly instead of thrashing.
SIEVE_MEMORY_CAP = 100_000_000


class BudgetError(ValueError):
    """Raised when a request exceeds a configured compute/memory budget."""


@dataclass(frozen=True)
class FactorSieve:
    """Immutable table of smallest prime factors for 2 <= n <= limit."""

    limit: int
    spf: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.limit < 2:
            raise ValueError(f"sieve limit must be >= 2, got {self.limit}")

    def check_range(self, n: int) -> None:
        if not 1 <= n <= self.limit:
            raise ValueError(f"n={n} outside sieve range [1, {self.limit}]")

    def is_prime(self, n: int) -> bool:
        self.check_range(n)
        return n >= 2 and self.spf[n] == n


def build_sieve(limit: int) -> FactorSieve:
    """Build a smallest-prime-factor table for all n <= limit."""
    if limit < 2:
        raise ValueError(f"sieve limit must be >= 2, got {limit}")
    if limit > SIEVE_MEMORY_CAP:
        raise BudgetError(
            f"sieve limit {limit} exceeds memory cap {SIEVE_MEMORY_CAP}"
        )
    spf = np.zeros(limit + 1, dtype=np.int64)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            block = spf[i::i]
            block[block == 0] = i
            if i * i > limit:
                # All remaining unset entries are primes; set them in one pass.
                rest = spf[i:]
                unset = rest == 0
                rest[unset] = np.flatnonzero(unset) + i
                break
    return FactorSieve(limit=limit, spf=spf)


def factorize(sieve: FactorSieve, n: int) -> list[tuple[int, int]]:
    """Return the prime factorization of n as a list of (p, exponent) pairs."""
    sieve.check_range(n)
    out: list[tuple[int, int]] = []
    spf = sieve.spf
    while n > 1:
        p = int(spf[n])
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out.append((p, e))
    return out


def big_omega(sieve: FactorSieve, n: int) -> int:
    """Omega(n): number of prime factors counted with multiplicity."""
    return sum(e for _, e in factorize(sieve, n))


def small_omega(sieve: FactorSieve, n: int) -> int:
    """omega(n): number of distinct prime factors."""
    return len(factorize(sieve, n))


def euler_phi(sieve: FactorSieve, n: int) -> int:
    """Euler totient, via the prime factorization."""
    phi = 1
    for p, e in factorize(sieve, n):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def divisors(sieve: FactorSieve, n: int) -> list[int]:
    """All divisors of n, sorted increasingly."""
    divs = [1]
    for p, e in factorize(sieve, n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def omega_partial(sieve: FactorSieve, n: int, t: float) -> int:
    """Omega(n, t): prime factors p <= t of n counted with multiplicity.

    The threshold t is real-valued; the comparison is p <= floor(t).
    """
    if t < 1:
        raise ValueError(f"threshold t must be >= 1, got {t}")
    cut = int(t)
    return sum(e for p, e in factorize(sieve, n) if p <= cut)


def big_omega_table(sieve: FactorSieve, upto: int | None = None) -> np.ndarray:
    """Vector of Omega(n) for 0 <= n <= upto (entries 0, 1 are 0)."""
    upto = sieve.limit if upto is None else upto
    sieve.check_range(max(upto, 1))
    omega = np.zeros(upto + 1, dtype=np.int32)
    spf = sieve.spf
    for n in range(2, upto + 1):
        omega[n] = omega[n // spf[n]] + 1
    return omega


def small_omega_table(sieve: FactorSieve, upto: int | None = None) -> np.ndarray:
    """Vector of omega(n) for 0 <= n <= upto."""
    upto = sieve.limit if upto is None else upto
    sieve.check_range(max(upto, 1))
    omega = np.zeros(upto + 1, dtype=np.int32)
    spf = sieve.spf
    for n in range(2, upto + 1):
        p = spf[n]
        m = n // p
        # Strip the full power of p to decide whether p is new.
        while m % p == 0:
            m //= p
        omega[n] = omega[m] + 1
    return omega


def phi_table(upto: int) -> np.ndarray:
    """Vector of Euler phi(d) for 0 <= d <= upto, by the standard sieve."""
    phi = np.arange(upto + 1, dtype=np.float64)
    for p in range(2, upto + 1):
        if phi[p] == p:  # p prime
            phi[p::p] *= 1.0 - 1.0 / p
    return phi
