"""Witness sets and counting functions for the upper-bound constructions.

CAUTION on notation: in the growth condition below, the "iterated log" is
log log throughout — the bound on Omega(n, t) is kappa * log(log(3t)) + C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import (
    BudgetError,
    FactorSieve,
    big_omega_table,
    factorize,
    small_omega_table,
)
from .forms import WeightVector

# H(N) marks an N^2-size table; cap the exhaustive mode by memory.
_HN_CAP = 20_000


class EmptyWitnessError(ValueError):
    """No integer satisfies the witness constraints (C too small)."""


@dataclass(frozen=True)
class LocCondition:
    """Accept n iff Omega(n,t) <= kappa*loglog(3t) + C for all 1 <= t <= x."""

    kappa: float
    C: float
    x: int

    def __post_init__(self):
        if self.kappa < 0 or self.C < 0 or self.x < 1:
            raise ValueError("LocCondition requires kappa >= 0, C >= 0, x >= 1")

    def rhs(self, t: float) -> float:
        return self.kappa * math.log(math.log(3.0 * t)) + self.C


def satisfies_loc(sieve: FactorSieve, n: int, cond: LocCondition) -> bool:
    """Check the growth condition at its jump points only.

    Omega(n,t) is a step function jumping at the distinct prime divisors
    p <= x of n, and the right side is increasing in t, so checking
    Omega(n,p) <= rhs(p) at each such p covers every t in [1, x].
    """
    sieve.check_range(n)
    running = 0
    for p, e in factorize(sieve, n):  # primes in increasing order
        if p > cond.x:
            break
        running += e
        if running > cond.rhs(p):
            return False
    return True


def level_set_count(sieve: FactorSieve, x: int, k: int) -> int:
    """N_k(x): number of n <= x with Omega(n) = k."""
    sieve.check_range(x)
    if k < 1:
        raise ValueError("k must be >= 1")
    omega = big_omega_table(sieve, x)
    return int(np.count_nonzero(omega[1:] == k))


def filtered_count(sieve: FactorSieve, x: int, k: int, C: float,
                   kappa: float | None = None) -> int:
    """F_k(x;C): members of the level set that also satisfy the growth
    condition with kappa = k/loglog(x) unless overridden."""
    sieve.check_range(x)
    if kappa is None:
        kappa = k / math.log(math.log(x))
    cond = LocCondition(kappa=kappa, C=C, x=x)
    omega = big_omega_table(sieve, x)
    members = np.flatnonzero(omega[1:] == k) + 1
    return sum(1 for n in members if satisfies_loc(sieve, int(n), cond))


def multiplication_table_count(N: int) -> int:
    """H(N): number of distinct products d*t with d, t <= N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > _HN_CAP:
        raise BudgetError(f"exhaustive H(N) limited to N <= {_HN_CAP}")
    seen = np.zeros(N * N + 1, dtype=bool)
    for d in range(1, N + 1):
        seen[d * d :: d][: N - d + 1] = True
    return int(np.count_nonzero(seen))


def witness_t(sieve: FactorSieve, N: int, beta: float, C: float = 3.0) -> WeightVector:
    """Indicator of {n <= N : Omega(n) = floor(beta*loglog N), growth
    condition holds with kappa = beta}."""
    sieve.check_range(N)
    if N < 16:
        raise ValueError("witness_t requires N >= 16")
    k = int(beta * math.log(math.log(N)))
    cond = LocCondition(kappa=beta, C=C, x=N)
    omega = big_omega_table(sieve, N)
    members = np.flatnonzero(omega[1:] == k) + 1
    support = [int(n) for n in members if satisfies_loc(sieve, int(n), cond)]
    if not support:
        raise EmptyWitnessError(
            f"no n <= {N} with Omega(n)={k} satisfies the growth condition; "
            f"increase C (currently {C})"
        )
    return WeightVector.indicator(support, N)


def witness_e(sieve: FactorSieve, N: int, C: float = 3.0) -> WeightVector:
    """Indicator of {n in ]N/2, N] : growth condition with kappa = 1/log 4}."""
    sieve.check_range(N)
    if N < 4:
        raise ValueError("witness_e requires N >= 4")
    cond = LocCondition(kappa=1.0 / math.log(4.0), C=C, x=N)
    support = [
        n for n in range(N // 2 + 1, N + 1) if satisfies_loc(sieve, n, cond)
    ]
    if not support:
        raise EmptyWitnessError(
            f"no n in ]{N // 2}, {N}] satisfies the growth condition; "
            f"increase C (currently {C})"
        )
    return WeightVector.indicator(support, N)


def d_plus(sieve: FactorSieve, N: int, beta: float) -> set[int]:
    """{n <= N : omega(n) >= beta * loglog N}."""
    sieve.check_range(N)
    threshold = beta * math.log(math.log(N)) if N >= 3 else 0.0
    omega = small_omega_table(sieve, N)
    return {int(n) for n in np.flatnonzero(omega[1:] >= threshold) + 1}


def d_minus(sieve: FactorSieve, N: int, beta: float) -> set[int]:
    """Complement of d_plus inside [1, N]."""
    plus = d_plus(sieve, N, beta)
    return {n for n in range(1, N + 1) if n not in plus}
