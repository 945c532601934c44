"""Dirichlet characters mod an odd prime: table construction, character
sums, Gauss sums, the finite Fourier (Polya) expansion, theta functions and
orthogonality over the even subgroup.

chi_j(n) = exp(2*pi*i * j * ind(n) / (p-1)) where ind is the discrete log
with respect to the least primitive root; chi_j is even iff j is even.
Angles are reduced with exact integer arithmetic mod p-1 before the single
call into exp.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


@dataclass(frozen=True)
class CharacterTable:
    """Prime p, least primitive root g, and the full discrete-log table."""

    p: int
    g: int
    dlog: np.ndarray = field(repr=False)  # dlog[n] for 1 <= n <= p-1

    @property
    def order(self) -> int:
        return self.p - 1

    def character(self, j: int) -> "DirichletCharacter":
        return DirichletCharacter(self, j % (self.p - 1))

    def characters(self, even_only: bool = False, skip_principal: bool = False):
        step = 2 if even_only else 1
        start = step if skip_principal else 0
        for j in range(start, self.p - 1, step):
            yield DirichletCharacter(self, j)


def build_table(p: int) -> CharacterTable:
    """Find the least primitive root and fill the discrete-log table."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"modulus must be an odd prime, got {p}")
    qs = _prime_divisors(p - 1)
    g = None
    for cand in range(2, p):
        if all(pow(cand, (p - 1) // q, p) != 1 for q in qs):
            g = cand
            break
    assert g is not None  # every prime has a primitive root
    dlog = np.zeros(p, dtype=np.int64)
    acc = 1
    for k in range(p - 1):
        dlog[acc] = k
        acc = acc * g % p
    return CharacterTable(p=p, g=g, dlog=dlog)


@dataclass(frozen=True)
class DirichletCharacter:
    table: CharacterTable
    j: int

    @property
    def p(self) -> int:
        return self.table.p

    @property
    def is_principal(self) -> bool:
        return self.j % (self.p - 1) == 0

    @property
    def is_even(self) -> bool:
        return self.j % 2 == 0

    def __call__(self, n: int) -> complex:
        p = self.p
        n %= p
        if n == 0:
            return 0j
        k = (self.j * int(self.table.dlog[n])) % (p - 1)
        return cmath.exp(2j * math.pi * k / (p - 1))

    def values(self, ns) -> np.ndarray:
        """Vectorized chi(n) over an integer array."""
        p = self.p
        ns = np.asarray(ns, dtype=np.int64) % p
        out = np.zeros(len(ns), dtype=np.complex128)
        mask = ns != 0
        k = (self.j * self.table.dlog[ns[mask]]) % (p - 1)
        out[mask] = np.exp(2j * np.pi * k / (p - 1))
        return out


def character_matrix(table: CharacterTable, ns, even_only: bool = False) -> np.ndarray:
    """Matrix chi_j(n) with one row per character, columns following ns."""
    p = table.p
    ns = np.asarray(ns, dtype=np.int64) % p
    js = np.arange(0, p - 1, 2 if even_only else 1)
    out = np.zeros((len(js), len(ns)), dtype=np.complex128)
    mask = ns != 0
    k = np.outer(js, table.dlog[ns[mask]]) % (p - 1)
    out[:, mask] = np.exp(2j * np.pi * k / (p - 1))
    return out


def char_sum(chi: DirichletCharacter, M: int, N: int) -> complex:
    """S(M,N;chi) = sum_{M < n <= M+N} chi(n)."""
    if N < 0:
        raise ValueError("N must be >= 0")
    if N == 0:
        return 0j
    ns = np.arange(M + 1, M + N + 1, dtype=np.int64)
    return complex(chi.values(ns).sum())


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{n mod p} chi(n) e^{2 pi i n / p}."""
    if chi.is_principal:
        raise ValueError("gauss_sum requires a nonprincipal character")
    p = chi.p
    ns = np.arange(1, p, dtype=np.int64)
    return complex(chi.values(ns) @ np.exp(2j * np.pi * ns / p))


def polya_partial_sum(chi: DirichletCharacter, t: float, H: int):
    """Finite Fourier approximation of sum_{n<=t} chi(n).

    Returns (approximation, exact, residual) where
    approximation = tau(chi)/(2 pi i) * sum_{0<|h|<=H} conj(chi(h))/h *
    (1 - e^{-2 pi i h t / p}) and exact is the direct sum.
    """
    if chi.is_principal:
        raise ValueError("polya_partial_sum requires a nonprincipal character")
    if not 1 <= t < chi.p:
        raise ValueError("cutoff t must satisfy 1 <= t < p")
    if H < 1:
        raise ValueError("H must be >= 1")
    p = chi.p
    tau = gauss_sum(chi)
    hs = np.arange(1, H + 1, dtype=np.int64)
    vals = np.conj(chi.values(hs))
    pos = (vals / hs) * (1.0 - np.exp(-2j * np.pi * hs * (t / p)))
    # h -> -h: conj(chi(-h)) = conj(chi(-1)) * conj(chi(h)).
    chi_m1 = chi(p - 1)
    neg = (vals * chi_m1.conjugate() / (-hs)) * (
        1.0 - np.exp(2j * np.pi * hs * (t / p))
    )
    approx = tau / (2j * np.pi) * complex(pos.sum() + neg.sum())
    ns = np.arange(1, int(t) + 1, dtype=np.int64)
    exact = complex(chi.values(ns).sum())
    return approx, exact, abs(approx - exact)


@dataclass(frozen=True)
class ThetaConfig:
    x: float
    tail_epsilon: float = 1e-15

    def __post_init__(self):
        if self.x <= 0:
            raise ValueError("x must be positive")
        if not 0 < self.tail_epsilon < 1:
            raise ValueError("tail_epsilon must lie in ]0,1[")


def theta_cutoff(p: int, config: ThetaConfig) -> int:
    """Smallest n_max with geometric tail bound below tail_epsilon."""
    rate = math.pi * config.x / p
    n = max(1, int(math.sqrt(max(-math.log(config.tail_epsilon), 1.0) / rate)))
    while True:
        # tail after n: sum_{m>n} e^{-rate m^2} <= e^{-rate (n+1)^2}/(1 - e^{-rate(2n+3)})
        head = math.exp(-rate * (n + 1) ** 2)
        denom = 1.0 - math.exp(-rate * (2 * n + 3))
        if head / denom < config.tail_epsilon:
            return n
        n += 1


def theta(chi: DirichletCharacter, config: ThetaConfig) -> complex:
    """theta(x;chi) = sum_{n>=1} chi(n) e^{-pi n^2 x / p}, truncated so the
    discarded tail is below config.tail_epsilon."""
    p = chi.p
    n_max = theta_cutoff(p, config)
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    damp = np.exp(-math.pi * config.x * ns.astype(np.float64) ** 2 / p)
    return complex(chi.values(ns) @ damp)


def theta_all_even(table: CharacterTable, config: ThetaConfig) -> np.ndarray:
    """theta(x;chi) for every even character, in index order j = 0,2,4,..."""
    p = table.p
    n_max = theta_cutoff(p, config)
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    damp = np.exp(-math.pi * config.x * ns.astype(np.float64) ** 2 / p)
    cm = character_matrix(table, ns, even_only=True)
    return cm @ damp


def orthogonality_check(table: CharacterTable, m: int, n: int) -> complex:
    """sum over even chi of chi(m) * conj(chi(n)); equals (p-1)/2 iff
    m = +-n mod p (and p does not divide m), else 0."""
    p = table.p
    if not (1 <= m % p and 1 <= n % p):
        raise ValueError("m, n must be coprime to p")
    cm = character_matrix(table, [m, n], even_only=True)
    return complex((cm[:, 0] * np.conj(cm[:, 1])).sum())
