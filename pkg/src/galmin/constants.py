"""Analytic constants of the minimization problems.

y(u) = (-1 + sqrt(1+4u))/2,  f(u) = 2u*log(1+y(u)) - y(u)^2,
Q(u) = u*log u - u + 1.

beta solves f(beta) = Q(beta) on ]0,1[; eta = f(beta) is the exponent
governing the quadratic-form infima, and delta = Q(1/log 2) is the
multiplication-table exponent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

from scipy.optimize import brentq

# Bracket for the root of f - Q; sign change verified at runtime.
_BETA_BRACKET = (0.3, 0.7)


def y_of(u: float) -> float:
    if not 0.0 < u <= 1.0:
        raise ValueError(f"y(u) requires u in ]0,1], got {u}")
    return 0.5 * (-1.0 + math.sqrt(1.0 + 4.0 * u))


def f_of(u: float) -> float:
    y = y_of(u)
    return 2.0 * u * math.log1p(y) - y * y


def q_of(u: float) -> float:
    if u <= 0.0:
        raise ValueError(f"Q(u) requires u > 0, got {u}")
    return u * math.log(u) - u + 1.0


@dataclass(frozen=True)
class VariationalConstants:
    beta: float
    eta: float
    y_beta: float
    delta: float
    solver_tolerance: float

    def as_dict(self) -> dict:
        return asdict(self)


def solve_beta(tolerance: float = 1e-12) -> VariationalConstants:
    """Solve f(beta) = Q(beta) by Brent's method on a verified bracket."""
    if not 1e-14 <= tolerance <= 1e-4:
        raise ValueError(f"tolerance must lie in [1e-14, 1e-4], got {tolerance}")

    def h(u: float) -> float:
        return f_of(u) - q_of(u)

    a, b = _BETA_BRACKET
    if h(a) * h(b) >= 0:
        raise RuntimeError(
            "f - Q does not change sign on the bracket; formula transcription bug"
        )
    beta = float(brentq(h, a, b, xtol=tolerance, rtol=8.881784197001252e-16))
    return VariationalConstants(
        beta=beta,
        eta=f_of(beta),
        y_beta=y_of(beta),
        delta=q_of(1.0 / math.log(2.0)),
        solver_tolerance=tolerance,
    )
