"""galmin: weighted GCD-sum forms, multiplicative energy minimization over
the probability simplex, and Dirichlet character experiments."""

from .arith import FactorSieve, build_sieve
from .constants import VariationalConstants, solve_beta
from .forms import KernelKind, KernelSpec, WeightVector
from .minimize import MinimizationResult, grid_oracle, minimize_energy, minimize_quadratic

__version__ = "0.1.0"

__all__ = [
    "FactorSieve",
    "build_sieve",
    "VariationalConstants",
    "solve_beta",
    "KernelKind",
    "KernelSpec",
    "WeightVector",
    "MinimizationResult",
    "grid_oracle",
    "minimize_energy",
    "minimize_quadratic",
    "__version__",
]
