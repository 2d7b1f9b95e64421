"""Numerical probes of l^p-improving bounds for discrete averaging operators."""

from ._backend import IMPLEMENTATION
from .bounds import (
    RatioRecord,
    delta_slope,
    domination_check,
    improving_ratio,
    lambda_for,
    threshold_exponents,
    weak_type_functional,
)
from .extremize import brute_force_norm, power_iterate
from .kernels import (
    IntPolynomial,
    Kernel,
    monomial_kernel,
    poly_kernel,
    prime_fracint_kernel,
    prime_kernel,
    fracint_kernel,
)
from .primes import chebyshev_theta, sieve
from .regression import regress_exponent
from .signals import Signal, convolve, dual_exponent, lp_norm
from .sweep import SweepConfig, SweepReport, run_sweep

__version__ = "0.1.0"

__all__ = [
    "IMPLEMENTATION",
    "IntPolynomial",
    "Kernel",
    "RatioRecord",
    "Signal",
    "SweepConfig",
    "SweepReport",
    "brute_force_norm",
    "chebyshev_theta",
    "convolve",
    "delta_slope",
    "domination_check",
    "dual_exponent",
    "fracint_kernel",
    "improving_ratio",
    "lambda_for",
    "lp_norm",
    "monomial_kernel",
    "poly_kernel",
    "power_iterate",
    "prime_fracint_kernel",
    "prime_kernel",
    "regress_exponent",
    "run_sweep",
    "sieve",
    "threshold_exponents",
    "weak_type_functional",
]
