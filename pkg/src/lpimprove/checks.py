"""The canonical acceptance suite, shared by ``lpimprove check-all`` and the tests.

Every criterion returns a :class:`CriterionResult`; tolerances and grids are
fixed module constants.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .bounds import (
    delta_slope,
    domination_check,
    improving_ratio,
    lambda_for,
    threshold_exponents,
    weak_type_functional,
    young_check,
)
from .extremize import brute_force_norm, dense_top_singular_value, power_iterate
from .kernels import (
    IntPolynomial,
    Kernel,
    monomial_kernel,
    poly_kernel,
    prime_kernel,
    reduction_domination_check,
)
from .primes import is_prime_trial, nth_prime_bounds_check, prime_sum_estimate, sieve
from .signals import Signal, convolve, dual_exponent, random_signal
from .sweep import SLOPE_THRESHOLD, SweepConfig, cell_input, fit_records, run_sweep

SEED = 20240601
POLY_EXTREMAL_P = (1.6, 1.75, 1.9)
PRIME_P = (1.25, 1.5, 1.75, 2.0)
PRIME_N = (10**2, 10**3, 10**4, 10**5)
PRIME_SUM_N = tuple(10**k for k in range(2, 8))
PRIME_SUM_LAMBDA = (0.3, 0.5, 0.7)
# Largest kernel window used in the Young check (N is capped so N^d fits).
YOUNG_MAX_SPAN = 2**18


@dataclass
class CriterionResult:
    number: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:>3} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def young_contraction(cases: int = 500, kernel_builder: Callable[[int, int], Kernel] = monomial_kernel,
                      budget: float = 10.0) -> CriterionResult:
    """1. ``||A f||_2 <= ||f||_2`` for random signals and x^d averages."""
    rng = np.random.default_rng(SEED + 1)
    violations = []
    for _ in range(cases):
        d = int(rng.choice([2, 3, 4]))
        n_cap = min(512, int(math.floor(YOUNG_MAX_SPAN ** (1.0 / d))))
        N = int(rng.integers(1, n_cap + 1))
        f = random_signal(rng, 256, 512)
        rep = young_check(f, kernel_builder(d, N))
        if not rep.passed:
            violations.append((d, N))
    res = CriterionResult("1", "Young l^2 contraction", not violations,
                          f"{len(violations)} violations in {cases} cases",
                          metrics={"violations": violations[:10]})
    return res


def _sweep_gate(fits, max_ratio: float, slope_cap: float = SLOPE_THRESHOLD):
    bad = [f for f in fits if not (f.max_over_min < max_ratio and f.slope <= slope_cap)]
    desc = "; ".join(f"p={f.p}: slope={f.slope:+.4f} max/min={f.max_over_min:.3f}" for f in fits)
    return not bad, desc


@_timed
def poly_extremal(p_values=POLY_EXTREMAL_P, n_count: int = 7, budget: float = 300.0) -> CriterionResult:
    """2. Extremal normalized ratios for x^2 stay bounded over N = 16..1024."""
    rep = run_sweep(SweepConfig(kind="poly", degree=2, p_values=p_values, n_start=16,
                                n_factor=2, n_count=n_count, family="extremal", seed=SEED),
                    write=False)
    ok, desc = _sweep_gate(rep.fits, 4.0)
    ok = ok and not rep.failures and len(rep.fits) == len(p_values)
    return CriterionResult("2", "polynomial-average extremal boundedness", ok, desc,
                           metrics={"records": [r.to_dict() for r in rep.records]})


def _delta_sweep(p: float):
    return run_sweep(SweepConfig(kind="poly", degree=2, p_values=(p,), n_start=16, n_factor=2,
                                 n_count=7, family="delta"), write=False)


@_timed
def necessity_below_endpoint(p: float = 1.4, tol: float = 0.02) -> CriterionResult:
    """3. Delta-input slope equals ``1/p - 2/p'`` below ``p_2 = 3/2``."""
    rep = _delta_sweep(p)
    expected = delta_slope(2, p)
    ok = abs(rep.fitted_slope - expected) <= tol and rep.verdict == "growing"
    return CriterionResult("3", "necessity below endpoint", ok,
                           f"slope={rep.fitted_slope:.5f} expected={expected:.5f} "
                           f"verdict={rep.verdict}")


@_timed
def endpoint_flatness(tol: float = 0.02) -> CriterionResult:
    """4. At ``p = 3/2`` the delta-input slope is zero."""
    rep = _delta_sweep(1.5)
    return CriterionResult("4", "endpoint flatness", abs(rep.fitted_slope) <= tol,
                           f"slope={rep.fitted_slope:.2e}")


@_timed
def quadratic_domination(cases: int = 200) -> CriterionResult:
    """5. Quadratic reduction domination holds pointwise."""
    rng = np.random.default_rng(SEED + 5)
    bad, worst = [], math.inf
    for _ in range(cases):
        a, b, c = int(rng.integers(1, 4)), int(rng.integers(0, 4)), int(rng.integers(0, 4))
        N = int(rng.integers(1, 65))
        f = random_signal(rng, 64, 64, nonnegative=True)
        rep = reduction_domination_check(f, IntPolynomial.quadratic(a, b, c), N)
        worst = min(worst, rep.min_slack)
        if not rep.passed:
            bad.append((a, b, c, N))
    return CriterionResult("5", "quadratic reduction domination", not bad,
                           f"{len(bad)} violating cases of {cases}; min slack {worst:.3e}")


@_timed
def fracint_domination(cases: int = 100) -> CriterionResult:
    """6. ``A^d_N f <= N^(lam-1) I_{d,lam} g(-.)`` pointwise."""
    rng = np.random.default_rng(SEED + 6)
    bad, worst = [], math.inf
    for _ in range(cases):
        d = int(rng.choice([2, 3]))
        N = int(rng.integers(1, 33))
        p_d = threshold_exponents(d).p_d
        p = float(rng.uniform(p_d, 2.0))
        f = random_signal(rng, 64, 64, nonnegative=True)
        rep = domination_check(f, d, N, p)
        worst = min(worst, rep.min_slack)
        if not rep.passed:
            bad.append((d, N, p))
    return CriterionResult("6", "fractional-integral domination", not bad,
                           f"{len(bad)} violating cases of {cases}; min slack {worst:.3e}")


@_timed
def threshold_identities() -> CriterionResult:
    """7. ``lambda(tilde p_d) = lambda_d`` and the d = 2 values."""
    errs = []
    for d in range(2, 9):
        t = threshold_exponents(d)
        errs.append(abs(lambda_for(t.tilde_p_d, d) - t.lambda_d))
    t2 = threshold_exponents(2)
    vals_ok = (abs(t2.p_d - 1.5) < 1e-15 and abs(t2.tilde_p_d - 12 / 7) < 1e-15
               and abs(t2.lambda_d - 2 / 3) < 1e-15)
    ok = max(errs) <= 1e-12 and vals_ok
    return CriterionResult("7", "threshold identities", ok,
                           f"max identity error {max(errs):.1e}; d=2: {t2.p_d}, "
                           f"{t2.tilde_p_d:.4f}, {t2.lambda_d:.4f}")


@_timed
def prime_facts(exhaustive_to: int = 10**4, n_max: int = 10**5) -> CriterionResult:
    """8. Sieve exactness, p_n bounds, and boundedness of the prime sum ratio."""
    table = sieve(exhaustive_to)
    ints = np.arange(2, exhaustive_to + 1)
    sieve_ok = np.array_equal(ints[is_prime_trial(ints)], table.primes)
    nth = nth_prime_bounds_check(n_max)
    spreads = {}
    for lam in PRIME_SUM_LAMBDA:
        ratios = [prime_sum_estimate(lam, N).ratio for N in PRIME_SUM_N]
        spreads[lam] = max(ratios) / min(ratios)
    ok = sieve_ok and nth.passed and all(s < 10 for s in spreads.values())
    desc = (f"sieve={'ok' if sieve_ok else 'MISMATCH'}; p_n bounds failures="
            f"{len(nth.lower_failures) + len(nth.upper_failures)} over 6..{n_max}; "
            + ", ".join(f"lam={k}: max/min={v:.3f}" for k, v in spreads.items()))
    return CriterionResult("8", "prime facts", ok, desc, metrics={"spreads": spreads})


def _prime_config(family: str) -> SweepConfig:
    return SweepConfig(kind="primes", p_values=PRIME_P, n_values=PRIME_N,
                       family=family, seed=SEED)


@lru_cache(maxsize=None)
def _prime_extremal_input(p: float, N: int) -> Signal:
    cfg = _prime_config("extremal")
    return cell_input(cfg, cfg.kernel(N), p, N)


@_timed
def prime_delta() -> CriterionResult:
    """9a. Prime-average delta ratios have slope <= 0.02."""
    rep = run_sweep(_prime_config("delta"), write=False)
    ok, desc = _sweep_gate(rep.fits, math.inf)
    return CriterionResult("9a", "prime-average delta slopes", ok and not rep.failures, desc)


@_timed
def prime_extremal() -> CriterionResult:
    """9b. Prime-average extremal ratios have slope <= 0.02."""
    records = [improving_ratio(_prime_extremal_input(p, N), prime_kernel(N), p)
               for p in PRIME_P for N in PRIME_N]
    fits = fit_records(PRIME_P, records)
    ok, desc = _sweep_gate(fits, math.inf)
    return CriterionResult("9b", "prime-average extremal slopes", ok, desc,
                           metrics={"records": [r.to_dict() for r in records]})


def prime_lambda(p: float) -> float:
    """``lam = 1 - (1/p - 1/p')``; lies in (0, 1) only for p < 2."""
    return 1.0 - (1.0 / p - 1.0 / dual_exponent(p))


def _weak_type_spreads(family: str, C: float = 1.0) -> dict:
    out = {}
    for p in PRIME_P:
        lam = prime_lambda(p)
        # p = 2 gives lam = 1, outside the range where q is defined
        if not 0 < lam < 1:
            continue
        vals = []
        for N in PRIME_N:
            f = Signal.delta(0) if family == "delta" else _prime_extremal_input(p, N)
            vals.append(weak_type_functional(f, lam, N, p, C))
        out[p] = vals
    return out


def _weak_type_result(number: str, family: str) -> CriterionResult:
    spreads = _weak_type_spreads(family)
    ratio = {p: (max(v) / min(v) if min(v) > 0 else math.inf) for p, v in spreads.items()}
    ok = all(r < 10 for r in ratio.values())
    desc = ", ".join(f"p={p}: max={max(spreads[p]):.3g} max/min={r:.2f}" for p, r in ratio.items())
    return CriterionResult(number, f"prime-average weak-type boundedness ({family})", ok, desc,
                           metrics={str(p): v for p, v in spreads.items()})


@_timed
def prime_weak_type() -> CriterionResult:
    """9c. Restricted weak-type functional on extremal inputs: max/min < 10 across N."""
    return _weak_type_result("9c", "extremal")


@_timed
def prime_weak_type_delta() -> CriterionResult:
    """9d. The same functional for the delta input."""
    return _weak_type_result("9d", "delta")


FIDELITY_KERNELS = (
    lambda: monomial_kernel(2, 2),
    lambda: monomial_kernel(2, 3),
    lambda: monomial_kernel(3, 2),
    lambda: poly_kernel(IntPolynomial.quadratic(1, 1, 0), 3),
    lambda: prime_kernel(10),
)


# Nearly Toeplitz windows have a dense top spectrum; the slowest case
# (x^2, N = 2, 256 points) needs about 8e5 iterations.
P2_MAX_ITER = 2_000_000


@_timed
def extremizer_fidelity(bf_tol: float = 1e-3, svd_tol: float = 1e-8) -> CriterionResult:
    """10. Power iteration against brute force (<= 12 points) and dense SVD (p = 2)."""
    rng = np.random.default_rng(SEED + 10)
    bf_gap, svd_gap = 0.0, 0.0
    for make in FIDELITY_KERNELS:
        K = make()
        for p in (1.6, 1.75, 2.0):
            for n in (1, 2, 3, 5, 8, 12):
                lo = int(rng.integers(-12, 4))
                w = (lo, lo + n - 1)
                pi = power_iterate(K, p, w, tol=1e-13, max_iter=20000)
                bf = brute_force_norm(K, p, w, grid=6 if n > 8 else 8)
                bf_gap = max(bf_gap, abs(pi.ratio - bf.lower))
        for n in (16, 64, 128, 256):
            lo = int(rng.integers(-n, 1))
            w = (lo, lo + n - 1)
            pi = power_iterate(K, 2.0, w, tol=1e-16, max_iter=P2_MAX_ITER)
            svd_gap = max(svd_gap, abs(pi.ratio - dense_top_singular_value(K, w)))
    ok = bf_gap <= bf_tol and svd_gap <= svd_tol
    return CriterionResult("10", "extremizer fidelity", ok,
                           f"max |PI - brute force| = {bf_gap:.2e}, max |PI - SVD| = {svd_gap:.2e}")


@_timed
def convolution_paths(cases: int = 1000, rtol: float = 1e-9) -> CriterionResult:
    """11. Direct and FFT convolution agree in relative l^inf."""
    rng = np.random.default_rng(SEED + 11)
    worst = 0.0
    for _ in range(cases):
        f = Signal(int(rng.integers(-100, 100)), rng.standard_normal(int(rng.integers(1, 4097))))
        k = Signal(int(rng.integers(-100, 100)), rng.random(int(rng.integers(1, 4097))))
        a = convolve(f, k, "direct").values
        b = convolve(f, k, "fft").values
        worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(a))))
    return CriterionResult("11", "convolution paths", worst <= rtol,
                           f"max relative l^inf difference {worst:.2e} over {cases} cases")


CRITERIA = (
    ("1", young_contraction),
    ("2", poly_extremal),
    ("3", necessity_below_endpoint),
    ("4", endpoint_flatness),
    ("5", quadratic_domination),
    ("6", fracint_domination),
    ("7", threshold_identities),
    ("8", prime_facts),
    ("9a", prime_delta),
    ("9b", prime_extremal),
    ("9c", prime_weak_type),
    ("9d", prime_weak_type_delta),
    ("10", extremizer_fidelity),
    ("11", convolution_paths),
)

# Wall-clock budgets (seconds) attached to criteria that state one.
BUDGETS = {"1": 10.0, "2": 300.0, "3": 30.0, "5": 60.0, "8": 120.0}


def apply_budget(res: CriterionResult) -> CriterionResult:
    limit = BUDGETS.get(res.number)
    if limit is not None and res.seconds >= limit:
        res.passed = False
        res.detail += f"; runtime {res.seconds:.1f}s over budget {limit:.0f}s"
    return res


def check_all(only=None, echo: Callable[[str], None] | None = print,
              kernel_builder: Callable[[int, int], Kernel] = monomial_kernel) -> list[CriterionResult]:
    """Run the suite (or the criteria numbered in ``only``) and echo one line each.

    ``kernel_builder`` replaces the x^d kernel constructor in the Young check,
    which is how a broken kernel is injected for mutation testing.
    """
    results = []
    for number, crit in CRITERIA:
        if only and number not in only:
            continue
        res = crit(kernel_builder=kernel_builder) if number == "1" else crit()
        res = apply_budget(res)
        results.append(res)
        if echo:
            echo(res.line())
    return results
