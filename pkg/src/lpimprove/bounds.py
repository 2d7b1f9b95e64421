"""Inequalities, sharpness examples and pointwise dominations as computations.

The bounds carry unspecified constants, so boundedness claims are
tested through normalized ratios whose behaviour in ``N`` is inspected
(see :mod:`lpimprove.sweep`).  Pointwise dominations are exact facts for
nonnegative inputs and are checked sample by sample.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .kernels import (
    DominationReport,
    Kernel,
    apply_fracint,
    compare_pointwise,
    monomial_kernel,
    prime_fracint_kernel,
    prime_kernel,
)
from .regression import regress_exponent
from .signals import ExponentPair, Signal, convolve, dual_exponent, lp_norm

# Geometric ratio of the alpha grid in the weak-type supremum.
ALPHA_GRID_RATIO = 1.05


@dataclass
class RatioRecord:
    """``raw_norm / (normalizer * ||f||_p)`` for one operator at one scale."""

    kind: str
    label: str
    p: float
    p_prime: float
    N: int
    raw_norm: float
    normalizer: float
    ratio: float

    CSV_COLUMNS = ("kind", "d_or_abc", "p", "pPrime", "N", "rawNorm", "normalizer", "ratio")

    def csv_row(self) -> list:
        return [self.kind, self.label, repr(self.p), repr(self.p_prime), self.N,
                repr(self.raw_norm), repr(self.normalizer), repr(self.ratio)]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "d_or_abc": self.label, "p": self.p, "pPrime": self.p_prime,
                "N": self.N, "rawNorm": self.raw_norm, "normalizer": self.normalizer,
                "ratio": self.ratio}

    @classmethod
    def from_dict(cls, d: dict) -> "RatioRecord":
        return cls(d["kind"], d["d_or_abc"], d["p"], d["pPrime"], d["N"], d["rawNorm"],
                   d["normalizer"], d["ratio"])


@dataclass
class CheckReport:
    """Generic JSON-able verdict ``{params, values, verdict, worstCase}``."""

    name: str
    params: dict
    values: dict
    passed: bool
    worst_case: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"check": self.name, "params": self.params, "values": self.values,
                "verdict": self.verdict, "worstCase": self.worst_case}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def operator_tag(K: Kernel) -> tuple[str, str]:
    """Operator family and label used in CSV output."""
    m = K.meta
    if m.kind == "prime":
        return "primes", ""
    if m.kind == "poly":
        P = m.poly
        if P.is_monomial():
            return "poly", f"d={P.degree}"
        if P.degree == 2:
            a, b, c = P.abc()
            return "quadratic", f"{a},{b},{c}"
        return "poly", f"P={P}"
    raise ValueError(f"no l^p-improving normalizer for kernel kind {m.kind!r}")


def normalizer(K: Kernel, p: float) -> float:
    """Scale factor in the improving bound for the operator behind ``K``.

    ``N^(d/p' - d/p)`` for ``x^d`` averages, ``(2a + b/N)(2aN + b)^(2/p' - 2/p)``
    for other quadratics and ``N^(1/p' - 1/p)`` for the prime average.
    """
    e = ExponentPair(p)
    N = K.meta.N
    family, _ = operator_tag(K)
    if family == "primes":
        return N ** e.gain(1)
    if family == "quadratic":
        a, b, _ = K.meta.poly.abc()
        return (2 * a + b / N) * (2 * a * N + b) ** e.gain(2)
    return N ** e.gain(K.meta.poly.degree)


def improving_ratio(f: Signal, K: Kernel, p: float, path: str = "auto") -> RatioRecord:
    """Normalized ``||K * f||_{p'} / (normalizer * ||f||_p)``."""
    e = ExponentPair(p)
    fn = lp_norm(f, p)
    if fn == 0.0:
        raise ValueError("improving ratio undefined for the zero signal")
    kind, label = operator_tag(K)
    raw = lp_norm(convolve(f, K, path), e.p_prime)
    scale = normalizer(K, p)
    return RatioRecord(kind, label, float(p), e.p_prime, K.meta.N, raw, scale, raw / (scale * fn))


class NecessityProbe(NamedTuple):
    slope: float
    stderr: float
    expected: float
    records: list


def delta_slope(d: int, p: float) -> float:
    """Growth exponent of the normalized delta ratio: ``d/p - d/p' - 1/p``."""
    pp = dual_exponent(p)
    return d / p - d / pp - 1.0 / p


def delta_necessity_probe(d: int, p: float, n_grid: Sequence[int]) -> NecessityProbe:
    """Fit the log-log slope of the normalized ratio for ``f = delta_0``.

    Positive below ``p_d = 2 - 1/d`` (the improving estimate fails), zero at
    ``p_d`` and negative above.
    """
    grid = sorted(set(int(n) for n in n_grid))
    if len(grid) < 5:
        raise ValueError("necessity probe needs a grid of at least 5 distinct N")
    if d < 2:
        raise ValueError("d must be >= 2")
    delta = Signal.delta(0)
    recs = [improving_ratio(delta, monomial_kernel(d, N), p) for N in grid]
    slope, err = regress_exponent([(r.N, r.ratio) for r in recs])
    return NecessityProbe(slope, err, delta_slope(d, p), recs)


def indicator_magnitude_probe(d: int, p: float, N: int, max_window: int = 1 << 26) -> CheckReport:
    """Test ``A^d_N chi = 1`` on ``[-N^d, 0]`` for ``chi`` the indicator of ``[-N^d, N^d]``.

    The normalized ratio is sandwiched between the count bound from that
    plateau and the trivial bound ``A chi <= 1`` on the output window.
    """
    e = ExponentPair(p)
    Nd = N**d
    if 3 * Nd + 1 > max_window:
        raise ValueError(f"window 3*N^d+1 = {3 * Nd + 1} too large")
    chi = Signal.indicator(-Nd, Nd)
    K = monomial_kernel(d, N)
    out = convolve(chi, K)
    plateau = out.at(np.arange(-Nd, 1))
    plateau_err = float(np.max(np.abs(plateau - 1.0)))
    raw = lp_norm(out, e.p_prime)
    fn = lp_norm(chi, p)
    scale = N ** e.gain(d)
    ratio = raw / (scale * fn)
    lower = (Nd + 1) ** (1 / e.p_prime) / (scale * fn)
    upper = len(out) ** (1 / e.p_prime) / (scale * fn)
    norm_exact = (2 * Nd + 1) ** (1 / p)
    norm_stated = 2 ** (1 / p) * N ** (d / p)
    ok = (plateau_err <= 1e-12 and raw >= (Nd + 1) ** (1 / e.p_prime) * (1 - 1e-12)
          and (Nd + 1) ** (1 / e.p_prime) >= N ** (d / e.p_prime)
          and lower * (1 - 1e-12) <= ratio <= upper * (1 + 1e-12))
    return CheckReport(
        "indicator_magnitude",
        {"d": d, "p": p, "N": N},
        {"plateau_points": int(plateau.size), "plateau_max_error": plateau_err,
         "raw_norm": raw, "plateau_lower_bound": (Nd + 1) ** (1 / e.p_prime),
         "ratio": ratio, "c": lower, "C": upper,
         "norm_exact": norm_exact, "norm_stated": norm_stated,
         "norm_relative_gap": norm_exact / norm_stated - 1.0},
        ok,
        {"plateau_max_error": plateau_err},
    )


def domination_check(f: Signal, d: int, N: int, p: float, path: str = "direct") -> DominationReport:
    """Check ``A^d_N f(x) <= N^(lam-1) I_{d,lam} g(-x)`` with ``g(y) = f(-y)``.

    ``lam = 1 - (d/p - d/p')`` must lie in (0, 1).  Both sides are exact on
    the whole output window of the left side.
    """
    if np.any(f.values < 0):
        raise ValueError("domination check needs f >= 0")
    lam = ExponentPair(p).lam(d)
    if not 0 < lam < 1:
        raise ValueError(f"lambda = {lam} outside (0, 1) for p={p}, d={d}")
    params = {"d": d, "N": N, "p": p, "lambda": lam}
    if f.is_zero():
        return DominationReport("fracint_domination", params, (0, -1), 0.0, 0.0, [], None)
    lhs = convolve(f, monomial_kernel(d, N), path)
    xs = lhs.indices()
    g = f.reflected()
    Ig = apply_fracint(g, d, lam, eval_hi=int(-xs[0]), path=path)
    rhs = N ** (lam - 1.0) * Ig.at(-xs)
    return compare_pointwise("fracint_domination", params, xs, lhs.values, rhs)


class Thresholds(NamedTuple):
    p_d: float
    tilde_p_d: float
    lambda_d: float


def threshold_exponents(d: int) -> Thresholds:
    """Necessity endpoint ``2 - 1/d``, sufficiency threshold and ``lambda_d``."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return Thresholds(
        2.0 - 1.0 / d,
        2.0 - 4.0 / (2 + d * (2**d + 2)),
        1.0 - 1.0 / (2 ** (d - 1) + 1),
    )


def lambda_for(p: float, d: int) -> float:
    return 1.0 - (d / p - d / dual_exponent(p))


def weak_type_exponent(lam: float, p: float) -> float:
    """``q`` with ``1/q = 1/p - (1 - lam)``; needs ``1 < p < 1/(1 - lam)``."""
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if not 1 < p < 1.0 / (1.0 - lam):
        raise ValueError(f"need 1 < p < 1/(1-lambda) = {1.0 / (1.0 - lam)}, got p={p}")
    return 1.0 / (1.0 / p - (1.0 - lam))


def restricted_weak_sup(values: np.ndarray, q: float, cap: float) -> float:
    """``sup_{0 < alpha <= cap} alpha^q #{v > alpha}`` evaluated exactly.

    The count is a right-continuous step function, so on each step the
    supremum is approached just below a jump.  Jumps are evaluated one ulp
    below each distinct value, together with ``cap`` itself and a geometric
    grid for good measure.
    """
    v = np.sort(np.asarray(values, dtype=np.float64)[np.asarray(values) > 0])
    if v.size == 0 or cap <= 0:
        return 0.0
    jumps = np.unique(v)
    cand = np.nextafter(jumps[jumps <= cap], 0.0)
    # the grid only decorates the exact jump candidates, so clip its bottom
    lo = max(jumps[0] / 2, cap * 1e-30)
    grid = lo * ALPHA_GRID_RATIO ** np.arange(int(math.log(cap / lo) / math.log(ALPHA_GRID_RATIO)) + 1) \
        if cap > lo else np.zeros(0)
    alphas = np.concatenate([cand, grid[grid <= cap], [cap]])
    alphas = alphas[alphas > 0]
    counts = v.size - np.searchsorted(v, alphas, side="right")
    return float(np.max(alphas**q * counts))


def weak_type_functional(f: Signal, lam: float, N: int, p: float, C: float = 1.0) -> float:
    """Restricted weak-type functional of ``J_{lam,N}``, divided by ``||f||_p^q``."""
    q = weak_type_exponent(lam, p)
    if C <= 0:
        raise ValueError("C must be positive")
    fn = lp_norm(f, p)
    if fn == 0.0:
        return 0.0
    J = convolve(f, prime_fracint_kernel(lam, N))
    cap = C * N ** (-1.0 / q) * fn
    return restricted_weak_sup(J.values, q, cap) / fn**q


def prime_holder_bound_check(f: Signal, N: int, p: float, c_max: float = 10.0) -> CheckReport:
    """Pointwise bound ``max |A_N f| <= C (log N / N)^(1/p) ||f||_p``.

    Records the empirical ``C`` and also the exact Hoelder bound
    ``(1/N) ||log p||_{p'} ||f||_p``, which must hold without constant.
    """
    pp = dual_exponent(p)
    K = prime_kernel(N)
    fn = lp_norm(f, p)
    out = convolve(f, K)
    peak = lp_norm(out, math.inf)
    scale = (math.log(N) / N) ** (1.0 / p) * fn
    holder = lp_norm(K.weights, pp) * fn
    c_emp = peak / scale if scale > 0 else 0.0
    worst = {}
    if out.nnz:
        i = int(np.argmax(np.abs(out.values)))
        worst = {"x": int(out.offset + i), "value": float(out.values[i])}
    return CheckReport(
        "prime_holder_bound",
        {"N": N, "p": p},
        {"max_abs": peak, "bound_scale": scale, "empirical_C": c_emp, "holder_bound": holder},
        c_emp <= c_max and peak <= holder * (1 + 1e-12),
        worst,
    )


def young_check(f: Signal, K: Kernel, path: str = "auto", rtol: float = 1e-12) -> CheckReport:
    """``||A f||_2 <= ||f||_2`` for an averaging kernel (Young with ``||K||_1 <= 1``).

    The right side deliberately ignores the stored mass: a kernel whose
    weights do not sum to at most one fails here.
    """
    lhs = lp_norm(convolve(f, K, path), 2)
    rhs = lp_norm(f, 2)
    return CheckReport("young_l2", {"kernel": K.meta.to_dict()},
                       {"lhs": lhs, "rhs": rhs, "mass": K.mass},
                       lhs <= rhs * (1 + rtol))


def report_dict(obj) -> dict:
    """JSON-ready view of any report type in this package."""
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    return asdict(obj)
