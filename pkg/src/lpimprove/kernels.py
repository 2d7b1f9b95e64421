"""Kernels of the averaging and fractional-integral operators.

Convention: ``convolve(f, K)(x) = sum_y K(y) f(x - y)``.  A weight at
position ``-P(k)`` therefore samples ``f(x + P(k))`` and a weight at ``+p``
samples ``f(x - p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .primes import sieve
from .signals import MAX_WINDOW, Signal, convolve

KINDS = ("poly", "prime", "fracint", "prime_fracint")


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, constant term first: ``(c, b, a)`` is ``a x^2 + b x + c``."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if len(coeffs) < 2:
            raise ValueError("polynomial must have degree >= 1")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def monomial(cls, d: int) -> "IntPolynomial":
        return cls((0,) * d + (1,))

    @classmethod
    def quadratic(cls, a: int, b: int = 0, c: int = 0) -> "IntPolynomial":
        return cls((c, b, a))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def is_monomial(self) -> bool:
        return self.coefficients[-1] == 1 and not any(self.coefficients[:-1])

    def abc(self) -> tuple[int, int, int]:
        if self.degree != 2:
            raise ValueError("not a quadratic")
        c, b, a = self.coefficients
        return a, b, c

    def nonnegative(self) -> bool:
        return all(c >= 0 for c in self.coefficients)

    def __call__(self, x):
        """Horner evaluation; exact for Python ints, int64 for arrays."""
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def bound(self, n: int) -> int:
        """Upper bound for ``|P(k)|`` on ``1 <= k <= n``."""
        return sum(abs(c) * n**i for i, c in enumerate(self.coefficients))

    def __str__(self) -> str:
        terms = []
        for i, c in reversed(list(enumerate(self.coefficients))):
            if c:
                terms.append(f"{c}" if i == 0 else f"{c}x^{i}" if i > 1 else f"{c}x")
        return " + ".join(terms)


@dataclass(frozen=True)
class KernelMeta:
    kind: str
    N: int
    lam: float | None = None
    poly: IntPolynomial | None = None
    degree: int | None = None
    in_scope: bool = True

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "N": self.N,
            "lambda": self.lam,
            "poly": list(self.poly.coefficients) if self.poly else None,
            "degree": self.degree,
            "in_scope": self.in_scope,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KernelMeta":
        poly = IntPolynomial(tuple(d["poly"])) if d.get("poly") else None
        return cls(d["kind"], int(d["N"]), d.get("lambda"), poly, d.get("degree"),
                   bool(d.get("in_scope", True)))


@dataclass(frozen=True, eq=False)
class Kernel(Signal):
    """Nonnegative finitely supported weight function with provenance."""

    meta: KernelMeta = field(default=None)

    def __post_init__(self):
        super().__post_init__()
        if np.any(self.values < 0):
            raise ValueError("kernel weights must be nonnegative")
        if self.meta is None or self.meta.kind not in KINDS:
            raise ValueError("kernel needs a meta block with a known kind")

    @property
    def weights(self) -> np.ndarray:
        return self.values

    @property
    def mass(self) -> float:
        return math.fsum(self.values[self.values != 0].tolist())

    def positions(self) -> np.ndarray:
        return self.indices()[self.values != 0]

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["meta"] = self.meta.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Kernel":
        return cls(int(d["offset"]), np.asarray(d["values"], dtype=np.float64),
                   KernelMeta.from_dict(d["meta"]))

    def with_weights(self, values) -> "Kernel":
        """Copy with replaced weights (same window and meta); used for mutation tests."""
        return Kernel(self.offset, values, self.meta)

    def __repr__(self) -> str:
        return f"Kernel({self.meta.kind}, N={self.meta.N}, offset={self.offset}, len={len(self)})"


def _deposit(positions: np.ndarray, weights, meta: KernelMeta) -> Kernel:
    lo, hi = int(positions.min()), int(positions.max())
    if hi - lo + 1 > MAX_WINDOW:
        raise OverflowError(f"kernel window {hi - lo + 1} exceeds 2^31 samples")
    vals = np.zeros(hi - lo + 1)
    np.add.at(vals, positions - lo, weights)
    return Kernel(lo, vals, meta)


def poly_kernel(P: IntPolynomial, N: int) -> Kernel:
    """Kernel of ``A^P_N f(x) = (1/N) sum_{k=1}^N f(x + P(k))``.

    Weight ``1/N`` sits at ``-P(k)``; repeated values accumulate.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if P.bound(N) >= 2**62:
        raise OverflowError(f"P(k) for k <= {N} overflows the index range")
    k = np.arange(1, N + 1, dtype=np.int64)
    pos = -P(k)
    injective = np.unique(pos).size == N
    scope = injective and P.nonnegative() and P.coefficients[-1] >= 1
    meta = KernelMeta("poly", N, poly=P, degree=P.degree, in_scope=bool(scope))
    return _deposit(pos, 1.0 / N, meta)


def monomial_kernel(d: int, N: int) -> Kernel:
    return poly_kernel(IntPolynomial.monomial(d), N)


def prime_kernel(N: int) -> Kernel:
    """Kernel of ``(1/N) sum_{p <= N} f(x - p) log p``: weight ``log p / N`` at ``+p``."""
    if N < 2:
        raise ValueError("prime kernel needs N >= 2")
    t = sieve(int(N))
    return _deposit(t.primes, t.log_weights / N, KernelMeta("prime", int(N), degree=1))


def _check_lambda(lam: float) -> None:
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")


def fracint_kernel(d: int, lam: float, M: int) -> Kernel:
    """Truncated ``I_{d,lam}``: weight ``m^-lam`` at ``m^d`` for ``m = 1..M``."""
    _check_lambda(lam)
    if d < 1 or M < 1:
        raise ValueError("need d >= 1 and M >= 1")
    if M**d >= MAX_WINDOW:
        raise OverflowError(f"truncation M={M} gives a window beyond 2^31")
    m = np.arange(1, M + 1, dtype=np.int64)
    w = m.astype(np.float64) ** (-lam)
    return _deposit(m**d, w, KernelMeta("fracint", int(M), lam=float(lam), degree=d))


def prime_fracint_kernel(lam: float, N: int) -> Kernel:
    """``J_{lam,N}``: weight ``log p / p^lam`` at ``+p`` for primes ``p <= N``."""
    _check_lambda(lam)
    if N < 2:
        raise ValueError("N must be >= 2")
    t = sieve(int(N))
    w = t.log_weights * np.exp(-lam * t.log_weights)
    return _deposit(t.primes, w, KernelMeta("prime_fracint", int(N), lam=float(lam), degree=1))


def iroot_ceil(n: int, d: int) -> int:
    """Smallest integer ``r >= 0`` with ``r**d >= n``."""
    if n <= 0:
        return 0
    r = int(round(n ** (1.0 / d)))
    while r**d < n:
        r += 1
    while r > 0 and (r - 1) ** d >= n:
        r -= 1
    return r


def fracint_truncation(d: int, eval_hi: int, supp_lo: int) -> int:
    """Truncation index making ``I_{d,lam}`` exact on windows up to ``eval_hi``.

    Terms with ``m^d > eval_hi - supp_lo`` only read samples below the
    support of ``f``.
    """
    return iroot_ceil(max(eval_hi - supp_lo, 0), d) + 1


def apply_fracint(f: Signal, d: int, lam: float, eval_hi: int, path: str = "auto") -> Signal:
    """``I_{d,lam} f`` with enough terms to be exact at every ``n <= eval_hi``.

    Below ``f.start + 1`` the operator vanishes, so ``.at()`` on the result
    returns the full infinite sum for any ``n <= eval_hi``.
    """
    M = fracint_truncation(d, eval_hi, f.start)
    return convolve(f, fracint_kernel(d, lam, M), path)


def quadratic_reduction(f: Signal, a: int) -> Signal:
    """Spread ``f`` onto ``4a Z``: ``g(4am) = f(m)``, zero off the sublattice."""
    if a < 1:
        raise ValueError("a must be >= 1")
    step = 4 * a
    if len(f) == 0:
        return Signal.zero()
    vals = np.zeros(step * (len(f) - 1) + 1)
    vals[::step] = f.values
    return Signal(step * f.offset, vals)


def reduction_scale(P: IntPolynomial) -> tuple[int, int, int]:
    a, b, c = P.abc()
    if a < 1 or b < 0 or c < 0:
        raise ValueError("need a >= 1 and b, c >= 0")
    return a, b, c


@dataclass
class DominationReport:
    """Pointwise check ``lhs <= rhs`` over a window of integers."""

    name: str
    params: dict
    window: tuple[int, int]
    min_slack: float
    max_slack: float
    violations: list[int]
    worst_x: int | None
    equality_points: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "values": {"window": list(self.window), "min_slack": self.min_slack,
                       "max_slack": self.max_slack, "equality_points": self.equality_points},
            "verdict": "pass" if self.passed else "fail",
            "worstCase": {"x": self.worst_x, "violations": self.violations[:20]},
        }


def compare_pointwise(name: str, params: dict, xs: np.ndarray, lhs: np.ndarray,
                      rhs: np.ndarray, rtol: float = 1e-12) -> DominationReport:
    slack = rhs - lhs
    scale = max(1.0, float(np.max(np.abs(lhs), initial=0.0)))
    tol = rtol * scale
    bad = xs[slack < -tol]
    if xs.size == 0:
        return DominationReport(name, params, (0, -1), 0.0, 0.0, [], None)
    i = int(np.argmin(slack))
    return DominationReport(
        name, params, (int(xs[0]), int(xs[-1])),
        float(slack[i]), float(slack.max()), bad.tolist(), int(xs[i]),
        int(np.count_nonzero(np.abs(slack) <= tol)),
    )


def reduction_domination_check(f: Signal, P: IntPolynomial, N: int,
                               path: str = "direct") -> DominationReport:
    """Check ``A^P_N f(x) <= (2a + b/N) A_{2aN+b} g(4a(x+c) - b^2)`` pointwise.

    ``g`` is ``quadratic_reduction(f, a)``.  Outside the window of the left
    side the left side vanishes and the right side is nonnegative.
    """
    if np.any(f.values < 0):
        raise ValueError("reduction domination needs f >= 0")
    a, b, c = reduction_scale(P)
    params = {"a": a, "b": b, "c": c, "N": N}
    if f.is_zero():
        return DominationReport("reduction_domination", params, (0, -1), 0.0, 0.0, [], None)
    lhs = convolve(f, poly_kernel(P, N), path)
    g = quadratic_reduction(f, a)
    M = 2 * a * N + b
    h = convolve(g, monomial_kernel(2, M), path)
    xs = lhs.indices()
    rhs = (2 * a + b / N) * h.at(4 * a * (xs + c) - b * b)
    return compare_pointwise("reduction_domination", params, xs, lhs.values, rhs)


def kernels_from_spec(kind: str, N: int, degree: int = 2,
                      coeffs: Sequence[int] | None = None, lam: float | None = None,
                      M: int | None = None) -> Kernel:
    """Build a kernel from CLI-style parameters."""
    if kind in ("poly", "monomial"):
        return monomial_kernel(degree, N)
    if kind == "quadratic":
        a, b, c = coeffs or (1, 0, 0)
        return poly_kernel(IntPolynomial.quadratic(a, b, c), N)
    if kind in ("prime", "primes"):
        return prime_kernel(N)
    if kind == "fracint":
        return fracint_kernel(degree, lam, M if M is not None else N)
    if kind in ("prime_fracint", "prime-fracint"):
        return prime_fracint_kernel(lam, N)
    raise ValueError(f"unknown kernel kind {kind!r}")
