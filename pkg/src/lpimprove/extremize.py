"""Near-extremal inputs for ``||K * f||_{p'} / ||f||_p`` on a finite window.

The main routine is the nonlinear power method for mixed norms: push ``f``
forward, map the image to its dual element in ``l^p``, pull back with the
adjoint and take the ``l^p`` dual map again.  For nonnegative kernels and
``p <= p'`` the ratio never decreases along the iteration.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import _backend
from .kernels import Kernel
from .signals import Signal, dual_exponent, lp_norm, next_pow2

MONOTONE_SLACK = 1e-12
BRUTE_FORCE_MAX_POINTS = 12
# Windows up to this size also start from every single-point mass.
POINT_START_MAX = 64


@dataclass
class ExtremizerResult:
    f: Signal
    ratio: float
    iterations: int
    converged: bool
    window: tuple[int, int]
    trace: list[float] = field(default_factory=list, repr=False)

    def is_monotone(self, slack: float = MONOTONE_SLACK) -> bool:
        t = np.asarray(self.trace)
        if t.size < 2:
            return True
        return bool(np.all(np.diff(t) >= -slack * t[1:]))

    def to_dict(self) -> dict:
        return {"f": self.f.to_dict(), "ratio": self.ratio, "iterations": self.iterations,
                "converged": self.converged, "window": list(self.window),
                "trace": [float(r) for r in self.trace]}


class WindowOperator:
    """Convolution by ``K`` on signals living in ``[lo, hi]``, with its adjoint.

    Picks direct summation or a cached-spectrum FFT once, at construction.
    """

    def __init__(self, K: Kernel, lo: int, hi: int, path: str = "auto"):
        if hi < lo:
            raise ValueError("empty window")
        self.lo, self.hi = int(lo), int(hi)
        self.size = self.hi - self.lo + 1
        self.kv = np.ascontiguousarray(K.values)
        self.kv_rev = np.ascontiguousarray(self.kv[::-1])
        self.out_offset = self.lo + K.offset
        self.n_out = self.size + self.kv.size - 1
        self.nfft = next_pow2(self.n_out)
        if path == "auto":
            direct_cost = K.nnz * self.size
            fft_cost = 8 * self.nfft * max(1, int(math.log2(self.nfft)))
            path = "direct" if direct_cost <= fft_cost else "fft"
        self.path = path
        if path == "fft":
            self._kspec = np.fft.rfft(self.kv, self.nfft)

    def forward(self, f: np.ndarray) -> np.ndarray:
        if self.path == "direct":
            return _backend.direct_convolve(f, self.kv)
        return np.fft.irfft(np.fft.rfft(f, self.nfft) * self._kspec, self.nfft)[: self.n_out]

    def adjoint(self, v: np.ndarray) -> np.ndarray:
        """``w(y) = sum_x K(x - y) v(x)`` on the window."""
        m = self.kv.size
        if self.path == "direct":
            r = _backend.direct_convolve(np.ascontiguousarray(v), self.kv_rev)
            return r[m - 1:m - 1 + self.size]
        c = np.fft.irfft(np.fft.rfft(v, self.nfft) * np.conj(self._kspec), self.nfft)
        return c[: self.size]

    def dense(self) -> np.ndarray:
        """Explicit matrix, rows indexed by output position; small windows only."""
        A = np.zeros((self.n_out, self.size))
        for j in range(self.size):
            A[j:j + self.kv.size, j] = self.kv
        return A


def default_window(K: Kernel) -> tuple[int, int]:
    """``[-2S, 2S]`` with ``S`` the largest |position| of the kernel (``N^d`` for ``x^d``)."""
    S = max(abs(K.start), abs(K.stop - 1))
    return -2 * S, 2 * S


def _check_p(p: float) -> float:
    if not 1 < p <= 2:
        raise ValueError(f"power iteration needs p in (1, 2], got {p}")
    return dual_exponent(p)


def _iterate(op: WindowOperator, f: np.ndarray, p: float, pp: float, tol: float,
             max_iter: int) -> tuple[np.ndarray, float, list[float], bool]:
    f = f / lp_norm(f, p)
    trace: list[float] = []
    best_f, best = f, -1.0
    converged = False
    for _ in range(max_iter):
        u = np.maximum(op.forward(f), 0.0)
        ratio = lp_norm(u, pp)
        trace.append(ratio)
        if ratio > best:
            best, best_f = ratio, f
        if len(trace) > 1 and abs(ratio - trace[-2]) <= tol * ratio:
            converged = True
            break
        v = (u / ratio) ** (pp - 1.0)
        w = np.maximum(op.adjoint(v), 0.0)
        f = w ** (1.0 / (p - 1.0))
        fn = lp_norm(f, p)
        if fn == 0.0:
            break
        f = f / fn
    return best_f, best, trace, converged


def power_iterate(K: Kernel, p: float, window: tuple[int, int] | None = None,
                  tol: float = 1e-8, max_iter: int = 500, init=None, restarts: int = 0,
                  seed: int = 0, point_starts: bool | None = None,
                  path: str = "auto") -> ExtremizerResult:
    """Maximize ``||K * f||_{p'} / ||f||_p`` over ``f >= 0`` supported in ``window``.

    The first start is the constant profile (or ``init``).  For p < 2 the
    problem has several nonnegative fixed points, so on windows of at most
    ``POINT_START_MAX`` samples every single-point mass is tried as well;
    ``restarts`` adds seeded random positive starts.  Each run stops when the
    relative change of the ratio drops below ``tol``.  The best run is
    returned; its trace is nondecreasing.
    """
    pp = _check_p(p)
    if K.nnz == 0:
        raise ValueError("zero kernel")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = default_window(K) if window is None else (int(window[0]), int(window[1]))
    op = WindowOperator(K, lo, hi, path)
    if init is None:
        first = np.ones(op.size)
    else:
        first = np.array(init.values if isinstance(init, Signal) else init, dtype=np.float64)
        if first.shape != (op.size,) or np.any(first < 0) or not np.any(first > 0):
            raise ValueError("init must be nonnegative, nonzero and match the window")
    starts = [first]
    if point_starts is None:
        point_starts = p < 2 and op.size <= POINT_START_MAX
    if point_starts:
        starts += [np.eye(1, op.size, i)[0] for i in range(op.size)]
    rng = np.random.default_rng(seed)
    starts += [random_positive_init(op.size, rng) for _ in range(restarts)]

    best = None
    for f0 in starts:
        run = _iterate(op, f0, p, pp, tol, max_iter)
        if best is None or run[1] > best[1]:
            best = run
    f, ratio, trace, converged = best
    return ExtremizerResult(Signal(lo, f), ratio, len(trace), converged, (lo, hi), trace)


def random_positive_init(size: int, rng: np.random.Generator) -> np.ndarray:
    return 0.5 + rng.random(size)


def multistart(K: Kernel, p: float, window: tuple[int, int] | None = None,
               restarts: int = 5, seed: int = 0, **kw) -> list[float]:
    """Ratios from ``restarts`` random positive starts (fixed points need not be unique)."""
    lo, hi = default_window(K) if window is None else window
    rng = np.random.default_rng(seed)
    return [power_iterate(K, p, (lo, hi), init=random_positive_init(hi - lo + 1, rng),
                          point_starts=False, **kw).ratio
            for _ in range(restarts)]


@dataclass
class BruteForceResult:
    lower: float
    upper: float
    f: Signal
    grid_best: float
    evaluated: int

    @property
    def value(self) -> float:
        return self.lower


def _simplex_grid(n: int, levels: int) -> np.ndarray:
    """All ``k in Z_{>=0}^n`` with ``sum k = levels`` (stars and bars)."""
    rows = []
    for bars in itertools.combinations(range(levels + n - 1), n - 1):
        edges = (-1,) + bars + (levels + n - 1,)
        rows.append([edges[i + 1] - edges[i] - 1 for i in range(n)])
    return np.asarray(rows, dtype=np.float64)


def _ratio_and_grad(f, A, p, pp):
    u = A @ f
    nu = lp_norm(u, pp)
    nf = lp_norm(f, p)
    if nu == 0.0 or nf == 0.0:
        return 0.0, np.zeros_like(f)
    r = nu / nf
    g_num = A.T @ (np.maximum(u, 0.0) / nu) ** (pp - 1.0)
    g_den = (f / nf) ** (p - 1.0)
    return r, (g_num - r * g_den) / nf


def brute_force_norm(K: Kernel, p: float, window: tuple[int, int], grid: int = 8,
                     polish: bool = True, max_evals: int = 2_000_000) -> BruteForceResult:
    """Exhaustive search over nonnegative ``f`` on a tiny window.

    The unit ``l^p`` sphere is sampled as ``f_i = (k_i / grid)^(1/p)`` with
    ``sum k_i = grid``; the best few grid points are then polished with
    L-BFGS-B.  ``upper`` is the Riesz-Thorin bound between ``l^1 -> l^inf``
    (largest entry) and ``l^2 -> l^2`` (largest singular value).
    """
    pp = _check_p(p)
    lo, hi = int(window[0]), int(window[1])
    n = hi - lo + 1
    if n < 1 or n > BRUTE_FORCE_MAX_POINTS:
        raise ValueError(f"brute force limited to 1..{BRUTE_FORCE_MAX_POINTS} points, got {n}")
    if math.comb(grid + n - 1, n - 1) > max_evals:
        raise ValueError("grid too fine for this window (combinatorial explosion)")
    A = WindowOperator(K, lo, hi, "direct").dense()
    S = _simplex_grid(n, grid)
    F = (S / grid) ** (1.0 / p)
    best_vals = np.empty(F.shape[0])
    for i in range(0, F.shape[0], 8192):
        U = F[i:i + 8192] @ A.T
        m = np.abs(U).max(axis=1, keepdims=True)
        m[m == 0] = 1.0
        best_vals[i:i + 8192] = m[:, 0] * np.sum((np.abs(U) / m) ** pp, axis=1) ** (1.0 / pp)
    order = np.argsort(-best_vals)
    grid_best = float(best_vals[order[0]])
    lower, f_best = grid_best, F[order[0]]
    if polish:
        for idx in order[: min(5, order.size)]:
            x0 = F[idx] + 1e-3
            res = minimize(lambda x: tuple(-t for t in _ratio_and_grad(x, A, p, pp)),
                           x0, jac=True, method="L-BFGS-B",
                           bounds=[(0.0, None)] * n, options={"ftol": 1e-15, "gtol": 1e-12})
            r, _ = _ratio_and_grad(res.x, A, p, pp)
            if r > lower:
                lower, f_best = r, res.x / lp_norm(res.x, p)
    theta = 2.0 / pp
    sigma = float(np.linalg.norm(A, 2))
    upper = float(A.max()) ** (1.0 - theta) * sigma**theta
    return BruteForceResult(lower, upper, Signal(lo, f_best), grid_best, int(F.shape[0]))


def dense_top_singular_value(K: Kernel, window: tuple[int, int]) -> float:
    """Largest singular value of the window-restricted convolution matrix."""
    A = WindowOperator(K, window[0], window[1], "direct").dense()
    return float(np.linalg.svd(A, compute_uv=False)[0])
