"""Prime tables and the elementary prime-counting facts used by the prime averages."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import _backend

MAX_LIMIT = 10**9
SEGMENTED_ABOVE = 10**7
SEGMENT_SPAN = 1 << 23
VERIFY_FRACTION = 0.01
VERIFY_CAP = 100_000


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """All primes ``<= limit`` with their logarithms."""

    limit: int
    primes: np.ndarray
    log_weights: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        """``r_N``, the number of primes up to the limit."""
        return int(self.primes.size)

    def nth(self, n: int) -> int:
        """``p_n`` with ``p_1 = 2``."""
        if not 1 <= n <= self.count:
            raise IndexError(f"p_{n} not in table of {self.count} primes")
        return int(self.primes[n - 1])

    def upto(self, n: int) -> np.ndarray:
        return self.primes[: int(np.searchsorted(self.primes, n, side="right"))]


def _base_primes(n: int) -> np.ndarray:
    """Odd primes up to ``n`` from a plain numpy sieve (n is at most ~31623)."""
    if n < 3:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(n + 1, dtype=bool)
    is_p[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if is_p[q]:
            is_p[q * q::q] = False
    out = np.flatnonzero(is_p).astype(np.int64)
    return np.ascontiguousarray(out[out > 2])


def _sieve_array(n: int) -> np.ndarray:
    base = _base_primes(math.isqrt(n))
    span = n if n <= SEGMENTED_ABOVE else SEGMENT_SPAN
    chunks = [np.array([2], dtype=np.int64)]
    lo = 3
    while lo <= n:
        hi = min(lo + span, n + 1)
        mask = np.asarray(_backend.sieve_odd_segment(lo, hi, base), dtype=bool)
        chunks.append(lo + 2 * np.flatnonzero(mask).astype(np.int64))
        lo = hi if hi % 2 == 1 else hi + 1
    return np.concatenate(chunks)


def is_prime_trial(values: np.ndarray) -> np.ndarray:
    """Vectorized trial-division primality test (independent of the sieve)."""
    v = np.asarray(values, dtype=np.int64)
    ok = v >= 2
    ok &= (v % 2 != 0) | (v == 2)
    top = math.isqrt(int(v.max())) if v.size else 0
    for d in range(3, top + 1, 2):
        ok &= (v % d != 0) | (v == d)
    return ok


def _verify(table: PrimeTable, rng: np.random.Generator) -> None:
    n = table.limit
    size = min(max(1, math.ceil(VERIFY_FRACTION * (n - 1))), VERIFY_CAP)
    sample = rng.integers(2, n + 1, size=size)
    listed = np.isin(sample, table.primes)
    if not np.array_equal(listed, is_prime_trial(sample)):
        bad = sample[listed != is_prime_trial(sample)]
        raise RuntimeError(f"sieve disagrees with trial division at {bad[:5].tolist()}")


@lru_cache(maxsize=16)
def sieve(n: int, verify: bool = True) -> PrimeTable:
    """Exact table of primes up to ``n`` (``2 <= n <= 10**9``).

    One segment below ``10**7``, segmented above to bound memory.  With
    ``verify`` a 1% sample of ``[2, n]`` (capped) is re-checked by trial
    division.
    """
    n = int(n)
    if not 2 <= n <= MAX_LIMIT:
        raise ValueError(f"sieve limit must lie in [2, {MAX_LIMIT}], got {n}")
    ps = _sieve_array(n)
    ps.setflags(write=False)
    logs = np.log(ps.astype(np.float64))
    logs.setflags(write=False)
    table = PrimeTable(n, ps, logs)
    if verify:
        _verify(table, np.random.default_rng(n))
    return table


def chebyshev_theta(n: int) -> float:
    """``theta(N) = sum_{p <= N} log p``."""
    if n < 2:
        return 0.0
    return math.fsum(sieve(int(n)).log_weights.tolist())


@dataclass
class NthPrimeReport:
    n_max: int
    checked: int
    lower_failures: list[int]
    upper_failures: list[int]
    min_lower_slack: float
    min_upper_slack: float

    @property
    def passed(self) -> bool:
        return not self.lower_failures and not self.upper_failures


def nth_prime_bounds(n) -> tuple[np.ndarray, np.ndarray]:
    """``n log n + n log log n - n`` and ``n log n + n log log n``."""
    n = np.asarray(n, dtype=np.float64)
    core = n * np.log(n) + n * np.log(np.log(n))
    return core - n, core


def nth_prime_bounds_check(n_max: int) -> NthPrimeReport:
    """Compare ``p_n`` against the two-sided bounds for ``6 <= n <= n_max``.

    The bounds are not valid for very small n; the check window starts at 6.
    """
    if n_max < 6:
        raise ValueError("n_max must be at least 6")
    limit = int(n_max * (math.log(n_max) + math.log(math.log(n_max)))) + 16
    table = sieve(limit)
    if table.count < n_max:
        raise RuntimeError("sieve bound too small for requested n_max")
    n = np.arange(6, n_max + 1)
    pn = table.primes[n - 1].astype(np.float64)
    lo, hi = nth_prime_bounds(n)
    return NthPrimeReport(
        n_max=n_max,
        checked=int(n.size),
        lower_failures=n[pn < lo].tolist(),
        upper_failures=n[pn > hi].tolist(),
        min_lower_slack=float(np.min(pn - lo)),
        min_upper_slack=float(np.min(hi - pn)),
    )


class PrimeSum(NamedTuple):
    sum: float
    ratio: float


def prime_sum_estimate(lam: float, n: int) -> PrimeSum:
    """``sum_{p <= N} log p / p^lam`` and its ratio to ``N^(1 - lam)``."""
    if not 0 < lam < 1:
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    if n < 2:
        raise ValueError("N must be at least 2")
    t = sieve(int(n))
    s = math.fsum((t.log_weights * np.exp(-lam * t.log_weights)).tolist())
    return PrimeSum(s, s / n ** (1.0 - lam))
