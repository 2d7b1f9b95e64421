"""Finitely supported signals on the integers, l^p norms and convolution.

A :class:`Signal` is a dense window of float64 samples plus the integer
index of the first sample.  Everything outside the window is zero.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import _backend

MAX_WINDOW = 2**31

# Multiply-add estimate above which ``convolve(path="auto")`` switches to FFT.
AUTO_FFT_THRESHOLD = 2**20


@dataclass(frozen=True, eq=False)
class Signal:
    """Real-valued function on Z with finite support.

    ``values[i]`` is the sample at index ``offset + i``.  The stored array is
    made read-only so signals can be shared freely between threads.
    """

    offset: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        if vals.size > MAX_WINDOW:
            raise ValueError(f"window of {vals.size} samples exceeds 2^31")
        if not np.all(np.isfinite(vals)):
            raise ValueError("signal values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "offset", int(self.offset))

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls) -> "Signal":
        return cls(0, np.zeros(0))

    @classmethod
    def delta(cls, at: int = 0, value: float = 1.0) -> "Signal":
        return cls(at, np.array([value]))

    @classmethod
    def indicator(cls, lo: int, hi: int) -> "Signal":
        """Indicator of the integer interval ``[lo, hi]`` (both ends included)."""
        if hi < lo:
            return cls.zero()
        return cls(lo, np.ones(hi - lo + 1))

    @classmethod
    def from_mapping(cls, samples: Mapping[int, float]) -> "Signal":
        if not samples:
            return cls.zero()
        lo, hi = min(samples), max(samples)
        vals = np.zeros(hi - lo + 1)
        for k, v in samples.items():
            vals[k - lo] = v
        return cls(lo, vals)

    # -- geometry -------------------------------------------------------
    @property
    def start(self) -> int:
        return self.offset

    @property
    def stop(self) -> int:
        """One past the last stored index."""
        return self.offset + self.values.size

    def __len__(self) -> int:
        return self.values.size

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.values))

    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.stop, dtype=np.int64)

    def is_zero(self) -> bool:
        return self.nnz == 0

    def at(self, x):
        """Sample(s) at integer position(s) ``x``; zero outside the window."""
        xs = np.asarray(x, dtype=np.int64)
        idx = xs - self.offset
        inside = (idx >= 0) & (idx < self.values.size)
        out = np.zeros(xs.shape)
        out[inside] = self.values[idx[inside]]
        return float(out) if out.ndim == 0 else out

    def trimmed(self) -> "Signal":
        """Same function with leading and trailing zeros dropped."""
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return Signal.zero()
        return Signal(self.offset + int(nz[0]), self.values[nz[0]:nz[-1] + 1])

    def restricted(self, lo: int, hi: int) -> "Signal":
        """Samples on ``[lo, hi]`` as a dense window (zero-filled)."""
        return Signal(lo, self.at(np.arange(lo, hi + 1)))

    def reflected(self) -> "Signal":
        """``g(y) = f(-y)``."""
        return Signal(-(self.stop - 1), self.values[::-1])

    def scaled(self, c: float) -> "Signal":
        return Signal(self.offset, c * self.values)

    def shifted(self, k: int) -> "Signal":
        """``g(x) = f(x - k)``."""
        return Signal(self.offset + k, self.values)

    def allclose(self, other: "Signal", rtol: float = 1e-12, atol: float = 1e-15) -> bool:
        lo = min(self.start, other.start)
        hi = max(self.stop, other.stop) - 1
        xs = np.arange(lo, hi + 1)
        return bool(np.allclose(self.at(xs), other.at(xs), rtol=rtol, atol=atol))

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        return {"offset": self.offset, "values": [float(v) for v in self.values]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: Mapping) -> "Signal":
        return cls(int(d["offset"]), np.asarray(d["values"], dtype=np.float64))

    @classmethod
    def from_json(cls, text: str) -> "Signal":
        return cls.from_dict(json.loads(text))

    def to_csv(self, fh=None) -> str | None:
        """Write ``index,value`` rows; returns the text when ``fh`` is None."""
        buf = io.StringIO() if fh is None else fh
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "value"])
        for x, v in zip(self.indices().tolist(), self.values.tolist()):
            writer.writerow([x, repr(v)])
        return buf.getvalue() if fh is None else None

    def __repr__(self) -> str:
        return f"Signal(offset={self.offset}, len={len(self)}, nnz={self.nnz})"


def dual_exponent(p: float) -> float:
    """Hölder conjugate ``p / (p - 1)``."""
    if not p > 1:
        raise ValueError(f"dual exponent needs p > 1, got {p}")
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class ExponentPair:
    """Lebesgue exponent ``p`` in (1, 2] together with its dual."""

    p: float

    def __post_init__(self):
        if not 1 < self.p <= 2:
            raise ValueError(f"p must lie in (1, 2], got {self.p}")

    @property
    def p_prime(self) -> float:
        return dual_exponent(self.p)

    def lam(self, d: int = 2) -> float:
        """``1 - (d/p - d/p')``, the fractional-integral exponent for degree ``d``."""
        return 1.0 - (d / self.p - d / self.p_prime)

    def gain(self, d: int = 1) -> float:
        """Exponent ``d/p' - d/p`` of the normalizer ``N^(d/p' - d/p)``."""
        return d / self.p_prime - d / self.p


def _as_array(f) -> np.ndarray:
    if isinstance(f, Signal):
        return f.values
    return np.asarray(f, dtype=np.float64).reshape(-1)


def lp_norm(f, p: float) -> float:
    """``(sum |f(n)|^p)^(1/p)``; ``p = inf`` gives ``max |f(n)|``.

    Accepts a :class:`Signal` or any array of samples.  The sum is taken on
    ``|f| / max|f|`` so large ``p`` does not overflow.
    """
    if not p >= 1:
        raise ValueError(f"lp_norm needs p >= 1, got {p}")
    a = np.abs(_as_array(f))
    if a.size == 0:
        return 0.0
    m = float(a.max())
    if m == 0.0:
        return 0.0
    if math.isinf(p):
        return m
    if p == 1:
        return float(math.fsum(a))
    if p == 2:
        return m * float(np.sqrt(np.dot(a / m, a / m)))
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


def distribution_function(f, alpha: float) -> int:
    """Number of lattice points with ``f(x) > alpha`` (strict)."""
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return int(np.count_nonzero(_as_array(f) > alpha))


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n) - 1).bit_length()


def fft_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Linear convolution through a zero-padded power-of-two real FFT."""
    n = a.size + b.size - 1
    nfft = next_pow2(n)
    spec = np.fft.rfft(a, nfft) * np.fft.rfft(b, nfft)
    return np.fft.irfft(spec, nfft)[:n]


def _auto_uses_fft(f: Signal, k: Signal) -> bool:
    sf, sk = f.nnz, k.nnz
    return (sf + sk) * min(sf, sk) > AUTO_FFT_THRESHOLD


def convolve(f: Signal, k: Signal, path: str = "auto") -> Signal:
    """``(f * k)(x) = sum_y k(y) f(x - y)`` on the Minkowski sum of the windows.

    ``path`` is ``"direct"`` (exact summation, compiled when available),
    ``"fft"`` or ``"auto"``.  The result is returned untrimmed.
    """
    if path not in ("auto", "direct", "fft"):
        raise ValueError(f"unknown convolution path {path!r}")
    if len(f) == 0 or len(k) == 0:
        return Signal.zero()
    n = len(f) + len(k) - 1
    if n > MAX_WINDOW:
        raise ValueError(f"output window of {n} samples exceeds 2^31")
    if path == "auto":
        path = "fft" if _auto_uses_fft(f, k) else "direct"
    if path == "direct":
        out = _backend.direct_convolve(f.values, k.values)
    else:
        out = fft_convolve(f.values, k.values)
    return Signal(f.offset + k.offset, out)


def correlate_on(v: Signal, k: Signal, lo: int, hi: int, path: str = "auto") -> Signal:
    """Adjoint of convolution by ``k``, sampled on ``[lo, hi]``.

    Returns ``w(y) = sum_x k(x - y) v(x)``, i.e. ``v`` convolved with the
    reflected kernel.
    """
    return convolve(v, k.reflected(), path).restricted(lo, hi)


def random_signal(rng: np.random.Generator, max_len: int = 64, spread: int = 64,
                  nonnegative: bool = False) -> Signal:
    """Random test signal with a random window inside ``[-spread, spread]``."""
    n = int(rng.integers(1, max_len + 1))
    off = int(rng.integers(-spread, spread + 1))
    vals = rng.random(n) if nonnegative else rng.standard_normal(n)
    if nonnegative:
        vals[rng.random(n) < 0.3] = 0.0
    return Signal(off, vals)


def signals_from_json_lines(lines: Iterable[str]) -> list[Signal]:
    return [Signal.from_json(line) for line in lines if line.strip()]
