"""Pure numpy versions of the routines in ``_core.pyx``.

Same signatures and results; selected automatically when the compiled
module is unavailable (or when ``LPIMPROVE_PURE_PYTHON=1``).
"""

import numpy as np

# Above this many outer nonzeros a Python-level slice loop loses to np.convolve.
_SLICE_LOOP_MAX = 64


def direct_convolve(a, b):
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    na, nb = a.size, b.size
    if na == 0 or nb == 0:
        return np.zeros(0, dtype=np.float64)
    nz_a = np.flatnonzero(a)
    nz_b = np.flatnonzero(b)
    if nz_a.size * nb <= nz_b.size * na:
        outer, nz, inner = a, nz_a, b
    else:
        outer, nz, inner = b, nz_b, a
    if nz.size > _SLICE_LOOP_MAX:
        # np.convolve is a direct (non-FFT) summation in C.
        return np.convolve(a, b)
    out = np.zeros(na + nb - 1, dtype=np.float64)
    n_inner = inner.size
    for i in nz:
        out[i:i + n_inner] += outer[i] * inner
    return out


def sieve_odd_segment(lo, hi, base):
    n = (hi - lo + 1) // 2 if hi > lo else 0
    mask = np.ones(n, dtype=np.uint8)
    for p in np.asarray(base, dtype=np.int64).tolist():
        if p * p >= hi:
            break
        start = p * p
        if start < lo:
            start = -(-lo // p) * p
        if start % 2 == 0:
            start += p
        mask[(start - lo) // 2::p] = 0
    if lo == 1 and n > 0:
        mask[0] = 0
    return mask
