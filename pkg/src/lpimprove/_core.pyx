# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: sparse-aware direct convolution and odd-only sieve segments."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def direct_convolve(const double[::1] a, const double[::1] b):
    """Full linear convolution of ``a`` and ``b`` by direct summation.

    The outer loop runs over the nonzero samples of whichever operand gives
    the smaller multiply-add count, so sparse kernels cost ``nnz * len``.
    """
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    if na == 0 or nb == 0:
        return np.zeros(0, dtype=np.float64)
    cdef Py_ssize_t i, j, nnz_a = 0, nnz_b = 0
    for i in range(na):
        if a[i] != 0.0:
            nnz_a += 1
    for j in range(nb):
        if b[j] != 0.0:
            nnz_b += 1
    out_arr = np.zeros(na + nb - 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef const double[::1] outer
    cdef const double[::1] inner
    cdef Py_ssize_t n_outer, n_inner
    if nnz_a * nb <= nnz_b * na:
        outer = a
        inner = b
        n_outer = na
        n_inner = nb
    else:
        outer = b
        inner = a
        n_outer = nb
        n_inner = na
    cdef double w
    with nogil:
        for i in range(n_outer):
            w = outer[i]
            if w == 0.0:
                continue
            for j in range(n_inner):
                out[i + j] += w * inner[j]
    return out_arr


def sieve_odd_segment(long long lo, long long hi, const long long[::1] base):
    """Primality mask for the odd integers ``lo, lo+2, ...`` below ``hi``.

    ``lo`` must be odd and ``base`` must hold every odd prime up to
    ``isqrt(hi - 1)`` in increasing order.
    """
    cdef Py_ssize_t n = (hi - lo + 1) // 2 if hi > lo else 0
    mask_arr = np.ones(n, dtype=np.uint8)
    cdef unsigned char[::1] mask = mask_arr
    cdef Py_ssize_t k, nb = base.shape[0]
    cdef long long p, start, idx
    with nogil:
        for k in range(nb):
            p = base[k]
            if p * p >= hi:
                break
            start = p * p
            if start < lo:
                start = ((lo + p - 1) // p) * p
            if start % 2 == 0:
                start += p
            idx = (start - lo) // 2
            while idx < n:
                mask[idx] = 0
                idx += p
    if lo == 1 and n > 0:
        mask_arr[0] = 0
    return mask_arr
