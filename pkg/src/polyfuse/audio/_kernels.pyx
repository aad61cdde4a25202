# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-frame acoustic kernels.

Direct time-domain autocorrelation and a fused filterbank/log/DCT pass.
These are the hot loops of low-level-descriptor extraction; the NumPy
fallback in ``kernels_numpy`` computes the same quantities and either
backend may serve the pipeline.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt

cnp.import_array()

DEF SILENCE_ENERGY = 1e-12


cdef inline double _lag_product(const double* x, Py_ssize_t n, Py_ssize_t lag) nogil:
    """sum of x[t] * x[t + lag] over the overlap, with four independent
    accumulator chains so the compiler can vectorize the reduction."""
    cdef double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0
    cdef Py_ssize_t limit = n - lag
    cdef Py_ssize_t block = limit - (limit & 3)
    cdef Py_ssize_t t
    for t in range(0, block, 4):
        a0 += x[t] * x[t + lag]
        a1 += x[t + 1] * x[t + 1 + lag]
        a2 += x[t + 2] * x[t + 2 + lag]
        a3 += x[t + 3] * x[t + 3 + lag]
    for t in range(block, limit):
        a0 += x[t] * x[t + lag]
    return (a0 + a1) + (a2 + a3)


def pitch_and_voicing(double[:, ::1] frames, int min_lag, int max_lag):
    """Normalized-autocorrelation pitch lag and voicing per frame.

    Mirrors kernels_numpy.pitch_and_voicing: peak search over
    [min_lag, max_lag], parabolic refinement at interior peaks, voicing =
    normalized peak height clipped to [0, 1], silent frames -> (0, 0).
    """
    cdef Py_ssize_t n = frames.shape[0]
    cdef Py_ssize_t m = frames.shape[1]
    if min_lag < 2:
        min_lag = 2
    if max_lag > m - 2:
        max_lag = m - 2
    if max_lag < min_lag:
        raise ValueError(
            f"empty lag range [{min_lag}, {max_lag}] for frame size {m}"
        )

    lags_arr = np.zeros(n, dtype=np.float64)
    voicing_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] lags = lags_arr
    cdef double[::1] voicing = voicing_arr

    cdef Py_ssize_t i, lag
    cdef double r0, r, best, acc
    cdef Py_ssize_t best_lag
    cdef double r_prev, r_next, denom, delta
    cdef const double* row

    for i in range(n):
        row = &frames[i, 0]
        r0 = _lag_product(row, m, 0)
        if r0 < SILENCE_ENERGY:
            continue

        best = -1e300
        best_lag = min_lag
        for lag in range(min_lag, max_lag + 1):
            acc = _lag_product(row, m, lag)
            if acc > best:
                best = acc
                best_lag = lag
        # neighbors for parabolic refinement
        r_prev = _lag_product(row, m, best_lag - 1)
        r_next = _lag_product(row, m, best_lag + 1)

        if min_lag < best_lag < max_lag:
            denom = r_prev - 2.0 * best + r_next
            delta = 0.5 * (r_prev - r_next) / denom if denom != 0.0 else 0.0
            if delta > 0.5:
                delta = 0.5
            elif delta < -0.5:
                delta = -0.5
            lags[i] = best_lag + delta
        else:
            lags[i] = best_lag

        r = best / r0
        if r < 0.0:
            r = 0.0
        elif r > 1.0:
            r = 1.0
        voicing[i] = r
    return lags_arr, voicing_arr


def mfcc_from_power(double[:, ::1] power, double[:, ::1] filterbank,
                    double[:, ::1] dct, double log_floor):
    """Fused mel-energy, log, and cosine-transform pass."""
    cdef Py_ssize_t n = power.shape[0]
    cdef Py_ssize_t k = power.shape[1]
    cdef Py_ssize_t n_mels = filterbank.shape[0]
    cdef Py_ssize_t n_coef = dct.shape[0]
    if filterbank.shape[1] != k:
        raise ValueError("filterbank width does not match spectrum bins")
    if dct.shape[1] != n_mels:
        raise ValueError("DCT width does not match filter count")

    out_arr = np.zeros((n, n_coef), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    loge_arr = np.zeros(n_mels, dtype=np.float64)
    cdef double[::1] loge = loge_arr

    cdef Py_ssize_t i, j, b, c
    cdef double acc
    for i in range(n):
        for j in range(n_mels):
            acc = 0.0
            for b in range(k):
                acc += power[i, b] * filterbank[j, b]
            loge[j] = log(acc + log_floor)
        for c in range(n_coef):
            acc = 0.0
            for j in range(n_mels):
                acc += loge[j] * dct[c, j]
            out[i, c] = acc
    return out_arr


BACKEND_NAME = "compiled"
