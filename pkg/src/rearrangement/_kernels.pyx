# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contracts as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, ceil
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL


def spline_eval(const double[::1] s, const double[::1] y):
    cdef Py_ssize_t omega = s.shape[0] - 1
    cdef Py_ssize_t m = y.shape[0]
    cdef double w = <double>omega
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t k, seg
    cdef double yk, x_lo, x_hi, frac, v, s_lo, s_hi
    for k in range(m):
        yk = y[k]
        seg = <Py_ssize_t>floor(yk * w)
        if seg < 0:
            seg = 0
        if seg > omega:
            seg = omega
        while seg > 0 and (<double>seg) / w > yk:
            seg -= 1
        while seg < omega and (<double>(seg + 1)) / w <= yk:
            seg += 1
        x_lo = (<double>seg) / w
        if x_lo == yk:
            res[k] = s[seg]
            continue
        if seg == omega:
            seg = omega - 1
            x_lo = (<double>seg) / w
        x_hi = (<double>(seg + 1)) / w
        s_lo = s[seg]
        s_hi = s[seg + 1]
        frac = (yk - x_lo) / (x_hi - x_lo)
        v = s_lo + frac * (s_hi - s_lo)
        if v < s_lo:
            v = s_lo
        if v > s_hi:
            v = s_hi
        res[k] = v
    return out


def step_eval(const double[::1] s, const double[::1] y):
    cdef Py_ssize_t cells = s.shape[0]
    cdef Py_ssize_t m = y.shape[0]
    cdef double c = <double>cells
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] res = out
    cdef Py_ssize_t k, j
    cdef double yk
    for k in range(m):
        yk = y[k]
        # j = number of cell bounds l/cells (l = 0..cells) strictly below yk
        j = <Py_ssize_t>ceil(yk * c)
        if j < 0:
            j = 0
        if j > cells + 1:
            j = cells + 1
        while j > 0 and not ((<double>(j - 1)) / c < yk):
            j -= 1
        while j <= cells and (<double>j) / c < yk:
            j += 1
        j -= 1
        if j < 0:
            j = 0
        if j > cells - 1:
            j = cells - 1
        res[k] = s[j]
    return out


def inverse_cdf(const double[::1] F, const double[::1] y):
    cdef Py_ssize_t n = F.shape[0]
    cdef Py_ssize_t m = y.shape[0]
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[::1] res = out
    cdef Py_ssize_t k, lo, hi, mid
    cdef double yk
    for k in range(m):
        yk = y[k]
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) >> 1
            if F[mid] < yk:
                lo = mid + 1
            else:
                hi = mid
        res[k] = lo
    return out


def jitter_unit(uint64_t seed, uint64_t start, Py_ssize_t count, Py_ssize_t d):
    out = np.empty((count, d), dtype=np.float64)
    cdef double[:, ::1] res = out
    cdef Py_ssize_t p, j
    cdef uint64_t z, counter
    cdef double kk
    for p in range(count):
        for j in range(d):
            counter = (start + <uint64_t>p) * <uint64_t>d + <uint64_t>j
            z = seed + (counter + 1) * GAMMA
            z = (z ^ (z >> 30)) * MIX1
            z = (z ^ (z >> 27)) * MIX2
            z = z ^ (z >> 31)
            kk = <double>(z >> 12)
            res[p, j] = (2.0 * kk + 1.0) * 2.0 ** -52 - 1.0
    return out
