# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops; same contract as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs

cnp.import_array()


def weight_matrix(logcoef, ppow, qpow, xs):
    cdef const double[::1] lc = np.ascontiguousarray(logcoef, dtype=np.float64)
    cdef const double[::1] pp = np.ascontiguousarray(ppow, dtype=np.float64)
    cdef const double[::1] qp = np.ascontiguousarray(qpow, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = lc.shape[0] - 1
    cdef Py_ssize_t m = xv.shape[0]
    out_arr = np.zeros((m, n + 1), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] tail = np.zeros(n + 1, dtype=np.float64)
    cdef Py_ssize_t i, k, s
    cdef double x, lx
    with nogil:
        for i in range(m):
            x = xv[i]
            if n == 0:
                out[i, 0] = 1.0
                continue
            if x == 0.0:
                out[i, 0] = 1.0
                continue
            if x == 1.0:
                out[i, n] = 1.0
                continue
            tail[0] = 0.0
            for s in range(n):
                tail[s + 1] = tail[s] + log(pp[s] - qp[s] * x)
            lx = log(x)
            for k in range(n + 1):
                out[i, k] = exp(lc[k] + k * lx + tail[n - k])
    return out_arr


def sup_modulus(values, Py_ssize_t max_lag):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, d
    cdef double best = 0.0, diff
    if max_lag > n - 1:
        max_lag = n - 1
    with nogil:
        for d in range(1, max_lag + 1):
            for i in range(n - d):
                diff = fabs(v[i + d] - v[i])
                if diff > best:
                    best = diff
    return best
