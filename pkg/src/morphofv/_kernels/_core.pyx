# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: mixture log-densities and Fisher vector sums.

Mirrors ``_numpy``; loops run in fixed index order so results are
deterministic for a given input ordering.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt

cnp.import_array()

NAME = "compiled"

cdef double LOG_2PI = log(2.0 * 3.14159265358979323846)


def log_joint(double[:, ::1] x, double[:, ::1] means, double[:, ::1] variances,
              double[::1] log_weights):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t k = means.shape[0]
    out_arr = np.empty((m, k), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    logdet_arr = np.empty(k, dtype=np.float64)
    cdef double[::1] logdet = logdet_arr
    cdef Py_ssize_t i, j, c
    cdef double acc, diff

    for j in range(k):
        acc = 0.0
        for c in range(d):
            acc += log(variances[j, c])
        logdet[j] = acc

    for i in range(m):
        for j in range(k):
            acc = 0.0
            for c in range(d):
                diff = x[i, c] - means[j, c]
                acc += diff * diff / variances[j, c]
            out[i, j] = log_weights[j] - 0.5 * (d * LOG_2PI + logdet[j] + acc)
    return out_arr


def fv_sums(double[:, ::1] x, double[:, ::1] q, double[:, ::1] means,
            double[:, ::1] variances):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t d = x.shape[1]
    cdef Py_ssize_t k = means.shape[0]
    u_arr = np.zeros((k, d), dtype=np.float64)
    v_arr = np.zeros((k, d), dtype=np.float64)
    cdef double[:, ::1] u = u_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t i, j, c
    cdef double z, qq

    for j in range(k):
        for i in range(n):
            qq = q[i, j]
            for c in range(d):
                z = (x[i, c] - means[j, c]) / sqrt(variances[j, c])
                u[j, c] += qq * z
                v[j, c] += qq * (z * z - 1.0)
    return u_arr, v_arr
