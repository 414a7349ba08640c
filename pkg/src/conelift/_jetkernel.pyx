# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for truncated-Taylor coefficient arithmetic.

Same contract as conelift._kernel_py; see that module for documentation.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KERNEL_NAME = "cython"


def mul_f64(double[::1] a, double[::1] b,
            int[::1] ia, int[::1] ib, int[::1] io, int nout):
    cdef cnp.ndarray[double, ndim=1] out_arr = np.zeros(nout)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t m, n = ia.shape[0]
    for m in range(n):
        out[io[m]] += a[ia[m]] * b[ib[m]]
    return out_arr


def horner_f64(double[::1] series, double[::1] dc,
               int[::1] ia, int[::1] ib, int[::1] io, int nout):
    cdef Py_ssize_t k = series.shape[0] - 1
    cdef cnp.ndarray[double, ndim=1] out_arr = np.zeros(nout)
    cdef cnp.ndarray[double, ndim=1] tmp_arr
    cdef double[::1] out = out_arr
    cdef double[::1] tmp
    cdef Py_ssize_t j, m, n = ia.shape[0]
    out[0] = series[k]
    for j in range(k - 1, -1, -1):
        tmp_arr = np.zeros(nout)
        tmp = tmp_arr
        for m in range(n):
            tmp[io[m]] += out[ia[m]] * dc[ib[m]]
        tmp[0] += series[j]
        out_arr = tmp_arr
        out = out_arr
    return out_arr
