# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: sparse products and the countsketch scatter.

Signatures mirror _numpy_ref exactly; loop order matches its accumulation
order so both backends agree to rounding.
"""

import numpy as np

cimport cython
cimport numpy as cnp

cnp.import_array()


def csr_dense(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
              double[::1] data, Py_ssize_t n_rows, double[:, ::1] b):
    cdef Py_ssize_t m = b.shape[1]
    out_arr = np.zeros((n_rows, m))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, p, j, c
    cdef double v
    with nogil:
        for i in range(n_rows):
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                v = data[p]
                for c in range(m):
                    out[i, c] += v * b[j, c]
    return out_arr


def csr_t_dense(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                double[::1] data, Py_ssize_t n_cols, double[:, ::1] b):
    cdef Py_ssize_t n_rows = indptr.shape[0] - 1
    cdef Py_ssize_t m = b.shape[1]
    out_arr = np.zeros((n_cols, m))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, p, j, c
    cdef double v
    with nogil:
        for i in range(n_rows):
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                v = data[p]
                for c in range(m):
                    out[j, c] += v * b[i, c]
    return out_arr


def countsketch_dense(double[:, ::1] a, cnp.int64_t[::1] buckets,
                      double[::1] signs, Py_ssize_t m):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t d = a.shape[1]
    out_arr = np.zeros((n, m))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    with nogil:
        for j in range(d):
            for i in range(n):
                out[i, buckets[j]] += signs[j] * a[i, j]
    return out_arr


def countsketch_csr(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                    double[::1] data, Py_ssize_t n_rows,
                    cnp.int64_t[::1] buckets, double[::1] signs, Py_ssize_t m):
    out_arr = np.zeros((n_rows, m))
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, p, j
    with nogil:
        for i in range(n_rows):
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                out[i, buckets[j]] += signs[j] * data[p]
    return out_arr
