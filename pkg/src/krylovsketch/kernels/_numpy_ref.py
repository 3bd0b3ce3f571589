"""Numpy reference implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable and the
correctness oracle it is tested against. All take raw arrays, not matrix
wrappers; callers are responsible for dtype and bounds.
"""

import numpy as np


def csr_dense(indptr, indices, data, n_rows, b):
    """Product of a CSR matrix with a dense block, touching only stored nonzeros."""
    out = np.zeros((n_rows, b.shape[1]))
    rows = np.repeat(np.arange(n_rows), np.diff(indptr))
    np.add.at(out, rows, data[:, None] * b[indices])
    return out


def csr_t_dense(indptr, indices, data, n_cols, b):
    """Product of the transpose of a CSR matrix with a dense block."""
    n_rows = len(indptr) - 1
    out = np.zeros((n_cols, b.shape[1]))
    rows = np.repeat(np.arange(n_rows), np.diff(indptr))
    np.add.at(out, indices, data[:, None] * b[rows])
    return out


def countsketch_dense(a, buckets, signs, m):
    """Scatter the columns of a dense matrix into m signed buckets."""
    out = np.zeros((a.shape[0], m))
    np.add.at(out.T, buckets, (a * signs).T)
    return out


def countsketch_csr(indptr, indices, data, n_rows, buckets, signs, m):
    """Scatter a CSR matrix into m signed buckets, one add per stored nonzero."""
    out = np.zeros((n_rows, m))
    rows = np.repeat(np.arange(n_rows), np.diff(indptr))
    np.add.at(out, (rows, buckets[indices]), data * signs[indices])
    return out
