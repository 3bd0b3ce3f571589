"""Parity between the compiled kernels and the numpy fallback."""

import numpy as np
import pytest

from krylovsketch.kernels import BACKEND
from krylovsketch.kernels import _numpy_ref as ref

from conftest import random_sparse, rng

try:
    from krylovsketch.kernels import _ckernels as ck

    HAVE_C = True
except ImportError:
    ck = None
    HAVE_C = False

needs_compiled = pytest.mark.skipif(not HAVE_C, reason="compiled kernels not built")


def csr_parts(sp):
    return sp.row_ptr, sp.col_idx, sp.values, sp.rows


def make_map(d, m, seed):
    g = rng(seed)
    buckets = g.integers(0, m, size=d, dtype=np.int64)
    signs = (2.0 * g.integers(0, 2, size=d) - 1.0).astype(np.float64)
    return buckets, signs


def test_backend_reports_known_value():
    assert BACKEND in ("cython", "numpy")


@needs_compiled
def test_csr_dense_parity():
    for seed in range(6):
        sp = random_sparse(40, 25, 0.12, seed)
        b = np.ascontiguousarray(rng(seed + 1).standard_normal((25, 7)))
        indptr, indices, data, n = csr_parts(sp)
        np.testing.assert_allclose(
            ck.csr_dense(indptr, indices, data, n, b),
            ref.csr_dense(indptr, indices, data, n, b),
            rtol=1e-13,
            atol=1e-13,
        )


@needs_compiled
def test_csr_t_dense_parity():
    for seed in range(6):
        sp = random_sparse(30, 18, 0.15, seed + 10)
        b = np.ascontiguousarray(rng(seed + 11).standard_normal((30, 4)))
        indptr, indices, data, _ = csr_parts(sp)
        np.testing.assert_allclose(
            ck.csr_t_dense(indptr, indices, data, sp.cols, b),
            ref.csr_t_dense(indptr, indices, data, sp.cols, b),
            rtol=1e-13,
            atol=1e-13,
        )


@needs_compiled
def test_countsketch_dense_parity():
    for seed in range(6):
        a = np.ascontiguousarray(rng(seed + 20).standard_normal((12, 50)))
        buckets, signs = make_map(50, 9, seed + 21)
        np.testing.assert_allclose(
            ck.countsketch_dense(a, buckets, signs, 9),
            ref.countsketch_dense(a, buckets, signs, 9),
            rtol=1e-13,
            atol=1e-13,
        )


@needs_compiled
def test_countsketch_csr_parity():
    for seed in range(6):
        sp = random_sparse(35, 60, 0.08, seed + 30)
        buckets, signs = make_map(60, 11, seed + 31)
        indptr, indices, data, n = csr_parts(sp)
        np.testing.assert_allclose(
            ck.countsketch_csr(indptr, indices, data, n, buckets, signs, 11),
            ref.countsketch_csr(indptr, indices, data, n, buckets, signs, 11),
            rtol=1e-13,
            atol=1e-13,
        )


@needs_compiled
def test_parity_with_empty_rows():
    dense = np.zeros((6, 10))
    dense[1, 3] = 2.5
    dense[4, 9] = -1.0
    from krylovsketch import SparseMatrix

    sp = SparseMatrix.from_dense(dense)
    b = np.ascontiguousarray(rng(99).standard_normal((10, 3)))
    indptr, indices, data, n = csr_parts(sp)
    np.testing.assert_allclose(
        ck.csr_dense(indptr, indices, data, n, b),
        ref.csr_dense(indptr, indices, data, n, b),
        rtol=1e-13,
    )
    buckets, signs = make_map(10, 4, 98)
    np.testing.assert_allclose(
        ck.countsketch_csr(indptr, indices, data, n, buckets, signs, 4),
        ref.countsketch_csr(indptr, indices, data, n, buckets, signs, 4),
        rtol=1e-13,
    )


def test_reference_csr_dense_matches_dense_product():
    sp = random_sparse(20, 14, 0.2, 7)
    b = np.ascontiguousarray(rng(8).standard_normal((14, 5)))
    indptr, indices, data, n = csr_parts(sp)
    np.testing.assert_allclose(
        ref.csr_dense(indptr, indices, data, n, b),
        sp.to_dense().data @ b,
        atol=1e-12,
    )
