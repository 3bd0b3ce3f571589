import warnings

import numpy as np
import pytest

from krylovsketch import (
    ArgumentError,
    DenseMatrix,
    SparseMatrix,
    frobenius_norm,
    matmul,
    matmul_transposed,
    orthonormalize_columns,
    spectral_norm_symmetric,
    svd_thin,
    truncated_svd,
)

from conftest import random_dense, random_sparse, rng, spectral_norm_oracle


class TestDenseMatrix:
    def test_copies_and_validates(self):
        arr = np.ones((2, 3))
        m = DenseMatrix(arr)
        arr[0, 0] = 99.0
        assert m.data[0, 0] == 1.0
        assert m.shape == (2, 3)

    def test_rejects_bad_input(self):
        with pytest.raises(ArgumentError):
            DenseMatrix(np.ones(3))
        with pytest.raises(ArgumentError):
            DenseMatrix(np.array([[1.0, np.nan]]))
        with pytest.raises(ArgumentError):
            DenseMatrix(np.array([[np.inf, 1.0]]))

    def test_zero_rows_allowed(self):
        m = DenseMatrix(np.zeros((0, 4)))
        assert m.rows == 0 and m.cols == 4


class TestSparseMatrix:
    def test_from_to_dense_round_trip(self):
        for seed in range(5):
            dense = np.zeros((8, 6))
            g = rng(seed)
            mask = g.random((8, 6)) < 0.3
            dense[mask] = g.standard_normal(int(mask.sum()))
            sp = SparseMatrix.from_dense(dense)
            np.testing.assert_array_equal(sp.to_dense().data, dense)
            assert sp.nnz == int(np.count_nonzero(dense))

    def test_rejects_unsorted_columns(self):
        with pytest.raises(ArgumentError):
            SparseMatrix(1, 4, np.array([0, 2]), np.array([2, 1]), np.array([1.0, 1.0]))

    def test_rejects_duplicate_columns(self):
        with pytest.raises(ArgumentError):
            SparseMatrix(1, 4, np.array([0, 2]), np.array([1, 1]), np.array([1.0, 1.0]))

    def test_rejects_out_of_range(self):
        with pytest.raises(ArgumentError):
            SparseMatrix(1, 3, np.array([0, 1]), np.array([3]), np.array([1.0]))

    def test_rejects_decreasing_row_ptr(self):
        with pytest.raises(ArgumentError):
            SparseMatrix(2, 3, np.array([0, 2, 1]), np.array([0, 1]), np.array([1.0, 1.0]))

    def test_rejects_stored_zero_and_nonfinite(self):
        with pytest.raises(ArgumentError):
            SparseMatrix(1, 3, np.array([0, 1]), np.array([0]), np.array([0.0]))
        with pytest.raises(ArgumentError):
            SparseMatrix(1, 3, np.array([0, 1]), np.array([0]), np.array([np.nan]))


class TestSvd:
    def test_identity(self):
        f = svd_thin(DenseMatrix(np.eye(4)))
        np.testing.assert_allclose(f.s, np.ones(4))

    def test_diagonal(self):
        f = svd_thin(DenseMatrix(np.diag([3.0, 2.0, 1.0])))
        np.testing.assert_allclose(f.s, [3.0, 2.0, 1.0], atol=1e-12)

    def test_against_eig_of_gram(self):
        for seed in range(6):
            a = random_dense(8, 5, seed)
            f = svd_thin(a)
            evals = np.linalg.eigvalsh(a.data.T @ a.data)[::-1]
            np.testing.assert_allclose(f.s ** 2, np.clip(evals, 0.0, None), atol=1e-8)

    def test_reconstruction_and_orthogonality(self):
        a = random_dense(10, 7, 3)
        f = svd_thin(a)
        recon = f.u.data @ np.diag(f.s) @ f.vt.data
        assert np.linalg.norm(recon - a.data) <= 1e-10 * np.linalg.norm(a.data)
        np.testing.assert_allclose(f.u.data.T @ f.u.data, np.eye(7), atol=1e-10)
        np.testing.assert_allclose(f.vt.data @ f.vt.data.T, np.eye(7), atol=1e-10)

    def test_singular_values_nonincreasing(self):
        for seed in range(4):
            f = svd_thin(random_dense(12, 9, seed + 40))
            assert np.all(np.diff(f.s) <= 1e-15)


class TestTruncatedSvd:
    def test_full_rank_matches_thin(self):
        a = random_dense(6, 4, 9)
        full = svd_thin(a)
        trunc = truncated_svd(a, 4)
        np.testing.assert_allclose(trunc.s, full.s, atol=1e-12)

    def test_rank_one_of_diagonal(self):
        f = truncated_svd(DenseMatrix(np.diag([3.0, 2.0, 1.0])), 1)
        assert f.s.shape == (1,)
        np.testing.assert_allclose(f.s, [3.0], atol=1e-12)
        assert abs(abs(f.vt.data[0, 0]) - 1.0) <= 1e-12

    def test_beats_random_rank_k_candidates(self):
        a = random_dense(10, 6, 77)
        f = truncated_svd(a, 2)
        best = np.linalg.norm(a.data - f.u.data @ np.diag(f.s) @ f.vt.data)
        g = rng(78)
        for _ in range(100):
            basis = np.linalg.qr(g.standard_normal((6, 2)))[0]
            cand = np.linalg.norm(a.data - a.data @ basis @ basis.T)
            assert best <= cand + 1e-9

    def test_invalid_k(self):
        a = random_dense(5, 3, 0)
        with pytest.raises(ArgumentError):
            truncated_svd(a, 0)
        with pytest.raises(ArgumentError):
            truncated_svd(a, 4)


class TestOrthonormalize:
    def test_preserves_orthonormal_input(self):
        q0 = np.linalg.qr(rng(5).standard_normal((12, 4)))[0]
        q = orthonormalize_columns(DenseMatrix(q0))
        assert q.cols == 4
        # Same column span, each column reproduced up to sign.
        overlap = np.abs(q.data.T @ q0)
        np.testing.assert_allclose(overlap, np.eye(4), atol=1e-10)

    def test_collinear_columns_collapse(self):
        v = rng(6).standard_normal((7, 1))
        q = orthonormalize_columns(DenseMatrix(np.hstack([v, 2.0 * v])))
        assert q.cols == 1

    def test_all_zero_gives_empty(self):
        q = orthonormalize_columns(DenseMatrix(np.zeros((5, 3))))
        assert q.cols == 0 and q.rows == 5

    def test_full_rank_properties(self):
        for seed in range(5):
            k = random_dense(20, 8, seed + 10)
            q = orthonormalize_columns(k)
            assert q.cols == 8
            np.testing.assert_allclose(q.data.T @ q.data, np.eye(8), atol=1e-10)
            resid = k.data - q.data @ (q.data.T @ k.data)
            assert np.linalg.norm(resid) <= 1e-9 * np.linalg.norm(k.data)

    def test_detects_numerical_rank(self):
        g = rng(21)
        low = g.standard_normal((20, 3)) @ g.standard_normal((3, 8))
        q = orthonormalize_columns(DenseMatrix(low))
        assert q.cols == 3
        resid = low - q.data @ (q.data.T @ low)
        assert np.linalg.norm(resid) <= 1e-9 * np.linalg.norm(low)

    def test_idempotent_on_own_output(self):
        k = random_dense(15, 6, 31)
        q1 = orthonormalize_columns(k)
        q2 = orthonormalize_columns(q1)
        assert q2.cols == q1.cols


class TestSpectralNormSymmetric:
    def test_diagonal_with_negative_dominant(self):
        m = DenseMatrix(np.diag([5.0, -7.0, 1.0]))
        assert abs(spectral_norm_symmetric(m, seed=0) - 7.0) <= 1e-7

    def test_zero_matrix(self):
        assert spectral_norm_symmetric(DenseMatrix(np.zeros((4, 4))), seed=0) == 0.0

    def test_against_eigvalsh(self):
        for seed in range(8):
            g = rng(seed + 100)
            m = g.standard_normal((30, 30))
            m = 0.5 * (m + m.T)
            got = spectral_norm_symmetric(DenseMatrix(m), seed=seed)
            want = spectral_norm_oracle(m)
            assert abs(got - want) <= 1e-8 * max(want, 1.0)

    def test_sign_flip_invariant(self):
        g = rng(200)
        m = g.standard_normal((12, 12))
        m = 0.5 * (m + m.T)
        a = spectral_norm_symmetric(DenseMatrix(m), seed=3)
        b = spectral_norm_symmetric(DenseMatrix(-m), seed=3)
        assert abs(a - b) <= 1e-10 * max(a, 1.0)

    def test_deterministic(self):
        g = rng(201)
        m = g.standard_normal((10, 10))
        m = DenseMatrix(0.5 * (m + m.T))
        assert spectral_norm_symmetric(m, seed=7) == spectral_norm_symmetric(m, seed=7)

    def test_rejects_asymmetric_and_nonsquare(self):
        with pytest.raises(ArgumentError):
            spectral_norm_symmetric(DenseMatrix(np.array([[0.0, 1.0], [0.0, 0.0]])), seed=0)
        with pytest.raises(ArgumentError):
            spectral_norm_symmetric(DenseMatrix(np.zeros((2, 3))), seed=0)


class TestMatmul:
    def test_dense_identity(self):
        a = random_dense(4, 4, 50)
        out = matmul(a, DenseMatrix(np.eye(4)))
        np.testing.assert_allclose(out.data, a.data, atol=1e-14)

    def test_sparse_toy(self):
        sp = SparseMatrix.from_dense(np.diag([2.0, 3.0]))
        out = matmul(sp, DenseMatrix(np.ones((2, 2))))
        np.testing.assert_array_equal(out.data, [[2.0, 2.0], [3.0, 3.0]])

    def test_sparse_against_dense_oracle(self):
        for seed in range(4):
            sp = random_sparse(30, 20, 0.1, seed)
            b = random_dense(20, 5, seed + 1)
            got = matmul(sp, b)
            want = sp.to_dense().data @ b.data
            np.testing.assert_allclose(got.data, want, atol=1e-12)

    def test_transposed_against_oracle(self):
        for seed in range(4):
            sp = random_sparse(25, 12, 0.15, seed + 60)
            b = random_dense(25, 3, seed + 61)
            got = matmul_transposed(sp, b)
            want = sp.to_dense().data.T @ b.data
            np.testing.assert_allclose(got.data, want, atol=1e-12)
            d = random_dense(9, 4, seed)
            b2 = random_dense(9, 2, seed + 5)
            got2 = matmul_transposed(d, b2)
            np.testing.assert_allclose(got2.data, d.data.T @ b2.data, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ArgumentError):
            matmul(random_dense(3, 4, 0), random_dense(5, 2, 1))
        with pytest.raises(ArgumentError):
            matmul_transposed(random_dense(3, 4, 0), random_dense(4, 2, 1))


class TestFrobenius:
    def test_examples(self):
        assert abs(frobenius_norm(DenseMatrix(np.eye(3))) - np.sqrt(3.0)) <= 1e-14
        assert frobenius_norm(DenseMatrix(np.zeros((2, 5)))) == 0.0
        m = DenseMatrix(np.array([[1.0, 2.0], [3.0, 4.0]]))
        assert abs(frobenius_norm(m) - np.sqrt(30.0)) <= 1e-14

    def test_sparse_matches_dense(self):
        sp = random_sparse(20, 15, 0.2, 9)
        assert abs(frobenius_norm(sp) - frobenius_norm(sp.to_dense())) <= 1e-12
