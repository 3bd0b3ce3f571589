"""Shared helpers for the test suite."""

import numpy as np
import pytest

from krylovsketch import DenseMatrix, SparseMatrix


def rng(seed):
    return np.random.Generator(np.random.Philox(key=seed))


def random_dense(rows, cols, seed):
    return DenseMatrix(rng(seed).standard_normal((rows, cols)))


def random_sparse(rows, cols, density, seed):
    """CSR with Binomial row support, values bounded away from zero."""
    g = rng(seed)
    dense = np.zeros((rows, cols))
    mask = g.random((rows, cols)) < density
    dense[mask] = g.uniform(0.5, 2.0, size=int(mask.sum()))
    return SparseMatrix.from_dense(dense)


def spectral_norm_oracle(mat):
    """Largest |eigenvalue| via a full symmetric eigensolve."""
    return float(np.abs(np.linalg.eigvalsh(0.5 * (mat + mat.T))).max())


def gram(m):
    if isinstance(m, SparseMatrix):
        m = m.to_dense()
    return m.data.T @ m.data


def cov_err_oracle(a, b):
    """Raw covariance error through a route independent of the package."""
    return spectral_norm_oracle(gram(a) - gram(b))


def tail_sq(a, k):
    if isinstance(a, SparseMatrix):
        a = a.to_dense()
    s = np.linalg.svd(a.data, compute_uv=False)
    return float(np.sum(s[k:] ** 2))


@pytest.fixture
def tmp_text(tmp_path):
    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return write
