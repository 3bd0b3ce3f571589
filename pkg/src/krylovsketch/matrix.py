"""Matrix containers and the dense/sparse numerical primitives.

DenseMatrix and SparseMatrix are the currency of every other module. Dense
factorizations go through LAPACK; the sparse products run on the kernel
backend selected in krylovsketch.kernels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ArgumentError, NumericalError

# Rank-revealing drop threshold is this multiple of max(rows, cols) times ||K||_F.
ORTHO_TOL_SCALE = 1e-12


class DenseMatrix:
    """Row-major float64 matrix with finite entries."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.array(data, dtype=np.float64, order="C")
        if arr.ndim == 1:
            raise ArgumentError("dense matrix needs two dimensions; reshape 1-d input")
        if arr.ndim != 2:
            raise ArgumentError(f"dense matrix needs two dimensions, got {arr.ndim}")
        if arr.size and not np.isfinite(arr).all():
            raise ArgumentError("dense matrix entries must be finite")
        self.data = arr

    @classmethod
    def _wrap(cls, arr):
        # internal fast path: arr is trusted float64 C-order output of our own math
        out = object.__new__(cls)
        out.data = np.ascontiguousarray(arr, dtype=np.float64)
        return out

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols})"


class SparseMatrix:
    """CSR matrix: row_ptr/col_idx/values with sorted, unique columns per row."""

    __slots__ = ("rows", "cols", "row_ptr", "col_idx", "values")

    def __init__(self, rows, cols, row_ptr, col_idx, values):
        rows = int(rows)
        cols = int(cols)
        row_ptr = np.ascontiguousarray(row_ptr, dtype=np.int64)
        col_idx = np.ascontiguousarray(col_idx, dtype=np.int64)
        values = np.ascontiguousarray(values, dtype=np.float64)
        if rows < 0 or cols < 0:
            raise ArgumentError("matrix dimensions must be nonnegative")
        if row_ptr.ndim != 1 or col_idx.ndim != 1 or values.ndim != 1:
            raise ArgumentError("csr arrays must be one-dimensional")
        if len(row_ptr) != rows + 1:
            raise ArgumentError(f"row_ptr must have length rows+1 = {rows + 1}")
        if row_ptr[0] != 0 or row_ptr[-1] != len(values) or len(col_idx) != len(values):
            raise ArgumentError("row_ptr endpoints must match the value count")
        if np.any(np.diff(row_ptr) < 0):
            raise ArgumentError("row_ptr must be nondecreasing")
        if len(col_idx) and (col_idx.min() < 0 or col_idx.max() >= cols):
            raise ArgumentError("column indices out of range")
        if len(values) and not np.isfinite(values).all():
            raise ArgumentError("sparse values must be finite")
        if len(values) and np.any(values == 0.0):
            raise ArgumentError("sparse values must be nonzero")
        if len(col_idx) > 1:
            # column order may only reset where a new row starts
            jumps = np.diff(col_idx) <= 0
            starts = row_ptr[1:-1]
            allowed = np.zeros(len(col_idx) - 1, dtype=bool)
            allowed[starts[(starts > 0) & (starts < len(col_idx))] - 1] = True
            if np.any(jumps & ~allowed):
                raise ArgumentError("column indices must be strictly increasing within each row")
        self.rows = rows
        self.cols = cols
        self.row_ptr = row_ptr
        self.col_idx = col_idx
        self.values = values

    @property
    def nnz(self):
        return len(self.values)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @classmethod
    def from_dense(cls, arr):
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim != 2:
            raise ArgumentError("from_dense needs a two-dimensional array")
        mask = arr != 0.0
        counts = mask.sum(axis=1)
        row_ptr = np.zeros(arr.shape[0] + 1, dtype=np.int64)
        np.cumsum(counts, out=row_ptr[1:])
        rr, cc = np.nonzero(mask)
        return cls(arr.shape[0], arr.shape[1], row_ptr, cc, arr[rr, cc])

    def to_dense(self):
        out = np.zeros((self.rows, self.cols))
        rows = np.repeat(np.arange(self.rows), np.diff(self.row_ptr))
        out[rows, self.col_idx] = self.values
        return DenseMatrix._wrap(out)

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


@dataclass
class SvdFactors:
    """Thin SVD: u (rows x r), s (length r, descending), vt (r x cols)."""

    u: DenseMatrix
    s: np.ndarray
    vt: DenseMatrix


def svd_thin(a: DenseMatrix) -> SvdFactors:
    """Thin SVD of a dense matrix with singular values sorted descending."""
    if a.rows == 0 or a.cols == 0:
        raise ArgumentError("svd needs a nonempty matrix")
    try:
        u, s, vt = np.linalg.svd(a.data, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"svd did not converge on a {a.rows}x{a.cols} matrix") from exc
    return SvdFactors(DenseMatrix._wrap(u), s, DenseMatrix._wrap(vt))


def truncated_svd(a: DenseMatrix, k: int) -> SvdFactors:
    """Leading k singular triplets of a."""
    if not 1 <= k <= min(a.rows, a.cols):
        raise ArgumentError(f"k must be in [1, {min(a.rows, a.cols)}], got {k}")
    f = svd_thin(a)
    return SvdFactors(
        DenseMatrix._wrap(f.u.data[:, :k].copy()),
        f.s[:k].copy(),
        DenseMatrix._wrap(f.vt.data[:k].copy()),
    )


def orthonormalize_columns(k: DenseMatrix, tol: float | None = None) -> DenseMatrix:
    """Orthonormal basis for the numerical column space of k.

    Modified Gram-Schmidt with one re-orthogonalization pass. A column whose
    residual after projection has norm <= tol * ||k||_F is dropped, so the
    returned matrix has full column rank; an all-zero input yields 0 columns.
    """
    rows, cols = k.shape
    if tol is None:
        tol = ORTHO_TOL_SCALE * max(rows, cols, 1)
    fnorm = np.linalg.norm(k.data)
    if cols == 0 or fnorm == 0.0:
        return DenseMatrix._wrap(np.zeros((rows, 0)))
    thresh = tol * fnorm
    col_norms = np.linalg.norm(k.data, axis=0)
    q = np.empty((rows, min(rows, cols)), order="F")
    count = 0
    for j in np.nonzero(col_norms > thresh)[0]:
        c = k.data[:, j].copy()
        if count:
            basis = q[:, :count]
            c -= basis @ (basis.T @ c)
            c -= basis @ (basis.T @ c)
        nrm = np.linalg.norm(c)
        if nrm > thresh:
            q[:, count] = c / nrm
            count += 1
            if count == rows:
                break
    return DenseMatrix._wrap(q[:, :count])


def spectral_norm_symmetric(m: DenseMatrix, rel_tol: float = 1e-9,
                            max_iter: int = 10000, seed: int = 0) -> float:
    """Power-iteration estimate of the largest |eigenvalue| of a symmetric matrix.

    Tracks ||M x|| over normalized iterates, which is nondecreasing and
    converges to the spectral norm. Successive estimates agreeing to rel_tol is
    necessary to stop; because that alone can stall far from the limit when the
    two largest |eigenvalues| are close, the geometric tail of the increments
    is also extrapolated and must fall below rel_tol. Warns and returns the
    best estimate if max_iter is exhausted.
    """
    if m.rows != m.cols or m.rows == 0:
        raise ArgumentError("spectral norm needs a nonempty square matrix")
    scale = np.abs(m.data).max()
    if scale and np.abs(m.data - m.data.T).max() > 1e-8 * max(1.0, scale):
        raise ArgumentError("matrix is not symmetric")
    work = 0.5 * (m.data + m.data.T)
    rng = np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))
    x = rng.standard_normal(m.rows)
    x /= np.linalg.norm(x)
    est = 0.0
    prev_diff = np.inf
    for _ in range(max_iter):
        y = work @ x
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        diff = abs(new - est)
        if est > 0.0 and diff <= rel_tol * new:
            if diff <= 5e-15 * new:
                return new
            ratio = diff / prev_diff if prev_diff > 0.0 else 0.0
            if ratio < 1.0 and diff * ratio / (1.0 - ratio) <= rel_tol * new:
                return new
        prev_diff = diff
        est = new
        x = y / new
    warnings.warn("power iteration hit max_iter; returning the last estimate", RuntimeWarning)
    return est


def matmul(a, b: DenseMatrix, ctr=None) -> DenseMatrix:
    """Product a @ b for dense or CSR a and dense b.

    The sparse path touches only stored nonzeros. When a counter is passed it
    accumulates one multiply-add per scalar product performed.
    """
    if isinstance(a, DenseMatrix):
        if a.cols != b.rows:
            raise ArgumentError(f"inner dimensions differ: {a.cols} vs {b.rows}")
        if ctr is not None:
            ctr.add(a.rows * a.cols * b.cols)
        return DenseMatrix._wrap(a.data @ b.data)
    if isinstance(a, SparseMatrix):
        if a.cols != b.rows:
            raise ArgumentError(f"inner dimensions differ: {a.cols} vs {b.rows}")
        if ctr is not None:
            ctr.add(a.nnz * b.cols)
        out = kernels.csr_dense(a.row_ptr, a.col_idx, a.values, a.rows, b.data)
        return DenseMatrix._wrap(out)
    raise ArgumentError(f"unsupported left operand type {type(a).__name__}")


def matmul_transposed(a, b: DenseMatrix, ctr=None) -> DenseMatrix:
    """Product of the transpose of a with b, without materializing a transpose."""
    if isinstance(a, DenseMatrix):
        if a.rows != b.rows:
            raise ArgumentError(f"inner dimensions differ: {a.rows} vs {b.rows}")
        if ctr is not None:
            ctr.add(a.rows * a.cols * b.cols)
        return DenseMatrix._wrap(a.data.T @ b.data)
    if isinstance(a, SparseMatrix):
        if a.rows != b.rows:
            raise ArgumentError(f"inner dimensions differ: {a.rows} vs {b.rows}")
        if ctr is not None:
            ctr.add(a.nnz * b.cols)
        out = kernels.csr_t_dense(a.row_ptr, a.col_idx, a.values, a.cols, b.data)
        return DenseMatrix._wrap(out)
    raise ArgumentError(f"unsupported left operand type {type(a).__name__}")


def frobenius_norm(a) -> float:
    """Frobenius norm of a dense or sparse matrix."""
    if isinstance(a, DenseMatrix):
        return float(np.linalg.norm(a.data))
    if isinstance(a, SparseMatrix):
        return float(np.linalg.norm(a.values))
    raise ArgumentError(f"unsupported matrix type {type(a).__name__}")
