"""Random starting blocks for sketching: gaussian and countsketch.

Randomness comes from a counter-based Philox generator keyed by a 64-bit
seed, so streams for distinct seeds are independent and a given seed is
bit-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ArgumentError
from .matrix import DenseMatrix, SparseMatrix, orthonormalize_columns

SEED_MASK = 0xFFFFFFFFFFFFFFFF


def rng_for(seed: int) -> np.random.Generator:
    """Generator keyed by the low 64 bits of seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & SEED_MASK))


@dataclass
class OpCounter:
    """Running count of multiply-add operations."""

    multiply_adds: int = 0

    def add(self, n: int):
        if n < 0:
            raise ArgumentError("cannot count a negative number of operations")
        self.multiply_adds += int(n)


@dataclass
class CountSketchMap:
    """Signed hashing of d input columns into m buckets.

    buckets[j] is the output column receiving input column j, signs[j] the
    sign it carries. The map is applied by scattering; the d x m matrix it
    represents is only materialized by the test helper below.
    """

    d: int
    m: int
    buckets: np.ndarray = field(repr=False)
    signs: np.ndarray = field(repr=False)


def gaussian_block(d: int, m: int, seed: int) -> DenseMatrix:
    """d x m block of independent standard normal entries."""
    if d < 1 or m < 1:
        raise ArgumentError("gaussian block dimensions must be positive")
    return DenseMatrix._wrap(rng_for(seed).standard_normal((d, m)))


def countsketch_map(d: int, m: int, seed: int) -> CountSketchMap:
    """Uniform bucket choice and an independent +-1 sign for each input column."""
    if d < 1 or m < 1:
        raise ArgumentError("countsketch dimensions must be positive")
    rng = rng_for(seed)
    buckets = rng.integers(0, m, size=d, dtype=np.int64)
    signs = (2.0 * rng.integers(0, 2, size=d) - 1.0).astype(np.float64)
    return CountSketchMap(d=d, m=m, buckets=buckets, signs=signs)


def materialize_countsketch(cs: CountSketchMap) -> SparseMatrix:
    """Explicit d x m matrix of the map; for tests and oracles only."""
    row_ptr = np.arange(cs.d + 1, dtype=np.int64)
    return SparseMatrix(cs.d, cs.m, row_ptr, cs.buckets.copy(), cs.signs.copy())


def apply_countsketch(a, cs: CountSketchMap, ctr: OpCounter | None = None) -> DenseMatrix:
    """Product a @ X for the sketch matrix X the map represents.

    Runs as a scatter over the stored entries of a: exactly nnz(a) multiply
    adds for sparse input, rows*cols for dense input.
    """
    if isinstance(a, DenseMatrix):
        if a.cols != cs.d:
            raise ArgumentError(f"map expects {cs.d} columns, matrix has {a.cols}")
        if ctr is not None:
            ctr.add(a.rows * a.cols)
        out = kernels.countsketch_dense(a.data, cs.buckets, cs.signs, cs.m)
        return DenseMatrix._wrap(out)
    if isinstance(a, SparseMatrix):
        if a.cols != cs.d:
            raise ArgumentError(f"map expects {cs.d} columns, matrix has {a.cols}")
        if ctr is not None:
            ctr.add(a.nnz)
        out = kernels.countsketch_csr(
            a.row_ptr, a.col_idx, a.values, a.rows, cs.buckets, cs.signs, cs.m
        )
        return DenseMatrix._wrap(out)
    raise ArgumentError(f"unsupported matrix type {type(a).__name__}")


def embedding_width(cols: int, eps: float, p: float) -> int:
    """Bucket count sufficient for a (cols, eps)-subspace embedding at failure rate p."""
    if not 0.0 < eps < 1.0 or not 0.0 < p < 1.0:
        raise ArgumentError("eps and p must lie in (0, 1)")
    if cols < 1:
        raise ArgumentError("subspace dimension must be positive")
    return math.ceil((cols * cols + cols) / (eps * eps * p))


def subspace_embedding_trial(d: int, cols: int, eps: float, p: float, seed: int,
                             m: int | None = None) -> bool:
    """One randomized check that countsketch preserves a random cols-dim subspace.

    Draws an orthonormal U (d x cols) and a fresh map with m buckets (default
    per embedding_width), then tests ||U^T X X^T U - I||_2 <= eps.
    """
    if m is None:
        m = embedding_width(cols, eps, p)
    else:
        _ = embedding_width(cols, eps, p)
        if m < 1:
            raise ArgumentError("bucket count must be positive")
    if cols > d:
        raise ArgumentError("subspace dimension cannot exceed the ambient dimension")
    rng_u_seed = (int(seed) * 2 + 1) & SEED_MASK
    u = orthonormalize_columns(gaussian_block(d, cols, rng_u_seed))
    cs = countsketch_map(d, m, seed)
    w = apply_countsketch(DenseMatrix._wrap(u.data.T), cs)
    gram = w.data @ w.data.T
    dev = np.linalg.eigvalsh(gram - np.eye(cols))
    return float(np.abs(dev).max()) <= eps
