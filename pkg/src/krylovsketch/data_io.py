"""Synthetic matrix generators and text-format readers/writers.

Formats are deliberately plain: headerless CSV for dense matrices and the
LIBSVM index:value format for sparse ones, both written with 17 significant
digits so a write/load/write cycle is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, CapacityError, ParseError
from .matrix import DenseMatrix, SparseMatrix, orthonormalize_columns
from .random_blocks import rng_for

DECAY_LINEAR = "linear"
DECAY_FAST = "fast"
DECAY_SLOW = "slow"

# generators build an n x d dense array; keep them at desk scale
MAX_DENSE_CELLS = 500_000_000


@dataclass
class SyntheticSpec:
    """Low-rank signal plus gaussian noise: A = S diag(profile) U + N / zeta."""

    n: int
    d: int
    k: int
    zeta: float = 10.0
    decay: str = DECAY_LINEAR
    seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.n < self.k or self.d < self.k:
            raise ArgumentError("need n >= k >= 1 and d >= k")
        if self.zeta <= 0:
            raise ArgumentError("noise divisor zeta must be positive")
        if self.decay not in (DECAY_LINEAR, DECAY_FAST, DECAY_SLOW):
            raise ArgumentError(f"unknown decay profile {self.decay!r}")


@dataclass
class SparseSpec:
    """Uniformly sparse nonnegative matrix with Binomial(d, density) row support."""

    n: int
    d: int
    density: float = 0.001
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ArgumentError("dimensions must be positive")
        if not 0.0 < self.density <= 1.0:
            raise ArgumentError("density must lie in (0, 1]")


def decay_profile(decay: str, k: int) -> np.ndarray:
    """Signal strengths d_1..d_k for the named profile."""
    i = np.arange(1, k + 1, dtype=np.float64)
    if decay == DECAY_LINEAR:
        return 1.0 - (i - 1.0) / k
    if decay == DECAY_FAST:
        return np.power(2.0, -i)
    if decay == DECAY_SLOW:
        return 1.0 / np.sqrt(i)
    raise ArgumentError(f"unknown decay profile {decay!r}")


def gen_dense(spec: SyntheticSpec) -> DenseMatrix:
    """Dense synthetic stream matrix with a planted rank-k spectrum."""
    if spec.n * spec.d > MAX_DENSE_CELLS:
        raise CapacityError(f"dense generator capped at {MAX_DENSE_CELLS} cells")
    rng = rng_for(spec.seed)
    signal = rng.standard_normal((spec.n, spec.k))
    basis = rng.standard_normal((spec.d, spec.k))
    noise = rng.standard_normal((spec.n, spec.d))
    u = orthonormalize_columns(DenseMatrix._wrap(basis))
    if u.cols < spec.k:
        raise ArgumentError("random row basis came out rank deficient; use a different seed")
    profile = decay_profile(spec.decay, spec.k)
    a = (signal * profile) @ u.data.T
    a += noise / spec.zeta
    return DenseMatrix._wrap(a)


def _sample_support(rng, d: int, count: int) -> np.ndarray:
    # rejection sampling: cheap because count << d in every intended use
    idx = np.unique(rng.integers(0, d, size=count))
    while len(idx) < count:
        extra = rng.integers(0, d, size=count - len(idx))
        idx = np.unique(np.concatenate([idx, extra]))
    return idx


def gen_sparse(spec: SparseSpec) -> SparseMatrix:
    """Sparse synthetic matrix; row support sizes are Binomial(d, density)."""
    rng = rng_for(spec.seed)
    counts = rng.binomial(spec.d, spec.density, size=spec.n)
    row_ptr = np.zeros(spec.n + 1, dtype=np.int64)
    np.cumsum(counts, out=row_ptr[1:])
    col_idx = np.empty(row_ptr[-1], dtype=np.int64)
    for i in range(spec.n):
        if counts[i]:
            col_idx[row_ptr[i]: row_ptr[i + 1]] = _sample_support(rng, spec.d, counts[i])
    values = rng.random(row_ptr[-1])
    zero = values == 0.0
    while np.any(zero):
        values[zero] = rng.random(int(zero.sum()))
        zero = values == 0.0
    return SparseMatrix(spec.n, spec.d, row_ptr, col_idx, values)


def fmt(v: float) -> str:
    """Canonical 17-significant-digit text for a float."""
    return format(float(v), ".17g")


def write_csv(path, m: DenseMatrix, header: list[str] | None = None):
    """CSV with LF line endings and exact round-trip formatting.

    Data files are headerless by default; pass column names to prepend a
    single header row.
    """
    with open(path, "w", newline="\n") as fh:
        if header is not None:
            if len(header) != m.cols:
                raise ArgumentError(f"header has {len(header)} names for {m.cols} columns")
            fh.write(",".join(header))
            fh.write("\n")
        for i in range(m.rows):
            fh.write(",".join(fmt(v) for v in m.data[i]))
            fh.write("\n")


def load_csv_dense(path, header: bool = False) -> DenseMatrix:
    """Load a numeric CSV; every row must have the same width.

    With header=True the first line is discarded unparsed.
    """
    rows = []
    width = None
    skip = header
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if skip:
                skip = False
                continue
            parts = line.split(",")
            if width is None:
                width = len(parts)
            elif len(parts) != width:
                raise ParseError(f"expected {width} fields, found {len(parts)}", line=lineno)
            try:
                rows.append([float(p) for p in parts])
            except ValueError as exc:
                raise ParseError(f"bad number: {exc}", line=lineno) from None
    if not rows:
        raise ParseError("file holds no rows")
    return DenseMatrix(rows)


def parse_libsvm_line(line: str, lineno: int):
    """One LIBSVM record -> (indices, values) with 0-based, strictly increasing indices."""
    parts = line.split()
    idxs = []
    vals = []
    last = 0
    for tok in parts[1:]:
        pair = tok.split(":")
        if len(pair) != 2:
            raise ParseError(f"malformed feature token {tok!r}", line=lineno)
        try:
            idx = int(pair[0])
            val = float(pair[1])
        except ValueError:
            raise ParseError(f"malformed feature token {tok!r}", line=lineno) from None
        if idx < 1:
            raise ParseError(f"feature index {idx} must be 1-based", line=lineno)
        if idx <= last:
            raise ParseError(f"feature index {idx} does not increase", line=lineno)
        if not np.isfinite(val):
            raise ParseError(f"feature value {pair[1]!r} is not finite", line=lineno)
        last = idx
        if val != 0.0:
            idxs.append(idx - 1)
            vals.append(val)
    return idxs, vals


def load_libsvm(path, n_cols: int | None = None) -> SparseMatrix:
    """Load a LIBSVM file, discarding labels.

    Column count is the largest index seen unless n_cols is given; an explicit
    n_cols also truncates higher-index features, matching the common
    keep-the-first-columns protocol for wide datasets.
    """
    row_ptr = [0]
    col_idx = []
    values = []
    widest = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            idxs, vals = parse_libsvm_line(line, lineno)
            if idxs:
                widest = max(widest, idxs[-1] + 1)
            if n_cols is not None:
                keep = [t for t, j in enumerate(idxs) if j < n_cols]
                idxs = [idxs[t] for t in keep]
                vals = [vals[t] for t in keep]
            col_idx.extend(idxs)
            values.extend(vals)
            row_ptr.append(len(col_idx))
    if len(row_ptr) == 1:
        raise ParseError("file holds no rows")
    cols = n_cols if n_cols is not None else widest
    if cols < 1:
        raise ParseError("file holds no features and no column count was given")
    return SparseMatrix(len(row_ptr) - 1, cols, row_ptr, col_idx, values)


def write_libsvm(path, m: SparseMatrix):
    """LIBSVM text with a constant 0 label and 1-based indices."""
    with open(path, "w", newline="\n") as fh:
        for i in range(m.rows):
            lo, hi = m.row_ptr[i], m.row_ptr[i + 1]
            toks = ["0"]
            toks.extend(
                f"{int(j) + 1}:{fmt(v)}"
                for j, v in zip(m.col_idx[lo:hi], m.values[lo:hi])
            )
            fh.write(" ".join(toks))
            fh.write("\n")
