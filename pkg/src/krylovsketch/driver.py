"""Streaming sketch driver: per-batch Krylov compression feeding a
frequent-directions buffer.

Each pushed batch is compressed to ell rows with an independently seeded
random block, then folded into the sketch. The first batch initializes the
buffer directly; every later batch is followed by exactly one shrink.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bki import KIND_COUNTSKETCH, KIND_GAUSSIAN, RbkiConfig, rbki
from .data_io import parse_libsvm_line
from .errors import ArgumentError, ParseError, StateError
from .fd import FdSketch
from .matrix import DenseMatrix, SparseMatrix
from .random_blocks import SEED_MASK, OpCounter, countsketch_map, gaussian_block


@dataclass
class RbkifdConfig:
    """Stream geometry plus the per-batch compression parameters."""

    bki: RbkiConfig
    d: int
    batch_rows: int
    seed: int = 0

    def __post_init__(self):
        if self.bki.ell < 2:
            raise ArgumentError(f"streaming sketch needs ell >= 2, got {self.bki.ell}")
        if self.d < 1:
            raise ArgumentError(f"column count must be positive, got {self.d}")
        if self.batch_rows < self.bki.ell:
            raise ArgumentError(
                f"batch_rows={self.batch_rows} must be at least ell={self.bki.ell}"
            )


@dataclass
class SketchResult:
    """Finalized sketch plus run accounting."""

    b_matrix: DenseMatrix
    batches: int
    wall_times: dict
    op_counts: OpCounter
    flags: list = field(default_factory=list)


def _pad_dense(batch: DenseMatrix, rows: int) -> DenseMatrix:
    padded = np.zeros((rows, batch.cols))
    padded[: batch.rows] = batch.data
    return DenseMatrix._wrap(padded)


def _pad_sparse(batch: SparseMatrix, rows: int) -> SparseMatrix:
    row_ptr = np.full(rows + 1, batch.row_ptr[-1], dtype=np.int64)
    row_ptr[: len(batch.row_ptr)] = batch.row_ptr
    return SparseMatrix(rows, batch.cols, row_ptr, batch.col_idx, batch.values)


class RbkifdState:
    """Single-owner mutable stream state."""

    def __init__(self, cfg: RbkifdConfig):
        self.cfg = cfg
        self.fd = FdSketch(cfg.bki.ell, cfg.d)
        self.batches = 0
        self.finalized = False
        self.counter = OpCounter()
        self.wall_times = {"krylov": 0.0, "gram": 0.0, "fd_shrink": 0.0}
        self.flags = []
        self.high_water_rows = 0

    def _starting_block(self, batch):
        kind = self.cfg.bki.kind
        if kind is None:
            kind = KIND_COUNTSKETCH if isinstance(batch, SparseMatrix) else KIND_GAUSSIAN
        derived = (int(self.cfg.seed) ^ self.batches) & SEED_MASK
        if kind == KIND_GAUSSIAN:
            return gaussian_block(self.cfg.d, self.cfg.bki.m, derived)
        return countsketch_map(self.cfg.d, self.cfg.bki.m, derived)

    def push_batch(self, batch):
        """Compress one batch and fold it into the sketch.

        A batch shorter than batch_rows is zero-padded (zero rows leave the
        covariance unchanged); a taller one is an error.
        """
        if self.finalized:
            raise StateError("cannot push into a finalized sketch")
        if batch.cols != self.cfg.d:
            raise ArgumentError(f"batch has {batch.cols} columns, stream expects {self.cfg.d}")
        if batch.rows > self.cfg.batch_rows:
            raise ArgumentError(
                f"batch has {batch.rows} rows, more than batch_rows={self.cfg.batch_rows}"
            )
        if batch.rows == 0:
            raise ArgumentError("batch must hold at least one row")
        if batch.rows < self.cfg.batch_rows:
            batch = (
                _pad_sparse(batch, self.cfg.batch_rows)
                if isinstance(batch, SparseMatrix)
                else _pad_dense(batch, self.cfg.batch_rows)
            )
        self.high_water_rows = max(self.high_water_rows, self.fd.filled + batch.rows)
        x0 = self._starting_block(batch)
        out = rbki(batch, x0, self.cfg.bki, self.counter, timings=self.wall_times)
        self.flags.extend(out.flags)
        batch = None
        t0 = time.perf_counter()
        self.fd.insert(out.p)
        if self.batches >= 1 and self.fd.filled >= self.cfg.bki.ell:
            self.fd.shrink()
        self.wall_times["fd_shrink"] += time.perf_counter() - t0
        self.batches += 1
        return self

    def finalize(self) -> SketchResult:
        """Close the stream and return the (ell-1)-row sketch.

        Every batch after the first already shrank the buffer to ell-1 rows,
        so this only truncates; after a single batch that truncation drops
        the smallest of the batch's ell compressed directions unshrunk.
        """
        if self.finalized:
            raise StateError("sketch already finalized")
        if self.batches == 0:
            raise StateError("no batches were pushed")
        self.finalized = True
        ell = self.cfg.bki.ell
        b = DenseMatrix._wrap(self.fd.buffer[: ell - 1].copy())
        return SketchResult(
            b_matrix=b,
            batches=self.batches,
            wall_times=dict(self.wall_times),
            op_counts=self.counter,
            flags=list(self.flags),
        )


class InMemorySource:
    """Batches sliced from a matrix already in memory."""

    def __init__(self, matrix, batch_rows: int):
        if batch_rows < 1:
            raise ArgumentError("batch_rows must be positive")
        self.matrix = matrix
        self.batch_rows = int(batch_rows)
        self.peak_rows = 0

    def _slice(self, lo, hi):
        m = self.matrix
        if isinstance(m, SparseMatrix):
            base = m.row_ptr[lo]
            return SparseMatrix(
                hi - lo,
                m.cols,
                m.row_ptr[lo: hi + 1] - base,
                m.col_idx[m.row_ptr[lo]: m.row_ptr[hi]],
                m.values[m.row_ptr[lo]: m.row_ptr[hi]],
            )
        return DenseMatrix._wrap(m.data[lo:hi].copy())

    def __iter__(self):
        n = self.matrix.rows
        index = 0
        for lo in range(0, n, self.batch_rows):
            hi = min(lo + self.batch_rows, n)
            self.peak_rows = max(self.peak_rows, hi - lo)
            yield index, self._slice(lo, hi)
            index += 1


class CsvSource:
    """Dense batches streamed from a headerless CSV file."""

    def __init__(self, path, batch_rows: int):
        if batch_rows < 1:
            raise ArgumentError("batch_rows must be positive")
        self.path = path
        self.batch_rows = int(batch_rows)
        self.peak_rows = 0

    def __iter__(self):
        rows = []
        width = None
        index = 0
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                parts = line.split(",")
                if width is None:
                    width = len(parts)
                elif len(parts) != width:
                    raise ParseError(
                        f"expected {width} fields, found {len(parts)}", line=lineno
                    )
                try:
                    rows.append([float(p) for p in parts])
                except ValueError as exc:
                    raise ParseError(f"bad number: {exc}", line=lineno) from None
                self.peak_rows = max(self.peak_rows, len(rows))
                if len(rows) == self.batch_rows:
                    yield index, DenseMatrix(rows)
                    rows = []
                    index += 1
        if rows:
            yield index, DenseMatrix(rows)


class LibsvmSource:
    """Sparse batches streamed from a LIBSVM file.

    Column count comes from a cheap pre-scan unless n_cols is given; rows are
    never held beyond the current batch.
    """

    def __init__(self, path, batch_rows: int, n_cols: int | None = None):
        if batch_rows < 1:
            raise ArgumentError("batch_rows must be positive")
        self.path = path
        self.batch_rows = int(batch_rows)
        self.n_cols = n_cols if n_cols is None else int(n_cols)
        self.peak_rows = 0

    def _scan_width(self):
        widest = 0
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                idxs, _ = parse_libsvm_line(line, lineno)
                if idxs:
                    widest = max(widest, idxs[-1] + 1)
        if widest < 1:
            raise ParseError("file holds no features and no column count was given")
        return widest

    def __iter__(self):
        cols = self.n_cols if self.n_cols is not None else self._scan_width()
        row_ptr = [0]
        col_idx = []
        values = []
        index = 0
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                idxs, vals = parse_libsvm_line(line, lineno)
                if self.n_cols is not None:
                    keep = [t for t, j in enumerate(idxs) if j < cols]
                    idxs = [idxs[t] for t in keep]
                    vals = [vals[t] for t in keep]
                col_idx.extend(idxs)
                values.extend(vals)
                row_ptr.append(len(col_idx))
                self.peak_rows = max(self.peak_rows, len(row_ptr) - 1)
                if len(row_ptr) - 1 == self.batch_rows:
                    yield index, SparseMatrix(self.batch_rows, cols, row_ptr, col_idx, values)
                    row_ptr = [0]
                    col_idx = []
                    values = []
                    index += 1
        if len(row_ptr) > 1:
            yield index, SparseMatrix(len(row_ptr) - 1, cols, row_ptr, col_idx, values)


def run_stream(source, cfg: RbkifdConfig) -> SketchResult:
    """Push every batch from source and finalize; IO happens in the source."""
    state = RbkifdState(cfg)
    for _, batch in source:
        state.push_batch(batch)
    return state.finalize()
