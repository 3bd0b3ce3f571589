"""Streaming frequent-directions sketch with a doubled buffer.

The sketch keeps a 2l x d buffer. Rows are appended into zero rows; when the
buffer fills, an SVD-based shrink subtracts the l-th squared singular value
from the spectrum, freeing at least l+1 rows. The finalized sketch is the
first l-1 rows.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError
from .matrix import DenseMatrix


class FdSketch:
    """Mutable single-owner sketch state."""

    def __init__(self, ell: int, d: int):
        if ell < 2:
            raise ArgumentError(f"sketch size ell must be at least 2, got {ell}")
        if d < 1:
            raise ArgumentError(f"column count must be positive, got {d}")
        self.ell = int(ell)
        self.d = int(d)
        self.buffer = np.zeros((2 * self.ell, self.d))
        self.filled = 0
        self.shrink_count = 0

    def insert(self, rows: DenseMatrix):
        """Append rows one at a time, shrinking whenever the buffer fills."""
        if rows.cols != self.d:
            raise ArgumentError(f"rows have {rows.cols} columns, sketch expects {self.d}")
        for i in range(rows.rows):
            self.buffer[self.filled] = rows.data[i]
            self.filled += 1
            if self.filled == 2 * self.ell:
                self.shrink()
        return self

    def shrink(self):
        """Subtract the l-th squared singular value from the buffer spectrum.

        Valid at any fill level: with fewer than l nonzero singular values the
        threshold is zero and the buffer is only rotated.
        """
        occupied = self.buffer[: self.filled]
        _, s, vt = np.linalg.svd(occupied, full_matrices=False)
        if len(s) >= self.ell:
            delta = s[self.ell - 1] ** 2
        else:
            delta = 0.0
        shrunk = np.sqrt(np.maximum(s * s - delta, 0.0))
        # s is nonincreasing, so the positive part is a prefix of at most l-1 rows
        keep = int(np.count_nonzero(shrunk))
        self.buffer[:] = 0.0
        if keep:
            self.buffer[:keep] = shrunk[:keep, None] * vt[:keep]
        self.filled = self.ell - 1
        self.shrink_count += 1
        return self

    def finalize(self) -> DenseMatrix:
        """Sketch matrix of l-1 rows; shrinks first if the buffer holds l or more."""
        if self.filled >= self.ell:
            self.shrink()
        return DenseMatrix._wrap(self.buffer[: self.ell - 1].copy())
