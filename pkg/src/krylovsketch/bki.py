"""Block Krylov compression of a row batch.

A random starting block X (gaussian or countsketch) is expanded into the
Krylov matrix K = [AX, (AA^T)AX, ..., (AA^T)^q AX], orthonormalized into Q,
and the top-l eigenvectors of Q^T A A^T Q give the compressed rows P = Z^T A.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .matrix import (
    DenseMatrix,
    SparseMatrix,
    matmul,
    matmul_transposed,
    orthonormalize_columns,
)
from .random_blocks import CountSketchMap, OpCounter, apply_countsketch

KIND_GAUSSIAN = "gaussian"
KIND_COUNTSKETCH = "countsketch"


@dataclass
class RbkiConfig:
    """Parameters of one compression call.

    kind selects the starting block the stream driver generates per batch;
    None means gaussian for dense batches and countsketch for sparse ones.
    stabilize re-orthonormalizes between power steps, an escape hatch for
    ill-conditioned inputs where the plain Krylov chain loses rank.
    """

    ell: int
    m: int
    q: int
    kind: str | None = None
    ortho_tol: float | None = None
    stabilize: bool = False

    def __post_init__(self):
        if self.ell < 1:
            raise ArgumentError(f"rank target ell must be positive, got {self.ell}")
        if self.m < self.ell:
            raise ArgumentError(f"block width m={self.m} must be at least ell={self.ell}")
        if self.q < 0:
            raise ArgumentError(f"krylov depth q must be nonnegative, got {self.q}")
        if self.kind not in (None, KIND_GAUSSIAN, KIND_COUNTSKETCH):
            raise ArgumentError(f"unknown starting block kind {self.kind!r}")


@dataclass
class BkiOutput:
    """Compressed batch: z has orthonormal columns, p = z^T a zero-padded to ell rows."""

    z: DenseMatrix
    p: DenseMatrix
    rank: int
    rank_deficient: bool
    flags: list = field(default_factory=list)


def q_from_error(varsigma: float, d: int) -> int:
    """Krylov depth needed for relative error varsigma: ceil(ln(d)/sqrt(varsigma))."""
    if not 0.0 < varsigma < 1.0:
        raise ArgumentError(f"error target must lie in (0, 1), got {varsigma}")
    if d < 2:
        raise ArgumentError(f"column count must be at least 2, got {d}")
    return math.ceil(math.log(d) / math.sqrt(varsigma))


def krylov_block(a, x0, q: int, ctr: OpCounter | None = None,
                 stabilize: bool = False) -> DenseMatrix:
    """Krylov matrix [AX, (AA^T)AX, ..., (AA^T)^q AX] of shape b x (q+1)m.

    x0 is either a dense starting block or a countsketch map; the map is
    applied by scattering, never materialized. With stabilize each power step
    multiplies an orthonormalized copy of the previous block (same span in
    exact arithmetic, rank-preserving under roundoff); blocks may then be
    narrower than m.
    """
    if q < 0:
        raise ArgumentError(f"krylov depth q must be nonnegative, got {q}")
    if isinstance(x0, CountSketchMap):
        v = apply_countsketch(a, x0, ctr)
    elif isinstance(x0, DenseMatrix):
        v = matmul(a, x0, ctr)
    else:
        raise ArgumentError(f"unsupported starting block type {type(x0).__name__}")
    blocks = [v.data]
    for _ in range(q):
        basis = orthonormalize_columns(v) if stabilize else v
        w = matmul_transposed(a, basis, ctr)
        v = matmul(a, w, ctr)
        blocks.append(v.data)
    return DenseMatrix._wrap(np.hstack(blocks))


def rbki(a, x0, cfg: RbkiConfig, ctr: OpCounter | None = None,
         timings: dict | None = None) -> BkiOutput:
    """Compress a row batch to ell directions through the Krylov subspace.

    When a timings dict is passed, wall seconds are accumulated into its
    "krylov" (subspace build) and "gram" (projection and eigensolve) entries.
    """
    t0 = time.perf_counter()
    k = krylov_block(a, x0, cfg.q, ctr, stabilize=cfg.stabilize)
    if timings is not None:
        timings["krylov"] = timings.get("krylov", 0.0) + time.perf_counter() - t0
    t0 = time.perf_counter()
    tol = cfg.ortho_tol
    if tol is None:
        tol = 1e-12 * max(k.rows, k.cols, 1)
    q_basis = orthonormalize_columns(k, tol)
    # m_small = Q^T (A A^T) Q computed as G^T G with G = A^T Q, then symmetrized
    g = matmul_transposed(a, q_basis, ctr)
    m_small = g.data.T @ g.data
    if ctr is not None:
        ctr.add(g.rows * g.cols * g.cols)
    m_small = 0.5 * (m_small + m_small.T)
    eigvals, eigvecs = np.linalg.eigh(m_small)
    order = np.argsort(eigvals)[::-1]
    rank = q_basis.cols
    take = min(cfg.ell, rank)
    u_top = eigvecs[:, order[:take]]
    z = DenseMatrix._wrap(q_basis.data @ u_top)
    p_rows = matmul_transposed(a, z, ctr).data.T
    p = np.zeros((cfg.ell, a.cols))
    p[:take] = p_rows
    deficient = take < cfg.ell
    if timings is not None:
        timings["gram"] = timings.get("gram", 0.0) + time.perf_counter() - t0
    flags = []
    if deficient:
        flags.append(f"krylov basis rank {rank} below target ell {cfg.ell}; output zero-padded")
    return BkiOutput(
        z=z,
        p=DenseMatrix._wrap(p),
        rank=take,
        rank_deficient=deficient,
        flags=flags,
    )
