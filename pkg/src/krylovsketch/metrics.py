"""Sketch quality metrics and theoretical error bounds.

Everything here forms d x d or n x d dense intermediates, so it is a
diagnostic API for desk-scale matrices, not part of the streaming path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, CapacityError
from .matrix import (
    DenseMatrix,
    SparseMatrix,
    frobenius_norm,
    spectral_norm_symmetric,
    svd_thin,
    truncated_svd,
)

# covariance_error materializes a d x d gram difference; refuse beyond this
GRAM_CAP = 10000

# decay factor 4 / 2^((2q+1) min(sqrt(gamma), 1)) underflows past this exponent
_MAX_EXP2 = 1064.0

# squared Frobenius mass at or below roundoff level counts as exactly zero
_ZERO_SQ_ABS = 1e-18
_ZERO_SQ_REL = 1e-24


def _is_roundoff_sq(value: float, fro_sq: float) -> bool:
    return value <= _ZERO_SQ_ABS or value <= _ZERO_SQ_REL * fro_sq


@dataclass
class ErrorReport:
    """Normalized and raw sketch errors for one (a, b, k) evaluation."""

    covariance_error: float
    projection_error: float
    k: int
    ell: int
    raw_covariance: float
    raw_projection: float


@dataclass
class BoundInputs:
    """Measured spectrum quantities plus run shape for the bound evaluators.

    eps defaults per evaluator; for the gaussian bound the default is
    min(sqrt(2 ln(20 s)), (sqrt(m) - sqrt(ell)) / 2) so it always satisfies
    the evaluator's own feasibility precondition.
    """

    d: int
    s: int
    ell: int
    m: int
    q: int
    k: int
    gamma: float
    sigma_ell_plus_1: float
    tail_fro_k: float
    eta: float = 0.05
    eps: float | None = None
    p: float | None = None

    def __post_init__(self):
        if self.s < 1:
            raise ArgumentError("batch count s must be positive")
        if self.q < 0:
            raise ArgumentError("krylov depth q must be nonnegative")
        if not 1 <= self.k < self.ell:
            raise ArgumentError(f"need 1 <= k < ell, got k={self.k}, ell={self.ell}")
        if self.m < self.ell:
            raise ArgumentError("block width m must be at least ell")
        if self.d <= self.ell:
            raise ArgumentError("need d > ell")
        if self.gamma <= 0:
            raise ArgumentError("spectral gap gamma must be positive")
        if self.sigma_ell_plus_1 < 0 or self.tail_fro_k < 0:
            raise ArgumentError("spectrum quantities cannot be negative")
        if not 0.0 < self.eta < 1.0:
            raise ArgumentError("eta must lie in (0, 1)")


def _gram(a) -> np.ndarray:
    if isinstance(a, SparseMatrix):
        dense = a.to_dense().data
    elif isinstance(a, DenseMatrix):
        dense = a.data
    else:
        raise ArgumentError(f"unsupported matrix type {type(a).__name__}")
    g = dense.T @ dense
    return 0.5 * (g + g.T)


def covariance_error(a, b, cap: int = GRAM_CAP) -> float:
    """Spectral norm of A^T A - B^T B over ||A||_F^2."""
    if a.cols != b.cols:
        raise ArgumentError(f"column counts differ: {a.cols} vs {b.cols}")
    if a.cols > cap:
        raise CapacityError(
            f"covariance error materializes {a.cols}^2 entries; cap is {cap}."
            " Evaluate a desk-scale slice instead"
        )
    denom = frobenius_norm(a) ** 2
    if denom == 0.0:
        raise ArgumentError("covariance error of an all-zero matrix is undefined")
    return raw_covariance_error(a, b, cap) / denom


def raw_covariance_error(a, b, cap: int = GRAM_CAP) -> float:
    """Unnormalized spectral norm of the gram difference."""
    if a.cols != b.cols:
        raise ArgumentError(f"column counts differ: {a.cols} vs {b.cols}")
    if a.cols > cap:
        raise CapacityError(
            f"covariance error materializes {a.cols}^2 entries; cap is {cap}."
            " Evaluate a desk-scale slice instead"
        )
    diff = _gram(a) - _gram(b)
    return spectral_norm_symmetric(DenseMatrix._wrap(diff))


def projection_error(a: DenseMatrix, b: DenseMatrix, k: int) -> float:
    """||A - A V_k V_k^T||_F^2 / ||A - A_k||_F^2 for B's top-k right vectors.

    When A is numerically rank <= k the denominator is roundoff; the ratio is
    then 1 if the numerator is also roundoff, infinity otherwise.
    """
    raw, tail = _projection_parts(a, b, k)
    fro_sq = float(np.linalg.norm(a.data) ** 2)
    if _is_roundoff_sq(tail, fro_sq):
        return 1.0 if _is_roundoff_sq(raw, fro_sq) else math.inf
    return raw / tail


def _projection_parts(a: DenseMatrix, b: DenseMatrix, k: int):
    if a.cols != b.cols:
        raise ArgumentError(f"column counts differ: {a.cols} vs {b.cols}")
    if not 1 <= k <= min(a.rows, a.cols):
        raise ArgumentError(f"k must be in [1, {min(a.rows, a.cols)}], got {k}")
    take = min(k, b.rows, b.cols)
    vk = truncated_svd(b, take).vt.data
    resid = a.data - (a.data @ vk.T) @ vk
    raw = float(np.linalg.norm(resid) ** 2)
    s = svd_thin(a).s
    tail = float(np.sum(s[k:] ** 2))
    return raw, tail


def error_report(a: DenseMatrix, b: DenseMatrix, k: int) -> ErrorReport:
    """Bundle covariance and projection errors for one sketch."""
    raw_cov = raw_covariance_error(a, b)
    denom = frobenius_norm(a) ** 2
    raw_proj, tail = _projection_parts(a, b, k)
    if _is_roundoff_sq(tail, denom):
        proj = 1.0 if _is_roundoff_sq(raw_proj, denom) else math.inf
    else:
        proj = raw_proj / tail
    return ErrorReport(
        covariance_error=raw_cov / denom,
        projection_error=proj,
        k=k,
        ell=b.rows + 1,
        raw_covariance=raw_cov,
        raw_projection=raw_proj,
    )


def fd_error_bound(a: DenseMatrix, k: int, ell: int) -> float:
    """Deterministic shrinkage bound ||A - A_k||_F^2 / (ell - k) on the raw
    covariance error of an ell-row frequent-directions sketch."""
    if not 1 <= k < ell:
        raise ArgumentError(f"need 1 <= k < ell, got k={k}, ell={ell}")
    s = svd_thin(a).s
    tail = float(np.sum(s[k:] ** 2))
    return tail / (ell - k)


def projection_bound(tail_fro_k: float, k: int, raw_cov: float) -> float:
    """Upper bound ||A - A_k||_F^2 + 2k ||A^T A - B^T B||_2 on the raw projection error."""
    if k < 1:
        raise ArgumentError("k must be positive")
    if tail_fro_k < 0 or raw_cov < 0:
        raise ArgumentError("bound inputs cannot be negative")
    return tail_fro_k + 2.0 * k * raw_cov


def projection_bound_holds(a: DenseMatrix, b: DenseMatrix, k: int,
                           slack_scale: float = 1e-8) -> bool:
    """Check the projection-vs-covariance inequality with a small relative slack."""
    raw_proj, tail = _projection_parts(a, b, k)
    raw_cov = raw_covariance_error(a, b)
    slack = slack_scale * frobenius_norm(a) ** 2
    return raw_proj <= projection_bound(tail, k, raw_cov) + slack


def _decay_factor(q: int, gamma: float) -> float:
    exponent = (2.0 * q + 1.0) * min(math.sqrt(gamma), 1.0)
    if exponent > _MAX_EXP2:
        return 0.0
    return 4.0 / (2.0 ** exponent)


def _deviation_terms(inp: BoundInputs, one_plus_delta: float) -> float:
    ln_term = math.log(2.0 * inp.d / inp.eta)
    return (
        inp.s * one_plus_delta
        + ln_term * 4.0 * one_plus_delta / 3.0
        + math.sqrt(2.0 * inp.s * one_plus_delta ** 2 * ln_term)
    )


def ga_error_bound(inp: BoundInputs) -> float:
    """High-probability raw covariance bound for the gaussian-start sketch."""
    root_m = math.sqrt(inp.m)
    root_l = math.sqrt(inp.ell)
    eps = inp.eps
    if eps is None:
        eps = min(math.sqrt(2.0 * math.log(20.0 * inp.s)), 0.5 * (root_m - root_l))
    if eps <= 0.0 or root_m - root_l - eps <= 0.0:
        raise ArgumentError(
            f"need 0 < eps < sqrt(m) - sqrt(ell) = {root_m - root_l:.6g}, got {eps:.6g}"
        )
    spread = math.sqrt(inp.d - inp.ell) * (math.sqrt(inp.d) + root_m + eps)
    spread /= root_m - root_l - eps
    one_plus_delta = (1.0 + _decay_factor(inp.q, inp.gamma) * spread) ** 2
    tail_term = inp.tail_fro_k / (inp.ell - inp.k)
    return _deviation_terms(inp, one_plus_delta) * inp.sigma_ell_plus_1 ** 2 + tail_term


def cs_error_bound(inp: BoundInputs) -> float:
    """High-probability raw covariance bound for the countsketch-start sketch."""
    if inp.eps is None or not 0.0 < inp.eps < 1.0:
        raise ArgumentError("countsketch bound needs an explicit eps in (0, 1)")
    if inp.p is None or not 0.0 < inp.p < 1.0:
        raise ArgumentError("countsketch bound needs a failure rate p in (0, 1)")
    m_min = (inp.ell ** 2 + inp.ell) / (inp.eps ** 2 * inp.p)
    if inp.m < m_min:
        raise ArgumentError(
            f"block width m={inp.m} below the embedding minimum {math.ceil(m_min)}"
        )
    spread = math.sqrt(inp.d * (inp.d - inp.ell) / (1.0 - inp.eps))
    one_plus_delta = (1.0 + _decay_factor(inp.q, inp.gamma) * spread) ** 2
    tail_term = inp.tail_fro_k / (inp.ell - inp.k)
    return _deviation_terms(inp, one_plus_delta) * inp.sigma_ell_plus_1 ** 2 + tail_term


def spectral_gap(a: DenseMatrix, ell: int) -> float:
    """Relative gap (sigma_ell - sigma_{ell+1}) / sigma_{ell+1}.

    Returns inf when sigma_{ell+1} sits at numerical-rank level, meaning a is
    effectively rank <= ell.
    """
    if not 1 <= ell < min(a.rows, a.cols):
        raise ArgumentError(f"ell must be in [1, {min(a.rows, a.cols) - 1}], got {ell}")
    s = svd_thin(a).s
    if s[ell] <= 1e-12 * max(a.rows, a.cols) * s[0]:
        return math.inf
    return float((s[ell - 1] - s[ell]) / s[ell])


def bound_inputs_from(a: DenseMatrix, s: int, ell: int, m: int, q: int, k: int,
                      eta: float = 0.05, eps: float | None = None,
                      p: float | None = None) -> BoundInputs:
    """Measure gamma, sigma_{ell+1} and the k-tail of a, then assemble inputs."""
    sv = svd_thin(a).s
    if ell >= len(sv):
        raise ArgumentError(f"ell must be below min(a.shape) = {len(sv)}")
    if sv[ell] <= 1e-12 * max(a.rows, a.cols) * sv[0]:
        gamma = math.inf
    else:
        gamma = float((sv[ell - 1] - sv[ell]) / sv[ell])
    return BoundInputs(
        d=a.cols,
        s=s,
        ell=ell,
        m=m,
        q=q,
        k=k,
        gamma=gamma,
        sigma_ell_plus_1=float(sv[ell]),
        tail_fro_k=float(np.sum(sv[k:] ** 2)),
        eta=eta,
        eps=eps,
        p=p,
    )
