"""Streaming matrix sketching: frequent directions with block Krylov compression.

A stream of row batches is compressed batch-by-batch through a randomized
Krylov subspace (gaussian or countsketch starting block) and folded into a
fixed-size frequent-directions buffer, yielding a small sketch B whose
covariance B^T B tracks A^T A with provable error.
"""

from .bki import (
    BkiOutput,
    KIND_COUNTSKETCH,
    KIND_GAUSSIAN,
    RbkiConfig,
    krylov_block,
    q_from_error,
    rbki,
)
from .data_io import (
    SparseSpec,
    SyntheticSpec,
    decay_profile,
    gen_dense,
    gen_sparse,
    load_csv_dense,
    load_libsvm,
    write_csv,
    write_libsvm,
)
from .driver import (
    CsvSource,
    InMemorySource,
    LibsvmSource,
    RbkifdConfig,
    RbkifdState,
    SketchResult,
    run_stream,
)
from .errors import (
    ArgumentError,
    CapacityError,
    NumericalError,
    ParseError,
    SketchError,
    StateError,
)
from .fd import FdSketch
from .matrix import (
    DenseMatrix,
    SparseMatrix,
    SvdFactors,
    frobenius_norm,
    matmul,
    matmul_transposed,
    orthonormalize_columns,
    spectral_norm_symmetric,
    svd_thin,
    truncated_svd,
)
from .metrics import (
    BoundInputs,
    ErrorReport,
    bound_inputs_from,
    covariance_error,
    cs_error_bound,
    error_report,
    fd_error_bound,
    ga_error_bound,
    projection_bound,
    projection_bound_holds,
    projection_error,
    raw_covariance_error,
    spectral_gap,
)
from .random_blocks import (
    CountSketchMap,
    OpCounter,
    apply_countsketch,
    countsketch_map,
    embedding_width,
    gaussian_block,
    materialize_countsketch,
    subspace_embedding_trial,
)

__version__ = "0.1.0"
