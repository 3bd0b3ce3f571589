"""Kernel backend selection.

The compiled extension is preferred when present; the numpy reference is the
fallback. SKETCH_BACKEND=numpy or SKETCH_BACKEND=cython forces the choice.
"""

import os
import warnings

from . import _numpy_ref

_requested = os.environ.get("SKETCH_BACKEND", "").strip().lower()

if _requested == "numpy":
    _impl = _numpy_ref
    BACKEND = "numpy"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            warnings.warn("compiled kernels requested but not built; using numpy fallback")
        _impl = _numpy_ref
        BACKEND = "numpy"

csr_dense = _impl.csr_dense
csr_t_dense = _impl.csr_t_dense
countsketch_dense = _impl.countsketch_dense
countsketch_csr = _impl.countsketch_csr
