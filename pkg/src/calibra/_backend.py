"""Kernel selection: compiled extension when importable, numpy otherwise.

Set ``CALIBRA_PURE_PYTHON=1`` to force the numpy path (used by the
benchmark and by tests that compare the two implementations).
"""

import os

import numpy as np

from . import _kernels_py

_compiled = None
if not os.environ.get("CALIBRA_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

KERNEL_BACKEND = "compiled" if _compiled is not None else "python"


def _use_compiled(coeffs, frames, k):
    return (
        _compiled is not None
        and k <= 4
        and coeffs.dtype == np.float64
        and frames.dtype == np.float64
    )


def eval_batch(coeffs, tuples, frames):
    """Evaluate a packed k-form on (m, k, dim) frames; returns (m,)."""
    frames = np.ascontiguousarray(frames)
    k = frames.shape[1]
    if _use_compiled(coeffs, frames, k):
        return _compiled.eval_batch(coeffs, tuples, frames)
    return _kernels_py.eval_batch(coeffs, tuples, frames)


def eval_one(coeffs, tuples, vectors):
    """Evaluate a packed k-form on a single k-frame (k, dim)."""
    vectors = np.ascontiguousarray(vectors)
    if _use_compiled(coeffs, vectors[None], vectors.shape[0]):
        return _compiled.eval_one(coeffs, tuples, vectors)
    return _kernels_py.eval_one(coeffs, tuples, vectors)
