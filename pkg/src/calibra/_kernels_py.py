"""Pure-numpy implementation of the dense form-evaluation kernels.

A k-form on an n-dimensional space is stored as a flat coefficient array
over the strictly increasing k-tuples of basis indices (lexicographic
order).  Evaluation on k vectors expands into minors:

    form(v_1, ..., v_k) = sum_I  c_I * det( [v_a[i_b]]_{a,b} )

These two entry points are mirrored by the Cython module
``calibra._kernels``; ``calibra._backend`` selects one at import time.
"""

import numpy as np


def eval_batch(coeffs, tuples, frames):
    """Evaluate one packed k-form on a batch of k-frames.

    Parameters
    ----------
    coeffs : (C,) float or complex array, packed coefficients.
    tuples : (C, k) integer array of increasing basis tuples.
    frames : (m, k, dim) array, ``frames[s, a]`` is the a-th argument
        vector of sample s.

    Returns
    -------
    (m,) array of form values.
    """
    frames = np.asarray(frames)
    m, k, _ = frames.shape
    if k == 0:
        return np.full(m, coeffs[0])
    minors = frames[:, :, tuples]            # (m, k, C, k)
    minors = np.transpose(minors, (0, 2, 1, 3))  # (m, C, k, k)
    dets = np.linalg.det(minors)
    return dets @ coeffs


def eval_one(coeffs, tuples, vectors):
    """Evaluate one packed k-form on a single k-frame ``vectors`` (k, dim)."""
    return eval_batch(coeffs, tuples, np.asarray(vectors)[None])[0]
