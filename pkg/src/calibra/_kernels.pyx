# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled form-evaluation kernels (hot inner loop).

Mirrors ``calibra._kernels_py``; real coefficients, degree <= 4.  The
dispatcher in ``calibra._backend`` falls back to the numpy path for
complex data or higher degree.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef inline double _det1(double a) nogil:
    return a


cdef inline double _det2(double a, double b,
                         double c, double d) nogil:
    return a * d - b * c


cdef inline double _det3(double a, double b, double c,
                         double d, double e, double f,
                         double g, double h, double i) nogil:
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def eval_batch(cnp.ndarray[double, ndim=1] coeffs,
               cnp.ndarray[cnp.intp_t, ndim=2] tuples,
               cnp.ndarray[double, ndim=3] frames):
    """Evaluate one packed k-form (k <= 4, real) on a batch of k-frames."""
    cdef Py_ssize_t m = frames.shape[0]
    cdef Py_ssize_t k = frames.shape[1]
    cdef Py_ssize_t C = tuples.shape[0]
    cdef Py_ssize_t s, c
    cdef Py_ssize_t i0, i1, i2, i3
    cdef double acc, d
    cdef double m00, m01, m02, m03
    cdef double m10, m11, m12, m13
    cdef double m20, m21, m22, m23
    cdef double m30, m31, m32, m33
    if k > 4:
        raise ValueError("compiled kernel supports degree <= 4")
    out = np.empty(m, dtype=np.float64)
    cdef double[:] o = out
    cdef const double[:, :, :] V = frames
    cdef const double[:] cf = coeffs
    cdef const cnp.intp_t[:, :] T = tuples
    with nogil:
        for s in range(m):
            acc = 0.0
            if k == 1:
                for c in range(C):
                    acc += cf[c] * V[s, 0, T[c, 0]]
            elif k == 2:
                for c in range(C):
                    i0 = T[c, 0]; i1 = T[c, 1]
                    acc += cf[c] * _det2(V[s, 0, i0], V[s, 0, i1],
                                         V[s, 1, i0], V[s, 1, i1])
            elif k == 3:
                for c in range(C):
                    i0 = T[c, 0]; i1 = T[c, 1]; i2 = T[c, 2]
                    acc += cf[c] * _det3(V[s, 0, i0], V[s, 0, i1], V[s, 0, i2],
                                         V[s, 1, i0], V[s, 1, i1], V[s, 1, i2],
                                         V[s, 2, i0], V[s, 2, i1], V[s, 2, i2])
            elif k == 4:
                for c in range(C):
                    i0 = T[c, 0]; i1 = T[c, 1]; i2 = T[c, 2]; i3 = T[c, 3]
                    m00 = V[s, 0, i0]; m01 = V[s, 0, i1]; m02 = V[s, 0, i2]; m03 = V[s, 0, i3]
                    m10 = V[s, 1, i0]; m11 = V[s, 1, i1]; m12 = V[s, 1, i2]; m13 = V[s, 1, i3]
                    m20 = V[s, 2, i0]; m21 = V[s, 2, i1]; m22 = V[s, 2, i2]; m23 = V[s, 2, i3]
                    m30 = V[s, 3, i0]; m31 = V[s, 3, i1]; m32 = V[s, 3, i2]; m33 = V[s, 3, i3]
                    d = m00 * _det3(m11, m12, m13, m21, m22, m23, m31, m32, m33)
                    d -= m01 * _det3(m10, m12, m13, m20, m22, m23, m30, m32, m33)
                    d += m02 * _det3(m10, m11, m13, m20, m21, m23, m30, m31, m33)
                    d -= m03 * _det3(m10, m11, m12, m20, m21, m22, m30, m31, m32)
                    acc += cf[c] * d
            else:
                for c in range(C):
                    acc += cf[c]
            o[s] = acc
    return out


def eval_one(coeffs, tuples, vectors):
    """Evaluate one packed k-form on a single k-frame ``vectors`` (k, dim)."""
    return eval_batch(coeffs, tuples, np.ascontiguousarray(vectors)[None])[0]
