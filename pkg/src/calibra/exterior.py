"""Dense exterior algebra over framed inner-product spaces of dimension <= 9.

Forms are stored over strictly increasing index tuples with the
determinant normalization: ``(e^1 ^ ... ^ e^k)(e_1, ..., e_k) = 1``.
All values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .errors import (
    DegenerateInputError,
    FDEvaluationError,
    InputValidationError,
    StructuralError,
)

MAX_DIM = 9


# ---------------------------------------------------------------------------
# combinatorial tables (cached per dimension/degree)
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def index_tuples(dim: int, k: int) -> np.ndarray:
    """All strictly increasing k-tuples in lexicographic order, shape (C, k)."""
    combos = list(itertools.combinations(range(dim), k))
    return np.array(combos, dtype=np.intp).reshape(len(combos), k)


@lru_cache(maxsize=None)
def tuple_index(dim: int, k: int) -> dict:
    return {tuple(t): i for i, t in enumerate(index_tuples(dim, k))}


def perm_sign(seq) -> int:
    """Sign of the permutation sorting ``seq``; 0 if a value repeats."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] == seq[j]:
                return 0
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def _wedge_table(dim: int, p: int, q: int):
    """COO triples (pos_a, pos_b, pos_out, sign) for the wedge product."""
    pos_out = tuple_index(dim, p + q)
    pa, pb, po, sg = [], [], [], []
    for ia, I in enumerate(itertools.combinations(range(dim), p)):
        for ib, J in enumerate(itertools.combinations(range(dim), q)):
            if set(I) & set(J):
                continue
            s = perm_sign(I + J)
            pa.append(ia)
            pb.append(ib)
            po.append(pos_out[tuple(sorted(I + J))])
            sg.append(s)
    return (np.array(pa, dtype=np.intp), np.array(pb, dtype=np.intp),
            np.array(po, dtype=np.intp), np.array(sg, dtype=np.float64))


@lru_cache(maxsize=None)
def _interior_table(dim: int, k: int):
    """COO triples (pos_in, axis, pos_out, sign) for one contraction slot."""
    pos_out = tuple_index(dim, k - 1)
    pi, ax, po, sg = [], [], [], []
    for ii, I in enumerate(itertools.combinations(range(dim), k)):
        for slot, i in enumerate(I):
            J = I[:slot] + I[slot + 1:]
            pi.append(ii)
            ax.append(i)
            po.append(pos_out[J])
            sg.append((-1.0) ** slot)
    return (np.array(pi, dtype=np.intp), np.array(ax, dtype=np.intp),
            np.array(po, dtype=np.intp), np.array(sg, dtype=np.float64))


@lru_cache(maxsize=None)
def _hodge_signs(dim: int, k: int):
    """Complement positions and permutation signs for the Hodge star."""
    pos_out = tuple_index(dim, dim - k)
    allidx = set(range(dim))
    po, sg = [], []
    for I in itertools.combinations(range(dim), k):
        Ic = tuple(sorted(allidx - set(I)))
        po.append(pos_out[Ic])
        sg.append(perm_sign(I + Ic))
    return np.array(po, dtype=np.intp), np.array(sg, dtype=np.float64)


# ---------------------------------------------------------------------------
# spaces, frames, forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class InnerProductSpace:
    """Real inner-product space with a distinguished (coordinate) basis."""

    dim: int
    metric: np.ndarray
    basis_labels: tuple = ()

    def __post_init__(self):
        if not (1 <= self.dim <= MAX_DIM):
            raise InputValidationError(f"dim must be in 1..{MAX_DIM}, got {self.dim}")
        g = np.asarray(self.metric, dtype=np.float64)
        if g.shape != (self.dim, self.dim):
            raise StructuralError(f"metric shape {g.shape} != ({self.dim}, {self.dim})")
        if not np.allclose(g, g.T, atol=1e-12):
            raise InputValidationError("metric must be symmetric")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise InputValidationError("metric must be positive definite")
        object.__setattr__(self, "metric", g)
        if not self.basis_labels:
            object.__setattr__(self, "basis_labels",
                               tuple(f"x{i}" for i in range(self.dim)))
        elif len(self.basis_labels) != self.dim:
            raise InputValidationError("need one label per basis vector")
        object.__setattr__(self, "_cache", {})

    @property
    def metric_inv(self) -> np.ndarray:
        cache = self._cache
        if "inv" not in cache:
            cache["inv"] = np.linalg.inv(self.metric)
        return cache["inv"]

    @property
    def sqrt_det(self) -> float:
        cache = self._cache
        if "sqrtdet" not in cache:
            cache["sqrtdet"] = float(np.sqrt(np.linalg.det(self.metric)))
        return cache["sqrtdet"]

    def inner(self, v, w) -> float:
        return float(np.asarray(v) @ self.metric @ np.asarray(w))

    def norm(self, v) -> float:
        return float(np.sqrt(max(self.inner(v, v), 0.0)))

    def compound_inv(self, k: int) -> np.ndarray:
        """Induced inner product on k-forms: G[I, J] = det(metric_inv[I, J])."""
        cache = self._cache
        key = ("compound", k)
        if key not in cache:
            tups = index_tuples(self.dim, k)
            C = len(tups)
            G = np.empty((C, C))
            ginv = self.metric_inv
            for a in range(C):
                rows = ginv[tups[a]]
                for b in range(C):
                    G[a, b] = np.linalg.det(rows[:, tups[b]])
            cache[key] = G
        return cache[key]


def euclidean_space(dim: int, labels: tuple = ()) -> InnerProductSpace:
    return InnerProductSpace(dim, np.eye(dim), labels)


@dataclass(frozen=True, eq=False)
class Frame:
    """An ordered list of vectors, optionally flagged orthonormal."""

    space: InnerProductSpace
    vectors: np.ndarray
    orthonormal: bool = False

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=np.float64)
        object.__setattr__(self, "vectors", V)
        if V.ndim != 2 or V.shape[1] != self.space.dim:
            raise StructuralError("frame vectors must be (m, dim)")
        if self.orthonormal:
            G = V @ self.space.metric @ V.T
            if np.abs(G - np.eye(len(V))).max() > 1e-10:
                raise StructuralError("frame flagged orthonormal but Gram != I")

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, i):
        return self.vectors[i]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.space.metric @ self.vectors.T


@dataclass(frozen=True, eq=False)
class KForm:
    """Antisymmetric k-tensor, packed over increasing tuples."""

    space: InnerProductSpace
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if not np.iscomplexobj(c):
            c = c.astype(np.float64)
        want = len(index_tuples(self.space.dim, self.degree))
        if c.shape != (want,):
            raise StructuralError(
                f"degree-{self.degree} form on dim {self.space.dim} needs "
                f"{want} coefficients, got {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    # -- evaluation --------------------------------------------------------
    def __call__(self, *vectors):
        if len(vectors) != self.degree:
            raise StructuralError(
                f"degree-{self.degree} form called with {len(vectors)} vectors")
        if self.degree == 0:
            return self.coeffs[0]
        V = np.asarray(vectors)
        tups = index_tuples(self.space.dim, self.degree)
        if np.iscomplexobj(self.coeffs) or np.iscomplexobj(V):
            from . import _kernels_py
            return _kernels_py.eval_one(self.coeffs, tups, V)
        return _backend.eval_one(self.coeffs, tups, V.astype(np.float64))

    def evaluate_frames(self, frames: np.ndarray) -> np.ndarray:
        """Evaluate on a batch of frames, shape (m, degree, dim)."""
        frames = np.asarray(frames)
        tups = index_tuples(self.space.dim, self.degree)
        if np.iscomplexobj(self.coeffs) or np.iscomplexobj(frames):
            from . import _kernels_py
            return _kernels_py.eval_batch(self.coeffs, tups, frames)
        return _backend.eval_batch(self.coeffs, tups, frames.astype(np.float64))

    # -- coefficient access --------------------------------------------------
    def __getitem__(self, indices):
        indices = tuple(np.atleast_1d(indices))
        s = perm_sign(indices)
        if s == 0:
            return 0.0
        pos = tuple_index(self.space.dim, self.degree)[tuple(sorted(indices))]
        return s * self.coeffs[pos]

    def as_dict(self, tol: float = 0.0) -> dict:
        tups = index_tuples(self.space.dim, self.degree)
        return {tuple(t): c for t, c in zip(tups, self.coeffs) if abs(c) > tol}

    # -- linear structure ----------------------------------------------------
    def _like(self, coeffs):
        return KForm(self.space, self.degree, coeffs)

    def __add__(self, other):
        self._check_same(other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_same(other)
        return self._like(self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return self._like(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.coeffs)

    def _check_same(self, other):
        if other.space is not self.space and (
                other.space.dim != self.space.dim
                or not np.array_equal(other.space.metric, self.space.metric)):
            raise StructuralError("forms live on different spaces")
        if other.degree != self.degree:
            raise StructuralError("forms have different degrees")

    def norm_coeffs(self) -> float:
        """Euclidean norm of the packed coefficient array."""
        return float(np.linalg.norm(self.coeffs))


def zero_form(space: InnerProductSpace, k: int) -> KForm:
    return KForm(space, k, np.zeros(len(index_tuples(space.dim, k))))


def basis_form(space: InnerProductSpace, indices) -> KForm:
    """Dual-basis wedge e^{i1} ^ ... ^ e^{ik} for strictly increasing indices."""
    indices = tuple(indices)
    k = len(indices)
    if list(indices) != sorted(set(indices)):
        raise InputValidationError("basis_form needs strictly increasing indices")
    c = np.zeros(len(index_tuples(space.dim, k)))
    c[tuple_index(space.dim, k)[indices]] = 1.0
    return KForm(space, k, c)


def form_from_dict(space: InnerProductSpace, k: int, data: dict) -> KForm:
    c = np.zeros(len(index_tuples(space.dim, k)),
                 dtype=complex if any(np.iscomplexobj(v) for v in data.values()) else float)
    pos = tuple_index(space.dim, k)
    for I, val in data.items():
        s = perm_sign(I)
        if s == 0:
            raise InputValidationError(f"repeated index in {I}")
        c[pos[tuple(sorted(I))]] += s * val
    return KForm(space, k, c)


# ---------------------------------------------------------------------------
# products and musical isomorphisms
# ---------------------------------------------------------------------------

def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product in the determinant normalization."""
    if a.space.dim != b.space.dim:
        raise StructuralError("wedge of forms on different spaces")
    if a.degree + b.degree > a.space.dim:
        raise StructuralError(
            f"wedge degree {a.degree}+{b.degree} exceeds dim {a.space.dim}")
    pa, pb, po, sg = _wedge_table(a.space.dim, a.degree, b.degree)
    dtype = np.result_type(a.coeffs, b.coeffs)
    out = np.zeros(len(index_tuples(a.space.dim, a.degree + b.degree)), dtype=dtype)
    np.add.at(out, po, sg * a.coeffs[pa] * b.coeffs[pb])
    return KForm(a.space, a.degree + b.degree, out)


def interior(v, a: KForm) -> KForm:
    """Contraction ``(v <| a)(w_2, ..., w_k) = a(v, w_2, ..., w_k)``."""
    if a.degree == 0:
        raise StructuralError("interior product of a 0-form")
    v = np.asarray(v)
    pi, ax, po, sg = _interior_table(a.space.dim, a.degree)
    dtype = np.result_type(a.coeffs, v)
    out = np.zeros(len(index_tuples(a.space.dim, a.degree - 1)), dtype=dtype)
    np.add.at(out, po, sg * a.coeffs[pi] * v[ax])
    return KForm(a.space, a.degree - 1, out)


def flat(space: InnerProductSpace, v) -> KForm:
    """Lower an index: ``flat(v)(w) = <v, w>``."""
    return KForm(space, 1, space.metric @ np.asarray(v))


def sharp(space: InnerProductSpace, xi) -> np.ndarray:
    """Raise an index; accepts a 1-form or its coefficient vector."""
    c = xi.coeffs if isinstance(xi, KForm) else np.asarray(xi)
    if isinstance(xi, KForm) and xi.degree != 1:
        raise StructuralError("sharp expects a 1-form")
    return np.linalg.solve(space.metric, c)


def musical(space: InnerProductSpace, x):
    """Flat on vectors, sharp on 1-forms."""
    if isinstance(x, KForm):
        return sharp(space, x)
    return flat(space, x)


def hodge_star(a: KForm) -> KForm:
    """Hodge star w.r.t. the space metric, orientation e^1 ^ ... ^ e^n."""
    dim, k = a.space.dim, a.degree
    raised = a.space.compound_inv(k) @ a.coeffs
    po, sg = _hodge_signs(dim, k)
    out = np.zeros(len(index_tuples(dim, dim - k)), dtype=raised.dtype)
    out[po] = sg * raised * a.space.sqrt_det
    return KForm(a.space, dim - k, out)


def form_inner(a: KForm, b: KForm) -> float:
    """Metric inner product on k-forms (conjugate-linear in ``a``)."""
    a._check_same(b)
    return np.conj(a.coeffs) @ a.space.compound_inv(a.degree) @ b.coeffs


def form_norm(a: KForm) -> float:
    return float(np.sqrt(max(np.real(form_inner(a, a)), 0.0)))


# ---------------------------------------------------------------------------
# frames from vectors
# ---------------------------------------------------------------------------

def gram_schmidt(vectors, space: InnerProductSpace, cond_max: float = 1e8) -> Frame:
    """Orthonormalize w.r.t. the space metric; first output parallel to input[0].

    Raises DegenerateInputError naming the first offending vector when the
    input flag is numerically rank deficient.
    """
    V = np.asarray(vectors, dtype=np.float64)
    if V.ndim != 2 or V.shape[1] != space.dim:
        raise StructuralError("gram_schmidt expects (m, dim) vectors")
    out = []
    g = space.metric
    for idx, v in enumerate(V):
        w = v.copy()
        for u in out:
            w = w - (u @ g @ w) * u
        nrm = np.sqrt(w @ g @ w)
        if not np.isfinite(nrm) or nrm * cond_max < np.sqrt(v @ g @ v) or nrm == 0.0:
            raise DegenerateInputError(
                f"input vector {idx} is linearly dependent on its predecessors")
        out.append(w / nrm)
    return Frame(space, np.array(out), orthonormal=True)


# ---------------------------------------------------------------------------
# numerical differentiation
# ---------------------------------------------------------------------------

DEFAULT_FD_STEP = 1e-5


def _central(fun: Callable, p: np.ndarray, i: int, h: float):
    dp = np.zeros_like(p)
    dp[i] = h
    try:
        return (np.asarray(fun(p + dp)) - np.asarray(fun(p - dp))) / (2.0 * h)
    except Exception as exc:  # noqa: BLE001 - propagate with stencil location
        raise FDEvaluationError(
            f"map evaluation failed near {p.tolist()} (coordinate {i}, step {h})"
        ) from exc


def fd_pushforward(fun: Callable, point, step: float = DEFAULT_FD_STEP,
                   richardson: bool = False) -> list:
    """Central-difference partial derivatives of ``fun`` at ``point``.

    Returns one ambient vector per chart coordinate, second-order accurate;
    with ``richardson=True`` the step/half-step extrapolation (fourth order).
    """
    if not (1e-7 <= step <= 1e-2):
        raise InputValidationError("step must lie in [1e-7, 1e-2]")
    p = np.asarray(point, dtype=np.float64)
    cols = []
    for i in range(len(p)):
        d = _central(fun, p, i, step)
        if richardson:
            d2 = _central(fun, p, i, step / 2.0)
            d = (4.0 * d2 - d) / 3.0
        cols.append(d)
    return cols


def fd_hessian(fun: Callable, point, step: float = 3e-4) -> np.ndarray:
    """Second partial derivatives of a vector-valued chart, shape (m, m, out)."""
    p = np.asarray(point, dtype=np.float64)
    m = len(p)
    f0 = np.asarray(fun(p))
    H = np.empty((m, m) + f0.shape)
    eye = np.eye(m) * step
    try:
        for a in range(m):
            H[a, a] = (np.asarray(fun(p + eye[a])) - 2.0 * f0
                       + np.asarray(fun(p - eye[a]))) / step ** 2
            for b in range(a + 1, m):
                mixed = (np.asarray(fun(p + eye[a] + eye[b]))
                         - np.asarray(fun(p + eye[a] - eye[b]))
                         - np.asarray(fun(p - eye[a] + eye[b]))
                         + np.asarray(fun(p - eye[a] - eye[b]))) / (4.0 * step ** 2)
                H[a, b] = H[b, a] = mixed
    except FDEvaluationError:
        raise
    except Exception as exc:  # noqa: BLE001
        raise FDEvaluationError(
            f"map evaluation failed near {p.tolist()} (hessian stencil, step {step})"
        ) from exc
    return H
