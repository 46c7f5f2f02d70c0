"""Flat-model exceptional algebra: octonions, cross products, and the
associated calibration forms on 7 and 8 dimensions.

Basis conventions (fixed once, validated by the identity tests):

* 7-space, order ``(f1, f2, f3, e0, e1, e2, e3)`` with metric
  ``diag(v^2, v^2, v^2, u^2, u^2, u^2, u^2)``.  The fundamental 3-form is

    phi = v^3 f^123 + u^2 v [ f^1(e^01 - e^23) + f^2(e^02 - e^31) + f^3(e^03 - e^12) ]

  and its dual 4-form is the Hodge star in the orientation of the listed
  basis order.

* 8-space, order ``(e1, e2, e3, e4, f1, f2, f3, f4)`` with metric
  ``diag(u^2 x4, v^2 x4)`` and the self-dual 4-form

    Phi = u^4 e^1234 + v^4 f^1234
        + u^2 v^2 [ (e^12 - e^34)(f^12 - f^34) + (e^13 - e^42)(f^13 - f^42)
                    + (e^14 - e^23)(f^14 - f^23) ].

* Imaginary octonion units are identified with the 7-basis in order, so
  the multiplication table is ``x_i x_j = -delta_ij + sum_k phi_ijk x_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InputValidationError, StructuralError
from .exterior import (
    InnerProductSpace,
    KForm,
    basis_form,
    flat,
    form_from_dict,
    hodge_star,
    index_tuples,
    interior,
    sharp,
    wedge,
    zero_form,
)

G2_LABELS = ("f1", "f2", "f3", "e0", "e1", "e2", "e3")
SPIN7_LABELS = ("e1", "e2", "e3", "e4", "f1", "f2", "f3", "f4")

EXACT_TOL = 1e-12       # exact algebraic identities
COMASS_TOL = 1e-9       # Monte-Carlo comass margin


# ---------------------------------------------------------------------------
# structures
# ---------------------------------------------------------------------------

def _g2_phi_dict(u: float, v: float) -> dict:
    f1, f2, f3, e0, e1, e2, e3 = range(7)
    uv = u * u * v
    return {
        (f1, f2, f3): v ** 3,
        (f1, e0, e1): uv, (f1, e2, e3): -uv,
        (f2, e0, e2): uv, (f2, e3, e1): -uv,
        (f3, e0, e3): uv, (f3, e1, e2): -uv,
    }


@dataclass(frozen=True, eq=False)
class G2FlatStructure:
    """Scaled flat model of the 7-dimensional cross-product geometry."""

    space: InnerProductSpace
    phi: KForm
    star_phi: KForm
    u: float
    v: float


def g2_structure(u: float = 1.0, v: float = 1.0) -> G2FlatStructure:
    if u <= 0 or v <= 0:
        raise InputValidationError("scale factors must be positive")
    space = InnerProductSpace(7, np.diag([v * v] * 3 + [u * u] * 4), G2_LABELS)
    phi = form_from_dict(space, 3, _g2_phi_dict(u, v))
    return G2FlatStructure(space, phi, hodge_star(phi), u, v)


def _spin7_phi_dict(u: float, v: float) -> dict:
    e = list(range(4))
    f = list(range(4, 8))
    out = {(e[0], e[1], e[2], e[3]): u ** 4, (f[0], f[1], f[2], f[3]): v ** 4}
    uv = u * u * v * v
    pairs = [
        ([(e[0], e[1], 1.0), (e[2], e[3], -1.0)], [(f[0], f[1], 1.0), (f[2], f[3], -1.0)]),
        ([(e[0], e[2], 1.0), (e[3], e[1], -1.0)], [(f[0], f[2], 1.0), (f[3], f[1], -1.0)]),
        ([(e[0], e[3], 1.0), (e[1], e[2], -1.0)], [(f[0], f[3], 1.0), (f[1], f[2], -1.0)]),
    ]
    from .exterior import perm_sign
    for hor, ver in pairs:
        for (a, b, sa) in hor:
            for (c, d, sb) in ver:
                I = (a, b, c, d)
                s = perm_sign(I)
                key = tuple(sorted(I))
                out[key] = out.get(key, 0.0) + s * sa * sb * uv
    return out


@dataclass(frozen=True, eq=False)
class Spin7FlatStructure:
    """Scaled flat model of the 8-dimensional triple-cross geometry."""

    space: InnerProductSpace
    Phi: KForm
    u: float
    v: float


def spin7_structure(u: float = 1.0, v: float = 1.0) -> Spin7FlatStructure:
    if u <= 0 or v <= 0:
        raise InputValidationError("scale factors must be positive")
    space = InnerProductSpace(8, np.diag([u * u] * 4 + [v * v] * 4), SPIN7_LABELS)
    Phi = form_from_dict(space, 4, _spin7_phi_dict(u, v))
    return Spin7FlatStructure(space, Phi, u, v)


# ---------------------------------------------------------------------------
# octonion table
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OctonionTable:
    """Structure constants on the basis (1, x1..x7): x_i x_j = sum_k c[i,j,k] x_k."""

    table: np.ndarray  # (8, 8, 8)

    def multiply(self, x, y):
        return np.einsum("ijk,i,j->k", self.table, np.asarray(x), np.asarray(y))

    def conjugate(self, x):
        out = -np.asarray(x, dtype=float).copy()
        out[0] = x[0]
        return out

    def associator(self, x, y, z):
        """[x, y, z] = x(yz) - (xy)z."""
        return self.multiply(x, self.multiply(y, z)) - self.multiply(self.multiply(x, y), z)


def _build_table() -> np.ndarray:
    phi = _g2_phi_dict(1.0, 1.0)
    c = np.zeros((8, 8, 8))
    c[0, 0, 0] = 1.0
    for i in range(1, 8):
        c[0, i, i] = 1.0
        c[i, 0, i] = 1.0
        c[i, i, 0] = -1.0
    from .exterior import perm_sign
    for (a, b, d), val in phi.items():
        for p in itertools.permutations((a, b, d)):
            c[p[0] + 1, p[1] + 1, p[2] + 1] = val * perm_sign(p) * perm_sign((a, b, d))
    return c


_TABLE = OctonionTable(_build_table())


def standard_octonions() -> OctonionTable:
    """The table induced by the fixed 7-basis identification."""
    return _TABLE


def imaginary_embed(v7) -> np.ndarray:
    out = np.zeros(8)
    out[1:] = v7
    return out


# ---------------------------------------------------------------------------
# cross products
# ---------------------------------------------------------------------------

def cross7(st: G2FlatStructure, u, v) -> np.ndarray:
    """Two-fold cross product: (u x v)^flat = v <| u <| phi."""
    return sharp(st.space, interior(v, interior(u, st.phi)))


def triple_cross(st: Spin7FlatStructure, u, v, w) -> np.ndarray:
    """Three-fold cross product: X(u,v,w)^flat = w <| v <| u <| Phi."""
    return sharp(st.space, interior(w, interior(v, interior(u, st.Phi))))


def assoc_defect(st: G2FlatStructure, u, v, w) -> KForm:
    """One-form u <| v <| w <| *phi; vanishes iff span{u,v,w} is associative."""
    return interior(u, interior(v, interior(w, st.star_phi)))


def associator(st: G2FlatStructure, u, v, w, table: OctonionTable = _TABLE) -> np.ndarray:
    """Associator of three 7-vectors, computed through the octonion table.

    Cross-checked elsewhere against -2 * sharp(assoc_defect); the two routes
    agree to machine precision in the flat (u = v = 1) model.
    """
    a = table.associator(imaginary_embed(u), imaginary_embed(v), imaginary_embed(w))
    if abs(a[0]) > 1e-9 * max(1.0, np.abs(a).max()):
        raise StructuralError("associator of imaginary octonions has a real part")
    return a[1:]


# ---------------------------------------------------------------------------
# the 7-dimensional 2-form projector
# ---------------------------------------------------------------------------

def pi7(st: Spin7FlatStructure, two_form: KForm) -> KForm:
    """Projection of a 2-form onto the 7-dimensional summand.

    On decomposables: pi7(u^flat ^ v^flat) = (u^flat ^ v^flat + u <| v <| Phi) / 4,
    extended linearly over the coefficient basis.
    """
    if two_form.degree != 2:
        raise StructuralError("pi7 expects a 2-form")
    M = pi7_matrix(st)
    return KForm(st.space, 2, M @ two_form.coeffs)


def pi7_matrix(st: Spin7FlatStructure) -> np.ndarray:
    """The 28 x 28 matrix of pi7 in the packed 2-form basis."""
    cache = st.space._cache
    if "pi7" not in cache:
        ginv = st.space.metric_inv
        tups = index_tuples(8, 2)
        M = np.zeros((28, 28))
        for col, (c, d) in enumerate(tups):
            uvec = ginv[:, c]       # sharp(e^c)
            vvec = ginv[:, d]
            out = interior(uvec, interior(vvec, st.Phi)).coeffs.copy()
            out[col] += 1.0
            M[:, col] = 0.25 * out
        cache["pi7"] = M
    return cache["pi7"]


# ---------------------------------------------------------------------------
# Cayley 2-form
# ---------------------------------------------------------------------------

_ETA_ROLES = ((0, (1, 2, 3)), (1, (2, 0, 3)), (2, (0, 1, 3)), (3, (1, 0, 2)))


def cayley_eta(st: Spin7FlatStructure, u, v, w, y) -> KForm:
    """Alternating 2-form vanishing exactly on Cayley 4-planes.

    Termwise sum of flat-wedge and contraction pairs over the four slots;
    the overall sign is fixed so that frames of the spinor-bundle
    construction decompose with positive trace coefficients (see
    bs_spin7.cayley_defect).
    """
    args = [np.asarray(a, dtype=float) for a in (u, v, w, y)]
    total = zero_form(st.space, 2)
    for slot, triple in _ETA_ROLES:
        a = args[slot]
        X = triple_cross(st, *(args[i] for i in triple))
        term = wedge(flat(st.space, a), flat(st.space, X)) + interior(a, interior(X, st.Phi))
        total = total + term
    return -total


# ---------------------------------------------------------------------------
# comass
# ---------------------------------------------------------------------------

def random_orthonormal_frames(dim: int, k: int, trials: int, rng) -> np.ndarray:
    """Haar-ish random orthonormal k-frames via QR, shape (trials, k, dim)."""
    A = rng.standard_normal((trials, dim, k))
    Q = np.linalg.qr(A)[0]
    return np.transpose(Q, (0, 2, 1))


def comass_check(form: KForm, k: int, trials: int = 10_000, rng=None) -> float:
    """Empirical comass: max of the form over random orthonormal k-frames.

    Assumes the unit-comass normalization (flat scales); values must stay
    below 1 + 1e-9.
    """
    if form.degree != k:
        raise StructuralError("comass degree mismatch")
    rng = np.random.default_rng(0) if rng is None else rng
    frames = random_orthonormal_frames(form.space.dim, k, trials, rng)
    return float(np.max(np.abs(form.evaluate_frames(frames))))
