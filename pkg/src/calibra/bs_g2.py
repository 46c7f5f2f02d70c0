"""Scaled cross-product structure on the anti-self-dual 2-form bundle over a
self-dual Einstein 4-manifold, with the associative / coassociative
verifiers for the line bundle L (span of vol - *vol over a surface) and
its orthogonal complement.

Model space at a bundle point: basis order (f1, f2, f3, e0, e1, e2, e3)
where (e0, e1, e2, e3) are the horizontal lifts of the adapted surface
frame (e_1, e_2, nu_1, nu_2) and (f1, f2, f3) the vertical directions,
metric diag(v^2 x3, u^2 x4).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConsistencyError, InputValidationError
from .exterior import (
    InnerProductSpace,
    KForm,
    euclidean_space,
    fd_pushforward,
    form_from_dict,
    form_inner,
    hodge_star,
    interior,
)
from .immersions import Immersion, second_fundamental_form
from .octonion import G2FlatStructure, g2_structure

CLOSED_FORM_TOL = 1e-10

# model-space index layout
F1, F2, F3, E1H, E2H, N1H, N2H = range(7)


# ---------------------------------------------------------------------------
# structures and surface data
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BSG2Structure:
    """Profile pair (u, v) as functions of the fiber radius."""

    u_profile: Callable[[float], float]
    v_profile: Callable[[float], float]
    name: str = "flat"

    def at(self, r: float) -> G2FlatStructure:
        u, v = float(self.u_profile(r)), float(self.v_profile(r))
        if u <= 0 or v <= 0:
            raise InputValidationError("profiles must stay positive")
        return g2_structure(u, v)


def flat_bs_g2() -> BSG2Structure:
    return BSG2Structure(lambda r: 1.0, lambda r: 1.0, "flat")


def curved_bs_g2() -> BSG2Structure:
    # second positive profile pair exercised by the profile-independence tests
    return BSG2Structure(lambda r: 1.0 + r * r, lambda r: np.sqrt(1.0 + r * r),
                         "curved")


@dataclass(frozen=True, eq=False)
class SurfaceFramePoint:
    """Adapted frame and curvature of a surface point in a 4-sphere."""

    x: np.ndarray
    frame: np.ndarray            # rows (e1, e2, nu1, nu2), orthonormal in R^5
    A: np.ndarray                # (2, 2, 2): A[l][j, k]

    def __post_init__(self):
        F = np.asarray(self.frame, dtype=float)
        if F.shape[0] != 4:
            raise InputValidationError("adapted frame needs (e1, e2, nu1, nu2)")
        G = F @ F.T
        if np.abs(G - np.eye(4)).max() > 1e-10:
            raise InputValidationError("adapted frame must be orthonormal")
        A = np.asarray(self.A, dtype=float)
        if np.abs(A - np.transpose(A, (0, 2, 1))).max() > 1e-8:
            raise InputValidationError("curvature entries must be symmetric")

    def orientation_reversed(self) -> "SurfaceFramePoint":
        """Flip nu_2 (and therefore A^2)."""
        F = self.frame.copy()
        F[3] = -F[3]
        A = self.A.copy()
        A[1] = -A[1]
        return SurfaceFramePoint(self.x, F, A)


def surface_point(imm: Immersion, s) -> SurfaceFramePoint:
    """Adapted frame point from the finite-difference curvature engine."""
    if imm.dim != 2 or imm.codim != 2:
        raise InputValidationError("need a surface of codimension 2")
    sff = second_fundamental_form(imm, s)
    frame = np.vstack([sff.tangents, sff.normals])
    return SurfaceFramePoint(sff.point, frame, sff.entries)


# ---------------------------------------------------------------------------
# anti-self-dual bases
# ---------------------------------------------------------------------------

def asd_basis(space4: InnerProductSpace | None = None):
    """The three 2-forms (f1, f2, f3) on an oriented Euclidean 4-space.

    f1 = e^12 - e^34, f2 = e^13 - e^42, f3 = e^14 - e^23; each is
    anti-self-dual and the pairwise inner product is 2 * delta.
    """
    sp = space4 or euclidean_space(4)
    f1 = form_from_dict(sp, 2, {(0, 1): 1.0, (2, 3): -1.0})
    f2 = form_from_dict(sp, 2, {(0, 2): 1.0, (3, 1): -1.0})
    f3 = form_from_dict(sp, 2, {(0, 3): 1.0, (1, 2): -1.0})
    return f1, f2, f3


def asd_bivectors(frame: np.ndarray) -> np.ndarray:
    """Ambient antisymmetric matrices of (f1, f2, f3) for an adapted frame.

    f1 = e1^e2 - nu1^nu2 is the canonical surface lift (vol - *vol); it is
    invariant under rotations of (e1, e2) and of (nu1, nu2).
    """
    e1, e2, n1, n2 = frame

    def biv(a, b):
        return np.outer(a, b) - np.outer(b, a)

    return np.array([
        biv(e1, e2) - biv(n1, n2),
        biv(e1, n1) + biv(e2, n2),
        biv(e1, n2) - biv(e2, n1),
    ])


def asd_normalization_constant() -> float:
    """<f_i, f_j> = c delta_ij with c = 2 in the induced 2-form metric."""
    f1, _, _ = asd_basis()
    return float(form_inner(f1, f1))


# ---------------------------------------------------------------------------
# vertical corrections
# ---------------------------------------------------------------------------

def alpha_correction(A: np.ndarray, i: int, a: int) -> np.ndarray:
    """Vertical part of the covariant derivative of f^a along e_i.

    Returns components on (f1, f2, f3).  i in {0, 1} indexes the surface
    tangent; a in {1, 2, 3} the anti-self-dual basis element.
    """
    if i not in (0, 1) or a not in (1, 2, 3):
        raise InputValidationError("alpha_correction needs i in {0,1}, a in {1,2,3}")
    A1, A2 = A[0], A[1]
    out = np.zeros(3)
    if a == 1:
        out[1] = -A1[i, 1] + A2[i, 0]
        out[2] = -A1[i, 0] - A2[i, 1]
    elif a == 2:
        out[0] = A1[i, 1] - A2[i, 0]
    else:
        out[0] = A2[i, 1] + A1[i, 0]
    return out


def surface_lift_bivector(imm: Immersion, s) -> np.ndarray:
    """The canonical lift vol - *vol as an ambient bivector (gauge invariant)."""
    from .immersions import adapted_tangent_normals

    af = adapted_tangent_normals(imm, s)
    e1, e2 = af.tangents
    n1, n2 = af.normals
    sign = np.sign(np.linalg.det(np.vstack([af.x[None], af.tangents, af.normals])))
    t_biv = np.outer(e1, e2) - np.outer(e2, e1)
    n_biv = np.outer(n1, n2) - np.outer(n2, n1)
    return t_biv - sign * n_biv


def fd_alpha_correction(imm: Immersion, s, step: float = 1e-5) -> np.ndarray:
    """Finite-difference oracle for alpha(e_i, f^1), shape (2, 3).

    Differentiates the frame-independent lift f1 = vol - *vol along the
    surface, projects both slots tangentially, and expands in the
    anti-self-dual basis at the point (normalization constant 2).
    """
    sff = second_fundamental_form(imm, s)
    frame0 = np.vstack([sff.tangents, sff.normals])
    fs = asd_bivectors(frame0)
    x0 = sff.point
    P = np.eye(len(x0)) - np.outer(x0, x0)
    s = np.asarray(s, dtype=float)
    D = np.array(fd_pushforward(lambda sp: surface_lift_bivector(imm, sp), s,
                                step=step))
    Dx = np.array(fd_pushforward(imm.chart, s, step=step))
    B = sff.tangents @ np.linalg.pinv(Dx)
    out = np.empty((2, 3))
    for i in range(2):
        covariant = P @ np.einsum("a,aij->ij", B[i], D) @ P
        # the elementwise matrix sum double-counts the antisymmetric inner
        # product and |f_a|^2 = 2, hence the /4
        out[i] = [np.sum(covariant * f) / 4.0 for f in fs]
    return out


# ---------------------------------------------------------------------------
# associative / coassociative verifiers
# ---------------------------------------------------------------------------

def _lifted_tangents(point: SurfaceFramePoint, vertical_parts) -> list:
    """E_i = horizontal lift of e_i plus vertical components on (f1, f2, f3)."""
    out = []
    for i, vert in enumerate(vertical_parts):
        E = np.zeros(7)
        E[E1H + i] = 1.0
        E[:3] = vert
        out.append(E)
    return out


def associative_defect(point: SurfaceFramePoint, structure: BSG2Structure,
                       t1: float):
    """Contraction E1 <| E2 <| F1 <| *phi at the fiber point t1 f^1.

    F1 is the unit vertical direction (the fiber coordinate field divided
    by its length v).  Returns (defect 1-form, closed-form coefficient
    vector); the closed form is
        -t1 u^2 v [ (tr A^2) nubar^1 - (tr A^1) nubar^2 ]
    and the two must agree to CLOSED_FORM_TOL.
    """
    st = structure.at(abs(float(t1)))
    E1, E2 = _lifted_tangents(point, [t1 * alpha_correction(point.A, i, 1)
                                      for i in range(2)])
    Fu = np.zeros(7)
    Fu[F1] = 1.0 / st.v
    defect = interior(E1, interior(E2, interior(Fu, st.star_phi)))
    closed = np.zeros(7)
    closed[N1H] = -t1 * st.u ** 2 * st.v * np.trace(point.A[1])
    closed[N2H] = +t1 * st.u ** 2 * st.v * np.trace(point.A[0])
    if np.abs(defect.coeffs - closed).max() > CLOSED_FORM_TOL * max(1.0, abs(t1)):
        raise ConsistencyError("contracted defect disagrees with its closed form")
    return defect, closed


def coassociative_defect(point: SurfaceFramePoint, structure: BSG2Structure,
                         t2: float, t3: float) -> np.ndarray:
    """Values of phi on the four independent triples from {E1, E2, F2, F3}.

    Order: (E1,E2,F2), (E1,E2,F3), (F2,F3,E1), (F2,F3,E2).  The first two
    vanish identically (asserted); the last two carry the isotropy
    conditions  v^3 (A^nu_12 - A^nuperp_11), v^3 (A^nu_22 - A^nuperp_12)
    with nu = t2 nu1 + t3 nu2 and nuperp = -t3 nu1 + t2 nu2.
    """
    r = float(np.hypot(t2, t3))
    st = structure.at(r)
    verts = [t2 * alpha_correction(point.A, i, 2) + t3 * alpha_correction(point.A, i, 3)
             for i in range(2)]
    E1v, E2v = _lifted_tangents(point, verts)
    Fv2 = np.zeros(7)
    Fv2[F2] = 1.0
    Fv3 = np.zeros(7)
    Fv3[F3] = 1.0
    phi = st.phi
    vals = np.array([
        phi(E1v, E2v, Fv2),
        phi(E1v, E2v, Fv3),
        phi(Fv2, Fv3, E1v),
        phi(Fv2, Fv3, E2v),
    ])
    if max(abs(vals[0]), abs(vals[1])) > 1e-10 * max(1.0, r):
        raise ConsistencyError("automatically-vanishing components are nonzero")
    return vals


@dataclass(frozen=True)
class SuperminimalVerdict:
    negative: bool               # as-given orientation
    positive: bool               # with nu_2 reversed
    residual_negative: float
    residual_positive: float

    @property
    def any(self) -> bool:
        return self.negative or self.positive


def superminimal_test(A1: np.ndarray, A2: np.ndarray, tol: float = 1e-6) -> SuperminimalVerdict:
    """Isotropy (superminimality) of a surface from its curvature pair.

    The four scalar conditions are evaluated for the given orientation and
    for the reversed one (nu_2 -> -nu_2); a passing orientation forces both
    traces to vanish (asserted).
    """
    A1 = np.asarray(A1, dtype=float)
    A2 = np.asarray(A2, dtype=float)
    for M in (A1, A2):
        if np.abs(M - M.T).max() > 1e-8:
            raise InputValidationError("curvature matrices must be symmetric")

    def residual(B2):
        conds = (A1[0, 1] - B2[0, 0], A1[1, 1] - B2[0, 1],
                 B2[0, 1] + A1[0, 0], B2[1, 1] + A1[0, 1])
        return max(abs(c) for c in conds)

    rn, rp = residual(A2), residual(-A2)
    neg, pos = rn <= tol, rp <= tol
    if neg or pos:
        trace_bound = abs(np.trace(A1)) + abs(np.trace(A2))
        assert trace_bound <= 4.0 * tol, "isotropy without minimality"
    return SuperminimalVerdict(neg, pos, rn, rp)
