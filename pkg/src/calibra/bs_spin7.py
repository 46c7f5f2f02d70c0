"""Scaled triple-cross structure on the rank-2 spinor eigenbundles over a
surface in the 4-sphere, with the Cayley verifier.

Model space at a bundle point: basis order (e1, e2, e3, e4, f1, f2, f3, f4)
where (e1, e2, e3, e4) are horizontal lifts of the adapted surface frame
(e_1, e_2, nu_1, nu_2) and (f1, ..., f4) is the real vertical spinor frame
(s_1, i s_1, s_3, i s_3); metric diag(u^2 x4, v^2 x4).

The Clifford conventions: gamma(a) gamma(b) + gamma(b) gamma(a) = -2 delta,
negative-chirality spinors are the +1 eigenspace of gamma(e1 e2 e3 e4),
and the eigenbundle is cut out by gamma(e^1 ^ e^2) s = +i s.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConsistencyError, InputValidationError, StructuralError
from .exterior import KForm, form_from_dict
from .octonion import Spin7FlatStructure, cayley_eta, spin7_structure, triple_cross
from .bs_g2 import SurfaceFramePoint, surface_point  # shared surface data

DECOMP_TOL = 1e-9

# model-space index layout
E1H, E2H, N1H, N2H, FS1, FS2, FS3, FS4 = range(8)


# ---------------------------------------------------------------------------
# Clifford algebra
# ---------------------------------------------------------------------------

_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class CliffordRep:
    """Concrete generators of the rank-4 Clifford algebra on C^4."""

    gammas: np.ndarray           # (4, 4, 4) complex; gammas[a] = gamma(e^a)

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=complex)
        object.__setattr__(self, "gammas", g)
        for a in range(4):
            for b in range(4):
                acom = g[a] @ g[b] + g[b] @ g[a]
                if np.abs(acom + 2.0 * (a == b) * np.eye(4)).max() > 1e-12:
                    raise StructuralError("generators violate the Clifford relations")

    def gamma_vector(self, v) -> np.ndarray:
        return np.einsum("a,aij->ij", np.asarray(v, dtype=complex), self.gammas)

    def gamma_2form(self, a: int, b: int) -> np.ndarray:
        return self.gammas[a] @ self.gammas[b]

    @property
    def volume(self) -> np.ndarray:
        g = self.gammas
        return g[0] @ g[1] @ g[2] @ g[3]

    def minus_projector(self) -> np.ndarray:
        """Projector onto the negative-chirality plane (volume acts as +1)."""
        return 0.5 * (np.eye(4) + self.volume)

    def plus_projector(self) -> np.ndarray:
        return 0.5 * (np.eye(4) - self.volume)


def standard_clifford() -> CliffordRep:
    herm = [np.kron(_S1, _S1), np.kron(_S2, _S1), np.kron(_S3, _S1),
            np.kron(np.eye(2), _S2)]
    return CliffordRep(np.array([1j * h for h in herm]))


@dataclass(frozen=True)
class CliffordIdentityReport:
    checks: dict
    max_error: float

    @property
    def ok(self) -> bool:
        return self.max_error <= 1e-12


def verify_clifford_identities(rep: CliffordRep, frame=None) -> CliffordIdentityReport:
    """Identities of the chirality convention on an oriented orthonormal frame.

    On the negative-chirality plane: gamma(e1)gamma(nu1) = gamma(e2)gamma(nu2),
    gamma(e1)gamma(nu2) = -gamma(e2)gamma(nu1), the volume element acts as +1,
    and each gamma(e^j ^ nu^l) anticommutes with gamma(e^1 ^ e^2).
    """
    frame = np.eye(4) if frame is None else np.asarray(frame, dtype=float)
    if np.abs(frame @ frame.T - np.eye(4)).max() > 1e-10:
        raise InputValidationError("need an orthonormal 4-frame")
    if np.linalg.det(frame) < 0:
        raise InputValidationError("need an oriented (det +1) frame")
    g = [rep.gamma_vector(v) for v in frame]
    P = rep.minus_projector()

    def on_minus(M):
        return P @ M @ P

    checks = {}
    checks["vol_acts_plus_one"] = np.abs(
        on_minus(g[0] @ g[1] @ g[2] @ g[3]) - P).max()
    checks["e1nu1_eq_e2nu2"] = np.abs(
        on_minus(g[0] @ g[2]) - on_minus(g[1] @ g[3])).max()
    checks["e1nu2_eq_minus_e2nu1"] = np.abs(
        on_minus(g[0] @ g[3]) + on_minus(g[1] @ g[2])).max()
    Gam = g[0] @ g[1]
    checks["gamma_squares_to_minus_one"] = np.abs(Gam @ Gam + np.eye(4)).max()
    for (j, l, tag) in ((0, 2, "e1nu1"), (0, 3, "e1nu2"), (1, 2, "e2nu1"), (1, 3, "e2nu2")):
        op = g[j] @ g[l]
        checks[f"anticommute_{tag}"] = np.abs(op @ Gam + Gam @ op).max()
    err = max(checks.values())
    if err > 1e-12:
        raise StructuralError(
            f"Clifford identity failure (max err {err:.2e}); wrong chirality convention")
    return CliffordIdentityReport(checks, err)


# ---------------------------------------------------------------------------
# spinor frame
# ---------------------------------------------------------------------------

def spinor_vertical_basis(rep: CliffordRep, sign: float = 1.0) -> np.ndarray:
    """Real orthonormal vertical frame (s1, i s1, s3, i s3) as C^4 columns.

    s1 is a unit +i eigenvector of Gamma = gamma(e^1 ^ e^2) on the
    negative-chirality plane; s3 = gamma(e^1)gamma(nu^1) s1 and
    s4 = gamma(e^1)gamma(nu^2) s1 span the -i eigenplane.  ``sign`` flips
    s1 (the verifiers are invariant under this, which is tested).
    """
    P = rep.minus_projector()
    Gam = rep.gamma_2form(0, 1)
    w, V = np.linalg.eig(P @ Gam @ P + (np.eye(4) - P) * 99.0)
    idx = int(np.argmin(np.abs(w - 1j)))
    s1 = V[:, idx]
    s1 = sign * s1 / np.linalg.norm(s1)
    s2 = 1j * s1
    s3 = rep.gamma_2form(0, 2) @ s1
    s4 = rep.gamma_2form(0, 3) @ s1
    basis = np.array([s1, s2, s3, s4])
    gram = np.real(basis.conj() @ basis.T)
    if np.abs(gram - np.eye(4)).max() > 1e-10:
        raise StructuralError("vertical spinor frame is not orthonormal")
    return basis


def nabla_gamma(rep: CliffordRep, A: np.ndarray, k: int) -> np.ndarray:
    """Curvature derivative of gamma(e^1 ^ e^2) along the k-th tangent.

    -A^1_k1 gamma(nu1 e2) - A^2_k1 gamma(nu2 e2)
    -A^1_k2 gamma(e1 nu1) - A^2_k2 gamma(e1 nu2).
    """
    if k not in (0, 1):
        raise InputValidationError("tangent index must be 0 or 1")
    A1, A2 = np.asarray(A[0]), np.asarray(A[1])
    return (-A1[k, 0] * rep.gamma_2form(2, 1)
            - A2[k, 0] * rep.gamma_2form(3, 1)
            - A1[k, 1] * rep.gamma_2form(0, 2)
            - A2[k, 1] * rep.gamma_2form(0, 3))


def spinor_route_vertical(rep: CliffordRep, A, t1: float, t2: float,
                          k: int, sign: float = 1.0) -> np.ndarray:
    """Vertical components of E_k from the eigenvalue-equation derivative.

    sdot = -(i/2) nabla_gamma (t1 s1 + t2 s2), expanded over the real
    vertical frame.
    """
    basis = spinor_vertical_basis(rep, sign=sign)
    NG = nabla_gamma(rep, A, k)
    dot = -0.5j * (t1 * NG @ basis[0] + t2 * NG @ basis[1])
    return np.array([np.real(np.vdot(b, dot)) for b in basis])


# ---------------------------------------------------------------------------
# Cayley frames and defects
# ---------------------------------------------------------------------------

def cayley_frame(point: SurfaceFramePoint, t1: float, t2: float) -> np.ndarray:
    """Tangent frame (E1, E2, F1, F2) of the eigenbundle at (t1, t2).

    E_i carry curvature-linear vertical parts on (f3, f4); F_1 = f1,
    F_2 = f2.  Shape (4, 8).
    """
    A1, A2 = point.A[0], point.A[1]
    out = np.zeros((4, 8))
    for i in range(2):
        out[i, E1H + i] = 1.0
        c3 = 0.5 * (t1 * (-A1[i, 0] - A2[i, 1]) + t2 * (A2[i, 0] - A1[i, 1]))
        c4 = 0.5 * (t1 * (-A2[i, 0] + A1[i, 1]) + t2 * (-A1[i, 0] - A2[i, 1]))
        out[i, FS3] = c3
        out[i, FS4] = c4
    out[2, FS1] = 1.0
    out[3, FS2] = 1.0
    return out


@dataclass(frozen=True, eq=False)
class BSSpin7Structure:
    """Profile pair (u, v) as functions of the fiber radius."""

    u_profile: Callable[[float], float]
    v_profile: Callable[[float], float]
    name: str = "flat"

    def at(self, r: float) -> Spin7FlatStructure:
        u, v = float(self.u_profile(r)), float(self.v_profile(r))
        if u <= 0 or v <= 0:
            raise InputValidationError("profiles must stay positive")
        return spin7_structure(u, v)


def flat_bs_spin7() -> BSSpin7Structure:
    return BSSpin7Structure(lambda r: 1.0, lambda r: 1.0, "flat")


def curved_bs_spin7() -> BSSpin7Structure:
    return BSSpin7Structure(lambda r: 1.0 + r * r, lambda r: np.sqrt(1.0 + r * r),
                            "curved")


def _eta_basis(space) -> tuple:
    w1 = form_from_dict(space, 2, {(E1H, FS3): 1.0, (E2H, FS4): -1.0,
                                   (N1H, FS1): -1.0, (N2H, FS2): 1.0})
    w2 = form_from_dict(space, 2, {(E1H, FS4): 1.0, (E2H, FS3): 1.0,
                                   (N1H, FS2): -1.0, (N2H, FS1): -1.0})
    return w1, w2


@dataclass(frozen=True)
class CayleyDefect:
    eta: KForm
    c1: float
    c2: float
    decomposition_residual: float

    def norm(self) -> float:
        return self.eta.norm_coeffs()


def cayley_defect(point: SurfaceFramePoint, structure: BSSpin7Structure,
                  t1: float, t2: float) -> CayleyDefect:
    """Cayley 2-form of the eigenbundle tangent frame at (t1, t2).

    Decomposes onto the two rigid 2-forms
        w1 = e^1 f^3 - e^2 f^4 - nu^1 f^1 + nu^2 f^2
        w2 = e^1 f^4 + e^2 f^3 - nu^1 f^2 - nu^2 f^1
    with coefficients c1 = 2 u^2 v^2 (t1 tr A^1 - t2 tr A^2) and
    c2 = 2 u^2 v^2 (t2 tr A^1 + t1 tr A^2); the residual must stay below
    DECOMP_TOL.
    """
    r = float(np.hypot(t1, t2))
    st = structure.at(r)
    E1, E2, Fa, Fb = cayley_frame(point, t1, t2)
    eta = cayley_eta(st, E1, E2, Fa, Fb)
    tr1, tr2 = np.trace(point.A[0]), np.trace(point.A[1])
    scale = 2.0 * st.u ** 2 * st.v ** 2
    c1 = scale * (t1 * tr1 - t2 * tr2)
    c2 = scale * (t2 * tr1 + t1 * tr2)
    w1, w2 = _eta_basis(st.space)
    resid = (eta - c1 * w1 - c2 * w2).norm_coeffs()
    if resid > DECOMP_TOL * max(1.0, abs(c1) + abs(c2)):
        raise ConsistencyError(
            f"eta does not decompose onto the rigid 2-forms (residual {resid:.2e})")
    return CayleyDefect(eta, c1, c2, resid)


def sphere_parallel_transport(v, x_from, x_to) -> np.ndarray:
    """Levi-Civita transport of a tangent vector along the great circle."""
    c = float(x_from @ x_to)
    if c <= -1.0 + 1e-12:
        raise InputValidationError("transport between antipodal points is singular")
    return v - (v @ x_to) / (1.0 + c) * (x_from + x_to)


def fd_gamma_derivative(imm, s, rep: CliffordRep, k: int,
                        step: float = 1e-5) -> np.ndarray:
    """Finite-difference derivative of gamma(e^1 ^ e^2) along the k-th
    unit tangent, with frames transported back to the base point.

    Oracle for nabla_gamma: the surface tangent frame at nearby points is
    parallel-transported to the sample, expressed in the adapted frame
    coordinates, and the resulting operator path differentiated.
    """
    from .exterior import fd_pushforward
    from .immersions import second_fundamental_form

    sff = second_fundamental_form(imm, s)
    frame0 = np.vstack([sff.tangents, sff.normals])
    x0 = sff.point
    s = np.asarray(s, dtype=float)
    Dx = np.array(fd_pushforward(imm.chart, s, step=step))
    B = sff.tangents @ np.linalg.pinv(Dx)

    def gamma_at(tau):
        sp = s + tau * B[k]
        x = imm.chart(sp)
        dxs = fd_pushforward(imm.chart, sp, step=step)
        frame = []
        for v in dxs:
            w = np.asarray(v, dtype=float) - (np.asarray(v) @ x) * x
            for u in frame:
                w = w - (w @ u) * u
            frame.append(w / np.linalg.norm(w))
        hats = [frame0 @ sphere_parallel_transport(e, x, x0) for e in frame]
        return rep.gamma_vector(hats[0]) @ rep.gamma_vector(hats[1])

    return (gamma_at(step) - gamma_at(-step)) / (2.0 * step)


def x_closure_check(vectors, structure_or_flat) -> float:
    """Relative residual of closure of span(vectors) under the triple cross.

    Max over the four basis triples of |X - P_span X|_g / |X|_g; an exact
    Cayley plane returns 0.
    """
    st = structure_or_flat if isinstance(structure_or_flat, Spin7FlatStructure) \
        else structure_or_flat.at(0.0)
    V = np.asarray(vectors, dtype=float)
    if V.shape != (4, 8):
        raise InputValidationError("need four 8-dimensional vectors")
    g = st.space.metric
    gram = V @ g @ V.T
    if np.linalg.cond(gram) > 1e8:
        raise InputValidationError("input vectors are numerically dependent")
    proj = np.linalg.solve(gram, V @ g)      # coefficients of P_span
    worst = 0.0
    for drop in range(4):
        triple = [V[i] for i in range(4) if i != drop]
        X = triple_cross(st, *triple)
        nrm = float(np.sqrt(X @ g @ X))
        if nrm < 1e-14:
            continue
        resid = X - V.T @ (proj @ X)
        worst = max(worst, float(np.sqrt(resid @ g @ resid)) / nrm)
    return worst
