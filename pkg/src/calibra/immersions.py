"""Catalog of test submanifolds of spheres and the finite-difference
second-fundamental-form engine.

Adapted-frame gauge: tangents come from Gram-Schmidt of the chart
derivatives (first vector parallel to d_1 x); normals complete the frame
inside the sphere's tangent space from deterministically pivoted ambient
axes, are ordered by descending curvature norm, and the last normal's
sign is chosen to make det[x, e_1, ..., nu_q] = +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateInputError, InputValidationError
from .exterior import fd_hessian, fd_pushforward

SPHERE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Immersion:
    """A parametric chart into S^n inside R^{n+1}."""

    name: str
    chart: Callable[[np.ndarray], np.ndarray]
    dim: int                     # p, intrinsic dimension
    ambient: int                 # n, the sphere S^n
    box: tuple                   # ((lo, hi), ...) parameter ranges
    params: dict = field(default_factory=dict)

    def point(self, s) -> np.ndarray:
        x = np.asarray(self.chart(np.asarray(s, dtype=float)))
        if abs(np.linalg.norm(x) - 1.0) > SPHERE_TOL:
            raise DegenerateInputError(
                f"chart of {self.name} leaves the unit sphere at {s}")
        return x

    @property
    def codim(self) -> int:
        return self.ambient - self.dim


@dataclass(frozen=True, eq=False)
class SecondFundamentalForm:
    """Curvature data of an immersion at one point, in an adapted frame."""

    point: np.ndarray            # x on S^n
    tangents: np.ndarray         # (p, n+1) orthonormal
    normals: np.ndarray          # (q, n+1) orthonormal, tangent to S^n
    entries: np.ndarray          # (q, p, p), A[l][j, k] = <nabla_{e_j} nu_l, e_k>

    def __post_init__(self):
        A = np.asarray(self.entries)
        if np.abs(A - np.transpose(A, (0, 2, 1))).max() > 1e-8:
            raise InputValidationError("second fundamental form must be symmetric")

    @property
    def mean_curvature(self) -> np.ndarray:
        """Trace per normal direction, shape (q,)."""
        return np.trace(self.entries, axis1=1, axis2=2)

    def along(self, weights) -> np.ndarray:
        """A^nu for nu = sum_l weights[l] * nu_l."""
        return np.einsum("l,ljk->jk", np.asarray(weights), self.entries)


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _equator_chart(p: int, n: int):
    def chart(s):
        out = np.zeros(n + 1)
        c = 1.0
        for i in range(p):
            out[i] = c * np.cos(s[i])
            c *= np.sin(s[i])
        out[p] = c
        return out
    return chart


def _clifford_chart(n: int):
    def chart(s):
        out = np.zeros(n + 1)
        out[:4] = np.array([np.cos(s[0]), np.sin(s[0]), np.cos(s[1]), np.sin(s[1])])
        return out / np.sqrt(2.0)
    return chart


def _latitude_chart(p: int, n: int, radius: float):
    h = np.sqrt(1.0 - radius * radius)
    eq = _equator_chart(p, p)   # chart of S^p in R^{p+1}

    def chart(s):
        out = np.zeros(n + 1)
        out[:p + 1] = radius * eq(s)
        out[p + 1] = h
        return out
    return chart


def _veronese_chart():
    r3 = np.sqrt(3.0)

    def chart(s):
        th, ph = s
        a = np.sin(th) * np.cos(ph)
        b = np.sin(th) * np.sin(ph)
        c = np.cos(th)
        return np.array([
            r3 * a * b,
            r3 * a * c,
            r3 * b * c,
            0.5 * r3 * (a * a - b * b),
            0.5 * (a * a + b * b - 2.0 * c * c),
        ])
    return chart


def _graph_perturbation_chart(base: Immersion, amplitude: float):
    # analytic normal graph over an equator base: bump along the constant
    # sphere-normal axis p+1, renormalized back onto the sphere
    if base.name != "equator":
        raise InputValidationError("graph_perturbation supports equator bases only")
    p = base.dim
    mid = np.array([(b[0] + b[1]) / 2.0 for b in base.box])

    def chart(s):
        s = np.asarray(s, dtype=float)
        x = base.chart(s)
        bump = amplitude * float(np.prod(np.cos(s - mid)))
        y = x.copy()
        y[p + 1] += bump
        return y / np.linalg.norm(y)
    return chart


_BOX_ANGLE = (0.35, 2.75)       # keeps hyperspherical charts away from poles
_BOX_PERIODIC = (0.1, 6.1)


def catalog(name: str, **params) -> Immersion:
    """Named test immersions.

    equator(p, n); latitude_sphere(p, n, radius); clifford_torus(n=3 or 4);
    veronese(); graph_perturbation(base=..., amplitude=...).
    """
    if name == "equator":
        p, n = int(params.get("p", 2)), int(params.get("n", 4))
        if not 1 <= p < n:
            raise InputValidationError("equator needs 1 <= p < n")
        box = tuple([_BOX_ANGLE] * (p - 1) + [_BOX_PERIODIC]) if p > 1 else (_BOX_PERIODIC,)
        return Immersion("equator", _equator_chart(p, n), p, n, box,
                         {"p": p, "n": n})
    if name == "clifford_torus":
        n = int(params.get("n", 3))
        if n < 3:
            raise InputValidationError("clifford_torus needs n >= 3")
        return Immersion("clifford_torus", _clifford_chart(n), 2, n,
                         (_BOX_PERIODIC, _BOX_PERIODIC), {"n": n})
    if name == "latitude_sphere":
        p, n = int(params.get("p", 1)), int(params.get("n", 2))
        radius = float(params.get("radius", 0.8))
        if not 0.0 < radius < 1.0:
            raise InputValidationError("latitude radius must lie in (0, 1)")
        if not 1 <= p < n:
            raise InputValidationError("latitude_sphere needs 1 <= p < n")
        box = tuple([_BOX_ANGLE] * (p - 1) + [_BOX_PERIODIC]) if p > 1 else (_BOX_PERIODIC,)
        return Immersion("latitude_sphere", _latitude_chart(p, n, radius), p, n,
                         box, {"p": p, "n": n, "radius": radius})
    if name == "veronese":
        return Immersion("veronese", _veronese_chart(), 2, 4,
                         (_BOX_ANGLE, _BOX_PERIODIC), {})
    if name == "graph_perturbation":
        base = params.get("base")
        if base is None:
            base = catalog("equator", p=params.get("p", 2), n=params.get("n", 4))
        amplitude = float(params.get("amplitude", 0.1))
        return Immersion("graph_perturbation",
                         _graph_perturbation_chart(base, amplitude),
                         base.dim, base.ambient, base.box,
                         {"base": base.name, "amplitude": amplitude})
    raise InputValidationError(f"unknown immersion {name!r}")


CATALOG_NAMES = ("equator", "clifford_torus", "latitude_sphere", "veronese",
                 "graph_perturbation")


def sample_grid(imm: Immersion, count: int, seed: int = 0) -> np.ndarray:
    """Deterministic jittered grid over the chart box, shape (count, p)."""
    rng = np.random.default_rng(seed)
    lo = np.array([b[0] for b in imm.box])
    hi = np.array([b[1] for b in imm.box])
    return lo + (hi - lo) * rng.random((count, imm.dim))


# ---------------------------------------------------------------------------
# adapted frames and curvature
# ---------------------------------------------------------------------------

def _pivoted_completion(vectors: list, total_dim: int, count: int):
    """Extend an orthonormal list by ``count`` vectors seeded from the
    canonical axes with the largest residual (deterministic).  Returns the
    new vectors together with the chosen axis indices."""
    out = list(vectors)
    added, seeds = [], []
    for _ in range(count):
        resid = []
        for i in range(total_dim):
            w = np.eye(total_dim)[i]
            for u in out:
                w = w - (w @ u) * u
            resid.append(np.linalg.norm(w))
        i = int(np.argmax(resid))
        if resid[i] < 1e-8:
            raise DegenerateInputError("cannot complete frame from canonical axes")
        w = np.eye(total_dim)[i]
        for u in out:
            w = w - (w @ u) * u
        w /= np.linalg.norm(w)
        out.append(w)
        added.append(w)
        seeds.append(i)
    return added, seeds


@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """Point, orthonormal tangents/normals, and the ambient pivot axes."""

    x: np.ndarray
    tangents: np.ndarray
    normals: np.ndarray
    seed_axes: tuple


def adapted_tangent_normals(imm: Immersion, s, step: float = 1e-5) -> AdaptedFrame:
    """Orthonormal (tangents, normals) of the immersion inside T_x S^n."""
    s = np.asarray(s, dtype=float)
    x = imm.point(s)
    dx = fd_pushforward(imm.chart, s, step=step)
    frame = [x]
    for idx, v in enumerate(dx):
        w = np.asarray(v, dtype=float).copy()
        for u in frame:
            w -= (w @ u) * u
        nrm = np.linalg.norm(w)
        if nrm < 1e-8:
            raise DegenerateInputError(
                f"chart of {imm.name} is rank deficient at {s} (derivative {idx})")
        frame.append(w / nrm)
    tangents = np.array(frame[1:])
    added, seeds = _pivoted_completion(frame, imm.ambient + 1, imm.codim)
    return AdaptedFrame(x, tangents, np.array(added), tuple(seeds))


def raw_second_fundamental_form(imm: Immersion, s, step: float = 1e-5,
                                hess_step: float = 3e-4) -> SecondFundamentalForm:
    """Curvature entries in the pivot-ordered adapted frame (no reordering)."""
    s = np.asarray(s, dtype=float)
    af = adapted_tangent_normals(imm, s, step=step)
    D = np.array(fd_pushforward(imm.chart, s, step=step))     # (p, n+1)
    B = af.tangents @ np.linalg.pinv(D)                       # e_j = B[j, a] d_a x
    H = fd_hessian(imm.chart, s, step=hess_step)              # (p, p, n+1)
    A = np.array([-(B @ np.einsum("abi,i->ab", H, nu) @ B.T) for nu in af.normals])
    A = 0.5 * (A + np.transpose(A, (0, 2, 1)))
    return SecondFundamentalForm(af.x, af.tangents, af.normals, A)


def second_fundamental_form(imm: Immersion, s, step: float = 1e-5,
                            hess_step: float = 3e-4) -> SecondFundamentalForm:
    """A^l_{jk} = <nabla_{e_j} nu_l, e_k> = -<Hess x (e_j, e_k), nu_l>.

    Normals are reordered by descending Frobenius norm of A^l, then the
    orientation of the full frame (x, e, nu) is fixed to +1 by flipping the
    last normal if needed.
    """
    sff = raw_second_fundamental_form(imm, s, step=step, hess_step=hess_step)
    A, normals = sff.entries, sff.normals
    order = np.argsort([-np.linalg.norm(a) for a in A], kind="stable")
    A = A[order]
    normals = normals[order]
    full = np.vstack([sff.point[None], sff.tangents, normals])
    if np.linalg.det(full) < 0:
        normals = normals.copy()
        normals[-1] = -normals[-1]
        A = A.copy()
        A[-1] = -A[-1]
    return SecondFundamentalForm(sff.point, sff.tangents, normals, A)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationFlags:
    totally_geodesic: bool
    austere: bool
    minimal: bool
    superminimal_neg: bool | None   # None when not a codimension-2 surface
    superminimal_pos: bool | None

    def check_implications(self) -> None:
        if self.totally_geodesic:
            assert self.austere and self.minimal
            if self.superminimal_neg is not None:
                assert self.superminimal_neg and self.superminimal_pos
        if self.austere:
            assert self.minimal
        if self.superminimal_neg or self.superminimal_pos:
            assert self.minimal


def classify(imm: Immersion, samples: int = 20, seed: int = 0,
             tol: float = 1e-5) -> ClassificationFlags:
    """Curvature-based flags over a sample grid; implication chain asserted."""
    from .bs_g2 import superminimal_test
    from .stenzel import austere_test

    if samples < 20:
        raise InputValidationError("classify needs at least 20 samples")
    grid = sample_grid(imm, samples, seed=seed)
    is_surface2 = imm.dim == 2 and imm.codim == 2
    tg = True
    austere = True
    minimal = True
    sup_neg = is_surface2 or None
    sup_pos = is_surface2 or None
    for s in grid:
        sff = second_fundamental_form(imm, s)
        tg &= bool(np.abs(sff.entries).max() < tol)
        rep = austere_test(sff, tol=tol)
        austere &= rep.verdict == "austere"
        minimal &= bool(np.abs(rep.mean_curvatures).max() < tol)
        if is_surface2:
            sup = superminimal_test(sff.entries[0], sff.entries[1], tol=tol)
            sup_neg &= sup.negative
            sup_pos &= sup.positive
    flags = ClassificationFlags(tg, austere, minimal, sup_neg, sup_pos)
    flags.check_implications()
    return flags
