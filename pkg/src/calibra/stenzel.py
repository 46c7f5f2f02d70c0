"""Calabi-Yau structure on the cotangent bundle of S^n realized as the
complex quadric, with the special-Lagrangian verifier for conormal bundles.

The cotangent bundle is mapped onto Q = { z in C^{n+1} : sum z_k^2 = 1 }
by (x, xi) -> x cosh|xi| + i xi sinh|xi| / |xi|.  The Kahler form is
evaluated in a chart obtained by rotating coordinates (a 90-degree
signed-permutation rotation) so that |z_0| is maximal; the holomorphic
volume form is computed chart-free as a determinant against the radial
field and cross-checked against the chart expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ChartError, ConsistencyError, InputValidationError
from .exterior import fd_pushforward
from .immersions import (
    Immersion,
    SecondFundamentalForm,
    adapted_tangent_normals,
    sample_grid,
)

T_MAX = 5.0                # fiber radius bound: keeps cosh well-conditioned
ROUTE_AGREEMENT_TOL = 1e-9


# ---------------------------------------------------------------------------
# points and profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CotangentPoint:
    """(x, xi) with x on S^n and xi a cotangent vector (round metric)."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)
        if abs(np.linalg.norm(x) - 1.0) > 1e-12:
            raise InputValidationError("base point must lie on the unit sphere")
        if abs(x @ xi) > 1e-12 * max(1.0, np.linalg.norm(xi)):
            raise InputValidationError("covector must annihilate the radial direction")


@dataclass(frozen=True, eq=False)
class QuadricPoint:
    """Point of the affine quadric sum z_k^2 = 1."""

    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        object.__setattr__(self, "z", z)
        if abs(np.sum(z * z) - 1.0) > 1e-10:
            raise InputValidationError("point does not satisfy the quadric equation")

    @property
    def r(self) -> float:
        return float(np.linalg.norm(self.z))


@dataclass(frozen=True)
class StenzelProfile:
    """Radial profile u(r) through its first two derivatives; u' > 0."""

    name: str
    u: Callable[[float], float]
    du: Callable[[float], float]
    ddu: Callable[[float], float]


def flat_profile() -> StenzelProfile:
    return StenzelProfile("flat", lambda r: r, lambda r: 1.0, lambda r: 0.0)


def quadratic_profile() -> StenzelProfile:
    # gentle quadratic growth; u' stays positive over the sampled radii
    return StenzelProfile("quadratic",
                          lambda r: r + r * r / 200.0,
                          lambda r: 1.0 + r / 100.0,
                          lambda r: 0.01)


PROFILES = {"flat": flat_profile, "quadratic": quadratic_profile}


# ---------------------------------------------------------------------------
# the bundle-to-quadric map
# ---------------------------------------------------------------------------

def _sinhc(t: float) -> float:
    if abs(t) < 1e-6:
        return 1.0 + t * t / 6.0 + t ** 4 / 120.0
    return np.sinh(t) / t


def szoke_map(p: CotangentPoint) -> QuadricPoint:
    """Diffeomorphism (x, xi) -> x cosh|xi| + i xi sinh|xi|/|xi| onto Q."""
    t = float(np.linalg.norm(p.xi))
    return QuadricPoint(p.x * np.cosh(t) + 1j * p.xi * _sinhc(t))


def chart_rotation(z: np.ndarray) -> np.ndarray:
    """Signed-permutation rotation (det +1) maximizing |z_0|."""
    m = int(np.argmax(np.abs(z)))
    n1 = len(z)
    R = np.eye(n1)
    if m != 0:
        R[0, 0] = R[m, m] = 0.0
        R[0, m] = 1.0
        R[m, 0] = -1.0
    return R


def _chart_data(q: QuadricPoint, tangents):
    R = chart_rotation(q.z)
    z = R @ q.z
    if abs(z[0]) < 1e-6:
        raise ChartError("no coordinate chart with |z_0| bounded away from zero")
    return z, [R @ np.asarray(V, dtype=complex) for V in tangents]


def stenzel_coefficients(z: np.ndarray, profile: StenzelProfile) -> np.ndarray:
    """Hermitian n x n chart matrix of the Kahler form at z (chart-rotated)."""
    r = float(np.linalg.norm(z))
    up, upp = profile.du(r), profile.ddu(r)
    z0, zr = z[0], z[1:]
    delta = np.eye(len(zr))
    herm = (delta + np.outer(zr, zr.conj()) / abs(z0) ** 2) * up
    real = 2.0 * np.real(np.outer(zr.conj(), zr)
                         - (z0.conjugate() / z0) * np.outer(zr, zr)) * upp
    return herm + real


def omega_st(q: QuadricPoint, profile: StenzelProfile, U, V) -> float:
    """Kahler form evaluated on two tangents of the quadric."""
    for W in (U, V):
        if abs(np.sum(q.z * np.asarray(W))) > 1e-6 * max(1.0, float(np.linalg.norm(W))):
            raise InputValidationError("arguments must be tangent to the quadric")
    z, (Ur, Vr) = _chart_data(q, (U, V))
    a = stenzel_coefficients(z, profile)
    u1, v1 = Ur[1:], Vr[1:]
    val = 0.5j * (u1 @ a @ v1.conj() - v1 @ a @ u1.conj())
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        raise ConsistencyError("Kahler pairing produced a non-real value")
    return float(val.real)


def project_tangent(q: QuadricPoint, V) -> np.ndarray:
    """Minimal-norm correction enforcing bilinear tangency sum z_k V_k = 0."""
    V = np.asarray(V, dtype=complex)
    z = q.z
    return V - np.sum(z * V) * z.conj() / float(np.vdot(z, z).real)


def holomorphic_volume(q: QuadricPoint, tangents: Sequence) -> complex:
    """(n, 0)-volume form on n quadric tangents, computed two ways.

    Route (i): determinant of [z, V_1, ..., V_n] rows (chart-free).
    Route (ii): det of chart components divided by z_0 after rotation.
    Raises ConsistencyError if the routes disagree.
    """
    z = q.z
    M = np.vstack([z[None], np.asarray(tangents, dtype=complex)])
    det_route = complex(np.linalg.det(M))
    zr, Vr = _chart_data(q, tangents)
    chart_route = complex(np.linalg.det(np.array([V[1:] for V in Vr])) / zr[0])
    scale = max(abs(det_route), abs(chart_route), 1e-300)
    if abs(det_route - chart_route) > ROUTE_AGREEMENT_TOL * max(1.0, scale):
        raise ConsistencyError(
            f"volume-form routes disagree: {det_route} vs {chart_route}")
    return det_route


# ---------------------------------------------------------------------------
# conormal frames
# ---------------------------------------------------------------------------

def _smooth_normal_frame(imm: Immersion, si, seeds) -> np.ndarray:
    """Normal frame at si from frozen pivot axes (smooth near the sample)."""
    x = imm.chart(np.asarray(si, dtype=float))
    dx = fd_pushforward(imm.chart, si)
    frame = [x / np.linalg.norm(x)]
    for v in dx:
        w = np.asarray(v, dtype=float).copy()
        for uvec in frame:
            w -= (w @ uvec) * uvec
        frame.append(w / np.linalg.norm(w))
    normals = []
    for i in seeds:
        w = np.eye(imm.ambient + 1)[i]
        for uvec in frame + normals:
            w -= (w @ uvec) * uvec
        normals.append(w / np.linalg.norm(w))
    return np.array(normals)


def conormal_chart(imm: Immersion, s) -> Callable[[np.ndarray], np.ndarray]:
    """Local chart (s, t) -> Psi(x(s), sum_k t_k nu^k(s)) of the conormal bundle.

    The normal frame is Gram-Schmidt over pivoted ambient axes frozen at
    the given base parameter, so the chart is smooth near that sample.
    """
    p = imm.dim
    s = np.asarray(s, dtype=float)
    seeds = adapted_tangent_normals(imm, s).seed_axes

    def chart(st):
        st = np.asarray(st, dtype=float)
        si, ti = st[:p], st[p:]
        x = imm.chart(si)
        normals = _smooth_normal_frame(imm, si, seeds)
        xi = np.einsum("k,ki->i", ti, normals) if len(ti) else np.zeros_like(x)
        tnorm = float(np.linalg.norm(xi))
        return x * np.cosh(tnorm) + 1j * xi * _sinhc(tnorm)

    return chart


def conormal_frame(imm: Immersion, s, t, step: float = 1e-5,
                   richardson: bool = False):
    """Numeric tangent frame of the conormal bundle at (s, t).

    Returns (QuadricPoint, list of n complex tangent vectors): first the
    tangential directions recombined onto the orthonormal surface frame
    (so they are comparable with the closed-form adapted frame), then the
    fiber directions.  Plain central differences by default; Richardson
    extrapolation is available but amplifies the rounding noise of the
    nested frame construction, so it stays opt-in.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.linalg.norm(t) > T_MAX:
        raise InputValidationError(f"|t| exceeds t_max = {T_MAX}")
    chart = conormal_chart(imm, s)
    st = np.concatenate([s, t])
    q = QuadricPoint(chart(st))
    raw = fd_pushforward(chart, st, step=step, richardson=richardson)
    af = adapted_tangent_normals(imm, s)
    Dx = np.array(fd_pushforward(imm.chart, s, step=step))
    B = af.tangents @ np.linalg.pinv(Dx)
    p = imm.dim
    tangential = [sum(B[j, a] * raw[a] for a in range(p)) for j in range(p)]
    return q, tangential + list(raw[p:])


def conormal_frame_adapted(imm: Immersion, s, t):
    """Closed-form frame from the curvature data, in the same normal gauge
    as the numeric chart.

    Tangent directions: E_j = cosh|t| e_j + i sinh|t| A^nu_hat(e_j); fiber
    directions follow the radial/angular split of the map.  Valid where the
    chart's normal frame has negligible normal-connection rotation (always
    in codimension one and for constant normal frames).
    """
    from .immersions import raw_second_fundamental_form

    sff = raw_second_fundamental_form(imm, s)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tn = float(np.linalg.norm(t))
    x, tangents, normals = sff.point, sff.tangents, sff.normals
    xi = np.einsum("k,ki->i", t, normals)
    point = QuadricPoint(x * np.cosh(tn) + 1j * xi * _sinhc(tn))
    frame = []
    if tn > 0:
        A_hat = sff.along(t / tn)
        for j in range(imm.dim):
            Ae = np.einsum("k,ki->i", A_hat[j], tangents)
            frame.append(np.cosh(tn) * tangents[j] + 1j * np.sinh(tn) * Ae)
    else:
        frame.extend(tangents.astype(complex))
    sc = _sinhc(tn)
    dsc = (tn * np.cosh(tn) - np.sinh(tn)) / tn ** 3 if tn > 1e-6 else tn / 3.0
    for k in range(imm.codim):
        Fk = x * sc * t[k] + 1j * (normals[k] * sc + xi * dsc * t[k])
        frame.append(Fk)
    return point, frame


# ---------------------------------------------------------------------------
# special Lagrangian verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlagReport:
    """Worst-case defects of the conormal bundle over the sampled points."""

    immersion: str
    samples: int
    lagrangian_defect: float
    special_defect: float
    phase_power: int            # Omega is multiplied by i**phase_power

    def passes(self, lag_tol: float, special_tol: float) -> bool:
        return (self.lagrangian_defect <= lag_tol
                and self.special_defect <= special_tol)


def _fiber_samples(codim: int, count: int, rng, t_max: float) -> np.ndarray:
    """Fiber coordinates including t = 0 and magnitudes up to t_max."""
    out = np.zeros((count, codim))
    if count > 1:
        raw = rng.standard_normal((count - 1, codim))
        raw /= np.maximum(np.linalg.norm(raw, axis=1, keepdims=True), 1e-12)
        radii = t_max * rng.random(count - 1) ** 0.7
        out[1:] = raw * radii[:, None]
    return out


def slag_defect(imm: Immersion, profile: StenzelProfile | None = None,
                samples: int = 100, seed: int = 0, t_max: float = T_MAX,
                phase_shift: int = 0) -> SlagReport:
    """Maximal Lagrangian and special defects over sampled (s, t) points.

    The Lagrangian defect is max |omega(V_a, V_b)| over frame pairs with
    unit-normalized vectors; the special defect is
    |Im(i^(p - n + phase_shift) Omega(frame))| / |Omega(frame)|.
    """
    profile = profile or flat_profile()
    rng = np.random.default_rng(seed)
    grid = sample_grid(imm, samples, seed=seed)
    fibers = _fiber_samples(imm.codim, samples, rng, t_max)
    phase_power = (imm.dim - imm.ambient + phase_shift) % 4
    phase = 1j ** phase_power
    lag = 0.0
    special = 0.0
    for s, t in zip(grid, fibers):
        q, frame = conormal_frame(imm, s, t)
        unit = [project_tangent(q, V) for V in frame]
        unit = [V / np.linalg.norm(V) for V in unit]
        for a in range(len(unit)):
            for b in range(a + 1, len(unit)):
                lag = max(lag, abs(omega_st(q, profile, unit[a], unit[b])))
        om = holomorphic_volume(q, unit)
        special = max(special, abs((phase * om).imag) / abs(om))
    return SlagReport(imm.name, samples, lag, special, phase_power)


# ---------------------------------------------------------------------------
# austerity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AusterityReport:
    """Odd-power-sum diagnostics of the curvature over sampled normals."""

    directions: np.ndarray       # (m, q) unit weight vectors
    eigenvalues: np.ndarray      # (m, p)
    odd_power_sums: np.ndarray   # (m, n_odd), sums of lambda^1, lambda^3, ...
    mean_curvatures: np.ndarray  # (q,) traces in the frame normals
    verdict: str                 # austere | minimal-only | neither

    def __post_init__(self):
        if self.verdict == "austere":
            assert np.abs(self.odd_power_sums[:, 0]).max() <= 1e-5 + 1e-12


def _normal_sphere_samples(q: int, count: int, rng) -> np.ndarray:
    base = np.eye(q)
    extra = rng.standard_normal((max(count - q, 0), q))
    extra /= np.linalg.norm(extra, axis=1, keepdims=True)
    return np.vstack([base, extra])[:count] if count >= q else base[:count]


def austere_test(sff: SecondFundamentalForm, directions: int = 12,
                 tol: float = 1e-6, seed: int = 0) -> AusterityReport:
    """Eigenvalue odd-power sums of A over sampled unit normal directions.

    Austere: every odd power sum vanishes for every direction (eigenvalues in
    opposite-sign pairs).  Minimal-only: traces vanish but a higher odd power
    sum does not.
    """
    rng = np.random.default_rng(seed)
    qdim, p = sff.entries.shape[0], sff.entries.shape[1]
    dirs = _normal_sphere_samples(qdim, max(directions, qdim), rng)
    odd_orders = list(range(1, p + 1, 2))
    eigs = np.empty((len(dirs), p))
    sums = np.empty((len(dirs), len(odd_orders)))
    for i, w in enumerate(dirs):
        lam = np.linalg.eigvalsh(sff.along(w))
        eigs[i] = lam
        sums[i] = [np.sum(lam ** k) for k in odd_orders]
    minimal = np.abs(sums[:, 0]).max() <= tol
    austere = np.abs(sums).max() <= tol
    verdict = "austere" if austere else ("minimal-only" if minimal else "neither")
    return AusterityReport(dirs, eigs, sums, sff.mean_curvature, verdict)
