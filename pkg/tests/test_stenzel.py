import numpy as np
import pytest

from calibra import immersions as im
from calibra import stenzel as stz
from calibra.errors import ConsistencyError, InputValidationError

rng = np.random.default_rng(31)


def random_cotangent(n, t_scale=2.0):
    x = rng.standard_normal(n + 1)
    x /= np.linalg.norm(x)
    xi = rng.standard_normal(n + 1)
    xi -= (xi @ x) * x
    xi *= t_scale * rng.random() / max(np.linalg.norm(xi), 1e-12)
    return stz.CotangentPoint(x, xi)


def random_quadric_tangents(q, count):
    out = []
    for _ in range(count):
        V = rng.standard_normal(len(q.z)) + 1j * rng.standard_normal(len(q.z))
        out.append(V - np.sum(q.z * V) * q.z)
    return out


# ---------------------------------------------------------------------------
# the bundle-to-quadric map
# ---------------------------------------------------------------------------

def test_zero_section_maps_identically():
    x = np.array([0.6, 0.8, 0.0])
    q = stz.szoke_map(stz.CotangentPoint(x, np.zeros(3)))
    assert np.abs(q.z - x).max() < 1e-15
    assert q.r == pytest.approx(1.0)


def test_map_unit_covector_example():
    q = stz.szoke_map(stz.CotangentPoint(np.eye(3)[0], np.eye(3)[1]))
    want = np.array([np.cosh(1.0), 1j * np.sinh(1.0), 0.0])
    assert np.abs(q.z - want).max() < 1e-15
    assert abs(np.sum(q.z * q.z) - 1.0) < 1e-15


def test_radius_identity():
    for _ in range(50):
        p = random_cotangent(3)
        q = stz.szoke_map(p)
        t = np.linalg.norm(p.xi)
        assert abs(q.r ** 2 - (np.cosh(t) ** 2 + np.sinh(t) ** 2)) < 1e-10


def test_point_validation():
    with pytest.raises(InputValidationError):
        stz.CotangentPoint(np.array([1.0, 1.0, 0.0]), np.zeros(3))
    with pytest.raises(InputValidationError):
        stz.CotangentPoint(np.eye(3)[0], np.array([1.0, 0.0, 0.0]))
    with pytest.raises(InputValidationError):
        stz.QuadricPoint(np.array([1.0 + 0j, 1.0, 0.0]))


# ---------------------------------------------------------------------------
# Kahler form
# ---------------------------------------------------------------------------

def test_omega_antisymmetric():
    p = random_cotangent(3)
    q = stz.szoke_map(p)
    U, V = random_quadric_tangents(q, 2)
    prof = stz.flat_profile()
    assert stz.omega_st(q, prof, U, U) == pytest.approx(0.0, abs=1e-12)
    assert stz.omega_st(q, prof, U, V) == pytest.approx(
        -stz.omega_st(q, prof, V, U), abs=1e-12)


def test_omega_zero_section_round_metric():
    # on the zero section, tangent pairs (v, i w) pair through the round metric
    x = np.eye(4)[0]
    q = stz.szoke_map(stz.CotangentPoint(x, np.zeros(4)))
    prof = stz.flat_profile()
    for _ in range(10):
        v = rng.standard_normal(4)
        w = rng.standard_normal(4)
        v -= (v @ x) * x
        w -= (w @ x) * x
        val = stz.omega_st(q, prof, v + 0j * v, 1j * w)
        assert val == pytest.approx(v @ w, abs=1e-10)


def test_adapted_chart_coefficients():
    # at an adapted point the chart matrix is diagonal with the printed entry
    t = 1.3
    n = 4
    z = np.zeros(n + 1, dtype=complex)
    z[0] = np.cosh(t)
    z[2] = 1j * np.sinh(t)
    a = stz.stenzel_coefficients(z, stz.flat_profile())
    want = np.eye(n, dtype=complex)
    want[1, 1] = 1.0 + np.tanh(t) ** 2
    assert np.abs(a - want).max() < 1e-12


def test_adapted_chart_coefficients_with_curvature_profile():
    t = 0.9
    z = np.zeros(4, dtype=complex)
    z[0] = np.cosh(t)
    z[1] = 1j * np.sinh(t)
    prof = stz.quadratic_profile()
    r = np.sqrt(np.cosh(t) ** 2 + np.sinh(t) ** 2)
    a = stz.stenzel_coefficients(z, prof)
    want_diag = (1.0 + np.tanh(t) ** 2) * prof.du(r) \
        + 4.0 * np.sinh(t) ** 2 * prof.ddu(r)
    assert a[0, 0] == pytest.approx(want_diag, rel=1e-12)
    assert a[1, 1] == pytest.approx(prof.du(r), rel=1e-12)


def test_profile_positivity_on_sampled_range():
    prof = stz.quadratic_profile()
    for t in np.linspace(0.0, stz.T_MAX, 25):
        r = np.sqrt(np.cosh(t) ** 2 + np.sinh(t) ** 2)
        assert prof.du(r) > 0
    # chart matrix positive definite at moderate radii
    for t in np.linspace(0.0, 1.5, 10):
        z = np.zeros(4, dtype=complex)
        z[0] = np.cosh(t)
        z[3] = 1j * np.sinh(t)
        a = stz.stenzel_coefficients(z, prof)
        assert np.linalg.eigvalsh((a + a.conj().T) / 2).min() > 0


# ---------------------------------------------------------------------------
# holomorphic volume form
# ---------------------------------------------------------------------------

def test_volume_routes_agree_on_random_frames():
    for _ in range(100):
        p = random_cotangent(3, t_scale=3.0)
        q = stz.szoke_map(p)
        Vs = random_quadric_tangents(q, 3)
        stz.holomorphic_volume(q, Vs)   # raises on route disagreement


def test_volume_nonvanishing_on_zero_section():
    x = np.eye(3)[0]
    q = stz.szoke_map(stz.CotangentPoint(x, np.zeros(3)))
    frame = [np.eye(3)[1] + 0j * x, 1j * np.eye(3)[2]]
    assert abs(stz.holomorphic_volume(q, frame)) > 0.5


def test_volume_route_disagreement_raises():
    q = stz.szoke_map(random_cotangent(2))
    bad = [rng.standard_normal(3) + 1j * rng.standard_normal(3)]
    bad.append(bad[0] * 0 + np.array([1.0, 0, 0]))  # not tangent
    with pytest.raises(ConsistencyError):
        stz.holomorphic_volume(q, bad)


def test_adapted_volume_phase_product():
    # Omega on the adapted frame carries i^(n-p) times the curvature product
    lat = im.catalog("latitude_sphere", p=1, n=2, radius=0.8)
    s = np.array([1.2])
    t = np.array([1.7])
    sff = im.raw_second_fundamental_form(lat, s)
    lam = sff.entries[0][0, 0]
    q, frame = stz.conormal_frame_adapted(lat, s, t)
    om = stz.holomorphic_volume(q, frame)
    phase = om / abs(om)
    want = (1j ** 1) * (1 + 1j * lam * np.tanh(t[0]))
    want /= abs(want)
    assert abs(phase - want) < 1e-9


# ---------------------------------------------------------------------------
# conormal frames
# ---------------------------------------------------------------------------

def test_conormal_frame_zero_section():
    eq = im.catalog("equator", p=1, n=2)
    q, frame = stz.conormal_frame(eq, [0.8], [0.0])
    sff = im.raw_second_fundamental_form(eq, [0.8])
    assert np.abs(np.array(frame[0]) - sff.tangents[0]).max() < 1e-9
    assert np.abs(np.array(frame[1]) - 1j * sff.normals[0]).max() < 1e-9


def test_conormal_frame_equator_closed_form():
    # totally geodesic: E_j = cosh|t| e_j with no vertical correction
    eq = im.catalog("equator", p=2, n=4)
    s, t = np.array([0.9, 1.4]), np.array([1.2, -0.8])
    q, frame = stz.conormal_frame(eq, s, t)
    sff = im.raw_second_fundamental_form(eq, s)
    tn = np.linalg.norm(t)
    for j in range(2):
        assert np.abs(frame[j] - np.cosh(tn) * sff.tangents[j]).max() < 1e-8


@pytest.mark.parametrize("name,params,s,t", [
    ("clifford_torus", {"n": 3}, [0.4, 1.1], [1.5]),
    ("clifford_torus", {"n": 3}, [2.0, 0.6], [-1.8]),
    ("latitude_sphere", {"p": 1, "n": 2, "radius": 0.8}, [1.0], [2.0]),
    ("equator", {"p": 2, "n": 4}, [0.7, 1.2], [1.0, -2.0]),
])
def test_conormal_routes_agree(name, params, s, t):
    # frame agreement is checked at moderate fiber radius: the numeric
    # route accumulates an in-span parametrization drift ~ sinh|t| * 1e-7
    # at larger |t| (harmless to every defect, which is basis-covariant)
    imm = im.catalog(name, **params)
    q1, f1 = stz.conormal_frame(imm, s, t)
    q2, f2 = stz.conormal_frame_adapted(imm, s, t)
    assert np.abs(q1.z - q2.z).max() < 1e-12
    for a, b in zip(f1, f2):
        assert np.abs(np.asarray(a) - np.asarray(b)).max() < 1e-6


def test_conormal_frame_range_guard():
    eq = im.catalog("equator", p=1, n=2)
    with pytest.raises(InputValidationError):
        stz.conormal_frame(eq, [0.5], [stz.T_MAX + 1.0])


# ---------------------------------------------------------------------------
# special Lagrangian defects
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p,n", [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (2, 5)])
def test_equators_special_lagrangian(p, n):
    rep = stz.slag_defect(im.catalog("equator", p=p, n=n), samples=20, seed=0)
    assert rep.lagrangian_defect <= 1e-8
    assert rep.special_defect <= 1e-8
    assert rep.phase_power == (p - n) % 4


def test_equator_wrong_phase_fails():
    # shifts by a quarter turn break the special condition; a half turn is
    # an orientation flip and leaves |Im| unchanged
    eq = im.catalog("equator", p=2, n=4)
    for shift in (1, 3):
        rep = stz.slag_defect(eq, samples=12, seed=0, phase_shift=shift)
        assert rep.special_defect > 1e-2
    rep = stz.slag_defect(eq, samples=12, seed=0, phase_shift=2)
    assert rep.special_defect <= 1e-8


def test_clifford_torus_austere_passes():
    rep = stz.slag_defect(im.catalog("clifford_torus", n=3), samples=30, seed=0)
    assert rep.lagrangian_defect <= 1e-8
    assert rep.special_defect <= 1e-6


def test_latitude_circle_lagrangian_but_not_special():
    rep = stz.slag_defect(
        im.catalog("latitude_sphere", p=1, n=2, radius=0.8), samples=30, seed=0)
    assert rep.lagrangian_defect <= 1e-8
    assert rep.special_defect >= 1e-2


def test_lagrangian_always_even_for_nonminimal():
    gp = im.catalog("graph_perturbation", p=2, n=4, amplitude=0.25)
    rep = stz.slag_defect(gp, samples=25, seed=0)
    assert rep.lagrangian_defect <= 1e-8


def test_profile_independence_of_verdicts():
    eq = im.catalog("equator", p=2, n=3)
    lat = im.catalog("latitude_sphere", p=1, n=2, radius=0.8)
    for imm, should_pass in ((eq, True), (lat, False)):
        verdicts = []
        for prof in (stz.flat_profile(), stz.quadratic_profile()):
            rep = stz.slag_defect(imm, prof, samples=15, seed=0)
            verdicts.append(rep.lagrangian_defect <= 1e-8
                            and rep.special_defect <= 1e-6)
        assert verdicts[0] == verdicts[1] == should_pass


def test_equivariance_under_rotation():
    # omega and |Omega| are unchanged under special orthogonal coordinate
    # rotations applied to the point and the frame
    eq = im.catalog("clifford_torus", n=3)
    q, frame = stz.conormal_frame(eq, [0.8, 1.9], [1.3])
    prof = stz.quadratic_profile()
    M = rng.standard_normal((4, 4))
    R = np.linalg.qr(M)[0]
    if np.linalg.det(R) < 0:
        R[:, 0] = -R[:, 0]
    q2 = stz.QuadricPoint(R @ q.z)
    frame2 = [R @ V for V in frame]
    for a in range(3):
        for b in range(a + 1, 3):
            v1 = stz.omega_st(q, prof, frame[a], frame[b])
            v2 = stz.omega_st(q2, prof, frame2[a], frame2[b])
            assert v1 == pytest.approx(v2, rel=1e-9, abs=1e-9)
    o1 = stz.holomorphic_volume(q, frame)
    o2 = stz.holomorphic_volume(q2, frame2)
    assert abs(o1) == pytest.approx(abs(o2), rel=1e-9)


# ---------------------------------------------------------------------------
# austerity
# ---------------------------------------------------------------------------

def _sff_with(entries):
    entries = np.asarray(entries, dtype=float)
    qdim, p = entries.shape[0], entries.shape[1]
    n = p + qdim
    tangents = np.eye(n + 1)[1:p + 1]
    normals = np.eye(n + 1)[p + 1:n + 1]
    return im.SecondFundamentalForm(np.eye(n + 1)[0], tangents, normals, entries)


def test_austere_zero():
    rep = stz.austere_test(_sff_with(np.zeros((2, 2, 2))))
    assert rep.verdict == "austere"


def test_austere_opposite_pairs():
    rep = stz.austere_test(_sff_with([np.diag([1.3, -1.3]), np.zeros((2, 2))]))
    assert rep.verdict == "austere"


def test_umbilic_is_neither():
    rep = stz.austere_test(_sff_with([np.diag([0.75, 0.75]), np.zeros((2, 2))]))
    assert rep.verdict == "neither"


def test_minimal_only_in_higher_dimension():
    # trace-free but odd cubic sum nonzero: eigenvalues (2, -1, -1)
    A = np.diag([2.0, -1.0, -1.0])
    rep = stz.austere_test(_sff_with([A]))
    assert rep.verdict == "minimal-only"


def test_clifford_torus_is_austere_from_fd():
    cl = im.catalog("clifford_torus", n=3)
    rep = stz.austere_test(im.second_fundamental_form(cl, [0.5, 1.2]))
    assert rep.verdict == "austere"


def test_latitude_is_neither_from_fd():
    lat = im.catalog("latitude_sphere", p=1, n=2, radius=0.8)
    rep = stz.austere_test(im.second_fundamental_form(lat, [0.5]))
    assert rep.verdict == "neither"
