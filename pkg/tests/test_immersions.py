import numpy as np
import pytest

from calibra import immersions as im
from calibra.errors import InputValidationError

rng = np.random.default_rng(21)


# ---------------------------------------------------------------------------
# catalog charts
# ---------------------------------------------------------------------------

def test_equator_chart_matches_formula():
    eq = im.catalog("equator", p=2, n=4)
    s = np.array([0.7, 1.3])
    want = np.array([np.cos(s[0]), np.sin(s[0]) * np.cos(s[1]),
                     np.sin(s[0]) * np.sin(s[1]), 0.0, 0.0])
    assert np.allclose(eq.chart(s), want)


def test_clifford_chart_on_sphere():
    cl = im.catalog("clifford_torus", n=3)
    s = np.array([0.4, 2.2])
    want = np.array([np.cos(s[0]), np.sin(s[0]),
                     np.cos(s[1]), np.sin(s[1])]) / np.sqrt(2)
    assert np.allclose(cl.chart(s), want)


@pytest.mark.parametrize("name,params", [
    ("equator", {"p": 2, "n": 4}),
    ("equator", {"p": 1, "n": 5}),
    ("clifford_torus", {"n": 3}),
    ("clifford_torus", {"n": 4}),
    ("latitude_sphere", {"p": 1, "n": 2, "radius": 0.8}),
    ("latitude_sphere", {"p": 2, "n": 4, "radius": 0.55}),
    ("veronese", {}),
    ("graph_perturbation", {"p": 2, "n": 4, "amplitude": 0.2}),
])
def test_catalog_charts_stay_on_sphere(name, params):
    imm = im.catalog(name, **params)
    for s in im.sample_grid(imm, 25, seed=3):
        assert abs(np.linalg.norm(imm.chart(s)) - 1.0) < 1e-10


def test_catalog_rejects_bad_input():
    with pytest.raises(InputValidationError):
        im.catalog("untitled_manifold")
    with pytest.raises(InputValidationError):
        im.catalog("latitude_sphere", p=1, n=2, radius=1.5)
    with pytest.raises(InputValidationError):
        im.catalog("latitude_sphere", p=1, n=2, radius=0.0)
    with pytest.raises(InputValidationError):
        im.catalog("equator", p=3, n=3)


# ---------------------------------------------------------------------------
# second fundamental forms vs analytic oracles
# ---------------------------------------------------------------------------

def test_equator_totally_geodesic():
    eq = im.catalog("equator", p=2, n=4)
    for s in im.sample_grid(eq, 10, seed=0):
        sff = im.second_fundamental_form(eq, s)
        assert np.abs(sff.entries).max() < 1e-8


def test_clifford_principal_curvatures():
    cl = im.catalog("clifford_torus", n=3)
    for s in im.sample_grid(cl, 10, seed=0):
        sff = im.second_fundamental_form(cl, s)
        lam = np.linalg.eigvalsh(sff.entries[0])
        assert np.abs(np.sort(lam) - np.array([-1.0, 1.0])).max() < 1e-6
        assert abs(sff.mean_curvature[0]) < 1e-6


def test_latitude_circle_analytic_curvature():
    r = 0.8
    h = np.sqrt(1 - r * r)
    lat = im.catalog("latitude_sphere", p=1, n=2, radius=r)
    for s in im.sample_grid(lat, 8, seed=1):
        sff = im.second_fundamental_form(lat, s)
        # distance circle in the 2-sphere has geodesic curvature h / r
        assert abs(abs(sff.entries[0][0, 0]) - h / r) < 1e-6


def test_latitude_sphere_umbilic():
    r = 0.7
    h = np.sqrt(1 - r * r)
    lat = im.catalog("latitude_sphere", p=2, n=4, radius=r)
    for s in im.sample_grid(lat, 8, seed=2):
        sff = im.second_fundamental_form(lat, s)
        lam = np.linalg.eigvalsh(sff.entries[0])
        assert np.abs(np.abs(lam) - h / r).max() < 1e-6
        assert abs(abs(sff.mean_curvature[0]) - 2 * h / r) < 1e-6
        assert np.abs(sff.entries[1]).max() < 1e-6   # constant second normal


def test_veronese_minimal():
    ver = im.catalog("veronese")
    for s in im.sample_grid(ver, 10, seed=3):
        sff = im.second_fundamental_form(ver, s)
        assert np.abs(sff.mean_curvature).max() < 1e-6
        assert np.abs(sff.entries).max() > 0.1   # not totally geodesic


def test_graph_perturbation_not_minimal():
    gp = im.catalog("graph_perturbation", p=2, n=4, amplitude=0.2)
    worst = 0.0
    for s in im.sample_grid(gp, 12, seed=4):
        sff = im.second_fundamental_form(gp, s)
        worst = max(worst, np.abs(sff.mean_curvature).max())
    assert worst > 1e-3


def test_adapted_frame_properties():
    cl = im.catalog("clifford_torus", n=4)
    sff = im.second_fundamental_form(cl, [0.5, 1.4])
    frame = np.vstack([sff.point[None], sff.tangents, sff.normals])
    assert np.abs(frame @ frame.T - np.eye(5)).max() < 1e-9
    assert np.linalg.det(frame) > 0


def test_sff_symmetry_validated():
    with pytest.raises(InputValidationError):
        im.SecondFundamentalForm(
            np.array([1.0, 0, 0, 0]), np.eye(4)[1:3], np.eye(4)[3:],
            np.array([[[0.0, 1.0], [0.0, 0.0]]]))


# ---------------------------------------------------------------------------
# reparametrization invariance
# ---------------------------------------------------------------------------

def test_reparametrization_invariance():
    cl = im.catalog("clifford_torus", n=4)

    def diffeo(s):
        # orientation-preserving warp of the parameter box
        return np.array([s[0] + 0.2 * np.sin(s[1]), s[1] - 0.1 * np.cos(s[0])])

    warped = im.Immersion("warped", lambda s: cl.chart(diffeo(s)), 2, 4, cl.box)
    s = np.array([1.1, 0.8])
    sff_direct = im.second_fundamental_form(cl, diffeo(s))
    sff_warped = im.second_fundamental_form(warped, s)
    assert np.abs(sff_direct.point - sff_warped.point).max() < 1e-12
    # compare curvature along matched normals (frames differ by rotation)
    for nu, Aw in zip(sff_warped.normals, sff_warped.entries):
        weights = sff_direct.normals @ nu
        Ad = sff_direct.along(weights)
        assert np.abs(np.sort(np.linalg.eigvalsh(Ad))
                      - np.sort(np.linalg.eigvalsh(Aw))).max() < 1e-6


def test_classify_flags_unchanged_by_reparametrization():
    eq = im.catalog("equator", p=2, n=4)
    warped = im.Immersion(
        "warped", lambda s: eq.chart(np.array([s[0] + 0.1 * s[1], 1.1 * s[1]])),
        2, 4, ((0.4, 2.0), (0.3, 2.4)))
    a = im.classify(eq, samples=20)
    b = im.classify(warped, samples=20)
    assert (a.totally_geodesic, a.austere, a.minimal) == \
        (b.totally_geodesic, b.austere, b.minimal)


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def test_classify_equator_all_flags():
    flags = im.classify(im.catalog("equator", p=2, n=4), samples=20)
    assert flags.totally_geodesic and flags.austere and flags.minimal
    assert flags.superminimal_neg and flags.superminimal_pos


def test_classify_clifford_in_s4():
    flags = im.classify(im.catalog("clifford_torus", n=4), samples=20)
    assert flags.minimal and flags.austere
    assert not flags.totally_geodesic
    assert not flags.superminimal_neg and not flags.superminimal_pos


def test_classify_veronese():
    flags = im.classify(im.catalog("veronese"), samples=20)
    assert flags.minimal
    assert flags.superminimal_neg != flags.superminimal_pos  # exactly one


def test_classify_latitude_not_minimal():
    flags = im.classify(
        im.catalog("latitude_sphere", p=2, n=4, radius=0.8), samples=20)
    assert not flags.minimal and not flags.austere


def test_classify_perturbation_random_amplitudes():
    # implication chain must hold on perturbed inputs as well
    for amp in (0.05, 0.15, 0.3):
        gp = im.catalog("graph_perturbation", p=2, n=4, amplitude=amp)
        flags = im.classify(gp, samples=20)
        flags.check_implications()
        assert not flags.minimal


def test_classify_needs_enough_samples():
    with pytest.raises(InputValidationError):
        im.classify(im.catalog("veronese"), samples=5)
