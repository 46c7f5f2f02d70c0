import numpy as np
import pytest

from calibra import exterior as ext
from calibra.errors import (
    DegenerateInputError,
    InputValidationError,
    StructuralError,
)

rng = np.random.default_rng(12345)


@pytest.fixture(scope="module")
def r5():
    return ext.euclidean_space(5)


def random_form(space, k, rng, complex_=False):
    n = len(ext.index_tuples(space.dim, k))
    c = rng.standard_normal(n)
    if complex_:
        c = c + 1j * rng.standard_normal(n)
    return ext.KForm(space, k, c)


# ---------------------------------------------------------------------------
# wedge
# ---------------------------------------------------------------------------

def test_wedge_self_vanishes(r5):
    e1 = ext.basis_form(r5, (0,))
    assert ext.wedge(e1, e1).norm_coeffs() == 0.0


def test_wedge_dual_basis_normalization(r5):
    e1 = ext.basis_form(r5, (0,))
    e2 = ext.basis_form(r5, (1,))
    w = ext.wedge(e1, e2)
    v1, v2 = np.eye(5)[0], np.eye(5)[1]
    assert w(v1, v2) == pytest.approx(1.0, abs=1e-15)
    assert w(v2, v1) == pytest.approx(-1.0, abs=1e-15)


def test_wedge_matches_fiber_volume_term():
    # the pure-fiber part of the 7-dim calibration evaluates to 1 at v = 1
    from calibra.octonion import g2_structure
    st = g2_structure()
    f123 = ext.wedge(ext.wedge(ext.basis_form(st.space, (0,)),
                               ext.basis_form(st.space, (1,))),
                     ext.basis_form(st.space, (2,)))
    fiber = np.eye(7)[:3]
    assert f123(*fiber) == pytest.approx(1.0, abs=1e-15)
    assert st.phi(*fiber) == pytest.approx(1.0, abs=1e-15)


def test_wedge_graded_commutativity(r5):
    for p, q in [(1, 1), (1, 2), (2, 2), (2, 3), (1, 3)]:
        a = random_form(r5, p, rng)
        b = random_form(r5, q, rng)
        lhs = ext.wedge(a, b).coeffs
        rhs = ((-1) ** (p * q)) * ext.wedge(b, a).coeffs
        assert np.abs(lhs - rhs).max() < 1e-12


def test_wedge_dimension_mismatch():
    a = ext.basis_form(ext.euclidean_space(4), (0,))
    b = ext.basis_form(ext.euclidean_space(5), (1,))
    with pytest.raises(StructuralError):
        ext.wedge(a, b)
    c = random_form(ext.euclidean_space(4), 2, rng)
    with pytest.raises(StructuralError):
        ext.wedge(c, ext.wedge(c, c))  # degree 4 + 2 > 4


# ---------------------------------------------------------------------------
# interior
# ---------------------------------------------------------------------------

def test_interior_dual_pairing(r5):
    w = ext.wedge(ext.basis_form(r5, (0,)), ext.basis_form(r5, (1,)))
    out = ext.interior(np.eye(5)[0], w)
    assert out[(1,)] == pytest.approx(1.0)
    assert np.abs(out.coeffs).sum() == pytest.approx(1.0)


def test_interior_double_contraction_vanishes(r5):
    for k in (2, 3, 4):
        a = random_form(r5, k, rng)
        v = rng.standard_normal(5)
        assert ext.interior(v, ext.interior(v, a)).norm_coeffs() < 1e-13


def test_interior_phi_contraction_example():
    # f1 <| phi = f^2 ^ f^3 + (e^0 ^ e^1 - e^2 ^ e^3) at unit scales
    from calibra.octonion import g2_structure
    st = g2_structure()
    out = ext.interior(np.eye(7)[0], st.phi)
    want = ext.form_from_dict(st.space, 2, {
        (1, 2): 1.0, (3, 4): 1.0, (5, 6): -1.0})
    assert np.abs(out.coeffs - want.coeffs).max() < 1e-15


def test_interior_antiderivation(r5):
    for p, q in [(1, 2), (2, 2), (2, 1), (3, 1)]:
        a = random_form(r5, p, rng)
        b = random_form(r5, q, rng)
        v = rng.standard_normal(5)
        lhs = ext.interior(v, ext.wedge(a, b)).coeffs
        rhs = (ext.wedge(ext.interior(v, a), b).coeffs
               + ((-1) ** p) * ext.wedge(a, ext.interior(v, b)).coeffs)
        assert np.abs(lhs - rhs).max() < 1e-12


def test_interior_degree_zero_rejected(r5):
    with pytest.raises(StructuralError):
        ext.interior(np.eye(5)[0], ext.zero_form(r5, 0))


# ---------------------------------------------------------------------------
# musical isomorphisms
# ---------------------------------------------------------------------------

def test_flat_with_scaled_metric():
    # metric u^2 * id on the horizontal block with u = 2: flat(e) = 4 e^dual
    sp = ext.InnerProductSpace(3, np.diag([4.0, 4.0, 4.0]))
    out = ext.flat(sp, np.eye(3)[1])
    assert np.allclose(out.coeffs, [0.0, 4.0, 0.0])


def test_sharp_inverts_flat(r5):
    sp = ext.InnerProductSpace(5, np.diag([1.0, 4.0, 9.0, 2.0, 7.0]))
    for _ in range(5):
        v = rng.standard_normal(5)
        assert np.abs(ext.sharp(sp, ext.flat(sp, v)) - v).max() < 1e-12


def test_musical_linearity_and_dispatch(r5):
    v = np.eye(5)[0] + np.eye(5)[1]
    out = ext.musical(r5, v)
    assert isinstance(out, ext.KForm)
    assert np.allclose(out.coeffs[:2], [1.0, 1.0])
    back = ext.musical(r5, out)
    assert np.allclose(back, v)


# ---------------------------------------------------------------------------
# gram_schmidt
# ---------------------------------------------------------------------------

def test_gram_schmidt_simple():
    sp = ext.euclidean_space(2)
    fr = ext.gram_schmidt(np.array([[1.0, 0.0], [1.0, 1.0]]), sp)
    assert np.allclose(fr.vectors, np.eye(2), atol=1e-14)


def test_gram_schmidt_idempotent_on_orthonormal():
    sp = ext.euclidean_space(4)
    q = np.linalg.qr(rng.standard_normal((4, 4)))[0]
    fr = ext.gram_schmidt(q, sp)
    assert np.abs(fr.vectors - q).max() < 1e-12


def test_gram_schmidt_random_gram_identity():
    sp = ext.euclidean_space(5)
    vs = rng.standard_normal((4, 5))
    fr = ext.gram_schmidt(vs, sp)
    assert np.abs(fr.gram() - np.eye(4)).max() < 1e-10
    assert fr.orthonormal
    # first vector stays parallel to the first input
    cosine = vs[0] @ fr.vectors[0] / np.linalg.norm(vs[0])
    assert cosine == pytest.approx(1.0, abs=1e-12)


def test_gram_schmidt_degenerate_names_index():
    sp = ext.euclidean_space(3)
    vs = np.array([[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    with pytest.raises(DegenerateInputError, match="vector 1"):
        ext.gram_schmidt(vs, sp)


def test_frame_orthonormal_flag_validated():
    sp = ext.euclidean_space(3)
    with pytest.raises(StructuralError):
        ext.Frame(sp, np.array([[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]),
                  orthonormal=True)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def test_fd_linear_map_exact():
    M = rng.standard_normal((4, 3))
    cols = ext.fd_pushforward(lambda s: M @ s, np.array([0.3, -1.2, 2.0]))
    assert np.abs(np.array(cols).T - M).max() < 1e-10


def test_fd_sphere_chart_tangency():
    def chart(s):
        return np.array([np.cos(s[0]), np.sin(s[0]) * np.cos(s[1]),
                         np.sin(s[0]) * np.sin(s[1])])
    p = np.array([0.7, 1.1])
    x = chart(p)
    for v in ext.fd_pushforward(chart, p):
        assert abs(x @ v) < 1e-8


def test_fd_bundle_map_fiber_direction():
    # d/dt of Psi(x, t nu) at t = 0 is i nu (the sinh(t)/t limit)
    from calibra.stenzel import szoke_map, CotangentPoint
    x = np.array([1.0, 0.0, 0.0])
    nu = np.array([0.0, 0.0, 1.0])

    def f(t):
        return szoke_map(CotangentPoint(x, t[0] * nu)).z

    (col,) = ext.fd_pushforward(f, np.array([0.0]))
    assert np.abs(col - 1j * nu).max() < 1e-9


def test_fd_second_order_convergence():
    def smooth(s):
        return np.array([np.sin(2 * s[0]) * np.exp(s[1]),
                         np.cos(s[0] + s[1]) ** 2])

    def analytic(s):
        d1 = -np.sin(2 * (s[0] + s[1]))
        return np.array([
            [2 * np.cos(2 * s[0]) * np.exp(s[1]), d1],
            [np.sin(2 * s[0]) * np.exp(s[1]), d1],
        ])

    p = np.array([0.4, -0.3])
    errs = []
    for h in (2e-3, 1e-3):
        cols = np.array(ext.fd_pushforward(smooth, p, step=h))
        errs.append(np.abs(cols - analytic(p)).max())
    assert errs[0] / errs[1] > 3.0


def test_fd_step_bounds():
    with pytest.raises(InputValidationError):
        ext.fd_pushforward(lambda s: s, np.zeros(1), step=1.0)


def test_fd_failure_reports_stencil():
    def bad(s):
        raise RuntimeError("boom")
    from calibra.errors import FDEvaluationError
    with pytest.raises(FDEvaluationError, match="coordinate 0"):
        ext.fd_pushforward(bad, np.zeros(2))


def test_richardson_improves_linear_convergence():
    def smooth(s):
        return np.array([np.sin(3 * s[0])])
    p = np.array([0.5])
    d_plain = ext.fd_pushforward(smooth, p, step=1e-3)[0][0]
    d_rich = ext.fd_pushforward(smooth, p, step=1e-3, richardson=True)[0][0]
    truth = 3 * np.cos(1.5)
    assert abs(d_rich - truth) < abs(d_plain - truth)


# ---------------------------------------------------------------------------
# KForm basics, hodge, inner products
# ---------------------------------------------------------------------------

def test_kform_repeated_argument_vanishes(r5):
    a = random_form(r5, 3, rng)
    v, w = rng.standard_normal((2, 5))
    assert abs(a(v, w, v)) < 1e-12 * max(1.0, abs(a(v, w, rng.standard_normal(5))))


def test_kform_multilinearity(r5):
    a = random_form(r5, 2, rng)
    u, v, w = rng.standard_normal((3, 5))
    lhs = a(2.5 * u + v, w)
    rhs = 2.5 * a(u, w) + a(v, w)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_kform_getitem_signs(r5):
    a = random_form(r5, 2, rng)
    assert a[(1, 0)] == pytest.approx(-a[(0, 1)])
    assert a[(1, 1)] == 0.0


def test_hodge_star_euclidean():
    sp = ext.euclidean_space(4)
    e12 = ext.basis_form(sp, (0, 1))
    assert ext.hodge_star(e12).as_dict() == {(2, 3): 1.0}
    # double star on 2-forms in dim 4 is the identity
    a = random_form(sp, 2, rng)
    assert np.abs(ext.hodge_star(ext.hodge_star(a)).coeffs - a.coeffs).max() < 1e-12


def test_form_inner_scaled():
    sp = ext.InnerProductSpace(2, np.diag([4.0, 9.0]))
    e01 = ext.basis_form(sp, (0, 1))
    assert ext.form_inner(e01, e01) == pytest.approx(1.0 / 36.0)
    assert abs(ext.form_norm(e01) - 1.0 / 6.0) < 1e-14


def test_space_validation():
    with pytest.raises(InputValidationError):
        ext.InnerProductSpace(10, np.eye(10))
    with pytest.raises(InputValidationError):
        ext.InnerProductSpace(2, np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InputValidationError):
        ext.InnerProductSpace(2, np.array([[1.0, 0.0], [0.0, -1.0]]))
