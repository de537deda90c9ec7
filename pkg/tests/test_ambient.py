import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmchelix import jets as jm
from pmchelix.ambient import (
    AmbientVector,
    ProductAmbient,
    SpaceForm,
    curvature_form,
    curvature_tensor,
    levi_civita_correction,
    metric_inner,
    on_manifold_residual,
    spaceform_circle,
    tangent_project,
)
from pmchelix.curve import CurveSpec
from pmchelix.errors import BaseMismatchError, PreconditionError, UnsupportedCurveError
from pmchelix.frenet import frenet_apparatus, frenet_batch


def random_point(pa, rng):
    y = rng.normal(size=pa.n) * 0.7
    if pa.c > 0:
        x = rng.normal(size=pa.n + 1)
        pm = x / np.linalg.norm(x) * pa.sf.radius
    elif pa.c < 0:
        pm = np.concatenate([[np.sqrt(pa.sf.radius ** 2 + y @ y)], y])
    else:
        pm = y
    return np.append(pm, rng.normal())


def random_tangent(pa, p, rng):
    return pa.project(p, rng.normal(size=pa.d))


@pytest.mark.parametrize("c, model", [(1.0, "sphere"), (4.0, "sphere"), (-1.0, "hyperboloid"), (0.0, "flat")])
def test_model_matches_sign(c, model):
    sf = SpaceForm(c, 3)
    assert sf.model == model
    if c:
        assert sf.radius * np.sqrt(abs(c)) == pytest.approx(1.0)


@pytest.mark.parametrize("c", [1.0, -1.0, 0.0])
def test_xi_is_unit(c):
    pa = ProductAmbient.of(c, 2)
    assert metric_inner(pa, pa.xi, pa.xi) == 1.0


def test_signature_and_orthogonality():
    hyp = ProductAmbient.of(-1.0, 2)
    assert metric_inner(hyp, hyp.axis(0), hyp.axis(0)) == -1.0
    sph = ProductAmbient.of(1.0, 3)
    assert metric_inner(sph, sph.axis(2), sph.axis(3)) == 0.0


def test_base_mismatch():
    pa = ProductAmbient.of(1.0, 2)
    u = AmbientVector(pa.axis(1), pa.base_point(0.0))
    v = AmbientVector(pa.axis(2), pa.base_point(1.0))
    with pytest.raises(BaseMismatchError):
        metric_inner(pa, u, v)


@pytest.mark.parametrize("c, p, expected", [
    (1.0, [1, 0, 0, 0, 0, 0], 0.0),
    (-1.0, [1, 0, 0, 0], 0.0),
    (1.0, [1.1, 0, 0, 0, 0, 0], 0.21),
])
def test_on_manifold_residual(c, p, expected):
    n = len(p) - 2
    pa = ProductAmbient.of(c, n)
    assert on_manifold_residual(pa, np.array(p, float)) == pytest.approx(expected, abs=1e-15)


def test_lower_sheet_is_off_manifold():
    pa = ProductAmbient.of(-1.0, 2)
    assert on_manifold_residual(pa, np.array([-1.0, 0, 0, 0])) == np.inf


def test_tangent_project_examples():
    pa = ProductAmbient.of(1.0, 4)
    p = pa.base_point()
    assert np.allclose(tangent_project(pa, p, pa.xi).coords, pa.xi)
    assert np.allclose(tangent_project(pa, p, pa.axis(0)).coords, 0.0)
    with pytest.raises(PreconditionError):
        tangent_project(pa, 1.5 * p, pa.xi)


@pytest.mark.parametrize("c", [1.0, -1.0, 2.5, -0.5])
def test_tangent_project_idempotent(c):
    rng = np.random.default_rng(3)
    pa = ProductAmbient.of(c, 3)
    for _ in range(10):
        p = random_point(pa, rng)
        w = rng.normal(size=pa.d)
        once = tangent_project(pa, p, w).coords
        twice = tangent_project(pa, p, once).coords
        assert np.max(np.abs(twice - once)) <= 1e-12
        assert abs(pa.inner(once, pa.m_part(p))) <= 1e-12


def test_great_circle_is_geodesic():
    pa = ProductAmbient.of(1.0, 2)
    s = 0.9
    p = np.array([np.cos(s), np.sin(s), 0, 0])
    vel = np.array([-np.sin(s), np.cos(s), 0, 0])
    acc = -p.copy()
    acc[-1] = 0.0
    out = levi_civita_correction(pa, p, vel, acc, vel).coords
    assert np.max(np.abs(out)) <= 1e-15


def test_vertical_line_is_geodesic():
    pa = ProductAmbient.of(-1.0, 2)
    p = pa.base_point(0.3)
    out = levi_civita_correction(pa, p, pa.xi, np.zeros(pa.d), pa.xi).coords
    assert np.all(out == 0.0)


def test_hyperbolic_geodesic():
    pa = ProductAmbient.of(-1.0, 2)
    for s in np.linspace(-1.5, 1.5, 7):
        p = np.array([np.cosh(s), np.sinh(s), 0, 0])
        vel = np.array([np.sinh(s), np.cosh(s), 0, 0])
        acc = np.array([np.cosh(s), np.sinh(s), 0, 0])
        out = levi_civita_correction(pa, p, vel, acc, vel).coords
        assert np.max(np.abs(out)) <= 1e-9


def test_levi_civita_rejects_normal_input():
    pa = ProductAmbient.of(1.0, 2)
    p = pa.base_point()
    with pytest.raises(PreconditionError):
        levi_civita_correction(pa, p, pa.axis(0), pa.axis(1), pa.axis(1))


def test_curvature_examples():
    pa = ProductAmbient.of(2.0, 3)
    p = pa.base_point()
    X, Y = pa.axis(1), pa.axis(2)
    assert np.all(curvature_tensor(pa, p, X, X, Y) == 0.0)
    assert np.allclose(curvature_tensor(pa, p, X, Y + 0.3 * pa.xi, pa.xi), 0.0, atol=1e-15)
    assert np.allclose(curvature_tensor(pa, p, X, Y, Y), 2.0 * X)


def test_curvature_rejects_non_tangent():
    pa = ProductAmbient.of(1.0, 2)
    p = pa.base_point()
    with pytest.raises(PreconditionError):
        curvature_tensor(pa, p, pa.axis(0), pa.axis(1), pa.axis(2))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), c=st.sampled_from([1.0, -1.0, 0.5, -3.0, 0.0]), n=st.integers(2, 4))
def test_curvature_symmetries(seed, c, n):
    rng = np.random.default_rng(seed)
    pa = ProductAmbient.of(c, n)
    p = random_point(pa, rng)
    X, Y, Z, W = (random_tangent(pa, p, rng) for _ in range(4))
    R = lambda a, b, e: curvature_tensor(pa, p, a, b, e, check=False)  # noqa: E731
    assert np.max(np.abs(R(X, Y, Z) + R(Y, X, Z))) <= 1e-12
    assert abs(pa.inner(R(X, Y, Z), W) + pa.inner(R(X, Y, W), Z)) <= 1e-12
    bianchi = R(X, Y, Z) + R(Y, Z, X) + R(Z, X, Y)
    assert np.max(np.abs(bianchi)) <= 1e-12
    # pair symmetry follows from the two above plus Bianchi
    assert abs(pa.inner(R(X, Y, Z), W) - pa.inner(R(Z, W, X), Y)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), c=st.sampled_from([1.0, -1.0, 2.0, -0.25]))
def test_curvature_matches_projection_formula(seed, c):
    rng = np.random.default_rng(seed)
    pa = ProductAmbient.of(c, 3)
    p = random_point(pa, rng)
    X, Y, Z, W = (random_tangent(pa, p, rng) for _ in range(4))
    lhs = pa.inner(curvature_tensor(pa, p, X, Y, Z, check=False), W)
    assert abs(lhs - curvature_form(pa, X, Y, Z, W)) <= 1e-12


def _frame_at(pa):
    p = pa.base_point(0.4)
    return p, pa.axis(1), pa.axis(2)


@pytest.mark.parametrize("c, kappa", [(1.0, 0.0), (1.0, 1.0), (1.0, 2.5), (-1.0, 1.2), (-2.0, 3.0), (0.0, 0.7)])
def test_circle_curvature(c, kappa):
    pa = ProductAmbient.of(c, 3)
    p, u1, u2 = _frame_at(pa)
    circle = spaceform_circle(pa, p, u1, u2, kappa)
    s = circle.samples(32)
    vel = circle.jets(s, 1).diff(0).value
    assert np.max(np.abs(pa.inner(vel, vel) - 1.0)) <= 1e-12
    pts = circle(s)
    assert np.max(on_manifold_residual(pa, pts)) <= 1e-12
    assert np.all(pts[:, -1] == 0.4)
    kap, _, order = frenet_batch(circle, s)
    if kappa == 0.0:
        assert np.all(order == 1)
        assert np.max(kap) <= 1e-9
    else:
        assert np.all(order == 2)
        assert np.max(np.abs(kap[:, 0] - kappa)) <= 1e-6 * kappa
        assert np.std(kap[:, 0]) <= 1e-8


def test_case3_generator_curvature():
    pa = ProductAmbient.of(1.0, 2)
    p, u1, u2 = _frame_at(pa)
    k, _ = frenet_apparatus(spaceform_circle(pa, p, u1, u2, 2 * 0.5), 0.3)
    assert k[0] == pytest.approx(1.0, abs=1e-7)


@pytest.mark.parametrize("kappa", [1.0, 0.5, 0.0])
def test_hyperbolic_non_circles_rejected(kappa):
    pa = ProductAmbient.of(-1.0, 2)
    p, u1, u2 = _frame_at(pa)
    with pytest.raises(UnsupportedCurveError):
        spaceform_circle(pa, p, u1, u2, kappa)


def test_circle_preconditions():
    pa = ProductAmbient.of(1.0, 2)
    p = pa.base_point()
    with pytest.raises(PreconditionError):
        spaceform_circle(pa, p, pa.axis(1), pa.xi, 1.0)
    with pytest.raises(PreconditionError):
        spaceform_circle(pa, p, pa.axis(1), 2 * pa.axis(2), 1.0)
    with pytest.raises(PreconditionError):
        spaceform_circle(pa, p, pa.axis(0), pa.axis(1), 1.0)


def test_circle_on_jets_matches_values():
    pa = ProductAmbient.of(1.0, 2)
    p, u1, u2 = _frame_at(pa)
    circle = spaceform_circle(pa, p, u1, u2, 0.8)
    s = np.array([0.1, 0.5])
    j = circle.fn(jm.Jet.variable(s, 0, 1, 3))
    assert np.allclose(j.value, circle(s), atol=1e-15)
    assert isinstance(circle, CurveSpec)
