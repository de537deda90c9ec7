import numpy as np
import pytest

from pmchelix.ambient import ProductAmbient, spaceform_circle
from pmchelix.curve import CurveSpec
from pmchelix.errors import PreconditionError
from pmchelix.frenet import classify_curve, covariant_jet, frenet_apparatus, frenet_batch
from pmchelix.reconstruct import build_case3, case3_generator

from oracles import fd_frenet, latitude_circle, loxodrome, tilted_helix


def vertical_line():
    pa = ProductAmbient.of(1.0, 3)
    p = pa.base_point()
    return CurveSpec(pa, lambda s: p + s * pa.xi if not hasattr(s, "expand") else s.expand(-1) * pa.xi + p,
                     (-1.0, 1.0))


def great_circle():
    pa = ProductAmbient.of(1.0, 2)
    return spaceform_circle(pa, pa.base_point(), pa.axis(1), pa.axis(2), 0.0)


def test_vertical_line_derivatives_vanish():
    vecs = covariant_jet(vertical_line(), 0.3, 3)
    assert np.allclose(vecs[0], ProductAmbient.of(1.0, 3).xi)
    for v in vecs[1:]:
        assert np.max(np.abs(v)) == 0.0


def test_great_circle_is_geodesic():
    vecs = covariant_jet(great_circle(), 0.4, 2)
    assert np.linalg.norm(vecs[1]) <= 1e-9
    k, frame = frenet_apparatus(great_circle(), 0.4)
    assert len(k) == 0 and frame.shape[0] == 1


def test_latitude_circle():
    curve = latitude_circle(np.pi / 4)
    pa = curve.ambient
    v = covariant_jet(curve, 0.5, 1)[1]
    assert np.sqrt(pa.inner(v, v)) == pytest.approx(1.0, abs=1e-7)
    assert classify_curve(curve) == "circle"


def test_covariant_order_limit():
    with pytest.raises(PreconditionError):
        covariant_jet(great_circle(), 0.0, 4)


def test_non_unit_speed_rejected():
    pa = ProductAmbient.of(1.0, 3)
    p = pa.base_point()
    slow = CurveSpec(pa, lambda s: p + (s * 0.5).expand(-1) * pa.xi, (0.0, 1.0))
    with pytest.raises(PreconditionError):
        frenet_apparatus(slow, 0.2)
    flagged = CurveSpec(pa, vertical_line().fn, (0.0, 1.0), arc_length=False)
    with pytest.raises(PreconditionError):
        covariant_jet(flagged, 0.2)


def test_classify_needs_samples():
    with pytest.raises(PreconditionError):
        classify_curve(great_circle(), samples=8)


@pytest.mark.parametrize("c, kappa, slope", [(1.0, 1.2, 0.5), (-1.0, 1.5, 0.3), (4.0, 0.5, 0.8)])
def test_tilted_helix(c, kappa, slope):
    curve = tilted_helix(c, kappa, slope)
    k, frame = frenet_apparatus(curve, 1.1)
    q = np.sqrt(1 - slope ** 2)
    # horizontal acceleration kappa q^2; the vertical speed tilts the binormal
    assert k[0] == pytest.approx(kappa * q * q, abs=1e-9)
    assert k[1] == pytest.approx(kappa * slope * q, abs=1e-9)
    assert classify_curve(curve) == "helix"


def test_loxodrome_is_not_constant_curvature():
    curve = loxodrome(0.7)
    assert classify_curve(curve) == "non-constant-curvature"
    s = curve.samples(20, 0.05)
    kap, _, _ = frenet_batch(curve, s)
    assert kap[:, 0].max() - kap[:, 0].min() > 1e-2


def test_case3_generator_is_circle():
    gen = case3_generator(build_case3(1.0, 2, 0.5))
    assert classify_curve(gen) == "circle"
    k, _ = frenet_apparatus(gen, 0.2)
    assert k[0] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("make", [
    lambda: latitude_circle(0.6),
    lambda: tilted_helix(1.0, 1.2, 0.5),
    lambda: tilted_helix(-1.0, 2.0, 0.6),
    lambda: loxodrome(0.9),
])
def test_frame_orthonormal_and_frenet_equations(make):
    curve = make()
    pa = curve.ambient
    s = curve.samples(12, 0.2)
    kap, frames, order = frenet_batch(curve, s, r_max=3)
    for n in range(len(s)):
        r = int(order[n])
        X = frames[n, :r]
        G = np.einsum("id,jd,d->ij", X, X, pa.eta)
        assert np.max(np.abs(G - np.eye(r))) <= 1e-8

    # covariant derivative of X_i along the curve, by differencing the frame in s
    h = 1e-4

    def frame_at(x):
        return frenet_batch(curve, np.array([x]), r_max=3)[1][0]

    for n, x in enumerate(s):
        r = int(order[n])
        p = curve(x)
        d = (frame_at(x + h) - frame_at(x - h)) / (2 * h)
        t = frames[n, 0]
        for i in range(r):
            cov = d[i] + pa.c * pa.inner(pa.m_part(t), pa.m_part(frames[n, i])) * pa.m_part(p)
            expected = np.zeros(pa.d)
            if i > 0:
                expected -= kap[n, i - 1] * frames[n, i - 1]
            if i + 1 < r:
                expected += kap[n, i] * frames[n, i + 1]
            assert np.max(np.abs(cov - expected)) <= 1e-6


@pytest.mark.parametrize("make", [
    lambda: latitude_circle(0.9),
    lambda: tilted_helix(1.0, 1.2, 0.5),
    lambda: loxodrome(0.7),
])
def test_curvatures_match_finite_differences(make):
    curve = make()
    for x in curve.samples(6, 0.2):
        k, _ = frenet_apparatus(curve, x)
        k1, k2 = fd_frenet(curve, x)
        assert k[0] == pytest.approx(k1, rel=1e-7)
        if len(k) > 1:
            assert k[1] == pytest.approx(k2, rel=1e-6)


def test_circle_rmax_one():
    kap, frames, order = frenet_batch(latitude_circle(0.6), [0.1], r_max=1)
    assert kap.shape == (1, 0) and order[0] == 1
    with pytest.raises(PreconditionError):
        frenet_batch(latitude_circle(0.6), [0.1], r_max=5)
