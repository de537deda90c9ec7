"""Independent oracles for the test suite.

Nothing here touches the jet engine: derivatives come from central finite
differences with Richardson extrapolation, frame flows from matrix
exponentials, and test surfaces are closed-form maps.
"""
import numpy as np
from scipy.linalg import expm

from pmchelix import jets as jm
from pmchelix.ambient import ProductAmbient
from pmchelix.surface import ImmersionSpec

# central stencils (offsets, weights); every one has an error series in h^2
_STENCILS = {
    1: ((-1, 1), (-0.5, 0.5)),
    2: ((-1, 0, 1), (1.0, -2.0, 1.0)),
    3: ((-2, -1, 1, 2), (-0.5, 1.0, -1.0, 0.5)),
    4: ((-2, -1, 0, 1, 2), (1.0, -4.0, 6.0, -4.0, 1.0)),
}


def central_difference(f, x, k, h):
    offsets, weights = _STENCILS[k]
    acc = 0.0
    for o, w in zip(offsets, weights):
        acc = acc + w * np.asarray(f(x + o * h), dtype=float)
    return acc / h ** k


def richardson(f, x, k=1, h=0.05, levels=3):
    """k-th derivative of f at x by Richardson-extrapolated central differences."""
    table = [central_difference(f, x, k, h / 2 ** j) for j in range(levels)]
    for j in range(1, levels):
        fac = 4.0 ** j
        table = [(fac * table[i + 1] - table[i]) / (fac - 1.0) for i in range(len(table) - 1)]
    return table[0]


def directional(F, uv, w, k, h):
    uv = np.asarray(uv, dtype=float)
    w = np.asarray(w, dtype=float)
    return richardson(lambda s: F(*(uv + s * w)), 0.0, k, h)


def surface_derivatives(F, uv, h1=0.05, h2=0.05):
    """f, (f_u, f_v) and the Hessian [[f_uu, f_uv], [f_uv, f_vv]] of F(u, v)."""
    fu = directional(F, uv, (1, 0), 1, h1)
    fv = directional(F, uv, (0, 1), 1, h1)
    fuu = directional(F, uv, (1, 0), 2, h2)
    fvv = directional(F, uv, (0, 1), 2, h2)
    # polarization avoids nesting differences for the mixed partial
    fuv = (directional(F, uv, (1, 1), 2, h2) - directional(F, uv, (1, -1), 2, h2)) / 4.0
    return np.asarray(F(*uv), dtype=float), (fu, fv), ((fuu, fuv), (fuv, fvv))


def gram(pa, vecs):
    return np.array([[pa.inner(a, b) for b in vecs] for a in vecs])


def normal_projector(pa, p, tangents):
    """Signature-orthogonal projection off the surface tangents and the embedding normal."""
    basis = list(tangents)
    if pa.curved:
        basis.append(pa.m_part(p))
    B = np.array(basis)
    G = gram(pa, basis)
    Ginv = np.linalg.inv(G)

    def proj(x):
        coef = Ginv @ np.array([pa.inner(b, x) for b in basis])
        return x - coef @ B

    return proj


def fd_sigma(spec, uv, **kw):
    """sigma(d_a, d_b) as ambient vectors (2, 2, d) and the tangent vectors f_a."""
    pa = spec.ambient
    p, fa, fab = surface_derivatives(spec.evaluate, uv, **kw)
    proj = normal_projector(pa, p, fa)
    sig = np.array([[proj(fab[a][b]) for b in range(2)] for a in range(2)])
    return sig, np.array(fa)


def fd_mean_curvature(spec, uv, **kw):
    pa = spec.ambient
    sig, fa = fd_sigma(spec, uv, **kw)
    ginv = np.linalg.inv(gram(pa, fa))
    return 0.5 * np.einsum("ab,abd->d", ginv, sig)


def fd_normal_derivative_of_H(spec, uv, h=0.02):
    """nabla-perp_{d_a} H for a = u, v as ambient vectors, by nested differences."""
    pa = spec.ambient
    p, fa, _ = surface_derivatives(spec.evaluate, uv)
    proj = normal_projector(pa, p, fa)
    H = lambda u, v: fd_mean_curvature(spec, (u, v), h1=0.02, h2=0.02)  # noqa: E731
    out = []
    for w in ((1, 0), (0, 1)):
        out.append(proj(directional(H, uv, w, 1, h)))
    return np.array(out), np.array(fa)


def fd_frenet(curve, s, h=0.02):
    """kappa_1 and kappa_2 of a unit-speed curve from differences of its coordinates.

    The covariant derivatives are rebuilt from flat ones: with
    V1 = g', V2 = g'' + c|g'_M|^2 p_M and
    V3 = V2' + c<g'_M, V2_M> p_M, where
    V2' = g''' + c(2<g''_M, g'_M> p_M + |g'_M|^2 g'_M).
    """
    pa = curve.ambient
    c = pa.c
    p = np.asarray(curve(s), dtype=float)
    d1 = richardson(curve, s, 1, h)
    d2 = richardson(curve, s, 2, h)
    d3 = richardson(curve, s, 3, 2 * h)
    pm, m1, m2 = pa.m_part(p), pa.m_part(d1), pa.m_part(d2)
    v1 = d1
    v2 = d2 + c * pa.inner(m1, m1) * pm
    dv2 = d3 + c * (2 * pa.inner(m2, m1) * pm + pa.inner(m1, m1) * m1)
    v3 = dv2 + c * pa.inner(m1, pa.m_part(v2)) * pm
    x1 = v1 / np.sqrt(pa.inner(v1, v1))
    w2 = v2 - pa.inner(v2, x1) * x1
    k1 = np.sqrt(pa.inner(w2, w2))
    x2 = w2 / k1
    w3 = v3 - pa.inner(v3, x1) * x1 - pa.inner(v3, x2) * x2
    k2 = np.sqrt(max(pa.inner(w3, w3), 0.0)) / k1
    return k1, k2


# ---------------------------------------------------------------------------
# exact frame flows
# ---------------------------------------------------------------------------

def exact_flow(data, y0, i, length):
    """Closed-form flow of the frame ODE along E_i for constant data.

    Rows of the state are (p, E_1, ..., E_r).  The M-block columns obey a
    linear system with the space-form term; the xi column does not see it.
    """
    pa = data.ambient
    r = data.rank
    x = data.xi
    C = np.zeros((r + 1, r + 1))
    C[0, 1 + i] = 1.0
    C[1:, 1:] = data.omega_matrix(i)
    K = np.zeros_like(C)
    for a in range(r):
        K[1 + a, 0] = -pa.c * ((i == a) - x[i] * x[a])
    out = np.empty_like(y0)
    out[:, :-1] = expm((C + K) * length) @ y0[:, :-1]
    out[:, -1] = expm(C * length) @ y0[:, -1]
    return out


# ---------------------------------------------------------------------------
# closed-form test surfaces
# ---------------------------------------------------------------------------

def wobbly_surface(c, n, coef=(0.3, -0.2, 0.25, 0.15, 0.1), name="wobbly"):
    """A generic (no symmetry) surface in M^n(c) x R built from trig polynomials."""
    pa = ProductAmbient.of(c, n)
    a1, a2, a3, a4, a5 = coef

    def fn(u, v):
        y = [u, v]
        for k in range(n - 2):
            y.append(a1 * jm.sin(u + (k + 2) * v) + a2 * u * v + 0.1 * k)
        height = a3 * u + a4 * jm.sin(2 * v) + a5 * u * v
        if pa.curved and c > 0:
            r = 1.0 / np.sqrt(c)
            x = [1.0 + 0.0 * u] + y
            norm = jm.sqrt(sum(t * t for t in x))
            coords = [t * (r / norm) for t in x]
        elif pa.curved:
            r = 1.0 / np.sqrt(-c)
            x0 = jm.sqrt(r * r + sum(t * t for t in y))
            coords = [x0] + y
        else:
            coords = y
        return jm.stack(coords + [height], axis=-1)

    return ImmersionSpec(pa, fn, ((-0.6, 0.6), (-0.6, 0.6)), name=name, params={"c": c, "n": n})


def latitude_circle(phi):
    """Unit-speed latitude circle of polar angle phi on S^2(1) x {0}; kappa = cot(phi)."""
    from pmchelix.curve import CurveSpec

    pa = ProductAmbient.of(1.0, 2)
    rho = np.sin(phi)

    def fn(s):
        z = np.cos(phi) + 0.0 * s
        return jm.stack([rho * jm.cos(s / rho), rho * jm.sin(s / rho), z, 0.0 * s], axis=-1)

    return CurveSpec(pa, fn, (0.0, 2 * np.pi * rho), periodic=True, label="latitude")


def loxodrome(alpha):
    """Rhumb line on S^2(1) x {0} at constant heading alpha, by arc length."""
    from pmchelix.curve import CurveSpec

    pa = ProductAmbient.of(1.0, 2)

    def fn(s):
        phi = -0.8 + s * np.cos(alpha)
        sp = jm.sin(phi)
        lam = np.tan(alpha) * 0.5 * (jm.log(1.0 + sp) - jm.log(1.0 - sp))
        return jm.stack([jm.cos(phi) * jm.cos(lam), jm.cos(phi) * jm.sin(lam), sp, 0.0 * s], axis=-1)

    return CurveSpec(pa, fn, (0.0, 1.6 / np.cos(alpha)), label="loxodrome")


def tilted_helix(c, kappa, slope):
    """Circle of curvature kappa in M^2(c) lifted with constant vertical speed.

    Unit speed: horizontal speed sqrt(1 - slope^2).  In the product this is a
    helix with kappa_1 = kappa (1 - slope^2) and kappa_2 = kappa slope sqrt(1 - slope^2).
    """
    from pmchelix.ambient import spaceform_circle
    from pmchelix.curve import CurveSpec

    pa = ProductAmbient.of(c, 2)
    p = pa.base_point()
    base = spaceform_circle(pa, p, pa.axis(1), pa.axis(2), kappa)
    q = np.sqrt(1.0 - slope ** 2)

    def fn(s):
        pts = base.fn(q * s)
        return pts + (slope * s) * pa.xi if not isinstance(s, jm.Jet) else pts + (s * slope).expand(-1) * pa.xi

    return CurveSpec(pa, fn, (0.0, 3.0), label="tilted_helix")
