"""Space forms M^n(c) and the products M^n(c) x R in their standard embeddings.

The sphere of curvature c > 0 sits in Euclidean R^{n+1} with radius 1/sqrt(c);
hyperbolic space of curvature c < 0 is the upper sheet of <x, x> = 1/c in
Minkowski R^{n+1} with signature (-, +, ..., +); the flat case is R^n.  The
product appends one Euclidean coordinate for the R factor, so ambient vectors
are arrays (or jets) whose last axis has length ``d``.

Every helper that only needs inner products works unchanged on jets, which
is how the surface module differentiates frames.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import BaseMismatchError, PreconditionError, UnsupportedCurveError
from .jets import Jet

TANGENT_TOL = 1e-10


@dataclass(frozen=True)
class SpaceForm:
    c: float
    n: int

    def __post_init__(self):
        if not 2 <= self.n <= 4:
            raise PreconditionError(f"space form dimension must be in [2, 4], got {self.n}")

    @property
    def model(self) -> str:
        if self.c > 0:
            return "sphere"
        if self.c < 0:
            return "hyperboloid"
        return "flat"

    @property
    def radius(self) -> float:
        return float("inf") if self.c == 0 else 1.0 / sqrt(abs(self.c))


@dataclass(frozen=True)
class ProductAmbient:
    """M^n(c) x R embedded in R^d; the last coordinate is the R factor."""

    sf: SpaceForm
    eta: np.ndarray = field(init=False, repr=False, compare=False)
    m_mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m_dim = self.sf.n if self.sf.c == 0 else self.sf.n + 1
        eta = np.ones(m_dim + 1)
        if self.sf.c < 0:
            eta[0] = -1.0
        mask = np.ones(m_dim + 1)
        mask[-1] = 0.0
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "m_mask", mask)

    @classmethod
    def of(cls, c: float, n: int) -> "ProductAmbient":
        return cls(SpaceForm(float(c), int(n)))

    @property
    def c(self) -> float:
        return self.sf.c

    @property
    def n(self) -> int:
        return self.sf.n

    @property
    def d(self) -> int:
        return len(self.eta)

    @property
    def m_dim(self) -> int:
        return self.d - 1

    @property
    def curved(self) -> bool:
        return self.sf.c != 0

    @property
    def xi(self) -> np.ndarray:
        e = np.zeros(self.d)
        e[-1] = 1.0
        return e

    def axis(self, k: int) -> np.ndarray:
        e = np.zeros(self.d)
        e[k] = 1.0
        return e

    def base_point(self, height: float = 0.0) -> np.ndarray:
        """Canonical point (r, 0, ..., 0; height), or the origin in the flat case."""
        p = np.zeros(self.d)
        if self.curved:
            p[0] = self.sf.radius
        p[-1] = height
        return p

    # -- vectorised primitives (arrays or jets, vector axis last) ---------
    def inner(self, u, v):
        """Signature-weighted dot product along the last axis."""
        if isinstance(u, Jet) or isinstance(v, Jet):
            prod = u * v if isinstance(u, Jet) else v * u
            return (prod * self.eta).sum(-1)
        return np.sum(np.asarray(u) * np.asarray(v) * self.eta, axis=-1)

    def m_part(self, x):
        """Project onto the M-factor block (zero out the R coordinate)."""
        return x * self.m_mask

    def xi_component(self, x):
        return x[..., -1]

    def normal_of_embedding(self, p):
        """Normal of M^n(c) in its linear model space, scaled so <nu, nu> = 1/c."""
        return self.m_part(p)

    def project(self, p, w):
        """Tangent projection at p, usable on jets (no precondition checks)."""
        if not self.curved:
            return w
        pm = self.m_part(p)
        coef = self.inner(w, pm) * self.c
        if isinstance(coef, Jet):
            return w - coef.expand(-1) * pm
        return w - np.asarray(coef)[..., None] * pm


@dataclass(frozen=True)
class AmbientVector:
    """An ambient vector attached to a base point."""

    coords: np.ndarray
    base: np.ndarray | None = None


def _coords(x):
    if isinstance(x, AmbientVector):
        return np.asarray(x.coords, dtype=float)
    return np.asarray(x, dtype=float)


def _base(x):
    return x.base if isinstance(x, AmbientVector) else None


def metric_inner(pa: ProductAmbient, u, v) -> float:
    """Signature-weighted inner product of two ambient vectors at a common base."""
    bu, bv = _base(u), _base(v)
    if bu is not None and bv is not None and not np.array_equal(np.asarray(bu), np.asarray(bv)):
        raise BaseMismatchError("vectors are attached to different base points")
    return pa.inner(_coords(u), _coords(v))


def on_manifold_residual(pa: ProductAmbient, p) -> float | np.ndarray:
    p = _coords(p)
    if not pa.curved:
        return np.zeros(p.shape[:-1]) if p.ndim > 1 else 0.0
    pm = pa.m_part(p)
    res = np.abs(pa.inner(pm, pm) - 1.0 / pa.c)
    if pa.c < 0:
        res = np.where(p[..., 0] > 0, res, np.inf)
    return res if np.ndim(res) else float(res)


def _require_on_manifold(pa, p, tol=1e-8):
    if np.max(on_manifold_residual(pa, p)) > tol:
        raise PreconditionError("base point is not on M^n(c) x R")


def _require_tangent(pa, p, *vectors, tol=TANGENT_TOL):
    if not pa.curved:
        return
    pm = pa.m_part(p)
    scale = 1.0 / sqrt(abs(pa.c))
    for w in vectors:
        w = _coords(w)
        if np.max(np.abs(pa.inner(w, pm))) > tol * scale * max(1.0, float(np.max(np.abs(w)))):
            raise PreconditionError("vector is not tangent to M^n(c) x R at the base point")


def tangent_project(pa: ProductAmbient, p, w) -> AmbientVector:
    """Remove the component of w along the embedding normal of M^n(c) at p."""
    p = _coords(p)
    _require_on_manifold(pa, p)
    return AmbientVector(pa.project(p, _coords(w)), p)


def levi_civita_correction(pa: ProductAmbient, p, X, dY, Y, check: bool = True) -> AmbientVector:
    """Turn the flat derivative D_X Y into the product connection of M^n(c) x R.

    ``dY`` is the coordinate derivative of the field Y along X; the result is
    ``D_X Y + c <X_M, Y_M> p_M``, tangent to the product when X and Y are.
    """
    p, X, dY, Y = _coords(p), _coords(X), _coords(dY), _coords(Y)
    if check:
        _require_tangent(pa, p, X, Y)
    if not pa.curved:
        return AmbientVector(dY, p)
    coef = pa.c * pa.inner(pa.m_part(X), pa.m_part(Y))
    return AmbientVector(dY + np.asarray(coef)[..., None] * pa.m_part(p), p)


def curvature_tensor(pa: ProductAmbient, p, X, Y, Z, check: bool = True) -> np.ndarray:
    """R(X, Y)Z of M^n(c) x R, written in terms of the unit vertical field."""
    X, Y, Z = _coords(X), _coords(Y), _coords(Z)
    if check:
        _require_tangent(pa, _coords(p), X, Y, Z)
    xi = pa.xi
    ip = pa.inner
    yz, xz = ip(Y, Z), ip(X, Z)
    xx, yx, zx = ip(X, xi), ip(Y, xi), ip(Z, xi)

    def col(s):
        return np.asarray(s)[..., None]

    out = (col(yz) * X - col(xz) * Y - col(yx * zx) * X + col(xx * zx) * Y
           + col(xz * yx) * xi - col(yz * xx) * xi)
    return pa.c * out


def curvature_form(pa: ProductAmbient, X, Y, Z, W) -> np.ndarray:
    """<R(X,Y)Z, W> from the horizontal projections d(pi)X = X - <X, xi> xi."""
    X, Y, Z, W = (_coords(v) for v in (X, Y, Z, W))
    xi = pa.xi

    def horiz(v):
        return v - pa.inner(v, xi)[..., None] * xi

    hx, hy, hz, hw = horiz(X), horiz(Y), horiz(Z), horiz(W)
    ip = pa.inner
    return pa.c * (ip(hy, hz) * ip(hx, hw) - ip(hx, hz) * ip(hy, hw))


def spaceform_circle(space, p, u1, u2, kappa: float):
    """Unit-speed circle of curvature ``kappa`` in M^n(c) x {height of p}.

    Starts at p with velocity u1 and principal normal u2.  With
    ``a = kappa u2 - c p_M`` and ``w^2 = kappa^2 + c`` the curve is
    ``p + sin(w s)/w u1 + (1 - cos(w s))/w^2 a``.
    """
    from .curve import CurveSpec
    from . import jets as jm

    pa = space if isinstance(space, ProductAmbient) else ProductAmbient(space)
    p = _coords(p)
    if p.shape[-1] == pa.m_dim:
        p = np.append(p, 0.0)
    u1, u2 = _coords(u1), _coords(u2)
    if u1.shape[-1] == pa.m_dim:
        u1, u2 = np.append(u1, 0.0), np.append(u2, 0.0)
    if kappa < 0:
        raise PreconditionError("circle curvature must be non-negative")
    _require_on_manifold(pa, p)
    _require_tangent(pa, p, u1, u2)
    if abs(u1[-1]) > TANGENT_TOL or abs(u2[-1]) > TANGENT_TOL:
        raise PreconditionError("circle directions must be tangent to the M factor")
    gram = np.array([[pa.inner(u1, u1), pa.inner(u1, u2)], [pa.inner(u2, u1), pa.inner(u2, u2)]])
    if np.max(np.abs(gram - np.eye(2))) > 1e-10:
        raise PreconditionError("u1, u2 must be orthonormal")
    c = pa.c
    if c < 0 and kappa ** 2 <= -c:
        raise UnsupportedCurveError(
            f"kappa^2 = {kappa ** 2:g} <= |c| = {-c:g}: horocycle or equidistant, not a circle"
        )
    w2 = kappa ** 2 + c
    a = kappa * u2 - c * pa.m_part(p)
    if w2 <= 0:
        # flat space, kappa = 0: a straight line
        return CurveSpec(pa, _affine_curve(p, u1), (-1.0, 1.0), arc_length=True,
                         label="spaceform_circle", params={"kappa": kappa})
    w = sqrt(w2)

    def fn(s):
        sw = jm.sin(s * w) / w
        cw = (1.0 - jm.cos(s * w)) / w2
        return _combine(p, [(sw, u1), (cw, a)])

    period = 2 * np.pi / w
    return CurveSpec(pa, fn, (0.0, period), arc_length=True, periodic=True,
                     label="spaceform_circle", params={"kappa": kappa})


def _combine(p, terms):
    """p + sum_k f_k * v_k for scalar arrays or jets f_k and fixed vectors v_k."""
    out = None
    for f, v in terms:
        if isinstance(f, Jet):
            term = f.expand(-1) * v
        else:
            term = np.asarray(f)[..., None] * v
        out = term if out is None else out + term
    return out + p


def _affine_curve(p, u):
    def fn(s):
        return _combine(p, [(s, u)])

    return fn
