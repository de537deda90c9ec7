"""Pointwise extrinsic geometry of surfaces immersed in M^n(c) x R.

All derivatives come from jets of the immersion.  A :class:`SurfaceGeometry`
evaluates a whole batch of parameter points at once and keeps the jets of
the adapted frame, the normal frame and the second fundamental form, so that
covariant derivatives of these objects are available to the checks in
:mod:`pmchelix.verify`.

Conventions
-----------
* ``E1 = T/|T|`` when ``|T| > ANGLE_TOL``, otherwise the normalized first
  coordinate field; ``E2`` is ``E1`` rotated by +pi/2 in the tangent plane
  oriented by (d/du, d/dv).
* The angle is stored as ``theta = arccos|T|`` in [0, pi/2].
* Normal frames come from Gram-Schmidt.  Gauge ``"axes"`` pivots over the
  ambient coordinate axes (largest residual first, ties to the lower index);
  gauge ``"adapted"`` starts from H and N and completes with axes, orienting
  the last axis-derived normal so that det(E1, E2, normals, nu) > 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .ambient import ProductAmbient, curvature_tensor
from .curve import CurveSpec
from .errors import DomainError, PreconditionError, RankError
from .jets import Jet, JetShapeError

ANGLE_TOL = 1e-6
RANK_TOL = 1e-8
NORMAL_ORDER = 2


# ---------------------------------------------------------------------------
# immersion specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImmersionSpec:
    """A parametric surface (u, v) -> R^d lying in M^n(c) x R.

    ``fn(u, v)`` must accept floats, arrays or 2-variable jets and return
    ambient coordinates with the vector axis last.
    """

    ambient: ProductAmbient
    fn: Callable
    domain: tuple
    periodic: tuple = (False, False)
    kind: str = "closed-form"
    name: str = ""
    params: dict = field(default_factory=dict)
    probe_nodes: tuple | None = None

    def _check_domain(self, u, v):
        for k, (x, (lo, hi)) in enumerate(zip((u, v), self.domain)):
            if self.periodic[k]:
                continue
            val = np.asarray(x.value if isinstance(x, Jet) else x)
            slack = 1e-9 * max(1.0, hi - lo)
            if np.any(val < lo - slack) or np.any(val > hi + slack):
                raise DomainError(f"parameter {'uv'[k]} outside [{lo}, {hi}]")

    def evaluate(self, u, v):
        self._check_domain(u, v)
        return self.fn(u, v)

    def __call__(self, u, v):
        return self.evaluate(u, v)

    def jets(self, uv, order: int = 4) -> Jet:
        """Jets of every ambient coordinate at the points ``uv`` (shape ``(..., 2)``)."""
        uv = np.asarray(uv, dtype=float)
        u, v = Jet.variables((uv[..., 0], uv[..., 1]), order)
        out = self.evaluate(u, v)
        if not isinstance(out, Jet):
            out = Jet.constant(np.broadcast_to(out, uv.shape[:-1] + (self.ambient.d,)), 2, order)
        return out

    def probe_grid(self, nu: int, nv: int) -> np.ndarray:
        """Probe points, shape (nu, nv, 2); sampled specs probe at grid nodes."""
        axes = []
        for k, count in enumerate((nu, nv)):
            if self.probe_nodes is not None:
                nodes = np.asarray(self.probe_nodes[k])
                if len(nodes) < count:
                    raise PreconditionError(
                        f"sampled grid has {len(nodes)} interior nodes along {'uv'[k]}, {count} requested"
                    )
                pick = np.unique(np.round(np.linspace(0, len(nodes) - 1, count)).astype(int))
                axes.append(nodes[pick])
            else:
                lo, hi = self.domain[k]
                axes.append(np.linspace(lo, hi, count, endpoint=not self.periodic[k]))
        uu, vv = np.meshgrid(axes[0], axes[1], indexing="ij")
        return np.stack([uu, vv], axis=-1)

    def reparametrized(self, scale=(1.0, 1.0), shift=(0.0, 0.0), swap: bool = False) -> "ImmersionSpec":
        """Compose with the affine map (u', v') -> (scale * (u', v') + shift), optionally swapped.

        The new parameters map to old ones by ``old_k = scale_k * new_k + shift_k``
        with ``k`` permuted when ``swap`` is set.
        """
        su, sv = (float(s) for s in scale)
        bu, bv = (float(b) for b in shift)
        if su == 0 or sv == 0:
            raise PreconditionError("reparametrization must be invertible")
        order = (1, 0) if swap else (0, 1)
        inner = self.fn

        def fn(u, v):
            new = (u, v)
            old0 = new[order[0]] * su + bu
            old1 = new[order[1]] * sv + bv
            return inner(old0, old1)

        def back(k_old, vals, s, b):
            return (np.asarray(vals) - b) / s

        old_dom = self.domain
        dom_old0 = sorted(back(0, old_dom[0], su, bu))
        dom_old1 = sorted(back(1, old_dom[1], sv, bv))
        domain = [None, None]
        periodic = [False, False]
        domain[order[0]] = tuple(dom_old0)
        domain[order[1]] = tuple(dom_old1)
        periodic[order[0]] = self.periodic[0]
        periodic[order[1]] = self.periodic[1]
        probe = None
        if self.probe_nodes is not None:
            nodes = [None, None]
            nodes[order[0]] = np.sort(back(0, self.probe_nodes[0], su, bu))
            nodes[order[1]] = np.sort(back(1, self.probe_nodes[1], sv, bv))
            probe = tuple(nodes)
        return ImmersionSpec(self.ambient, fn, tuple(domain), tuple(periodic), self.kind,
                             self.name, dict(self.params), probe)

    def coordinate_curve(self, direction: str, at: float) -> CurveSpec:
        """The curve s -> f(s, at) (direction 'u') or s -> f(at, s) (direction 'v')."""
        k = {"u": 0, "v": 1, "s": 0, "t": 1}[direction]

        def fn(s):
            other = at
            if isinstance(s, Jet):
                other = Jet.constant(np.broadcast_to(at, s.batch_shape), s.nvars, s.order)
            return self.evaluate(s, other) if k == 0 else self.evaluate(other, s)

        interval = self.domain[k]
        if self.probe_nodes is not None:
            nodes = self.probe_nodes[k]
            interval = (float(nodes[0]), float(nodes[-1]))
        return CurveSpec(self.ambient, fn, tuple(interval), arc_length=True,
                         periodic=self.periodic[k], label=f"{self.name}:{direction}-curve",
                         params={"direction": direction, "at": at})


class GridInterpolant:
    """Tensor-product Lagrange interpolation of a uniform grid of ambient points.

    Each evaluation uses the ``degree + 1`` nodes nearest the point in each
    direction (centered where the grid allows), so jets of the local
    interpolating polynomial are returned exactly.
    """

    def __init__(self, values, origin, spacing, degree: int = 8):
        values = np.asarray(values, dtype=float)
        if degree % 2 or degree < 2:
            raise PreconditionError("interpolation degree must be even and >= 2")
        if min(values.shape[:2]) < degree + 1:
            raise PreconditionError("grid too small for the interpolation stencil")
        self.values = values
        self.origin = tuple(float(x) for x in origin)
        self.spacing = tuple(float(h) for h in spacing)
        self.degree = degree
        half = degree // 2
        self.offsets = np.arange(-half, half + 1)
        weights = []
        for k in self.offsets:
            others = self.offsets[self.offsets != k]
            weights.append(1.0 / np.prod(k - others))
        self.weights = np.array(weights)

    @property
    def shape(self):
        return self.values.shape[:2]

    def nodes(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis])

    def interior_nodes(self, axis: int) -> np.ndarray:
        half = self.degree // 2
        return self.nodes(axis)[half:self.shape[axis] - half]

    def _basis(self, y: Jet) -> Jet:
        factors = [y - float(j) for j in self.offsets]
        basis = []
        for k in range(len(self.offsets)):
            prod = None
            for j, fac in enumerate(factors):
                if j == k:
                    continue
                prod = fac if prod is None else prod * fac
            basis.append(prod * self.weights[k])
        return Jet.stack(basis, axis=-1)

    def _locate(self, x: Jet, axis: int):
        n = self.shape[axis]
        half = self.degree // 2
        idx = np.clip(np.rint(x.value), half, n - 1 - half).astype(int)
        return idx, x - idx.astype(float)

    def __call__(self, u, v):
        plain = not isinstance(u, Jet) and not isinstance(v, Jet)
        if plain:
            u = Jet.constant(u, 1, 0)
            v = Jet.constant(v, 1, 0)
        elif not isinstance(u, Jet):
            u = Jet.constant(np.broadcast_to(u, v.batch_shape), v.nvars, v.order)
        elif not isinstance(v, Jet):
            v = Jet.constant(np.broadcast_to(v, u.batch_shape), u.nvars, u.order)
        shape = np.broadcast_shapes(u.batch_shape, v.batch_shape)
        u = u + np.zeros(shape)
        v = v + np.zeros(shape)
        xu = (u - self.origin[0]) / self.spacing[0]
        xv = (v - self.origin[1]) / self.spacing[1]
        for k, x in enumerate((xu, xv)):
            if np.any(x.value < -1e-9) or np.any(x.value > self.shape[k] - 1 + 1e-9):
                raise DomainError("point outside the sampled grid")
        iu, yu = self._locate(xu, 0)
        iv, yv = self._locate(xv, 1)
        lu = self._basis(yu)
        lv = self._basis(yv)
        rows = iu[..., None, None] + self.offsets[:, None]
        cols = iv[..., None, None] + self.offsets[None, :]
        window = self.values[rows, cols]
        partial = np.einsum("k...l,...jld->k...jd", lv.coeffs, window)
        out = (lu.expand(-1) * Jet(partial, lu.nvars, lu.order)).sum(-2)
        return out.value if plain else out


def sampled_spec(ambient: ProductAmbient, values, origin, spacing, degree: int = 8,
                 name: str = "sampled", params: dict | None = None) -> ImmersionSpec:
    interp = GridInterpolant(values, origin, spacing, degree)
    nu, nv = interp.shape
    domain = ((interp.origin[0], interp.origin[0] + (nu - 1) * interp.spacing[0]),
              (interp.origin[1], interp.origin[1] + (nv - 1) * interp.spacing[1]))
    meta = {"interpolation_degree": degree}
    meta.update(params or {})
    return ImmersionSpec(ambient, interp, domain, (False, False), "sampled", name, meta,
                         (interp.interior_nodes(0), interp.interior_nodes(1)))


def surface_jets(spec: ImmersionSpec, uv, order: int = 4) -> Jet:
    if order > 4:
        raise JetShapeError("jet order is capped at 4")
    return spec.jets(uv, order)


# ---------------------------------------------------------------------------
# batched geometry
# ---------------------------------------------------------------------------

def _vec(scalar: Jet, vector):
    return scalar.expand(-1) * vector


class SurfaceGeometry:
    """Jets of the adapted frame, normal frame and second fundamental form.

    ``uv`` is an array of parameter points of shape ``(P, 2)``.  Frame jets
    have order 3, normal-bundle jets order 2; derived quantities are exposed
    as values (arrays with leading axis P) unless named ``*_jet``.
    """

    def __init__(self, spec: ImmersionSpec, uv, gauge: str = "axes", order: int = 4):
        if gauge not in ("axes", "adapted"):
            raise ValueError(f"unknown gauge {gauge!r}")
        self.spec = spec
        self.pa = pa = spec.ambient
        self.gauge = gauge
        self.uv = uv = np.atleast_2d(np.asarray(uv, dtype=float))
        f = spec.jets(uv, order)
        self.point = f.value
        q = order - 1
        fa = [f.diff(0), f.diff(1)]
        self.fa = fa
        self.p = f.truncate(q)
        g = [[pa.inner(fa[a], fa[b]) for b in range(2)] for a in range(2)]
        g[1][0] = g[0][1]
        self.g_jet = g
        gval = np.stack([np.stack([g[a][b].value for b in range(2)], -1) for a in range(2)], -2)
        self.g = gval
        eig_min = np.linalg.eigvalsh(gval)[..., 0]
        if np.any(eig_min < RANK_TOL):
            worst = int(np.argmin(eig_min))
            raise RankError(f"degenerate metric at uv={uv[worst].tolist()} (min eigenvalue {eig_min[worst]:.3g})")
        det = g[0][0] * g[1][1] - g[0][1] * g[0][1]
        self.det_jet = det
        idet = det.reciprocal()
        ginv = [[g[1][1] * idet, -g[0][1] * idet], [-g[0][1] * idet, g[0][0] * idet]]
        self.ginv_jet = ginv

        # T = tangent part of xi, in coordinates
        xi_b = [pa.xi_component(fa[b]) for b in range(2)]
        tcoef = [ginv[a][0] * xi_b[0] + ginv[a][1] * xi_b[1] for a in range(2)]
        tn2 = tcoef[0] * xi_b[0] + tcoef[1] * xi_b[1]
        self.T_jet = _vec(tcoef[0], fa[0]) + _vec(tcoef[1], fa[1])
        self.tn2_jet = tn2
        self.tnorm = np.sqrt(np.clip(tn2.value, 0.0, None))
        self.N_jet = self.T_jet * -1.0 + pa.xi

        # adapted tangent frame
        use_t = self.tnorm > ANGLE_TOL
        one = Jet.constant(np.ones(tn2.batch_shape), 2, q)
        tinv = tn2.where(use_t, one).sqrt().reciprocal()
        e1_t = [tcoef[0] * tinv, tcoef[1] * tinv]
        ginv00 = g[0][0].where(~use_t, one).sqrt().reciprocal()
        e1_u = [ginv00, one * 0.0]
        e1 = [e1_t[a].where(use_t, e1_u[a]) for a in range(2)]
        sq = det.sqrt().reciprocal()
        e2 = [-(g[0][1] * e1[0] + g[1][1] * e1[1]) * sq, (g[0][0] * e1[0] + g[0][1] * e1[1]) * sq]
        self.ecoef = [e1, e2]
        self.E_jet = [_vec(e[0], fa[0]) + _vec(e[1], fa[1]) for e in self.ecoef]
        self.E = np.stack([E.value for E in self.E_jet], axis=-2)

        # second fundamental form in coordinates, as normal-projected vectors
        r = NORMAL_ORDER
        fab = [[fa[a].diff(b) for b in range(2)] for a in range(2)]
        fa_r = [x.truncate(r) for x in fa]
        ginv_r = [[x.truncate(r) for x in row] for row in ginv]
        p_r = self.p.truncate(r)
        self._fa_r, self._ginv_r, self._p_r = fa_r, ginv_r, p_r
        sig_ab = [[self._normal_part(fab[a][b]) for b in range(2)] for a in range(2)]
        ec_r = [[x.truncate(r) for x in e] for e in self.ecoef]
        self._ec_r = ec_r
        sigma = [[None, None], [None, None]]
        for i in range(2):
            for j in range(2):
                acc = None
                for a in range(2):
                    for b in range(2):
                        term = _vec(ec_r[i][a] * ec_r[j][b], sig_ab[a][b])
                        acc = term if acc is None else acc + term
                sigma[i][j] = acc
        self.sigma_jet = sigma
        self.H_jet = (sigma[0][0] + sigma[1][1]) * 0.5
        self.sigma = np.stack([np.stack([sigma[i][j].value for j in range(2)], -2) for i in range(2)], -3)
        self.H = self.H_jet.value

        self.codim = pa.d - 1 - 2 if pa.curved else pa.d - 2
        self.normal_jet = self._normal_frame()
        self.normals = np.stack([nj.value for nj in self.normal_jet], axis=-2) if self.codim else np.zeros(uv.shape[:-1] + (0, pa.d))

    # -- helpers ------------------------------------------------------------
    def _normal_part(self, w: Jet) -> Jet:
        """Component of w normal to the surface inside T(M x R) (order NORMAL_ORDER)."""
        pa = self.pa
        w = w.truncate(NORMAL_ORDER)
        fa, ginv, p = self._fa_r, self._ginv_r, self._p_r
        wa = [pa.inner(w, fa[a]) for a in range(2)]
        out = w
        for a in range(2):
            coef = ginv[a][0] * wa[0] + ginv[a][1] * wa[1]
            out = out - _vec(coef, fa[a])
        if pa.curved:
            pm = pa.m_part(p)
            out = out - _vec(pa.inner(w, pm) * pa.c, pm)
        return out

    def derivative(self, scalar: Jet, i: int) -> Jet:
        """Directional derivative E_i(scalar), one order lower."""
        da = [scalar.diff(0), scalar.diff(1)]
        k = da[0].order
        return self.ecoef[i][0].truncate(k) * da[0] + self.ecoef[i][1].truncate(k) * da[1]

    def _normal_frame(self) -> list:
        pa = self.pa
        m = self.codim
        if m == 0:
            return []
        P = self.uv.shape[0]
        r = NORMAL_ORDER
        axes = [Jet.constant(np.broadcast_to(pa.axis(k), (P, pa.d)), 2, r) for k in range(pa.d)]
        cands = list(axes)
        n_pref = 0
        if self.gauge == "adapted":
            cands = [self.H_jet, self.N_jet.truncate(r)] + axes
            n_pref = 2
        projected = [self._normal_part(cj) for cj in cands]
        resid = np.stack([w.value for w in projected], axis=1)  # (P, nc, d)
        nc = resid.shape[1]
        chosen = np.zeros((P, m), dtype=int)
        available = np.ones((P, nc), dtype=bool)
        rows = np.arange(P)
        for step in range(m):
            norms = np.sqrt(np.clip(pa.inner(resid, resid), 0.0, None))
            # preferred candidates are taken in order while they are well defined
            available[:, :n_pref] &= norms[:, :n_pref] > 1e-6
            pick = np.full(P, -1)
            for k in range(n_pref - 1, -1, -1):
                pick = np.where(available[:, k], k, pick)
            axis_norms = np.where(available, norms, -1.0)
            axis_norms[:, :n_pref] = -1.0
            pick = np.where(pick < 0, np.argmax(axis_norms, axis=1), pick)
            chosen[:, step] = pick
            available[rows, pick] = False
            nvec = resid[rows, pick]
            nn = np.sqrt(np.clip(pa.inner(nvec, nvec), 0.0, None))
            if np.any(nn < 1e-8):
                raise RankError("could not complete the normal frame")
            nvec = nvec / nn[:, None]
            resid = resid - pa.inner(resid, nvec[:, None, :])[..., None] * nvec[:, None, :]
        # jet Gram-Schmidt in the chosen order
        stacked = Jet.stack(projected, axis=1)  # (P, nc, d)
        coeffs = np.take_along_axis(stacked.coeffs, chosen[None, :, :, None], axis=2)
        ordered = Jet(coeffs, 2, r)
        frame = []
        for k in range(m):
            w = ordered[:, k, :]
            for nj in frame:
                w = w - _vec(pa.inner(w, nj), nj)
            w = _vec(pa.inner(w, w).sqrt().reciprocal(), w)
            frame.append(w)
        if self.gauge == "adapted" and pa.curved:
            last_from_axis = chosen[:, -1] >= n_pref
            mats = [self.E[..., 0, :], self.E[..., 1, :]] + [fj.value for fj in frame]
            nu = pa.m_part(self.point)
            mats.append(nu / np.linalg.norm(nu, axis=-1, keepdims=True))
            det = np.linalg.det(np.stack(mats, axis=-2))
            sign = np.where(last_from_axis & (det < 0), -1.0, 1.0)
            frame[-1] = frame[-1] * sign[:, None]
        return frame

    # -- derived jets -------------------------------------------------------
    @cached_property
    def dE_jet(self):
        """Coordinate derivatives d_a E_j (order 2)."""
        return [[self.E_jet[j].diff(a) for a in range(2)] for j in range(2)]

    @cached_property
    def gamma_jet(self):
        """Gamma[i][j][k] = <nabla_{E_i} E_j, E_k> (order 2)."""
        pa = self.pa
        E2 = [E.truncate(2) for E in self.E_jet]
        ec = [[x.truncate(2) for x in e] for e in self.ecoef]
        out = [[[None] * 2 for _ in range(2)] for _ in range(2)]
        for i in range(2):
            for j in range(2):
                dE = _vec(ec[i][0], self.dE_jet[j][0]) + _vec(ec[i][1], self.dE_jet[j][1])
                for k in range(2):
                    out[i][j][k] = pa.inner(dE, E2[k])
        return out

    @property
    def gamma(self) -> np.ndarray:
        G = self.gamma_jet
        return np.stack([np.stack([np.stack([G[i][j][k].value for k in range(2)], -1)
                                   for j in range(2)], -2) for i in range(2)], -3)

    @cached_property
    def sigma_comp_jet(self):
        """sigma^alpha_ij = <sigma(E_i, E_j), n_alpha> (order 2)."""
        pa = self.pa
        return [[[pa.inner(self.sigma_jet[i][j], n) for j in range(2)] for i in range(2)]
                for n in self.normal_jet]

    @property
    def shape_operators(self) -> np.ndarray:
        """A[..., alpha, i, j] in the adapted frame and current normal gauge."""
        if not self.codim:
            return np.zeros(self.uv.shape[:-1] + (0, 2, 2))
        S = self.sigma_comp_jet
        return np.stack([np.stack([np.stack([S[a][i][j].value for j in range(2)], -1)
                                   for i in range(2)], -2) for a in range(self.codim)], -3)

    @cached_property
    def H_comp_jet(self):
        pa = self.pa
        return [pa.inner(self.H_jet, n) for n in self.normal_jet]

    @cached_property
    def omega_jet(self):
        """omega[i][alpha][beta] = <nabla-perp_{E_i} n_alpha, n_beta> (order 1)."""
        pa = self.pa
        m = self.codim
        ec = [[x.truncate(1) for x in e] for e in self.ecoef]
        n1 = [n.truncate(1) for n in self.normal_jet]
        dn = [[n.diff(a) for a in range(2)] for n in self.normal_jet]
        out = [[[None] * m for _ in range(m)] for _ in range(2)]
        for i in range(2):
            for a in range(m):
                dir_d = _vec(ec[i][0], dn[a][0]) + _vec(ec[i][1], dn[a][1])
                for b in range(m):
                    out[i][a][b] = pa.inner(dir_d, n1[b])
        return out

    @property
    def omega(self) -> np.ndarray:
        m = self.codim
        W = self.omega_jet
        P = self.uv.shape[0]
        out = np.zeros((P, 2, m, m))
        for i in range(2):
            for a in range(m):
                for b in range(m):
                    out[:, i, a, b] = W[i][a][b].value
        return out

    def normal_derivative(self, comps: list, i: int) -> np.ndarray:
        """Components of nabla-perp_{E_i} V for V = sum comps[alpha] n_alpha (values)."""
        m = self.codim
        W = self.omega
        out = np.zeros((self.uv.shape[0], m))
        for b in range(m):
            out[:, b] = self.derivative(comps[b], i).value
            for a in range(m):
                out[:, b] += comps[a].value * W[:, i, a, b]
        return out

    # -- scalar quantities --------------------------------------------------
    @property
    def T(self) -> np.ndarray:
        return self.T_jet.value

    @property
    def N(self) -> np.ndarray:
        return self.N_jet.value

    @property
    def theta(self) -> np.ndarray:
        return np.arccos(np.clip(self.tnorm, 0.0, 1.0))

    @property
    def hnorm(self) -> np.ndarray:
        return np.sqrt(np.clip(self.pa.inner(self.H, self.H), 0.0, None))

    @cached_property
    def lambda_jet(self):
        """lambda_i = <A_H E_i, E_i> = <sigma(E_i, E_i), H> (order 2)."""
        pa = self.pa
        return [pa.inner(self.sigma_jet[i][i], self.H_jet) for i in range(2)]

    @cached_property
    def hn_jet(self) -> Jet:
        return self.pa.inner(self.H_jet, self.N_jet.truncate(NORMAL_ORDER))

    @cached_property
    def K_jet(self) -> Jet:
        """Gaussian curvature from the metric alone (Brioschi formula), order 1."""
        g = self.g_jet
        E, F, G = g[0][0], g[0][1], g[1][1]
        Eu, Ev = E.diff(0), E.diff(1)
        Fu, Fv = F.diff(0), F.diff(1)
        Gu, Gv = G.diff(0), G.diff(1)
        Evv, Fuv, Guu = Ev.diff(1), Fu.diff(1), Gu.diff(0)
        t = lambda x: x.truncate(1)  # noqa: E731
        E, F, G = t(E), t(F), t(G)
        Eu, Ev, Fu, Fv, Gu, Gv = (t(x) for x in (Eu, Ev, Fu, Fv, Gu, Gv))
        a11 = Evv * -0.5 + Fuv - Guu * 0.5
        a12, a13 = Eu * 0.5, Fu - Ev * 0.5
        a21, a31 = Fv - Gu * 0.5, Gv * 0.5
        det1 = _det3(a11, a12, a13, a21, E, F, a31, F, G)
        zero = E * 0.0
        det2 = _det3(zero, Ev * 0.5, Gu * 0.5, Ev * 0.5, E, F, Gu * 0.5, F, G)
        dg = E * G - F * F
        return (det1 - det2) * (dg * dg).reciprocal()

    @property
    def K(self) -> np.ndarray:
        return self.K_jet.value

    def laplacian(self, phi: Jet) -> np.ndarray:
        """Laplace-Beltrami (div grad) of a scalar jet, values."""
        g = self.g_jet
        k = phi.order - 1
        dphi = [phi.diff(0), phi.diff(1)]
        sq = self.det_jet.sqrt().truncate(k)
        ginv = [[x.truncate(k) for x in row] for row in self.ginv_jet]
        flux = [sq * (ginv[a][0] * dphi[0] + ginv[a][1] * dphi[1]) for a in range(2)]
        div = flux[0].diff(0) + flux[1].diff(1)
        return div.value / np.sqrt(self.det_jet.value)

    def curvature(self, X, Y, Z) -> np.ndarray:
        return curvature_tensor(self.pa, self.point, X, Y, Z, check=False)


def _det3(a11, a12, a13, a21, a22, a23, a31, a32, a33):
    return (a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31)
            + a13 * (a21 * a32 - a22 * a31))


# ---------------------------------------------------------------------------
# single-point API
# ---------------------------------------------------------------------------

@dataclass
class FundamentalData:
    uv: np.ndarray
    point: np.ndarray
    g: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    normals: np.ndarray
    sigma: np.ndarray
    H: np.ndarray
    A: np.ndarray
    T: np.ndarray
    N: np.ndarray
    theta: float
    lambda1: float
    lambda2: float

    @property
    def tnorm(self) -> float:
        return float(np.cos(self.theta))


def _single(uv):
    uv = np.asarray(uv, dtype=float)
    if uv.shape != (2,):
        raise PreconditionError("uv must be a single parameter point (u, v)")
    return uv[None, :]


def fundamental_data(spec: ImmersionSpec, uv, gauge: str = "axes") -> FundamentalData:
    geo = SurfaceGeometry(spec, _single(uv), gauge=gauge)
    lam = geo.lambda_jet
    return FundamentalData(
        uv=np.asarray(uv, dtype=float), point=geo.point[0], g=geo.g[0],
        E1=geo.E[0, 0], E2=geo.E[0, 1], normals=geo.normals[0], sigma=geo.sigma[0],
        H=geo.H[0], A=geo.shape_operators[0], T=geo.T[0], N=geo.N[0],
        theta=float(geo.theta[0]), lambda1=float(lam[0].value[0]), lambda2=float(lam[1].value[0]),
    )


def normal_connection(spec: ImmersionSpec, uv, X: int, V: int, gauge: str = "axes") -> np.ndarray:
    """nabla-perp_{E_X} n_V as an ambient vector (X in {1, 2}, V indexes the normal frame from 0)."""
    geo = SurfaceGeometry(spec, _single(uv), gauge=gauge)
    if X not in (1, 2) or not 0 <= V < geo.codim:
        raise PreconditionError("tangent index must be 1 or 2 and normal index within the frame")
    W = geo.omega[0]
    return np.einsum("b,bd->d", W[X - 1, V], geo.normals[0])


def xi_decomposition(spec: ImmersionSpec, uv):
    geo = SurfaceGeometry(spec, _single(uv))
    return geo.T[0], geo.N[0], float(geo.theta[0])
