"""Construction of the gallery surfaces.

Closed-form families are written directly; surfaces known only through their
shape operators and connection coefficients are recovered by integrating the
moving-frame equations in the ambient coordinates.

For constant data the frame obeys, along E_i,

    p' = E_i,   E_a' = sum_b Omega_i[a, b] E_b - c <E_i^M, E_a^M> p_M,

where Omega_i[a, b] = <nabla_{E_i} E_a, E_b> collects the tangent connection,
the shape operators and the normal connection.  The last term converts the
product connection back into the flat derivative of the embedding.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np

from . import jets as jm
from .curve import CurveSpec
from .ambient import ProductAmbient, _combine, on_manifold_residual, spaceform_circle
from .errors import IntegrationError, ParameterError, PreconditionError
from .jets import Jet
from .surface import ImmersionSpec, sampled_spec

RK4_STEP = 0.005
NODE_SPACING = 0.02
GRID_NODES = 81
DRIFT_TOL = 1e-6


# ---------------------------------------------------------------------------
# frame data
# ---------------------------------------------------------------------------

@dataclass
class FrameODEData:
    """Constant Gauss-Weingarten data for a surface with ``codim`` normals.

    ``A[alpha]`` are shape operators, ``gamma[i, j, k] = <nabla_{E_i} E_j, E_k>``,
    ``omega[i, alpha, beta] = <nabla-perp_{E_i} n_alpha, n_beta>`` and
    ``xi`` holds the constant components <E_a, xi> of the full frame.
    """

    ambient: ProductAmbient
    A: np.ndarray
    gamma: np.ndarray
    omega: np.ndarray
    xi: np.ndarray
    p0: np.ndarray
    frame0: np.ndarray
    label: str = ""
    params: dict = field(default_factory=dict)

    @property
    def codim(self) -> int:
        return self.A.shape[0]

    @property
    def rank(self) -> int:
        return 2 + self.codim

    def omega_matrix(self, i: int) -> np.ndarray:
        """Omega_i[a, b] = <nabla_{E_i} E_a, E_b> over the full frame."""
        m = self.codim
        out = np.zeros((2 + m, 2 + m))
        out[:2, :2] = self.gamma[i]
        for a in range(m):
            out[:2, 2 + a] = self.A[a][i, :]
            out[2 + a, :2] = -self.A[a][i, :]
        out[2:, 2:] = self.omega[i]
        return out

    def check_initial(self, tol: float = 1e-10) -> None:
        pa = self.ambient
        F = self.frame0
        gram = pa.inner(F[:, None, :], F[None, :, :])
        if np.max(np.abs(gram - np.eye(self.rank))) > tol:
            raise PreconditionError("initial frame is not orthonormal")
        if on_manifold_residual(pa, self.p0) > tol:
            raise PreconditionError("initial point is off the manifold")
        if np.max(np.abs(pa.project(self.p0, F) - F)) > tol:
            raise PreconditionError("initial frame is not tangent to the product")
        if np.max(np.abs(pa.inner(F, pa.xi) - self.xi)) > tol:
            raise PreconditionError("initial frame disagrees with the prescribed xi components")
        if np.max(np.abs(self.omega + np.swapaxes(self.omega, 1, 2))) > tol:
            raise PreconditionError("normal connection coefficients must be antisymmetric")


def _curvature_block(c: float, x: np.ndarray) -> np.ndarray:
    """<R(E1, E2) E_a, E_b> for an orthonormal frame with xi components x."""
    r = len(x)
    d = np.eye(r)
    X, Y = d[0], d[1]
    x1, x2 = x[0], x[1]
    out = (np.outer(Y, X) - np.outer(X, Y)
           - x2 * np.outer(x, X) + x1 * np.outer(x, Y)
           + x2 * np.outer(X, x) - x1 * np.outer(Y, x))
    return c * out


def compatibility_check(data: FrameODEData) -> dict:
    """Gauss, Codazzi and Ricci residuals of constant frame data.

    Also reports the antisymmetry of the connection matrices and whether the
    prescribed xi components are parallel, both of which the integration
    relies on.
    """
    O1, O2 = data.omega_matrix(0), data.omega_matrix(1)
    lie = data.gamma[0, 1, :] - data.gamma[1, 0, :]
    lhs = O2 @ O1 - O1 @ O2 - sum(lie[k] * data.omega_matrix(k) for k in range(2))
    res = lhs - _curvature_block(data.ambient.c, data.xi)
    return {
        "gauss": float(np.max(np.abs(res[:2, :2]))),
        "codazzi": float(max(np.max(np.abs(res[:2, 2:]), initial=0.0),
                             np.max(np.abs(res[2:, :2]), initial=0.0))),
        "ricci": float(np.max(np.abs(res[2:, 2:]), initial=0.0)),
        "antisymmetry": float(max(np.max(np.abs(O + O.T)) for O in (O1, O2))),
        "xi_parallel": float(max(np.max(np.abs(data.xi @ O)) for O in (O1, O2))),
    }


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------

def _rhs(data: FrameODEData, i: int, omega_i: np.ndarray):
    pa = data.ambient
    c = pa.c

    def f(state):
        # state (..., 1 + rank, d): position row then frame rows
        p, F = state[..., 0, :], state[..., 1:, :]
        dF = np.einsum("ab,...bd->...ad", omega_i, F)
        if c:
            pm = pa.m_part(p)
            Fm = pa.m_part(F)
            coef = pa.inner(Fm[..., i:i + 1, :], Fm)
            dF = dF - c * coef[..., None] * pm[..., None, :]
        return np.concatenate([F[..., i:i + 1, :], dF], axis=-2)

    return f


def _rhs_jet(data: FrameODEData, i: int, omega_i: np.ndarray):
    """Same vector field as :func:`_rhs` for a jet state with batch (B, 1 + rank, d)."""
    pa = data.ambient
    c = pa.c

    def f(state: Jet) -> Jet:
        p, F = state[:, 0, :], state[:, 1:, :]
        dF = (F.expand(1) * omega_i[:, :, None]).sum(2)
        if c:
            pm = pa.m_part(p)
            Fm = pa.m_part(F)
            coef = pa.inner(Fm[:, i:i + 1, :], Fm)
            dF = dF - (coef * c).expand(-1) * pm.expand(1)
        return Jet.stack([F[:, i, :]] + [dF[:, a, :] for a in range(data.rank)], axis=1)

    return f


def _rk4(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def flow(data: FrameODEData, state, direction: int, length: float, step: float = RK4_STEP,
         nodes: int = 1) -> np.ndarray:
    """Integrate along E_direction, returning the state at ``nodes`` equispaced stops.

    ``state`` has shape (..., 1 + rank, d); the output stacks the stops on a
    new axis just before the frame axes (stop 0 is the input state).
    """
    f = _rhs(data, direction, data.omega_matrix(direction))
    y = np.asarray(state, dtype=float)
    if nodes <= 1:
        n_sub = max(1, int(np.ceil(abs(length) / step - 1e-9)))
        h = length / n_sub
        for _ in range(n_sub):
            y = _rk4(f, y, h)
        return y
    gap = length / (nodes - 1)
    n_sub = max(1, int(np.ceil(abs(gap) / step - 1e-9)))
    h = gap / n_sub
    out = [y]
    for _ in range(nodes - 1):
        for _ in range(n_sub):
            y = _rk4(f, y, h)
        out.append(y)
    return np.stack(out, axis=-3)


def initial_state(data: FrameODEData) -> np.ndarray:
    return np.concatenate([data.p0[None, :], data.frame0], axis=0)


def drift(pa: ProductAmbient, states: np.ndarray):
    """(on-manifold residual, frame Gram deviation) per node."""
    p, F = states[..., 0, :], states[..., 1:, :]
    gram = pa.inner(F[..., :, None, :], F[..., None, :, :])
    gram_dev = np.max(np.abs(gram - np.eye(F.shape[-2])), axis=(-1, -2))
    tang = np.zeros(p.shape[:-1])
    if pa.curved:
        tang = np.max(np.abs(pa.inner(F, pa.m_part(p)[..., None, :])), axis=-1)
    return np.asarray(on_manifold_residual(pa, p)), np.maximum(gram_dev, tang)


@dataclass
class SampledImmersion:
    """Nodes of an integrated surface: positions, frames and provenance."""

    ambient: ProductAmbient
    points: np.ndarray
    frames: np.ndarray
    spacing: tuple
    origin: tuple = (0.0, 0.0)
    provenance: dict = field(default_factory=dict)
    data: FrameODEData | None = None
    step: float = RK4_STEP

    @property
    def shape(self):
        return self.points.shape[:2]

    def nodes(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.shape[axis])

    def _states_at(self, axis: int, at: float, fixed_index: int = 0) -> np.ndarray:
        """Full states along the line where parameter ``axis`` equals ``at``
        and the other parameter sits at the grid's first node.

        Uses the nearest stored node and a short RK4 flow for the remainder.
        """
        nodes = self.nodes(axis)
        k = int(np.clip(np.rint((at - self.origin[axis]) / self.spacing[axis]), 0, len(nodes) - 1))
        idx = [fixed_index, fixed_index]
        idx[axis] = k
        state = np.concatenate([self.points[idx[0], idx[1]][None], self.frames[idx[0], idx[1]]], axis=0)
        delta = at - nodes[k]
        if abs(delta) > 1e-14:
            state = flow(self.data, state, axis, delta, self.step)
        return state

    def commuting(self) -> bool:
        if self.data is None:
            return False
        g = self.data.gamma
        return bool(np.max(np.abs(g[0, 1, :] - g[1, 0, :])) < 1e-14)

    def flow_curve(self, direction: str, at: float) -> CurveSpec:
        """A coordinate curve evaluated through the frame ODE rather than the interpolant.

        ``direction`` 's' gives s -> f(s, at), an integral curve of E1; 't' gives
        t -> f(at, t), an integral curve of E2 only when the frame commutes.
        Derivatives come from jets of one RK4 step, which match the Taylor
        series of the flow through fourth order.
        """
        axis = {"s": 0, "t": 1}[direction]
        if self.data is None:
            raise PreconditionError("flow curves need the frame data used for integration")
        if axis == 1 and not self.commuting():
            raise PreconditionError("t-curves are integral curves only for commuting frames")
        other = 1 - axis
        start = self._states_at(other, at)
        lo = self.origin[axis]
        hi = lo + self.spacing[axis] * (self.shape[axis] - 1)
        # nodes along the curve, recomputed from the start state
        line = flow(self.data, start, axis, hi - lo, self.step, nodes=self.shape[axis])
        h = self.spacing[axis]
        data, step = self.data, self.step
        f_jet = _rhs_jet(data, axis, data.omega_matrix(axis))

        def fn(s):
            is_jet = isinstance(s, Jet)
            sv = np.atleast_1d(np.asarray(s.value if is_jet else s, dtype=float))
            shape = sv.shape
            sv = sv.ravel()
            if np.any(sv < lo - 1e-9) or np.any(sv > hi + 1e-9):
                raise PreconditionError("curve parameter outside the integrated range")
            k = np.clip(np.rint((sv - lo) / h).astype(int), 0, self.shape[axis] - 1)
            delta = sv - (lo + h * k)
            y = line[k]
            n_sub = max(1, int(np.ceil(np.max(np.abs(delta)) / step - 1e-9)))
            f = _rhs(data, axis, data.omega_matrix(axis))
            for _ in range(n_sub):
                y = _rk4(f, y, (delta / n_sub)[:, None, None])
            if not is_jet:
                return y[:, 0, :].reshape(shape + (-1,)) if np.ndim(s) else y[0, 0, :]
            eps = (s - s.value).reshape(sv.shape)
            yj = Jet.constant(y, s.nvars, s.order)
            hj = eps.expand(-1).expand(-1)
            k1 = f_jet(yj)
            k2 = f_jet(yj + hj * k1 * 0.5)
            k3 = f_jet(yj + hj * k2 * 0.5)
            k4 = f_jet(yj + hj * k3)
            out = yj + hj * (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (1.0 / 6.0)
            return out[:, 0, :].reshape(shape + (self.ambient.d,))

        label = f"{self.provenance.get('label', 'sampled')}:{direction}-curve"
        return CurveSpec(self.ambient, fn, (lo, hi), arc_length=True, periodic=False, label=label,
                         params={"direction": direction, "at": float(at)})

    def to_spec(self, degree: int = 8) -> ImmersionSpec:
        return sampled_spec(self.ambient, self.points, self.origin, self.spacing, degree,
                            name=self.provenance.get("label", "sampled"), params=dict(self.provenance))


def integrate_frame(data: FrameODEData, n_s: int = GRID_NODES, n_t: int = GRID_NODES,
                    spans=None, step: float = RK4_STEP, check: bool = True) -> SampledImmersion:
    """Grid f(s, t) = flow_{E1}^s(flow_{E2}^t(p0)) on [0, span_s] x [0, span_t]."""
    if step > 0.01:
        raise PreconditionError("RK4 step must not exceed 0.01")
    data.check_initial()
    comp = compatibility_check(data)
    worst = max(comp.values())
    if worst > 1e-8:
        raise PreconditionError(f"frame data fails the compatibility check (residual {worst:.3g})")
    if spans is None:
        spans = ((n_s - 1) * NODE_SPACING, (n_t - 1) * NODE_SPACING)
    span_s, span_t = (float(x) for x in spans)
    y0 = initial_state(data)
    seed = flow(data, y0, 1, span_t, step, nodes=n_t)           # (n_t, 1+rank, d)
    grid = flow(data, seed, 0, span_s, step, nodes=n_s)         # (n_t, n_s, 1+rank, d)
    grid = np.swapaxes(grid, 0, 1)                              # (n_s, n_t, ...)
    man, gram = drift(data.ambient, grid)
    total = np.maximum(man, gram)
    k = np.unravel_index(np.argmax(total), total.shape)
    if check and total[k] > DRIFT_TOL:
        raise IntegrationError(f"frame integration drifted by {total[k]:.3g} at node {k}",
                               worst_node=tuple(int(x) for x in k), drift=float(total[k]))
    prov = {
        "label": data.label,
        **data.params,
        "integrator": "rk4",
        "step": step,
        "nodes": [n_s, n_t],
        "spans": [span_s, span_t],
        "max_manifold_drift": float(man.max()),
        "max_frame_drift": float(gram.max()),
    }
    h = (span_s / (n_s - 1), span_t / (n_t - 1))
    return SampledImmersion(data.ambient, grid[..., 0, :], grid[..., 1:, :], h, (0.0, 0.0), prov, data, step)


# ---------------------------------------------------------------------------
# surface families
# ---------------------------------------------------------------------------

def _check_angle(t_norm):
    if not 0.0 < t_norm < 1.0:
        raise PreconditionError("|T| must lie strictly between 0 and 1")


def case5_data(c: float, h_norm: float, t_norm: float) -> FrameODEData:
    """Frame data of the standard product of a helix and a circle in S^4(c) x R."""
    if c <= 0:
        raise PreconditionError("this construction needs c > 0")
    if h_norm <= 0:
        raise PreconditionError("|H| must be positive")
    _check_angle(t_norm)
    pa = ProductAmbient.of(c, 4)
    n_norm = sqrt(1.0 - t_norm ** 2)
    lam = sqrt(c * (1.0 - t_norm ** 2))
    A = np.zeros((3, 2, 2))
    A[0] = np.diag([0.0, 2.0 * h_norm])
    A[2] = np.diag([lam, -lam])
    omega = np.zeros((2, 3, 3))
    w = t_norm / n_norm * lam
    omega[0, 2, 1] = w
    omega[0, 1, 2] = -w
    e = np.eye(6)
    frame = np.array([n_norm * e[1] + t_norm * e[5], e[2], e[3], -t_norm * e[1] + n_norm * e[5], e[4]])
    return FrameODEData(pa, A, np.zeros((2, 2, 2)), omega,
                        np.array([t_norm, 0.0, 0.0, n_norm, 0.0]), pa.base_point(), frame,
                        label="case5", params={"case": 5, "c": c, "H": h_norm, "T": t_norm})


def case4_data(c: float, t_norm: float, sign: int = 1) -> FrameODEData:
    """Frame data of the pmc helix surface in H^2(c) x R with H parallel to N."""
    if c >= 0:
        raise PreconditionError("this construction needs c < 0")
    _check_angle(t_norm)
    if sign not in (1, -1):
        raise PreconditionError("sign must be +1 or -1")
    pa = ProductAmbient.of(c, 2)
    n_norm = sqrt(1.0 - t_norm ** 2)
    h_norm = sqrt(-c) * t_norm / 2.0
    a = sign * 2.0 * h_norm * n_norm / t_norm
    A = np.array([np.diag([0.0, sign * 2.0 * h_norm])])
    gamma = np.zeros((2, 2, 2))
    gamma[1, 0, 1] = a
    gamma[1, 1, 0] = -a
    e = np.eye(4)
    frame = np.array([n_norm * e[1] + t_norm * e[3], e[2], -t_norm * e[1] + n_norm * e[3]])
    return FrameODEData(pa, A, gamma, np.zeros((2, 1, 1)), np.array([t_norm, 0.0, n_norm]),
                        pa.base_point(), frame, label="case4",
                        params={"case": 4, "c": c, "T": t_norm, "H": h_norm, "sign": sign})


def reconstruct_case5(c: float, h_norm: float, t_norm: float, **grid) -> SampledImmersion:
    return integrate_frame(case5_data(c, h_norm, t_norm), **grid)


def reconstruct_case4(c: float, t_norm: float, sign: int = 1, **grid) -> SampledImmersion:
    return integrate_frame(case4_data(c, t_norm, sign), **grid)


def build_case5(c: float, h_norm: float, t_norm: float, **grid) -> ImmersionSpec:
    return reconstruct_case5(c, h_norm, t_norm, **grid).to_spec()


def build_case4(c: float, t_norm: float, sign: int = 1, **grid) -> ImmersionSpec:
    return reconstruct_case4(c, t_norm, sign, **grid).to_spec()


def build_case3(c: float, n: int = 2, h_norm: float = 0.5) -> ImmersionSpec:
    """Vertical cylinder over a circle of curvature 2|H| in M^n(c)."""
    if c == 0:
        raise PreconditionError("this construction needs c != 0")
    if h_norm <= 0:
        raise PreconditionError("|H| must be positive")
    pa = ProductAmbient.of(c, n)
    circle = spaceform_circle(pa, pa.base_point(), pa.axis(1), pa.axis(2), 2.0 * h_norm)
    xi = pa.xi

    def fn(s, t):
        return _combine(circle.fn(s), [(t, xi)])

    return ImmersionSpec(pa, fn, (circle.interval, (-1.0, 1.0)), (True, False), "closed-form",
                         "case3", {"case": 3, "c": c, "n": n, "H": h_norm})


def case3_generator(spec: ImmersionSpec):
    """The base circle of a vertical cylinder, as the curve s -> f(s, 0)."""
    return spec.coordinate_curve("u", 0.0)


# ---------------------------------------------------------------------------
# controls
# ---------------------------------------------------------------------------

def _sphere_or_hyperbolic(c, u, v):
    """Coordinates of a totally geodesic M^2(c): (cos/cosh, ...) scaled by the radius."""
    r = 1.0 / sqrt(abs(c))
    if c > 0:
        cu, su = jm.cos(u), jm.sin(u)
        return r * cu * jm.cos(v), r * cu * jm.sin(v), r * su
    cu, su = jm.cosh(u), jm.sinh(u)
    return r * cu * jm.cosh(v), r * cu * jm.sinh(v), r * su


def _slice(c: float, n: int = 2, height: float = 0.0) -> ImmersionSpec:
    pa = ProductAmbient.of(c, n)
    e = np.eye(pa.d)

    def fn(u, v):
        x0, x1, x2 = _sphere_or_hyperbolic(c, u, v)
        return _combine(height * pa.xi, [(x0, e[0]), (x1, e[1]), (x2, e[2])])

    return ImmersionSpec(pa, fn, ((-1.0, 1.0), (-1.0, 1.0)), (False, False), "closed-form",
                         "slice", {"kind": "slice", "c": c, "n": n})


def _torus(c: float, r1: float, r2: float, slope: float, name: str, n: int = 3) -> ImmersionSpec:
    if c <= 0:
        raise ParameterError("product tori need c > 0")
    if r1 <= 0 or r2 <= 0 or abs(r1 ** 2 + r2 ** 2 - 1.0 / c) > 1e-12:
        raise ParameterError("torus radii must satisfy r1^2 + r2^2 = 1/c")
    if not 0.0 <= slope < 1.0:
        raise ParameterError("vertical slope must lie in [0, 1)")
    pa = ProductAmbient.of(c, n)
    e = np.eye(pa.d)
    alpha = sqrt(1.0 - slope ** 2) / r1
    beta = 1.0 / r2

    def fn(s, t):
        return _combine(np.zeros(pa.d), [
            (r1 * jm.cos(alpha * s), e[0]), (r1 * jm.sin(alpha * s), e[1]),
            (r2 * jm.cos(beta * t), e[2]), (r2 * jm.sin(beta * t), e[3]),
            (slope * s, pa.xi),
        ])

    periodic_s = slope == 0.0
    return ImmersionSpec(pa, fn, ((0.0, 2 * pi / alpha), (0.0, 2 * pi / beta)), (periodic_s, True),
                         "closed-form", name, {"kind": name, "c": c, "r1": r1, "r2": r2, "slope": slope})


def _small_sphere(c: float, rho: float) -> ImmersionSpec:
    if c <= 0:
        raise ParameterError("small spheres need c > 0")
    R = 1.0 / sqrt(c)
    if not 0.0 < rho < R:
        raise ParameterError("rho must lie in (0, 1/sqrt(c))")
    pa = ProductAmbient.of(c, 4)
    e = np.eye(pa.d)
    x0 = sqrt(R ** 2 - rho ** 2)

    def fn(u, v):
        cu = jm.cos(u)
        return _combine(x0 * e[0], [(rho * cu * jm.cos(v), e[1]), (rho * cu * jm.sin(v), e[2]),
                                    (rho * jm.sin(u), e[3])])

    return ImmersionSpec(pa, fn, ((-1.0, 1.0), (0.0, 2 * pi)), (False, True), "closed-form",
                         "geodesic_sphere_in_small_sphere", {"kind": "geodesic_sphere_in_small_sphere",
                                                             "c": c, "rho": rho})


def _graph_strip(c: float, slope: float = 1.0) -> ImmersionSpec:
    """The graph t = slope * u over a totally geodesic M^2(c): a non-constant angle control."""
    if slope <= 0:
        raise ParameterError("slope must be positive")
    pa = ProductAmbient.of(c, 2)
    e = np.eye(pa.d)

    def fn(u, v):
        x0, x1, x2 = _sphere_or_hyperbolic(c, v, u)
        return _combine(np.zeros(pa.d), [(x0, e[0]), (x1, e[1]), (x2, e[2]), (slope * u, pa.xi)])

    return ImmersionSpec(pa, fn, ((-1.0, 1.0), (-1.0, 1.0)), (False, False), "closed-form",
                         "graph_strip", {"kind": "graph_strip", "c": c, "slope": slope})


CONTROL_KINDS = ("slice", "torus_helix", "cmc_torus_in_S3", "geodesic_sphere_in_small_sphere", "graph_strip")


def build_control(kind: str, **params) -> ImmersionSpec:
    """Closed-form controls: slices, product tori, a small geodesic sphere and a graph."""
    try:
        if kind == "slice":
            return _slice(float(params.get("c", 1.0)), int(params.get("n", 2)), float(params.get("height", 0.0)))
        if kind == "torus_helix":
            c = float(params.get("c", 1.0))
            r = sqrt(0.5 / c) if c > 0 else 0.0
            return _torus(c, float(params.get("r1", r)), float(params.get("r2", r)),
                          float(params.get("slope", 0.5)), "torus_helix")
        if kind == "cmc_torus_in_S3":
            c = float(params.get("c", 1.0))
            r1 = float(params.get("r1", 0.6))
            r2 = float(params.get("r2", sqrt(max(1.0 / c - r1 ** 2, 0.0)) if c > 0 else 0.0))
            if abs(r1 - r2) < 1e-12:
                raise ParameterError("cmc torus needs r1 != r2")
            return _torus(c, r1, r2, 0.0, "cmc_torus_in_S3", int(params.get("n", 3)))
        if kind == "geodesic_sphere_in_small_sphere":
            return _small_sphere(float(params.get("c", 1.0)), float(params.get("rho", 0.5)))
        if kind == "graph_strip":
            return _graph_strip(float(params.get("c", 1.0)), float(params.get("slope", 1.0)))
    except (TypeError, KeyError) as exc:
        raise ParameterError(f"bad parameters for {kind}: {exc}") from exc
    raise ParameterError(f"unknown control kind {kind!r}")


# ---------------------------------------------------------------------------
# fault injection
# ---------------------------------------------------------------------------

def perturb_node(sampled: SampledImmersion, node=None, size: float = 1e-3,
                 direction: int = 0) -> SampledImmersion:
    """Copy with one node moved by ``size`` along a tangent frame vector, kept on the manifold."""
    pa = sampled.ambient
    pts = sampled.points.copy()
    if node is None:
        node = (sampled.shape[0] // 2, sampled.shape[1] // 2)
    i, j = node
    p = pts[i, j] + size * sampled.frames[i, j, direction]
    if pa.curved:
        pm = pa.m_part(p)
        scale = sqrt(abs(1.0 / pa.c) / abs(pa.inner(pm, pm)))
        p = pm * scale + p[-1] * pa.xi
    pts[i, j] = p
    prov = dict(sampled.provenance, perturbed_node=[int(i), int(j)], perturbation=size)
    return SampledImmersion(pa, pts, sampled.frames, sampled.spacing, sampled.origin, prov)
