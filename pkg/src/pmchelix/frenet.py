"""Frenet apparatus of curves in M^n(c) x R."""
from __future__ import annotations

import numpy as np

from .curve import CurveSpec
from .errors import PreconditionError
from .jets import Jet

FRENET_TOL = 1e-7
SPEED_TOL = 1e-9
R_MAX = 4


def _covariant_jets(curve: CurveSpec, s, k: int) -> list:
    """Jets of gamma', nabla gamma', ..., nabla^{k-1} gamma' along the curve.

    The j-th entry has order ``k - j - 1`` so the last one is a plain value jet.
    """
    if not curve.arc_length:
        raise PreconditionError("curve must be parametrized by arc length")
    pa = curve.ambient
    g = curve.jets(np.asarray(s, dtype=float), order=k)
    vel = g.diff(0)
    speed = np.sqrt(np.abs(pa.inner(vel.value, vel.value)))
    if np.max(np.abs(speed - 1.0)) > SPEED_TOL:
        raise PreconditionError(f"curve is not unit speed (|speed - 1| = {np.max(np.abs(speed - 1.0)):.3g})")
    out = [vel]
    cur = vel
    for _ in range(k - 1):
        nxt = cur.diff(0)
        if pa.curved:
            q = nxt.order
            pm = pa.m_part(g.truncate(q))
            coef = pa.inner(pa.m_part(vel.truncate(q)), pa.m_part(cur.truncate(q))) * pa.c
            nxt = nxt + coef.expand(-1) * pm
        out.append(nxt)
        cur = nxt
    return out


def covariant_jet(curve: CurveSpec, s: float, k: int = 3) -> list:
    """gamma'(s) followed by its iterated covariant derivatives up to order k."""
    if not 0 <= k <= 3:
        raise PreconditionError("covariant derivatives are available up to order 3")
    return [v.value for v in _covariant_jets(curve, s, k + 1)]


def _gram_schmidt(pa, vectors, tol):
    """Frenet curvatures and frames for a batch of covariant-derivative stacks.

    ``vectors`` is a list of arrays (S, d).  Returns curvatures (S, r_max - 1),
    frames (S, r_max, d) and the order per sample; entries past the order are 0.
    """
    S = vectors[0].shape[0]
    rmax = len(vectors)
    frames = np.zeros((S, rmax, vectors[0].shape[-1]))
    kappa = np.zeros((S, rmax - 1))
    alive = np.ones(S, dtype=bool)
    order = np.ones(S, dtype=int)
    prev_norm = np.sqrt(pa.inner(vectors[0], vectors[0]))
    frames[:, 0] = vectors[0] / prev_norm[:, None]
    for i in range(1, rmax):
        w = vectors[i].copy()
        for j in range(i):
            w = w - pa.inner(w, frames[:, j])[:, None] * frames[:, j]
        norm = np.sqrt(np.clip(pa.inner(w, w), 0.0, None))
        k = norm / prev_norm
        alive &= k > tol
        kappa[:, i - 1] = np.where(alive, k, 0.0)
        safe = np.where(alive, norm, 1.0)
        frames[:, i] = np.where(alive[:, None], w / safe[:, None], 0.0)
        order += alive
        prev_norm = np.where(alive, norm, prev_norm)
    return kappa, frames, order


def frenet_batch(curve: CurveSpec, s, r_max: int = R_MAX, tol: float = FRENET_TOL):
    """Vectorized Frenet data at the parameters ``s``: (curvatures, frames, orders)."""
    if not 1 <= r_max <= R_MAX:
        raise PreconditionError(f"r_max must be in [1, {R_MAX}]")
    s = np.atleast_1d(np.asarray(s, dtype=float))
    vecs = [v.value for v in _covariant_jets(curve, s, r_max)]
    return _gram_schmidt(curve.ambient, vecs, tol)


def frenet_apparatus(curve: CurveSpec, s: float, r_max: int = R_MAX):
    """Curvatures kappa_1..kappa_{r-1} and frame X_1..X_r at parameter s."""
    kappa, frames, order = frenet_batch(curve, [s], r_max)
    r = int(order[0])
    return kappa[0, :r - 1].copy(), frames[0, :r].copy()


def curvature_table(curve: CurveSpec, samples: int, r_max: int = R_MAX):
    s = curve.samples(samples)
    kappa, _, order = frenet_batch(curve, s, r_max)
    return s, kappa, order


def classify_curve(curve: CurveSpec, samples: int = 32) -> str:
    """Label a curve as geodesic, circle, helix, frenet(r) or non-constant-curvature."""
    if samples < 16:
        raise PreconditionError("classification needs at least 16 samples")
    _, kappa, order = curvature_table(curve, samples)
    if np.any(order != order[0]):
        return "non-constant-curvature"
    r = int(order[0])
    for i in range(r - 1):
        col = kappa[:, i]
        if col.max() - col.min() > 1e-6 * (1.0 + col.mean()):
            return "non-constant-curvature"
    return {1: "geodesic", 2: "circle", 3: "helix"}.get(r, f"frenet({r})")
