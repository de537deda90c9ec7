"""Residual checks for pmc helix surfaces and the case classifier.

Every check evaluates one geometric identity on a probe grid and reports the
largest and mean residual against a tolerance.  Structure equations and the
pmc/helix conditions decide whether a surface is a verified pmc helix
surface; pseudo-umbilicity and the Abresch-Rosenberg form are reported as
properties that feed the classifier but do not by themselves fail a surface.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .surface import ANGLE_TOL, ImmersionSpec, SurfaceGeometry

DEFAULT_GRID = (64, 64)

TOLERANCES = {
    "closed-form": {"gauss": 1e-6, "codazzi": 1e-6, "ricci": 1e-6, "xi_normal_part": 1e-6,
                    "pmc": 1e-6, "helix": 1e-6, "identity": 1e-5,
                    "pseudo_umbilical": 1e-6, "ar_form": 1e-5},
    "sampled": {"gauss": 1e-5, "codazzi": 1e-5, "ricci": 1e-5, "xi_normal_part": 1e-5,
                "pmc": 1e-6, "helix": 1e-6, "identity": 1e-5,
                "pseudo_umbilical": 1e-6, "ar_form": 1e-5},
}

IDENTITY_NAMES = (
    "lambda1_along_e1",
    "lambda_sum_along_e1",
    "lambda_along_e2",
    "curvature_from_lambda1",
    "hn_derivative",
    "curvature_derivative",
    "balance",
)

MINIMAL_TOL = 1e-8
CASE_TOL = 1e-5


# ---------------------------------------------------------------------------
# report types
# ---------------------------------------------------------------------------

@dataclass
class ResidualEntry:
    max: float
    mean: float
    count: int
    tol: float
    applicable: bool = True

    @property
    def passed(self) -> bool:
        return (not self.applicable) or bool(self.max <= self.tol)

    def to_dict(self) -> dict:
        if not self.applicable:
            return {"applicable": False, "count": self.count, "tol": self.tol, "pass": True}
        return {"max": self.max, "mean": self.mean, "count": self.count, "tol": self.tol,
                "pass": self.passed}


def _entry(values, tol, count=None) -> ResidualEntry:
    values = np.abs(np.asarray(values, dtype=float)).ravel()
    if values.size == 0:
        return ResidualEntry(0.0, 0.0, 0 if count is None else count, tol, applicable=False)
    return ResidualEntry(float(values.max()), float(values.mean()),
                         int(values.size if count is None else count), tol)


def _scalar(values) -> dict:
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        return {"mean": None, "std": None, "min": None, "max": None}
    return {"mean": float(values.mean()), "std": float(values.std()),
            "min": float(values.min()), "max": float(values.max())}


@dataclass
class ResidualReport:
    checks: dict = field(default_factory=dict)
    properties: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.checks.values())

    @property
    def inapplicable(self) -> list:
        names = [k for k, e in self.checks.items() if not e.applicable]
        names += [k for k, e in self.properties.items() if not e.applicable]
        return sorted(names)

    def failed(self) -> list:
        return [k for k, e in self.checks.items() if not e.passed]

    def to_dict(self) -> dict:
        return {
            "checks": {k: self.checks[k].to_dict() for k in sorted(self.checks)},
            "properties": {k: self.properties[k].to_dict() for k in sorted(self.properties)},
            "scalars": {k: self.scalars[k] for k in sorted(self.scalars)},
            "inapplicable": self.inapplicable,
            "meta": self.meta,
            "pass": self.passed,
        }


# ---------------------------------------------------------------------------
# geometry helpers
# ---------------------------------------------------------------------------

def _grid_points(spec: ImmersionSpec, grid) -> np.ndarray:
    if grid is None:
        grid = DEFAULT_GRID
    arr = np.asarray(grid)
    if arr.ndim == 1 and arr.size == 2 and np.issubdtype(arr.dtype, np.integer):
        return spec.probe_grid(int(arr[0]), int(arr[1])).reshape(-1, 2)
    return np.asarray(grid, dtype=float).reshape(-1, 2)


def geometry(spec: ImmersionSpec, grid=None, gauge: str = "axes") -> SurfaceGeometry:
    return SurfaceGeometry(spec, _grid_points(spec, grid), gauge=gauge)


def _tol(spec: ImmersionSpec, name: str, tolerances: dict | None) -> float:
    table = TOLERANCES["sampled" if spec.kind == "sampled" else "closed-form"]
    base = table["identity"] if name in IDENTITY_NAMES else table[name]
    if tolerances and name in tolerances:
        return float(tolerances[name])
    return base


def _geo(spec, grid, geo):
    return geo if geo is not None else geometry(spec, grid)


def _normal_norm(comps: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(comps ** 2, axis=-1)) if comps.shape[-1] else np.zeros(comps.shape[:-1])


def _cov_sigma(geo: SurfaceGeometry, i: int) -> np.ndarray:
    """(nabla-perp_{E_i} sigma)^beta_jk, shape (P, m, 2, 2)."""
    m = geo.codim
    S = geo.sigma_comp_jet
    sig = geo.shape_operators
    W = geo.omega
    G = geo.gamma
    out = np.zeros(sig.shape)
    for b in range(m):
        for j in range(2):
            for k in range(2):
                out[:, b, j, k] = geo.derivative(S[b][j][k], i).value
    out += np.einsum("pajk,pab->pbjk", sig, W[:, i])
    out -= np.einsum("pjl,pblk->pbjk", G[:, i], sig)
    out -= np.einsum("pkl,pbjl->pbjk", G[:, i], sig)
    return out


def _ambient_curvature(geo: SurfaceGeometry, X, Y, Z) -> np.ndarray:
    return geo.curvature(X, Y, Z)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def check_structure_equations(spec: ImmersionSpec, grid=None, geo: SurfaceGeometry | None = None,
                              tolerances: dict | None = None) -> dict:
    """Gauss, Codazzi and Ricci residuals on the adapted frame."""
    geo = _geo(spec, grid, geo)
    pa = geo.pa
    E1, E2 = geo.E[:, 0], geo.E[:, 1]
    sig = geo.sigma
    # Gauss: intrinsic K against the ambient curvature plus the sigma terms
    Rb = pa.inner(_ambient_curvature(geo, E1, E2, E2), E1)
    ext = Rb + pa.inner(sig[:, 1, 1], sig[:, 0, 0]) - pa.inner(sig[:, 0, 1], sig[:, 0, 1])
    gauss = geo.K - ext
    m = geo.codim
    P = geo.uv.shape[0]
    if m:
        normals = geo.normals
        d1, d2 = _cov_sigma(geo, 0), _cov_sigma(geo, 1)
        cod = np.zeros((P, 2))
        for k in range(2):
            Rk = _ambient_curvature(geo, E1, E2, geo.E[:, k])
            rperp = pa.inner(Rk[:, None, :], normals)
            res = rperp - d1[:, :, 1, k] + d2[:, :, 0, k]
            cod[:, k] = _normal_norm(res)
        codazzi = cod.max(axis=1)
        # Ricci
        W = geo.omega
        Wj = geo.omega_jet
        G = geo.gamma
        A = geo.shape_operators
        lie = G[:, 0, 1, :] - G[:, 1, 0, :]
        ric = np.zeros(P)
        for a in range(m):
            for b in range(m):
                if a >= b:
                    continue
                lhs = (geo.derivative(Wj[1][a][b], 0).value - geo.derivative(Wj[0][a][b], 1).value
                       + np.einsum("pg,pg->p", W[:, 1, a, :], W[:, 0, :, b])
                       - np.einsum("pg,pg->p", W[:, 0, a, :], W[:, 1, :, b])
                       - lie[:, 0] * W[:, 0, a, b] - lie[:, 1] * W[:, 1, a, b])
                comm = A[:, a] @ A[:, b] - A[:, b] @ A[:, a]
                Rab = pa.inner(_ambient_curvature(geo, E1, E2, normals[:, a]), normals[:, b])
                ric = np.maximum(ric, np.abs(lhs - comm[:, 1, 0] - Rab))
    else:
        codazzi = np.zeros(P)
        ric = np.zeros(P)
    return {
        "gauss": _entry(gauss, _tol(spec, "gauss", tolerances)),
        "codazzi": _entry(codazzi, _tol(spec, "codazzi", tolerances)),
        "ricci": _entry(ric, _tol(spec, "ricci", tolerances)),
    }


def check_xi_normal_part(spec: ImmersionSpec, grid=None, geo: SurfaceGeometry | None = None,
                         tolerances: dict | None = None) -> ResidualEntry:
    """|nabla-perp_X N + sigma(X, T)|, which vanishes because xi is parallel."""
    geo = _geo(spec, grid, geo)
    pa = geo.pa
    P = geo.uv.shape[0]
    if not geo.codim:
        return _entry(np.zeros(P), _tol(spec, "xi_normal_part", tolerances))
    Nc = [pa.inner(geo.N_jet.truncate(2), n) for n in geo.normal_jet]
    worst = np.zeros(P)
    for i in range(2):
        dn = geo.normal_derivative(Nc, i)
        st = _sigma_t(geo, i)
        worst = np.maximum(worst, _normal_norm(dn + st))
    return _entry(worst, _tol(spec, "xi_normal_part", tolerances))


def _sigma_t(geo, i):
    """Normal components of sigma(E_i, T)."""
    pa = geo.pa
    T = geo.T
    t = np.stack([pa.inner(T, geo.E[:, 0]), pa.inner(T, geo.E[:, 1])], axis=-1)
    A = geo.shape_operators
    return np.einsum("pak,pk->pa", A[:, :, i, :], t)


def check_pmc(spec: ImmersionSpec, grid=None, geo: SurfaceGeometry | None = None,
              tolerances: dict | None = None) -> ResidualEntry:
    """max over the grid and both directions of |nabla-perp_{E_i} H|."""
    geo = _geo(spec, grid, geo)
    P = geo.uv.shape[0]
    if not geo.codim:
        return _entry(np.zeros(P), _tol(spec, "pmc", tolerances))
    Hc = geo.H_comp_jet
    worst = np.maximum(_normal_norm(geo.normal_derivative(Hc, 0)),
                       _normal_norm(geo.normal_derivative(Hc, 1)))
    return _entry(worst, _tol(spec, "pmc", tolerances))


def check_helix(spec: ImmersionSpec, grid=None, geo: SurfaceGeometry | None = None,
                tolerances: dict | None = None) -> ResidualEntry:
    """Spread (max - min) of |T| over the grid."""
    geo = _geo(spec, grid, geo)
    t = geo.tnorm
    spread = float(t.max() - t.min())
    return ResidualEntry(spread, float(np.mean(np.abs(t - t.mean()))), int(t.size),
                         _tol(spec, "helix", tolerances))


def check_pseudo_umbilical(spec: ImmersionSpec, grid=None, geo: SurfaceGeometry | None = None,
                           tolerances: dict | None = None) -> ResidualEntry:
    """Operator norm of A_H - |H|^2 id over the grid."""
    geo = _geo(spec, grid, geo)
    AH = _shape_operator_H(geo)
    h2 = geo.pa.inner(geo.H, geo.H)
    D = AH - h2[:, None, None] * np.eye(2)
    return _entry(np.linalg.norm(D, ord=2, axis=(1, 2)), _tol(spec, "pseudo_umbilical", tolerances))


def _shape_operator_H(geo: SurfaceGeometry) -> np.ndarray:
    pa = geo.pa
    return pa.inner(geo.sigma, geo.H[:, None, None, :])


def ar_form_residual(spec: ImmersionSpec, grid=None, geo: SurfaceGeometry | None = None,
                     tolerances: dict | None = None) -> ResidualEntry:
    """Traceless part of Q(X, Y) = 2<sigma(X, Y), H> - c <X, xi><Y, xi> (n = 2 only)."""
    tol = _tol(spec, "ar_form", tolerances)
    if spec.ambient.n != 2:
        return ResidualEntry(0.0, 0.0, 0, tol, applicable=False)
    geo = _geo(spec, grid, geo)
    pa = geo.pa
    x = geo.E[..., -1]
    Q = 2.0 * _shape_operator_H(geo) - pa.c * x[:, :, None] * x[:, None, :]
    res = np.maximum(np.abs(Q[:, 0, 0] - Q[:, 1, 1]), np.abs(Q[:, 0, 1]))
    return _entry(res, tol)


def check_identities(spec: ImmersionSpec, grid=None, geo: SurfaceGeometry | None = None,
                     tolerances: dict | None = None) -> dict:
    """Pointwise consequences of pmc and constant angle, where 0 < |T| < 1."""
    geo = _geo(spec, grid, geo)
    pa = geo.pa
    c = pa.c
    t = geo.tnorm
    mask = (t > ANGLE_TOL) & (t < 1.0 - ANGLE_TOL)
    tol = {name: _tol(spec, name, tolerances) for name in IDENTITY_NAMES}
    if not np.any(mask):
        return {name: ResidualEntry(0.0, 0.0, 0, tol[name], applicable=False) for name in IDENTITY_NAMES}
    lam = geo.lambda_jet
    l1, l2 = lam[0].value, lam[1].value
    hn = geo.hn_jet.value
    h2 = pa.inner(geo.H, geo.H)
    K = geo.K
    quartic = 4.0 * h2 + c * t ** 2
    e1l1 = geo.derivative(lam[0], 0).value
    e1l2 = geo.derivative(lam[1], 0).value
    e2l1 = geo.derivative(lam[0], 1).value
    e2l2 = geo.derivative(lam[1], 1).value
    e1hn = geo.derivative(geo.hn_jet, 0).value
    e2hn = geo.derivative(geo.hn_jet, 1).value
    e1K = geo.derivative(geo.K_jet, 0).value
    e2K = geo.derivative(geo.K_jet, 1).value
    ts = np.where(mask, t, 1.0)
    # balance: half the Laplacian of |T|^2 against |A_N|^2 + K|T|^2 - 2<A_H T, T>
    lap = 0.5 * geo.laplacian(geo.tn2_jet)
    sig = geo.sigma
    AN = pa.inner(sig, geo.N[:, None, None, :])
    rhs = np.sum(AN ** 2, axis=(1, 2)) + K * t ** 2 - 2.0 * t ** 2 * l1
    res = {
        "lambda1_along_e1": e1l1 - hn / ts * (quartic - 4.0 * l1),
        "lambda_sum_along_e1": e1l1 + e1l2,
        "lambda_along_e2": np.maximum(np.abs(e2l1), np.abs(e2l2)),
        "curvature_from_lambda1": K - 2.0 * l1 + 4.0 * hn ** 2 / ts ** 2,
        "hn_derivative": np.maximum(np.abs(e1hn + t * l1), np.abs(e2hn)),
        "curvature_derivative": np.maximum(np.abs(e1K - 2.0 * hn / ts ** 2 * quartic), np.abs(e2K)),
        "balance": lap - rhs,
    }
    return {name: _entry(res[name][mask], tol[name]) for name in IDENTITY_NAMES}


# ---------------------------------------------------------------------------
# scalars and the full report
# ---------------------------------------------------------------------------

def surface_scalars(geo: SurfaceGeometry) -> dict:
    pa = geo.pa
    t = geo.tnorm
    h = geo.hnorm
    lam = geo.lambda_jet
    hn = geo.hn_jet.value
    nn = np.sqrt(np.clip(pa.inner(geo.N, geo.N), 0.0, None))
    out = {
        "T": _scalar(t),
        "H": _scalar(h),
        "K": _scalar(geo.K),
        "quartic_4H2_cT2": _scalar(4.0 * h ** 2 + pa.c * t ** 2),
        "lambda1": _scalar(lam[0].value),
        "lambda2": _scalar(lam[1].value),
        "HN": _scalar(hn),
    }
    ok = (h > 1e-9) & (nn > 1e-9)
    out["beta"] = _scalar(np.arccos(np.clip(hn[ok] / (h[ok] * nn[ok]), -1.0, 1.0)))
    if geo.codim >= 3:
        out["lambda_abs"] = _scalar(_third_normal_eigenvalue(geo))
    return out


def _third_normal_eigenvalue(geo: SurfaceGeometry) -> np.ndarray:
    """|lambda|: size of sigma(E1, E1) off the span of H and N."""
    pa = geo.pa
    s11 = geo.sigma[:, 0, 0]
    basis = []
    for v in (geo.H, geo.N):
        w = v.copy()
        for b in basis:
            w = w - pa.inner(w, b)[:, None] * b
        n = np.sqrt(np.clip(pa.inner(w, w), 0.0, None))
        basis.append(np.where(n[:, None] > 1e-9, w / np.where(n > 1e-9, n, 1.0)[:, None], 0.0))
    r = s11
    for b in basis:
        r = r - pa.inner(r, b)[:, None] * b
    return np.sqrt(np.clip(pa.inner(r, r), 0.0, None))


def verify_surface(spec: ImmersionSpec, grid=None, tolerances: dict | None = None) -> ResidualReport:
    """Run every check on one probe grid and collect the scalar summary."""
    uv = _grid_points(spec, grid)
    geo = SurfaceGeometry(spec, uv)
    checks = {}
    checks.update(check_structure_equations(spec, geo=geo, tolerances=tolerances))
    checks["xi_normal_part"] = check_xi_normal_part(spec, geo=geo, tolerances=tolerances)
    checks["pmc"] = check_pmc(spec, geo=geo, tolerances=tolerances)
    checks["helix"] = check_helix(spec, geo=geo, tolerances=tolerances)
    checks.update(check_identities(spec, geo=geo, tolerances=tolerances))
    props = {
        "pseudo_umbilical": check_pseudo_umbilical(spec, geo=geo, tolerances=tolerances),
        "ar_form": ar_form_residual(spec, geo=geo, tolerances=tolerances),
    }
    meta = {"kind": spec.kind, "name": spec.name, "c": spec.ambient.c, "n": spec.ambient.n,
            "points": int(uv.shape[0])}
    report = ResidualReport(checks, props, surface_scalars(geo), meta)
    report.meta["container"] = _container(spec, geo)
    return report


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

class Classification(NamedTuple):
    label: str
    diagnostics: dict


def _container(spec: ImmersionSpec, geo: SurfaceGeometry) -> dict:
    """Smallest totally umbilical submanifold of M^n(c) containing the M-part of the probes.

    Totally umbilical submanifolds of the standard models are intersections
    with affine subspaces; they are totally geodesic when the subspace is linear.
    """
    pa = spec.ambient
    pts = pa.m_part(geo.point)[:, :-1]
    center = pts.mean(axis=0)
    _, s, vt = np.linalg.svd(pts - center, full_matrices=False)
    rank = int(np.sum(s > 1e-7 * max(1.0, s[0])))
    basis = vt[:rank]
    # distance of the origin from the affine hull, in the embedding coordinates
    offset = center - basis.T @ (basis @ center)
    gap = float(np.linalg.norm(offset))
    dim = rank - 1 if pa.curved else rank
    geodesic = gap < 1e-7 if pa.curved else True
    return {"dimension": dim, "totally_geodesic": bool(geodesic), "offset": gap}


def classify_surface(spec: ImmersionSpec, report: ResidualReport | None = None, grid=None) -> Classification:
    """Label a surface by the decision tree over its residual report."""
    if report is None:
        report = verify_surface(spec, grid)
    sc = report.scalars
    diag = {
        "failed_checks": report.failed(),
        "T": sc["T"]["mean"], "H": sc["H"]["mean"],
        "K_max_abs": max(abs(sc["K"]["min"]), abs(sc["K"]["max"])),
        "lambda1_max_abs": max(abs(sc["lambda1"]["min"]), abs(sc["lambda1"]["max"])),
        "quartic_max_abs": max(abs(sc["quartic_4H2_cT2"]["min"]), abs(sc["quartic_4H2_cT2"]["max"])),
        "container": report.meta.get("container"),
    }
    c = spec.ambient.c
    if not (report.checks["pmc"].passed and report.checks["helix"].passed):
        return Classification("not-pmc-helix", diag)
    if sc["H"]["max"] <= MINIMAL_TOL:
        return Classification("minimal", diag)
    cont = diag["container"] or {}
    if report.properties["pseudo_umbilical"].passed:
        # a surface minimal in a non-minimal umbilical hypersurface is always pseudo-umbilical;
        # a smaller non-geodesic umbilical container extends to such a hypersurface
        diag["case1_compatible"] = bool(sc["T"]["max"] <= ANGLE_TOL
                                        and cont.get("dimension", spec.ambient.n) <= spec.ambient.n - 1
                                        and not cont.get("totally_geodesic", True))
        return Classification("pseudo-umbilical", diag)
    if sc["T"]["max"] <= ANGLE_TOL:
        dim = cont.get("dimension")
        if dim is not None and dim <= 3:
            return Classification("case2", diag)
        if dim == spec.ambient.n - 1 and not cont.get("totally_geodesic", True):
            return Classification("case1", diag)
        return Classification("unclassified", diag)
    if sc["T"]["min"] >= 1.0 - ANGLE_TOL:
        return Classification("case3", diag)
    if c < 0 and diag["quartic_max_abs"] <= CASE_TOL:
        diag["P_H2_compatible"] = True
        return Classification("case4", diag)
    if c > 0 and diag["K_max_abs"] <= CASE_TOL and diag["lambda1_max_abs"] <= CASE_TOL:
        return Classification("case5", diag)
    diag["nearest"] = _nearest_branch(c, diag)
    return Classification("unclassified", diag)


def _nearest_branch(c, diag) -> str:
    if c < 0:
        return f"case4 (|4H^2 + cT^2| = {diag['quartic_max_abs']:.3g})"
    return f"case5 (|K| = {diag['K_max_abs']:.3g}, |lambda1| = {diag['lambda1_max_abs']:.3g})"
