"""Command line interface: build, verify, classify, frenet and sweep.

Surfaces are described by a JSON document::

    {"ambient": {"c": 1, "n": 4},
     "surface": {"kind": "case5", "params": {"H": 0.5, "T": 0.6}}   or   {"grid_csv": "case5.csv"},
     "grid": {"nu": 64, "nv": 64},
     "tolerances": {"gauss": 1e-5},
     "provenance": {...}}

Grid CSV files hold one node per row, ``u,v,x0,...,x{d-1}``, with the v index
running fastest.  Exit codes: 0 success, 1 a check failed (or the surface is
not a verified pmc helix surface), 2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
from pathlib import Path

import numpy as np

from .ambient import ProductAmbient, spaceform_circle
from .errors import PmcHelixError
from .frenet import classify_curve, curvature_table
from .reconstruct import (CONTROL_KINDS, build_case3, build_control, reconstruct_case4,
                          reconstruct_case5)
from .surface import sampled_spec
from .verify import DEFAULT_GRID, IDENTITY_NAMES, TOLERANCES, _tol, classify_surface, verify_surface


class InputError(Exception):
    """Malformed document or arguments (exit code 2)."""


# ---------------------------------------------------------------------------
# documents
# ---------------------------------------------------------------------------

DOC_KEYS = {"ambient", "surface", "grid", "tolerances", "provenance"}
SURFACE_KINDS = ("case3", "case4", "case5") + CONTROL_KINDS
FIXED_N = {"case4": 2, "case5": 4, "torus_helix": 3, "geodesic_sphere_in_small_sphere": 4,
           "graph_strip": 2}


def _require_keys(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise InputError(f"{where}: unknown key(s) {', '.join(unknown)}")
    for key in required:
        if key not in obj:
            raise InputError(f"{where}: missing key '{key}'")


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number")
    return float(value)


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def parse_document(doc: dict, base_dir: Path = Path(".")) -> dict:
    """Validate a surface document and return its normalized fields."""
    _require_keys(doc, DOC_KEYS, "document", required=("ambient", "surface"))
    amb = doc["ambient"]
    _require_keys(amb, {"c", "n"}, "ambient", required=("c", "n"))
    c = _number(amb["c"], "ambient.c")
    n = amb["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise InputError("ambient.n: expected an integer")
    surf = doc["surface"]
    if not isinstance(surf, dict):
        raise InputError("surface: expected an object")
    if "grid_csv" in surf:
        _require_keys(surf, {"grid_csv", "degree"}, "surface")
        kind = None
        params = {"grid_csv": str(base_dir / surf["grid_csv"]), "degree": surf.get("degree", 8)}
    else:
        _require_keys(surf, {"kind", "params"}, "surface", required=("kind",))
        kind = surf["kind"]
        if kind not in SURFACE_KINDS:
            raise InputError(f"surface.kind: unknown kind {kind!r}")
        params = surf.get("params", {})
        if not isinstance(params, dict):
            raise InputError("surface.params: expected an object")
        for k, v in params.items():
            _number(v, f"surface.params.{k}")
        if kind in FIXED_N and n != FIXED_N[kind]:
            raise InputError(f"ambient.n: kind {kind} lives in dimension {FIXED_N[kind]}, got {n}")
    grid = doc.get("grid", {"nu": DEFAULT_GRID[0], "nv": DEFAULT_GRID[1]})
    _require_keys(grid, {"nu", "nv"}, "grid", required=("nu", "nv"))
    for key in ("nu", "nv"):
        if isinstance(grid[key], bool) or not isinstance(grid[key], int) or grid[key] < 2:
            raise InputError(f"grid.{key}: expected an integer >= 2")
    tol = doc.get("tolerances", {})
    if not isinstance(tol, dict):
        raise InputError("tolerances: expected an object")
    known = set(TOLERANCES["closed-form"]) | set(IDENTITY_NAMES)
    for k, v in tol.items():
        if k not in known:
            raise InputError(f"tolerances: unknown check {k!r}")
        _number(v, f"tolerances.{k}")
    prov = doc.get("provenance", {})
    if not isinstance(prov, dict):
        raise InputError("provenance: expected an object")
    return {"c": c, "n": n, "kind": kind, "params": params, "grid": (grid["nu"], grid["nv"]),
            "tolerances": dict(tol), "provenance": prov}


def spec_from_document(parsed: dict):
    c, n, kind, params = parsed["c"], parsed["n"], parsed["kind"], parsed["params"]
    if kind is None:
        pa = ProductAmbient.of(c, n)
        values, origin, spacing = read_grid_csv(params["grid_csv"], pa.d)
        return sampled_spec(pa, values, origin, spacing, int(params["degree"]),
                            name=Path(params["grid_csv"]).stem, params=dict(parsed["provenance"]))
    if kind == "case3":
        return build_case3(c, n, params.get("H", 0.5))
    if kind == "case4":
        return reconstruct_case4(c, params.get("T", 0.8), int(params.get("sign", 1))).to_spec()
    if kind == "case5":
        return reconstruct_case5(c, params.get("H", 0.5), params.get("T", 0.6)).to_spec()
    extra = dict(params)
    if kind in ("slice", "cmc_torus_in_S3"):
        extra["n"] = n
    return build_control(kind, c=c, **extra)


def resolve_tolerances(spec, overrides: dict, scale: float) -> dict:
    """Defaults scaled by ``scale`` with per-check overrides; both may only loosen."""
    if scale < 1.0:
        raise InputError("--tol-scale must be >= 1 (tolerances can only be loosened)")
    names = list(TOLERANCES["closed-form"]) + list(IDENTITY_NAMES)
    out = {}
    for name in names:
        base = _tol(spec, name, None)
        value = base * scale
        if name in overrides:
            if overrides[name] < base:
                raise InputError(f"tolerances.{name}: {overrides[name]:g} is tighter than the default {base:g}")
            value = max(value, float(overrides[name]))
        out[name] = value
    return out


# ---------------------------------------------------------------------------
# grid CSV
# ---------------------------------------------------------------------------

def write_grid_csv(path, points, origin, spacing) -> None:
    ns, nt, d = points.shape
    with open(path, "w", newline="") as fh:
        fh.write(",".join(["u", "v"] + [f"x{k}" for k in range(d)]) + "\n")
        for i in range(ns):
            u = origin[0] + spacing[0] * i
            for j in range(nt):
                v = origin[1] + spacing[1] * j
                row = [u, v] + list(points[i, j])
                fh.write(",".join("%.17g" % x for x in row) + "\n")


def read_grid_csv(path, d: int):
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        expected = ["u", "v"] + [f"x{k}" for k in range(d)]
        if [h.strip() for h in header] != expected:
            raise InputError(f"{path}: line 1: expected header {','.join(expected)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != d + 2:
                raise InputError(f"{path}: line {lineno}: expected {d + 2} fields, got {len(row)}")
            try:
                rows.append([float(x) for x in row])
            except ValueError:
                raise InputError(f"{path}: line {lineno}: non-numeric field") from None
    data = np.array(rows)
    if data.size == 0:
        raise InputError(f"{path}: no data rows")
    us = np.unique(data[:, 0])
    vs = np.unique(data[:, 1])
    ns, nt = len(us), len(vs)
    if ns * nt != len(data) or ns < 2 or nt < 2:
        raise InputError(f"{path}: rows do not form a complete rectangular grid")
    hs, ht = np.diff(us), np.diff(vs)
    for axis, h in (("u", hs), ("v", ht)):
        if np.max(np.abs(h - h.mean())) > 1e-9 * max(1.0, abs(h.mean())):
            raise InputError(f"{path}: {axis} values are not uniformly spaced")
    order = np.lexsort((data[:, 1], data[:, 0]))
    if not np.array_equal(order, np.arange(len(data))):
        raise InputError(f"{path}: rows must be ordered by u then v")
    values = data[:, 2:].reshape(ns, nt, d)
    return values, (us[0], vs[0]), (hs.mean(), ht.mean())


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _emit(text: str, out_path) -> None:
    if out_path:
        Path(out_path).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_build(args) -> int:
    out = Path(args.output)
    doc_path = Path(args.doc) if args.doc else out.with_suffix(".json")
    grid = {"nu": DEFAULT_GRID[0], "nv": DEFAULT_GRID[1]}
    if args.case in (4, 5):
        if args.case == 5:
            c = 1.0 if args.c is None else args.c
            sampled = reconstruct_case5(c, args.H if args.H is not None else 0.5,
                                        args.T if args.T is not None else 0.6, n_s=args.nodes, n_t=args.nodes)
            n = 4
        else:
            c = -1.0 if args.c is None else args.c
            sampled = reconstruct_case4(c, args.T if args.T is not None else 0.8, args.sign,
                                        n_s=args.nodes, n_t=args.nodes)
            n = 2
        write_grid_csv(out, sampled.points, sampled.origin, sampled.spacing)
        rel = os.path.relpath(out.resolve(), doc_path.resolve().parent)
        doc = {"ambient": {"c": c, "n": n}, "surface": {"grid_csv": rel}, "grid": grid,
               "provenance": sampled.provenance}
    else:
        if args.case == 3:
            kind = "case3"
            c = 1.0 if args.c is None else args.c
            n = args.n or 2
            params = {"H": args.H if args.H is not None else 0.5}
        elif args.control:
            kind = args.control
            params = _parse_params(args.param)
            c = 1.0 if args.c is None else args.c
            n = args.n or FIXED_N.get(kind, 3 if kind == "cmc_torus_in_S3" else 2)
        else:
            raise InputError("build needs --case 3|4|5 or --control KIND")
        doc = {"ambient": {"c": c, "n": n}, "surface": {"kind": kind, "params": params}, "grid": grid}
        spec = spec_from_document(parse_document(doc))
        nodes = spec.probe_grid(args.nodes, args.nodes)
        pts = spec.evaluate(nodes[..., 0], nodes[..., 1])
        lo = (nodes[0, 0, 0], nodes[0, 0, 1])
        h = (nodes[1, 0, 0] - nodes[0, 0, 0], nodes[0, 1, 1] - nodes[0, 0, 1])
        write_grid_csv(out, pts, lo, h)
        doc["provenance"] = {"label": kind, "closed_form": True, "csv": str(out)}
    doc_path.write_text(_dumps(doc))
    print(f"wrote {out} and {doc_path}")
    return 0


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise InputError(f"--param {item!r}: expected name=value")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise InputError(f"--param {item!r}: value must be a number") from None
    return out


def _load_spec(path):
    doc = load_json(path)
    parsed = parse_document(doc, Path(path).parent)
    return parsed, spec_from_document(parsed)


def cmd_verify(args) -> int:
    parsed, spec = _load_spec(args.document)
    tol = resolve_tolerances(spec, parsed["tolerances"], args.tol_scale)
    report = verify_surface(spec, parsed["grid"], tol)
    body = report.to_dict()
    body["meta"]["document"] = Path(args.document).name
    _emit(_dumps(body), args.output)
    return 0 if report.passed else 1


def cmd_classify(args) -> int:
    parsed, spec = _load_spec(args.document)
    tol = resolve_tolerances(spec, parsed["tolerances"], args.tol_scale)
    report = verify_surface(spec, parsed["grid"], tol)
    result = classify_surface(spec, report)
    print(result.label)
    print(_dumps(result.diagnostics), end="")
    return 1 if result.label in ("not-pmc-helix", "unclassified") else 0


CURVE_KEYS = {"ambient", "curve"}


def curve_from_document(doc: dict, base_dir: Path = Path(".")):
    _require_keys(doc, CURVE_KEYS, "document", required=("curve",))
    cur = doc["curve"]
    if not isinstance(cur, dict):
        raise InputError("curve: expected an object")
    if "surface" in cur:
        _require_keys(cur, {"surface", "direction", "at"}, "curve", required=("surface", "direction", "at"))
        if cur["direction"] not in ("s", "t"):
            raise InputError("curve.direction: expected 's' or 't'")
        at = _number(cur["at"], "curve.at")
        sdoc = {"ambient": doc.get("ambient"), "surface": cur["surface"]}
        parsed = parse_document(sdoc, base_dir)
        kind = parsed["kind"]
        if kind in ("case4", "case5"):
            p = parsed["params"]
            sampled = (reconstruct_case5(parsed["c"], p.get("H", 0.5), p.get("T", 0.6)) if kind == "case5"
                       else reconstruct_case4(parsed["c"], p.get("T", 0.8), int(p.get("sign", 1))))
            if cur["direction"] == "s" or sampled.commuting():
                return sampled.flow_curve(cur["direction"], at)
            return sampled.to_spec().coordinate_curve("v", at)
        spec = spec_from_document(parsed)
        return spec.coordinate_curve("u" if cur["direction"] == "s" else "v", at)
    _require_keys(cur, {"kind", "params"}, "curve", required=("kind",))
    if cur["kind"] != "circle":
        raise InputError(f"curve.kind: unknown kind {cur['kind']!r}")
    amb = doc.get("ambient")
    _require_keys(amb, {"c", "n"}, "ambient", required=("c", "n"))
    pa = ProductAmbient.of(_number(amb["c"], "ambient.c"), int(amb["n"]))
    params = cur.get("params", {})
    kappa = _number(params.get("kappa", 1.0), "curve.params.kappa")
    return spaceform_circle(pa, pa.base_point(), pa.axis(1), pa.axis(2), kappa)


def cmd_frenet(args) -> int:
    doc = load_json(args.curve)
    curve = curve_from_document(doc, Path(args.curve).parent)
    s, kappa, order = curvature_table(curve, args.samples)
    lines = ["s," + ",".join(f"kappa{k + 1}" for k in range(kappa.shape[1])) + ",order"]
    for si, row, o in zip(s, kappa, order):
        lines.append(",".join("%.17g" % x for x in [si, *row]) + f",{int(o)}")
    _emit("\n".join(lines) + "\n", args.output)
    print(f"label: {classify_curve(curve, max(args.samples, 16))}", file=sys.stderr)
    return 0


def _parse_sweep(items):
    axes = []
    for item in items or []:
        if "=" not in item:
            raise InputError(f"--param {item!r}: expected name=v1,v2,...")
        k, vals = item.split("=", 1)
        try:
            values = [float(v) for v in vals.split(",") if v.strip()]
        except ValueError:
            raise InputError(f"--param {item!r}: values must be numbers") from None
        if not values:
            raise InputError(f"--param {item!r}: no values")
        axes.append((k.strip(), values))
    if not axes:
        raise InputError("sweep needs at least one --param name=v1,v2,...")
    return axes


def cmd_sweep(args) -> int:
    base = load_json(args.document)
    axes = _parse_sweep(args.param)
    names = [k for k, _ in axes]
    rows = [names + ["quantity", "value", "tol", "pass"]]
    all_pass = True
    for combo in itertools.product(*[v for _, v in axes]):
        doc = json.loads(json.dumps(base))
        for k, v in zip(names, combo):
            if k in ("c", "n"):
                doc["ambient"][k] = int(v) if k == "n" else v
            else:
                doc.setdefault("surface", {}).setdefault("params", {})[k] = v
        parsed = parse_document(doc, Path(args.document).parent)
        spec = spec_from_document(parsed)
        tol = resolve_tolerances(spec, parsed["tolerances"], args.tol_scale)
        report = verify_surface(spec, parsed["grid"], tol)
        label = classify_surface(spec, report).label
        all_pass &= report.passed
        prefix = ["%.17g" % v for v in combo]
        for name in sorted(report.checks):
            e = report.checks[name]
            if not e.applicable:
                continue
            rows.append(prefix + [name, "%.17g" % e.max, "%.17g" % e.tol, str(e.passed).lower()])
        rows.append(prefix + ["label", label, "", ""])
    _emit("\n".join(",".join(r) for r in rows) + "\n", args.output)
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# entry points
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmchelix", description="Build, verify and classify pmc helix surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a gallery surface and write its grid CSV and JSON document")
    b.add_argument("--case", type=int, choices=(3, 4, 5))
    b.add_argument("--control", choices=CONTROL_KINDS)
    b.add_argument("--c", type=float)
    b.add_argument("--n", type=int)
    b.add_argument("--H", type=float)
    b.add_argument("--T", type=float)
    b.add_argument("--sign", type=int, default=1, choices=(1, -1))
    b.add_argument("--param", action="append", help="control parameter name=value")
    b.add_argument("--nodes", type=int, default=81, help="grid nodes per direction")
    b.add_argument("-o", "--output", required=True, help="grid CSV path")
    b.add_argument("--doc", help="JSON document path (default: CSV path with .json)")
    b.set_defaults(func=cmd_build)

    for name, func, text in (("verify", cmd_verify, "write a residual report"),
                             ("classify", cmd_classify, "print the case label and diagnostics")):
        v = sub.add_parser(name, help=text)
        v.add_argument("document")
        v.add_argument("--tol-scale", type=float, default=1.0, help="loosen every tolerance by this factor (>= 1)")
        v.add_argument("-o", "--output")
        v.set_defaults(func=func)

    f = sub.add_parser("frenet", help="print a curvature table for a curve document")
    f.add_argument("--curve", required=True)
    f.add_argument("--samples", type=int, default=32)
    f.add_argument("-o", "--output")
    f.set_defaults(func=cmd_frenet)

    s = sub.add_parser("sweep", help="verify over a parameter lattice, long-form CSV")
    s.add_argument("document")
    s.add_argument("--param", action="append", help="name=v1,v2,...")
    s.add_argument("--tol-scale", type=float, default=1.0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_sweep)
    return p


def run(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (InputError, PmcHelixError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
