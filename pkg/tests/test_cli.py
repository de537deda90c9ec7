import json

import numpy as np
import pytest

from pmchelix.cli import parse_document, read_grid_csv, resolve_tolerances, run, write_grid_csv, InputError
from pmchelix.reconstruct import build_case3


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture(scope="module")
def case5_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("case5")
    assert run(["build", "--case", "5", "--c", "1", "--H", "0.5", "--T", "0.6", "-o", str(d / "case5.csv")]) == 0
    return d


def test_build_then_verify(case5_files, tmp_path):
    out = tmp_path / "report.json"
    code = run(["verify", str(case5_files / "case5.json"), "-o", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    for name in ("pmc", "helix", "gauss", "codazzi", "ricci"):
        assert report["checks"][name]["pass"] is True
    assert set(report["checks"]["pmc"]) >= {"max", "mean", "tol", "pass"}
    assert "std" in report["scalars"]["K"]


def test_verify_is_deterministic(case5_files, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["verify", str(case5_files / "case5.json"), "-o", str(a)])
    run(["verify", str(case5_files / "case5.json"), "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_csv_round_trip_is_bit_faithful(tmp_path):
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(5, 4, 3)) * 1e3
    path = tmp_path / "g.csv"
    write_grid_csv(path, pts, (0.1, -0.2), (0.02, 0.03))
    values, origin, spacing = read_grid_csv(path, 3)
    assert np.array_equal(values, pts)
    assert origin == pytest.approx((0.1, -0.2), abs=1e-15)
    assert spacing == pytest.approx((0.02, 0.03), rel=1e-12)
    header = path.read_text().splitlines()[0]
    assert header == "u,v,x0,x1,x2"


def test_classify_torus_helix(tmp_path, capsys):
    doc = write(tmp_path / "torus.json", {"ambient": {"c": 1, "n": 3},
                                          "surface": {"kind": "torus_helix", "params": {"slope": 0.5}},
                                          "grid": {"nu": 24, "nv": 24}})
    assert run(["classify", doc]) == 1
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "not-pmc-helix"
    diag = json.loads("\n".join(out[1:]))
    assert "pmc" in diag["failed_checks"]


@pytest.mark.parametrize("args, label", [
    (["--case", "3"], "case3"),
    (["--case", "4"], "case4"),
    (["--control", "slice"], "minimal"),
    (["--control", "cmc_torus_in_S3", "--param", "r1=0.6"], "case2"),
])
def test_pipeline_labels(tmp_path, capsys, args, label):
    csv = tmp_path / "s.csv"
    assert run(["build", *args, "--nodes", "41", "-o", str(csv)]) == 0
    doc = json.loads((tmp_path / "s.json").read_text())
    doc["grid"] = {"nu": 16, "nv": 16}
    write(tmp_path / "s.json", doc)
    capsys.readouterr()
    run(["classify", str(tmp_path / "s.json")])
    assert capsys.readouterr().out.splitlines()[0] == label


def test_frenet_case5_helix(tmp_path, capsys):
    doc = write(tmp_path / "gamma1.json", {"ambient": {"c": 1, "n": 4},
                                           "curve": {"surface": {"kind": "case5", "params": {"H": 0.5, "T": 0.6}},
                                                     "direction": "s", "at": 0.3}})
    out = tmp_path / "k.csv"
    assert run(["frenet", "--curve", doc, "--samples", "16", "-o", str(out)]) == 0
    rows = np.loadtxt(out, delimiter=",", skiprows=1)
    assert out.read_text().startswith("s,kappa1,kappa2,kappa3,order")
    assert np.allclose(rows[:, 1], 0.8, atol=1e-6)
    assert np.allclose(rows[:, 2], 0.6, atol=1e-6)
    assert np.all(rows[:, 4] == 3)
    assert "helix" in capsys.readouterr().err


def test_frenet_circle(tmp_path, capsys):
    doc = write(tmp_path / "c.json", {"ambient": {"c": -1, "n": 2}, "curve": {"kind": "circle",
                                                                              "params": {"kappa": 1.5}}})
    assert run(["frenet", "--curve", doc]) == 0
    captured = capsys.readouterr()
    rows = np.loadtxt(captured.out.splitlines()[1:], delimiter=",")
    assert np.allclose(rows[:, 1], 1.5, rtol=1e-6)
    assert "circle" in captured.err


def test_sweep(tmp_path, capsys):
    doc = write(tmp_path / "c3.json", {"ambient": {"c": 1, "n": 2}, "surface": {"kind": "case3", "params": {}},
                                       "grid": {"nu": 8, "nv": 8}})
    assert run(["sweep", doc, "--param", "H=0.4,0.6", "--param", "c=1,2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "H,c,quantity,value,tol,pass"
    labels = [ln for ln in lines if ",label," in ln]
    assert len(labels) == 4 and all(ln.endswith("case3,,") for ln in labels)


@pytest.mark.parametrize("doc, message", [
    ({"ambient": {"c": 1, "n": 2}, "surface": {"kind": "slice"}, "extra": 1}, "unknown key"),
    ({"ambient": {"c": 1}, "surface": {"kind": "slice"}}, "missing key 'n'"),
    ({"ambient": {"c": 1, "n": 2}, "surface": {"kind": "blob"}}, "unknown kind"),
    ({"ambient": {"c": 1, "n": 3}, "surface": {"kind": "case5"}}, "dimension 4"),
    ({"ambient": {"c": 1, "n": 2}, "surface": {"kind": "slice"}, "grid": {"nu": 1, "nv": 4}}, "grid.nu"),
    ({"ambient": {"c": 1, "n": 2}, "surface": {"kind": "slice"}, "tolerances": {"bogus": 1}}, "unknown check"),
    ({"ambient": {"c": "one", "n": 2}, "surface": {"kind": "slice"}}, "ambient.c"),
])
def test_schema_errors(doc, message):
    with pytest.raises(InputError, match=message):
        parse_document(doc)


def test_invalid_inputs_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["verify", str(bad)]) == 2
    assert "line 1" in capsys.readouterr().err
    assert run(["verify", str(tmp_path / "missing.json")]) == 2
    assert run(["nonsense"]) == 2
    assert run(["build", "-o", str(tmp_path / "x.csv")]) == 2
    doc = write(tmp_path / "h.json", {"ambient": {"c": -1, "n": 2}, "surface": {"kind": "case3",
                                                                              "params": {"H": 0.4}}})
    assert run(["verify", doc]) == 2
    assert run(["build", "--case", "3", "-o", str(tmp_path / "no" / "dir.csv")]) == 2


def test_malformed_csv(tmp_path, capsys):
    csv = tmp_path / "g.csv"
    csv.write_text("u,v,x0,x1,x2,x3\n0,0,1,0,0,0\n0,0.1,1,0,zero,0\n")
    doc = write(tmp_path / "g.json", {"ambient": {"c": 1, "n": 2}, "surface": {"grid_csv": "g.csv"}})
    assert run(["verify", doc]) == 2
    assert "g.csv" in capsys.readouterr().err


def test_tolerance_overrides_only_loosen():
    spec = build_case3(1.0, 2, 0.5)
    tol = resolve_tolerances(spec, {"pmc": 1e-4}, 2.0)
    assert tol["pmc"] == pytest.approx(1e-4)  # the looser of override and scaled default
    assert tol["gauss"] == pytest.approx(2e-6)
    with pytest.raises(InputError):
        resolve_tolerances(spec, {"pmc": 1e-9}, 1.0)
    with pytest.raises(InputError):
        resolve_tolerances(spec, {}, 0.5)


def test_verify_failure_exit_1(tmp_path):
    doc = write(tmp_path / "g.json", {"ambient": {"c": 1, "n": 2}, "surface": {"kind": "graph_strip"},
                                      "grid": {"nu": 8, "nv": 8}})
    assert run(["verify", doc]) == 1
