import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from curvedet.cli import run
from curvedet.io import CSV_HEADER, curve_csv, curve_svg, write_atomic
from curvedet.selfcheck import fixtures


def dump(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def helix_file(tmp_path):
    return dump(tmp_path, "helix.json", fixtures()["helix"].to_json())


def test_csv_format(tmp_path):
    assert run(["generate", "--family", "salkowski", "--csv", str(tmp_path / "c.csv")]) == 0
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == CSV_HEADER
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    assert rows.shape[1] == 16
    assert np.abs(rows[:, 13] - 1).max() <= 1e-15
    s = np.array([float(v) for v in lines[1].split(",")])
    assert all(float(format(v, ".17g")) == v for v in s)


def test_svg_format():
    t = np.linspace(0, 1, 50)
    svg = curve_svg(np.column_stack((t, t**2, t**3)), "xz")
    assert 'viewBox="0 0 800 600"' in svg
    assert svg.count("<polyline") == 1
    pts = [tuple(map(float, p.split(","))) for p in svg.split('points="')[1].split('"')[0].split()]
    xs, ys = zip(*pts)
    assert min(xs) >= 0 and max(xs) <= 800 and min(ys) >= 0 and max(ys) <= 600
    with pytest.raises(ValueError):
        curve_svg(np.zeros((3, 3)), "xw")


def test_atomic_write(tmp_path):
    path = tmp_path / "out.txt"
    write_atomic(path, "one\n")
    write_atomic(path, "two\n")
    assert path.read_text() == "two\n"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_csv_needs_frames():
    from curvedet.curves import SampledCurve

    with pytest.raises(ValueError):
        curve_csv(SampledCurve(s=np.arange(3.0), positions=np.zeros((3, 3)), provenance="analytic"))


def test_classify_helix(helix_file, tmp_path):
    out = tmp_path / "r.json"
    assert run(["classify", "--curve", helix_file, "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["flags"]["general-helix"]["value"] is True
    assert doc["flags"]["planar"]["value"] is False


def test_generate_salkowski_outputs(tmp_path):
    csv, svg = tmp_path / "s.csv", tmp_path / "s.svg"
    args = ["generate", "--family", "salkowski", "--a", "1", "--b", "1", "--csv", str(csv), "--svg", str(svg)]
    assert run(args) == 0
    assert csv.read_text().startswith(CSV_HEADER)
    assert "<polyline" in svg.read_text()
    first = csv.read_bytes()
    assert run(args) == 0
    assert csv.read_bytes() == first


def test_residuals_salkowski(tmp_path, capsys):
    spec = dump(tmp_path, "s.json", fixtures()["salkowski"].to_json())
    assert run(["residuals", "--curve", spec, "--samples", "40"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "s D0 D1 D2 D3 ode"
    d3 = next(ln for ln in out.splitlines() if ln.startswith("max |D3|"))
    assert float(d3.split("=")[1]) <= 1e-6


def test_plot(helix_file, tmp_path):
    svg = tmp_path / "h.svg"
    assert run(["plot", "--curve", helix_file, "--svg", str(svg), "--plane", "yz"]) == 0
    assert svg.read_text().count("<polyline") == 1


def test_classify_deterministic(helix_file, capsys):
    run(["classify", "--curve", helix_file, "--samples", "50"])
    first = capsys.readouterr().out
    run(["classify", "--curve", helix_file, "--samples", "50"])
    assert capsys.readouterr().out == first


def test_usage_errors(tmp_path, capsys):
    assert run([]) == 1
    assert run(["classify"]) == 1
    assert run(["classify", "--curve", str(tmp_path / "missing.json")]) == 1
    assert run(["generate", "--family", "salkowski", "--csv", str(tmp_path / "no" / "x.csv")]) == 1
    err = capsys.readouterr().err
    assert all(ln.startswith("curvedet: usage error:") for ln in err.splitlines())


def test_spec_errors(tmp_path, capsys):
    bad_expr = dump(tmp_path, "e.json", {"expr": {"x": "s +", "y": "0", "z": "0"}, "domain": [0, 1]})
    bad_family = dump(tmp_path, "f.json", {"family": "spiral", "domain": [0, 1]})
    not_json = tmp_path / "n.json"
    not_json.write_text("{")
    assert run(["classify", "--curve", bad_expr]) == 2
    assert run(["classify", "--curve", bad_family]) == 2
    assert run(["classify", "--curve", str(not_json)]) == 2
    assert len(capsys.readouterr().err.splitlines()) == 3


def test_numeric_errors(tmp_path, capsys):
    line = dump(tmp_path, "l.json", fixtures()["line"].to_json())
    assert run(["generate", "--curve", line]) == 3
    assert run(["generate", "--family", "salkowski", "--smin", "-2", "--smax", "0"]) == 3
    assert run(["generate", "--family", "salkowski", "--step", "1"]) == 3
    err = capsys.readouterr().err.splitlines()
    assert len(err) == 3 and all(ln.startswith("curvedet: numeric error:") for ln in err)


def test_module_entry_point(helix_file):
    proc = subprocess.run(
        [sys.executable, "-m", "curvedet", "classify", "--curve", helix_file, "--samples", "30"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert math.isfinite(json.loads(proc.stdout)["stats"]["D2"]["max"])
