import csv
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from stressfree import export
from stressfree.cli import main
from stressfree.export import Header, Shape


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def cli(*argv):
    return subprocess.run([sys.executable, "-m", "stressfree", *argv], capture_output=True, text=True)


# ---------------------------------------------------------------- writers

def test_fmt_roundtrips():
    for x in (0.1, 1 / 3, 1e-300, -2.5e17, 3.0):
        assert float(export.fmt(x)) == x
    assert export.fmt(np.float64(0.1)) == "0.1"
    assert export.fmt(True) == "true"
    assert export.fmt(np.int64(4)) == "4"


def test_json_header_first_and_nan_as_text():
    text = export.to_json({"a": np.array([1.0, np.nan]), "b": np.bool_(True)}, Header("x", 3))
    doc = json.loads(text)
    assert list(doc)[0] == "header"
    assert doc["header"]["seed"] == 3
    assert doc["a"] == [1.0, "nan"] and doc["b"] is True


def test_csv_header_and_notes():
    text = export.to_csv(("k", "v"), [(1, 0.5)], Header("cmd", None), {"note": 2.0})
    lines = text.splitlines()
    assert lines[0].startswith("# tool: stressfree")
    assert "# note: 2.0" in lines
    body = [line for line in lines if not line.startswith("#")]
    assert list(csv.reader(body)) == [["k", "v"], ["1", "0.5"]]


def test_color_period():
    assert export.color_for_angle(0.3) == export.color_for_angle(0.3 + np.pi)
    assert len(set(export.CYCLIC_256)) > 200


def test_svg_structure():
    sq = Shape(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float), fill="#ff0000")
    text = export.to_svg([[sq], [sq]], Header("t"))
    assert text.count("<polygon") == 2
    assert "scale(1 -1)" in text and "command: t" in text


# ---------------------------------------------------------------- commands

def test_construct_json(capsys):
    code, out = run(capsys, "construct", "--n", "5", "--alpha", "0.3")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] is True
    assert doc["header"]["command"] == "stressfree construct --n 5 --alpha 0.3"
    assert len(doc["map"]["pieces"]) == 12


def test_construct_csv(capsys):
    code, out = run(capsys, "construct", "--n", "4", "--alpha", "0.2", "--format", "csv")
    rows = list(csv.DictReader(line for line in out.splitlines() if not line.startswith("#")))
    assert code == 0
    assert {r["check"] for r in rows} >= {"well_inclusion", "rank_one", "flip"}
    assert all(r["passed"] == "true" for r in rows)


def _svg_points(text):
    pts = []
    for block in re.findall(r'points="([^"]+)"', text):
        for pair in block.split():
            x, y = pair.split(",")
            pts.append((float(x), float(y)))
    return np.array(pts)


def test_star_svg_fits_viewbox(capsys):
    code, out = run(capsys, "star", "--n", "50", "--alpha", "0.35")
    assert code == 0
    w, h = map(float, re.search(r'viewBox="0 0 (\S+) (\S+)"', out).groups())
    tx, ty = map(float, re.search(r"translate\((\S+) (\S+)\)", out).groups())
    P = _svg_points(out)
    X, Y = P[:, 0] + tx, -P[:, 1] + ty
    assert X.min() >= 0 and X.max() <= w and Y.min() >= 0 and Y.max() <= h


def test_star_symmetric_is_grey(capsys):
    _code, out = run(capsys, "star", "--n", "3", "--alpha", "0.5")
    fills = set(re.findall(r'fill="(#[0-9a-f]{6})"', out))
    assert fills == {export.NEUTRAL}


def test_star_colours_follow_directors(capsys):
    _code, out = run(capsys, "star", "--n", "3", "--alpha", "0.47", "--layers", "3")
    fills = set(re.findall(r'fill="(#[0-9a-f]{6})"', out))
    assert len(fills - {export.NEUTRAL}) >= 3


def test_star_csv(capsys):
    code, out = run(capsys, "star", "--n", "6", "--alpha", "0.3", "--format", "csv")
    rows = [r for r in out.splitlines() if not r.startswith("#")]
    assert code == 0 and rows[0] == "ring,radius,elastic,bound_term"
    assert "# layers:" in out


def test_limit_and_linearize(capsys):
    code, out = run(capsys, "limit", "--alpha", "0.2", "--format", "json", "--samples", "100")
    doc = json.loads(out)
    assert code == 0 and doc["membership_failures"] == 0
    assert doc["beta0"] == pytest.approx(0.64350110879328439)
    code, out = run(capsys, "linearize", "--n", "5")
    assert code == 0 and "# orbit_count: 5" in out
    code, out = run(capsys, "linearize", "--n", "4", "--field", "w", "--format", "csv")
    assert code == 0 and out.count("\n") > 400


def test_roots(capsys):
    code, out = run(capsys, "roots", "--n", "6", "--alpha", "0.3")
    doc = json.loads(out)
    assert code == 0
    assert [r["admissible"] for r in doc["roots"]] == [True, False, False, False]


def test_scan3d_exit_codes(capsys):
    code, out = run(capsys, "scan3d", "--axis", "vertex", "--theta-steps", "5", "--r-steps", "5")
    assert code == 0
    code, out = run(capsys, "scan3d", "--axis", "x3", "--theta-steps", "5", "--r-steps", "5")
    assert code == 1  # smallest disparity on the x3 band is below 1e-2
    rows = [r for r in out.splitlines() if not r.startswith("#")]
    assert len(rows) == 1 + 25 * 4


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--n", "2", "--alpha", "0.3"],
        ["construct", "--n", "5", "--alpha", "1.0"],
        ["construct", "--n", "5", "--alpha", "0.3", "--format", "svg"],
        ["scan3d", "--axis", "edge"],
        ["scan3d", "--theta-steps", "0"],
        ["scan3d", "--r-max", "0.5"],
        ["verify", "--suite", "nope"],
        ["limit", "--alpha", "0.2", "--h", "0.01"],
    ],
)
def test_usage_errors_exit_2(argv):
    assert cli(*argv).returncode == 2


def test_outputs_are_byte_identical(tmp_path):
    outs = []
    path = tmp_path / "o.csv"  # the header echoes the argv, so keep it fixed
    for _ in range(2):
        r = cli("limit", "--alpha", "0.3", "--samples", "200", "--seed", "5", "--format", "csv", "--out", str(path))
        assert r.returncode == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert b"# seed: 5" in outs[0]


def test_seed_changes_samples(capsys):
    _c, a = run(capsys, "limit", "--alpha", "0.3", "--samples", "20", "--seed", "1", "--format", "csv")
    _c, b = run(capsys, "limit", "--alpha", "0.3", "--samples", "20", "--seed", "2", "--format", "csv")
    strip = lambda t: [line for line in t.splitlines() if not line.startswith("#")]
    assert strip(a) != strip(b)


def test_verify_text(capsys):
    code, out = run(capsys, "verify", "--suite", "appendix", "--seed", "7")
    assert code == 0
    assert re.search(r"^\d+/\d+ checks passed$", out, re.M)
    assert "FAIL" not in out
