import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from projumbilic.cli import dumps, main

X4 = repr(2 ** -0.25)


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_eval_examples(capsys):
    code, d = run_json(capsys, "eval", "--fixture", "sphere", "--point", "0.7071,0,0.7071,0")
    assert code == 0 and d["coeff"] == [0, 0] and d["beta"] == 0
    assert d["contact_order"] == "AtLeast3" and d["strongly_c_convex_here"] is True
    code, d = run_json(capsys, "eval", "--fixture", "lp", "--param", "4",
                       "--point", f"{X4},0,{X4},0")
    assert d["coeff"] == pytest.approx([-0.5, 0], abs=1e-14)
    _, e = run_json(capsys, "eval", "--expr", "abs2(z1)+abs2(z2)-1", "--point", "1,0,0,0")
    _, f = run_json(capsys, "eval", "--fixture", "sphere", "--point", "1,0,0,0")
    assert e == f


def test_eval_field_order(capsys):
    _, out = run(capsys, "eval", "--fixture", "sphere", "--point", "1,0,0,0")
    keys = list(json.loads(out))
    assert keys == ["surface", "point", "coeff", "numerator", "denominator", "beta",
                    "contact_order", "strongly_c_convex_here"]


@pytest.mark.parametrize("argv,code,err", [
    (["eval", "--expr", "abs2(z1)+", "--point", "1,0,0,0"], 2, "ParseError"),
    (["eval", "--fixture", "sphere", "--point", "2,0,0,0"], 3, "NotOnSurface"),
    (["eval", "--expr", "1-abs2(z1)-abs2(z2)", "--point", "1,0,0,0"], 4, "LeviDegenerate"),
    (["scan", "--fixture", "heisenberg", "--resolution", "3"], 5, "CircularityError"),
    (["eval", "--fixture", "torus", "--param", "0.5", "--point", "1,0,1,0"], 2, "BadParams"),
])
def test_error_exit_codes(capsys, argv, code, err):
    c, d = run_json(capsys, *argv)
    assert c == code and d["error"] == err and d["exit_code"] == code


def test_tolerance_flag(capsys):
    code, _ = run(capsys, "eval", "--fixture", "sphere", "--point", "0.7071,0,0.7071,0",
                  "--tolerance", "1e-8")
    assert code == 3


def _scan(capsys, *argv):
    code, out = run(capsys, "scan", *argv)
    rows = list(csv.DictReader(io.StringIO(out)))
    return code, rows


def test_scan_bulge_minimum_at_origin(capsys):
    code, rows = _scan(capsys, "--fixture", "bulge", "--region=-2,2,-2,2",
                       "--resolution", "101", "--threads", "3")
    assert code == 0 and len(rows) == 101 ** 2
    best = min(rows, key=lambda r: float(r["abs_b"]))
    assert float(best["re_zeta"]) == 0 and float(best["im_zeta"]) == 0
    # row-major: real part varies fastest
    assert float(rows[1]["re_zeta"]) > float(rows[0]["re_zeta"])
    assert rows[1]["im_zeta"] == rows[0]["im_zeta"]


def test_scan_sphere_vanishes(capsys):
    _, rows = _scan(capsys, "--fixture", "sphere", "--resolution", "11")
    assert max(float(r["abs_b"]) for r in rows) <= 1e-10


def test_scan_threads_do_not_change_output(capsys):
    base = ["scan", "--fixture", "deformed_sphere", "--param", "0.05", "--resolution", "21"]
    _, a = run(capsys, *base, "--threads", "1")
    _, b = run(capsys, *base, "--threads", "4")
    assert a == b


def test_scan_matches_cells(capsys):
    n = 61
    _, rows = _scan(capsys, "--fixture", "deformed_sphere", "--param", "0.05",
                    "--region=-1.5,1.5,-1.5,1.5", "--resolution", str(n))
    _, rep = run_json(capsys, "find-umbilics", "--fixture", "deformed_sphere", "--param", "0.05")
    x = np.array([float(r["re_zeta"]) for r in rows]).reshape(n, n)
    y = np.array([float(r["im_zeta"]) for r in rows]).reshape(n, n)
    m = np.array([float(r["abs_b"]) for r in rows]).reshape(n, n)
    inner = m[1:-1, 1:-1]
    is_min = np.ones_like(inner, dtype=bool)
    for di in (-1, 0, 1):
        for dk in (-1, 0, 1):
            if di or dk:
                is_min &= inner < m[1 + di:n - 1 + di, 1 + dk:n - 1 + dk]
    minima = (x[1:-1, 1:-1] + 1j * y[1:-1, 1:-1])[is_min]
    centers = np.array([complex(*c["center"]) for c in rep["cells"]])
    step = 3 / (n - 1)
    assert len(minima) == len(centers) == 4
    for c in centers:
        assert np.abs(minima - c).min() <= 1.5 * step


def test_find_umbilics_examples(capsys):
    _, d = run_json(capsys, "find-umbilics", "--fixture", "deformed_sphere", "--param", "0.05")
    assert d["cells"] and d["index_sum"] == -4 and d["stokes_consistent"] is True
    assert d["large_circle_winding"] == -4 and not d["warnings"]
    _, d = run_json(capsys, "find-umbilics", "--fixture", "bulge")
    assert d["index_sum"] == -2 and all(np.hypot(*c["refined"]) <= 1e-3 for c in d["cells"])
    assert any("axis-umbilic" in w for w in d["warnings"])
    _, d = run_json(capsys, "find-umbilics", "--fixture", "lp", "--param", "4")
    assert d["cells"] == [] and d["warnings"]
    assert d["min_abs_b_sampled"] == pytest.approx(0.5)


def test_winding_command(capsys):
    _, d = run_json(capsys, "winding", "--fixture", "deformed_sphere", "--param", "0.05",
                    "--large", "20")
    assert d["winding"] == -4 and d["axis_umbilic"] is False
    _, d = run_json(capsys, "winding", "--fixture", "lp", "--param", "4", "--circle", "0,0,1")
    assert d["winding"] == -2
    _, d = run_json(capsys, "winding", "--fixture", "bulge", "--square", "0,0,0.5")
    assert d["winding"] == -2


def test_transform_check_command(capsys, tmp_path):
    _, d = run_json(capsys, "transform-check", "--fixture", "heisenberg", "--map", "cayley",
                    "--count", "5")
    assert d["max_residual"] <= 1e-7 and len(d["checks"]) == 5
    _, d = run_json(capsys, "transform-check", "--fixture", "bulge", "--count", "5", "--seed", "3")
    assert d["max_residual"] <= 1e-7
    path = tmp_path / "map.json"
    path.write_text(json.dumps([[1, 0], [0, 0], [0, 0], [0, 0], [0, 1], [0, 0],
                                [0, 0], [0, 0], [1, 0]]))
    _, d = run_json(capsys, "transform-check", "--fixture", "sphere", "--map", str(path),
                    "--point", "1,0,0,0")
    assert d["max_residual"] == 0


def test_rossi_command(capsys):
    h = repr(2 ** -0.5)
    _, d = run_json(capsys, "rossi", "--t", "0.3", "--point", f"{h},0,0,{h}")
    f = d["fields"][0]
    assert f["axis_ratio"] == pytest.approx(13 / 7) and f["minor_dir"] == pytest.approx([0, 1])
    _, d = run_json(capsys, "rossi", "--t", "0.7", "--count", "20")
    assert all(r["axis_ratio"] == pytest.approx(17 / 3) for r in d["fields"])


def test_verify_only(capsys):
    code, out = run(capsys, "verify", "--only", "rossi")
    lines = out.strip().splitlines()
    assert code == 0 and all("[rossi]" in ln for ln in lines[:-1])
    assert lines[-1].startswith("PASS")
    code, out = run(capsys, "verify", "--only", "bogus")
    assert code == 2


def test_catalog_file(capsys, tmp_path):
    path = tmp_path / "cat.json"
    path.write_text(json.dumps([{"name": "lp", "params": [4]},
                                {"expression": "abs2(z1)+abs2(z2)-1"}]))
    _, d = run_json(capsys, "eval", "--catalog", str(path), "--point", f"{X4},0,{X4},0")
    assert d["coeff"][0] == pytest.approx(-0.5)
    _, d = run_json(capsys, "eval", "--catalog", str(path), "--entry", "1", "--point", "0,0,1,0")
    assert d["coeff"] == [0, 0]


def test_output_file(capsys, tmp_path):
    path = tmp_path / "out.json"
    code, out = run(capsys, "eval", "--fixture", "sphere", "--point", "1,0,0,0",
                    "--output", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["beta"] == 0


def test_dumps_formatting():
    assert dumps(0.1) == "0.10000000000000001"
    assert dumps(complex(-0.0, 1)) == "[0, 1]"
    assert dumps({"a": [1, 2.5], "b": None, "c": True}) == \
        '{\n  "a": [1, 2.5],\n  "b": null,\n  "c": true\n}'


@pytest.mark.parametrize("argv", [
    ["find-umbilics", "--fixture", "deformed_sphere", "--param", "0.05"],
    ["scan", "--fixture", "bulge", "--resolution", "31", "--threads", "4"],
    ["transform-check", "--fixture", "lp", "--param", "3", "--count", "4", "--seed", "9"],
])
def test_byte_identical_reruns(argv):
    cmd = [sys.executable, "-m", "projumbilic", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and len(a) > 0
