import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from annulus_rotation import cli

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "example.ini"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_winding_fixtures(capsys):
    code, out, _ = run(capsys, "winding", "--fixture", "parallel")
    assert code == 0 and json.loads(out) == {"w": 0.0, "nearest_int": 0}
    code, out, _ = run(capsys, "winding", "--fixture", "under")
    assert code == 0 and json.loads(out)["nearest_int"] == -1
    code, _, err = run(capsys, "winding", "--fixture", "crossing")
    assert code == 2 and "intersect" in err


def test_winding_files(capsys, tmp_path):
    a, b = cli.fixture_paths("under")
    code, out, _ = run(capsys, "winding", a, b)
    assert code == 0 and json.loads(out)["nearest_int"] == -1
    code, _, _ = run(capsys, "winding", b, a)
    assert code == 2
    code, _, _ = run(capsys, "winding", str(tmp_path / "missing.arc"), b)
    assert code == 1


def test_orbit_rerun_is_byte_identical(capsys, tmp_path):
    outs = []
    for tag in ("a", "b"):
        prefix = tmp_path / tag
        code, _, _ = run(capsys, "orbit", "--config", str(CONFIG), "--out", str(prefix), "--horizon", "500",
                         "--jobs", "2")
        assert code == 0
        files = sorted(tmp_path.glob(f"{tag}.*"))
        assert len(files) == 6
        outs.append([f.read_bytes() for f in files])
    assert outs[0] == outs[1]


def test_csv_and_json_round_trip(capsys, tmp_path):
    prefix = tmp_path / "t"
    code, out, _ = run(capsys, "orbit", "--system", "transverse", "--point", "q", "--horizon", "400",
                       "--out", str(prefix))
    assert code == 0
    summary = json.loads((tmp_path / "t.summary.json").read_text())
    printed = json.loads(out)
    for key, val in summary.items():
        assert printed[key] == val
    with open(tmp_path / "t.series.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 401
    from annulus_rotation import iterate_orbit, build_transverse_example
    sysm = build_transverse_example()
    s = iterate_orbit(sysm.source, sysm.marked_points["q"], 400)
    assert [float(r["x1"]) for r in rows] == s.x1.tolist()
    assert [float(r["r"]) for r in rows] == s.r.tolist()


def test_periodic_orbit_summary(capsys, tmp_path):
    code, out, _ = run(capsys, "orbit", "--system", "periodic:1/3", "--horizon", "999",
                       "--out", str(tmp_path / "p"))
    rec = json.loads(out)
    assert code == 0 and rec["rotation_estimate"] == pytest.approx(1 / 3, abs=1e-15)
    assert rec["classification"] == "Bounded(0)"


def test_errors_and_exit_codes(capsys, tmp_path):
    assert run(capsys, "orbit", "--system", "nowhere")[0] == 2
    assert run(capsys, "orbit")[0] == 2
    assert run(capsys, "orbit", "--system", "transverse", "--point", "zz")[0] == 2
    assert run(capsys, "orbit", "--system", "periodic:1/3", "--tol", "bogus=1")[0] == 2
    assert run(capsys, "orbit", "--system", "horseshoe", "--direction", "backward", "--horizon", "20",
               "--out", str(tmp_path / "h"))[0] == 1
    bad = tmp_path / "bad.ini"
    bad.write_text("[x]\npoint = q\n")
    assert run(capsys, "orbit", "--config", str(bad))[0] == 2


def test_horseshoe_command(capsys):
    code, out, _ = run(capsys, "horseshoe", "--code", "periodic:100", "--horizon", "3000")
    rec = json.loads(out)
    assert code == 0 and rec["shift_pass"] and rec["itinerary_pass"]
    assert rec["rotation_estimate"] == pytest.approx(1 / 3, abs=1e-3)


def test_gallery_command(capsys):
    code, out, _ = run(capsys, "gallery", "periodic:1/3", "transverse")
    recs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and [r["invariance"] for r in recs] == [1.0, 1.0]
    assert recs[1]["deck_error"] < 1e-12


def test_verify_winding_suite(capsys):
    code, out, _ = run(capsys, "verify", "winding")
    lines = out.splitlines()
    assert code == 0 and lines[-1].startswith("PASS: 3/3")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "annulus_rotation", "winding", "--fixture", "under"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["nearest_int"] == -1
