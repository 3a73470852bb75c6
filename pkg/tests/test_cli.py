import json
import subprocess
import sys

import pytest

from levelpoints.cli import main
from levelpoints.lattice import hecke_degree


@pytest.fixture
def window4(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("-1.5 1.5\n" * 4)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enumerate_det(capsys, window4):
    code, out, _ = run(capsys, "enumerate", "--family", "det", "--n", "2", "--m", "1", "--window", window4)
    lines = out.splitlines()
    assert code == 0
    assert lines[0].startswith("# family=det:n=2 m=1 window-hash=")
    assert len(lines) == 21


def test_enumerate_brute_force_and_cache(capsys, tmp_path, window4):
    argv = ["enumerate", "--family", "det", "--n", "2", "--m", "3", "--window", window4]
    _, fast, _ = run(capsys, *argv)
    _, brute, _ = run(capsys, *argv, "--brute-force")
    assert fast == brute
    cache = tmp_path / "cache"
    out = tmp_path / "pts.csv"
    run(capsys, *argv, "--cache-dir", str(cache), "--out", str(out), "--threads", "2")
    assert out.read_text() == fast
    assert len(list(cache.glob("*.csv"))) == 1
    run(capsys, *argv, "--cache-dir", str(cache), "--out", str(out))
    assert out.read_text() == fast


def test_enumerate_quad(capsys, tmp_path, window4):
    q = tmp_path / "q.txt"
    q.write_text("1 0 0 0\n1 0 0\n-1 0\n-1\n")
    code, out, _ = run(capsys, "enumerate", "--family", "quad", "--signature", "2,2", "--qcoeffs", str(q),
                       "--m", "1", "--window", window4)
    assert code == 0 and out.startswith("# family=quad:r=2,s=2,q=1,0,0,0,1,0,0,-1,0,-1")


def test_enumerate_budget_error(capsys, window4):
    code, _, err = run(capsys, "enumerate", "--family", "det", "--n", "2", "--m", "10000", "--window", window4,
                       "--budget", "10")
    assert code == 2 and "budget" in err


def test_hecke(capsys):
    code, out, _ = run(capsys, "hecke", "--n", "3", "--m", "12")
    assert code == 0 and int(out) == hecke_degree(3, 12)
    _, out, _ = run(capsys, "hecke", "--n", "2", "--m", "2", "--list")
    assert out.splitlines() == ["1,0,0,2", "1,1,0,2", "2,0,0,1"]


def test_measure(capsys, window4):
    code, out, _ = run(capsys, "measure", "--family", "det", "--n", "2", "--window", window4,
                       "--samples", "20000", "--seed", "3")
    value, se, hits = out.strip().split(",")
    assert code == 0 and float(value) > 0 and float(se) > 0 and int(hits) > 0


def test_orbits(capsys, window4):
    code, out, err = run(capsys, "orbits", "--family", "det", "--n", "2", "--m", "4", "--window", window4)
    assert code == 0
    assert [line.split(";")[0] for line in out.splitlines()] == ["1,4", "2,2"]
    assert "Smith" in err


def test_fundamental(capsys):
    _, out, _ = run(capsys, "fundamental", "--max", "13")
    assert out.split() == ["1", "5", "8", "12", "13"]


def test_report(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family = det\nn = 2\nlevels = 5:25:10\nwindow_radius = 1.5\nsamples = 20000\n")
    out = tmp_path / "out" / "report.json"
    code, _, _ = run(capsys, "report", "--config", str(cfg), "--out", str(out), "--threads", "2")
    assert code == 0
    assert [r["m"] for r in json.loads(out.read_text())["equidist"]["rows"]] == [5, 15, 25]


def test_report_exit_code_on_level_error(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("family = det\nn = 2\nlevels = 2, 900\nwindow_radius = 1.5\nsamples = 20000\nbudget = 1000\n")
    code, _, err = run(capsys, "report", "--config", str(cfg), "--out", str(tmp_path / "r.json"))
    assert code == 1 and "level 900" in err


def test_missing_window_file(capsys, tmp_path):
    code, _, err = run(capsys, "enumerate", "--family", "det", "--n", "2", "--m", "1",
                       "--window", str(tmp_path / "nope.txt"))
    assert code == 2 and "error" in err


def test_module_entry_point(window4):
    res = subprocess.run([sys.executable, "-m", "levelpoints", "fundamental", "--max", "8"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.split() == ["1", "5", "8"]
