import json
import subprocess
import sys

import pytest

from bismutlab import cli, index_tools as it

def test_hopf_exit_zero_and_reports(tmp_path):
    assert cli.main(["hopf", "--max-level", "6", "--out", str(tmp_path)]) == 0
    body = json.loads((tmp_path / "hopf.json").read_text())
    assert body["schema"] == cli.SCHEMA and body["status"] == "pass"
    assert body["report"]["kernel"] == [2, 0]
    header = (tmp_path / "hopf_spectrum.csv").read_text().splitlines()[0]
    assert header == "operator,m,eigenvalue,multiplicity,formula_match"

def test_reports_are_deterministic(tmp_path, monkeypatch):
    a, b = tmp_path / "a", tmp_path / "b"
    argv = ["s1-kernel", "--seeds", "20", "--max-level", "3", "--mode-range", "3"]
    monkeypatch.setenv("BISMUTLAB_WORKERS", "2")
    assert cli.main(argv + ["--out", str(a)]) == 0
    monkeypatch.setenv("BISMUTLAB_WORKERS", "1")
    assert cli.main(argv + ["--out", str(b)]) == 0
    assert (a / "s1-kernel.json").read_bytes() == (b / "s1-kernel.json").read_bytes()

def test_rockland_expectations():
    assert cli.main(["rockland", "--model", "bimodule_bad", "--N", "8,16"]) == 0
    assert cli.main(["rockland", "--model", "bimodule_bad", "--N", "8,16", "--expect", "fail"]) == 0
    assert cli.main(["rockland", "--model", "bimodule_bad", "--N", "8,16", "--expect", "pass"]) == 1

def test_first_failure_is_named(capsys):
    assert cli.main(["rockland", "--model", "levi_civita_bad", "--N", "8,16", "--expect", "pass"]) == 1
    out = capsys.readouterr().out
    assert "rockland: fail (" in out and "heisenberg3-levi-civita" in out

def test_verify_gfd(tmp_path):
    assert cli.main(["verify-gfd", "--seeds", "6", "--models", "heisenberg3,su2", "--out", str(tmp_path)]) == 0
    rep = json.loads((tmp_path / "verify-gfd.json").read_text())["report"]
    assert rep["equal"] == rep["total"] == 8

def test_laurent_flag_reports_quadratic_term(tmp_path):
    code = cli.main(["verify-gfd", "--laurent", "--seeds", "0", "--models", "fibration-0", "--out", str(tmp_path)])
    assert code == 1
    rows = json.loads((tmp_path / "laurent.json").read_text())["report"]["instances"]
    assert rows[0]["support"] == [0, 1, 2] and rows[0]["u2_equals_transverse_term"]

def test_weitzenbock():
    assert cli.main(["weitzenbock"]) == 0

def test_index_with_loops(tmp_path):
    p = tmp_path / "loops.csv"
    it.loops_to_csv([it.circle_loop(3, 0.5, 32)], p)
    assert cli.main(["index", "--loops", str(p), "--out", str(tmp_path)]) == 0
    rows = json.loads((tmp_path / "index.json").read_text())["report"]["small_circles"]
    assert rows[-1]["index"] == 3

def test_index_collision_fails():
    assert cli.main(["index", "--gamma", "2"]) == 1

def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_level": 2, "N": [8, 16]}))
    assert cli.main(["hopf", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "hopf.json").read_text())["report"]["max_level"] == 2
    assert cli.main(["hopf", "--config", str(cfg), "--max-level", "3", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "hopf.json").read_text())["report"]["max_level"] == 3

@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["hopf", "--max-level", "x"],
    ["rockland", "--N", "2,8"],
    ["rockland", "--tol", "0"],
    ["index", "--lam", "0"],
    ["index", "--loops", "/nonexistent/loops.csv"],
    ["hopf", "--config", "/nonexistent/cfg.json"],
    [],
])
def test_usage_errors_exit_64(argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 64

def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["hopf", "--config", str(cfg)]) == 64

def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bismutlab", "hopf", "--max-level", "2"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "hopf: pass"
