import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from quasiminimal.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_construct_writes_outputs(tmp_path, capsys):
    code, _ = run(capsys, "construct", "--builtin", "example", "--grid", "6x6",
                  "--out", str(tmp_path))
    assert code == 0
    assert set(files(tmp_path)) == {"chart.json", "invariants.csv", "summary.json"}
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["max_integrability_residual"] < 1e-9
    with open(tmp_path / "invariants.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 36
    s = float(rows[0]["s"]) if "s" in rows[0] else float(rows[0]["u"])
    assert float(rows[0]["K"]) == pytest.approx(s ** -1.5, rel=1e-10)


def test_outputs_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(capsys, "classify", "--builtin", "example", "--grid", "6x6",
                   "--out", str(d))[0] == 0
    assert files(a) == files(b)
    assert set(files(a)) == {"report.json", "phi.csv", "gauss.csv"}


def test_classify_to_stdout(capsys):
    code, out = run(capsys, "classify", "--builtin", "theta", "--param", "theta=exp(u+v)",
                    "--grid", "6x6")
    assert code == 0 and out["verdict"] == "pw1_second_kind" and out["proper"] is False


def test_verify_suites(tmp_path, capsys):
    code, out = run(capsys, "verify", "--builtin", "example", "--grid", "5x5",
                    "--suite", "all", "--out", str(tmp_path))
    assert code == 0 and out is None
    data = json.loads((tmp_path / "verify.json").read_text())
    status = {s["suite"]: s["status"] for s in data["suites"]}
    assert status["coefficients"] == "pass" and status["constraints"] == "skipped"


def test_verify_failure_exit_code(capsys):
    code, out = run(capsys, "verify", "--builtin", "example", "--grid", "5x5",
                    "--suite", "integrability", "--tol", "integrability=1e-30")
    assert code == 1 and out["passed"] is False


def test_corrupted_trajectory_cache_fails_verification(tmp_path, capsys):
    cache = tmp_path / "traj.csv"
    assert run(capsys, "construct", "--builtin", "nonflat", "--grid", "4x4",
               "--cache", str(cache))[0] == 0
    lines = cache.read_text().splitlines()
    vals = [float(x) for x in lines[3000].split(",")]
    vals[1] += 1e-3
    lines[3000] = ",".join(repr(x) for x in vals)
    cache.write_text("\n".join(lines) + "\n")
    code, out = run(capsys, "verify", "--builtin", "nonflat", "--grid", "4x4",
                    "--cache", str(cache), "--suite", "constraints")
    assert code == 1


def test_sweep(tmp_path, capsys):
    code, out = run(capsys, "sweep", "--builtin", "nonflat", "--param", "lambda3",
                    "--range", "0.5,1,2", "--grid", "5x5", "--out", str(tmp_path))
    assert code == 0
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["verdict"] for r in rows] == ["pw1_second_kind"] * 3


def test_sweep_all_failures_exit_2(capsys):
    code, out = run(capsys, "sweep", "--builtin", "nonflat", "--param", "lambda1",
                    "--range", "1,2", "--grid", "5x5")
    assert code == 2
    assert all(r["verdict"] == "error" for r in out["rows"])


@pytest.mark.parametrize("argv, error", [
    (["classify", "--builtin", "nonflat", "--param", "lambda1=3/2"], "DomainViolation"),
    (["classify", "--builtin", "theta", "--param", "theta=u+v"], "QuasiMinimalityViolated"),
    (["classify", "--builtin", "bogus"], "InvalidChartSpec"),
    (["classify", "--builtin", "example", "--grid", "3x3"], "UsageError"),
    (["sweep", "--builtin", "example", "--param", "x", "--range", "1:2:0"], "UsageError"),
    (["classify", "--builtin", "theta", "--param", "theta=u*"], "SyntaxError"),
])
def test_errors_are_json(capsys, argv, error):
    code, out = run(capsys, *argv)
    assert code == 2
    assert out["error"] == error and out["message"]


def test_non_null_chart_file(tmp_path, capsys):
    spec = {"components": ["u", "v", "u*v/4", "u^2/8"], "domain": {"u": [0, 1], "v": [0, 1]}}
    path = tmp_path / "chart.json"
    path.write_text(json.dumps(spec))
    out_dir = tmp_path / "out"
    code, out = run(capsys, "classify", "--chart-file", str(path), "--out", str(out_dir))
    assert code == 2 and out["error"] == "NotNullCoordinates"
    assert json.loads((out_dir / "error.json").read_text()) == out


def test_config_file(tmp_path, capsys):
    cfg = {"chart": {"builtin": "theta", "theta": "u*v"}, "grid": "5x5"}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    code, out = run(capsys, "classify", "--config", str(path))
    assert code == 0 and out["verdict"] == "harmonic"


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "quasiminimal", "classify", "--builtin",
                           "example", "--grid", "5x5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pw1_second_kind"
    assert np.isfinite(json.loads(proc.stdout)["drift"])
