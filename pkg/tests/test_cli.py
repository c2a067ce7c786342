from __future__ import annotations

import json
import subprocess
import sys

import pytest

from durfee_qmf.cli import main, read_config, thread_count, to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_schema_and_membership(capsys):
    code, doc = run(capsys, "qset", "check", "--zeta", "1/4,1/5", "--x", "1/3")
    assert code == 0
    assert set(doc) == {"command", "inputs", "outputs", "residuals", "errors", "timing_ms"}
    assert doc["outputs"] == {"member": True}


def test_membership_names_violation(capsys):
    code, doc = run(capsys, "qset", "check", "--zeta", "1/4,1/5", "--x", "1/5")
    assert code == 0
    assert doc["outputs"]["member"] is False
    assert "beta_2 divides k" in doc["outputs"]["violated"]


def test_eval_rn_outside_set_fails(capsys):
    code, doc = run(capsys, "eval", "rn", "--zeta", "1/4,1/5", "--x", "1/5")
    assert code != 0
    assert any("beta_2 divides k" in e for e in doc["errors"])


def test_eval_rn_finite(capsys):
    code, doc = run(capsys, "eval", "rn", "--zeta", "1/4,1/5", "--x", "1/3")
    assert code == 0
    fs = doc["outputs"]["finite_sum"]
    assert fs["mode"] == "finite-sum" and fs["term_count"] == 9
    assert abs(complex(*fs["value"]) - complex(2.0450849718747373, -2.0628430766936812)) < 1e-13


def test_eval_rn_radial(capsys):
    code, doc = run(capsys, "eval", "rn", "--zeta", "1/4,1/5", "--x", "1/2", "--mode", "radial")
    assert code == 0
    gaps = [r["gap"] for r in doc["outputs"]["radial"]]
    assert gaps[-1] < 1e-3


def test_validate(capsys):
    assert run(capsys, "validate-zeta", "--zeta", "1/4,1/5")[0] == 0
    code, doc = run(capsys, "validate-zeta", "--zeta", "1/4,3/4")
    assert code == 1 and doc["outputs"]["valid"] is False
    code, doc = run(capsys, "validate-zeta", "--zeta", "a/b")
    assert code == 1


def test_pool(capsys):
    code, doc = run(capsys, "qset", "pool", "--zeta", "1/4,1/5", "--kmax", "8")
    assert code == 0
    assert doc["outputs"]["denominators"] == [1, 2, 3, 6, 7]


def test_verify_eta(capsys):
    code, doc = run(capsys, "verify", "eta", "--grid-seed", "3")
    assert code == 0
    assert doc["outputs"]["summary"]["failures"] == 0


def test_verify_qmf_S(capsys):
    code, doc = run(capsys, "verify", "qmf", "--zeta", "1/4,1/5", "--x", "1/3", "--word", "S", "--tol", "1e-5")
    assert code == 0
    assert doc["residuals"]["two_way"]["value"] < 1e-5


def test_verify_qmf_needs_point(capsys):
    code, _ = run(capsys, "verify", "qmf", "--zeta", "1/4,1/5")
    assert code == 1


def test_pi_dagger_reproducible(capsys):
    a = run(capsys, "pi-dagger", "--zeta", "1/4,1/5", "--samples", "12", "--seed", "5")
    b = run(capsys, "--seed", "5", "pi-dagger", "--zeta", "1/4,1/5", "--samples", "12")
    assert a[0] == b[0] == 0
    assert a[1]["outputs"] == b[1]["outputs"]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# membership query\nzeta = 1/4,1/5\nx = 1/3\n")
    assert read_config(str(cfg)) == ["--zeta", "1/4,1/5", "--x", "1/3"]
    code, doc = run(capsys, "--config", str(cfg), "qset", "check")
    assert code == 0 and doc["outputs"]["member"] is True


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("QMF_THREADS", "3")
    assert thread_count(8) == 3
    _, doc = run(capsys, "--threads", "2", "qset", "check", "--zeta", "1/4,1/5", "--x", "0")
    assert doc["inputs"]["threads"] == 3
    monkeypatch.delenv("QMF_THREADS")
    assert thread_count(None) == 1 and thread_count(4) == 4


def test_json_floats_round_trip():
    x = 0.1 + 0.2
    text = to_json({"a": x, "z": complex(x, -1 / 3), "nan": float("nan")})
    doc = json.loads(text)
    assert doc["a"] == x
    assert doc["z"] == [x, -1 / 3]
    assert doc["nan"] is None


def test_bad_arguments_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["eval", "rn", "--zeta", "1/4,1/5", "--x", "1/3", "--mode", "nope"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "durfee_qmf", "qset", "check", "--zeta", "1/4,1/5", "--x", "1/3"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["outputs"]["member"] is True
