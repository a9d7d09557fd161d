import json
import os

import pytest

from wachforge.cli import main

K3 = {"p": 3, "f": 2, "N": 14, "D": 10, "weights": [3, 3], "case": "split",
      "ell": [3, 0, 0, 3], "twist_c": 2, "seed": 4, "samples_a": 2, "samples_A": 1}
K1 = {"p": 3, "N": 16, "D": 12, "weights": [5], "case": "induced", "ell": [0, 5],
      "samples_a": 2, "samples_A": 1}


def write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run_dir(out):
    (d,) = [x for x in os.listdir(out) if x != "selftest"]
    return os.path.join(out, d)


def test_build_outputs(tmp_path, capsys):
    out = tmp_path / "runs"
    assert main(["build", "--config", write(tmp_path, K1), "--out", str(out), "--json-only"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == "wach-forge-report/1"
    assert doc["types"] == ["t4"] and doc["m"] == 2
    assert doc["exponents"] == {"kind": "induced", "beta": 1, "beta_prime": 3, "modulus": 8}
    # pairs at a = 0 for t4: (-0, 1) -> digit strings
    assert doc["filtration_pairs"]["zero"][1] == ["1" + "0" * 15]
    assert sorted(os.listdir(run_dir(out))) == ["build.json", "build.txt", "config.json"]


@pytest.mark.parametrize("patch,path", [
    ({"ell": [1, 5]}, "ell[0]"),
    ({"weights": [2], "ell": [0, 2]}, "weights"),
    ({"colour": "red"}, "colour"),
    ({"p": 9}, "p"),
    ({"N": "16"}, "N"),
    ({"D": 3}, "D"),
])
def test_validation_errors(tmp_path, capsys, patch, path):
    cfg = dict(K1, **patch)
    assert main(["build", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 2
    assert path in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert main(["solve", "--out", str(tmp_path)]) == 2
    assert main(["solve", "--config", str(tmp_path / "nope.json")]) == 2


def test_budget_zero_obstruction(tmp_path, capsys):
    cfg = dict(K1, z_search_budget=0)
    assert main(["solve", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 3
    assert "obstruction" in capsys.readouterr().err


def test_verify_deterministic_and_integrity(tmp_path, monkeypatch):
    out = tmp_path / "runs"
    cfg = write(tmp_path, K3)
    assert main(["verify", "--config", cfg, "--out", str(out), "--json-only"]) == 0
    d = run_dir(out)
    first = open(os.path.join(d, "verify.json")).read()
    monkeypatch.setenv("WACHFORGE_JOBS", "2")
    assert main(["verify", "--config", cfg, "--out", str(out), "--json-only"]) == 0
    assert open(os.path.join(d, "verify.json")).read() == first
    doc = json.loads(first)
    assert doc["verdict"] and "negative_control" in doc
    base = os.path.join(d, "baseline.json")
    text = open(base).read()
    open(base, "w").write(text.replace('"0', '"1', 1))
    assert main(["verify", "--config", cfg, "--out", str(out)]) == 4


def test_bad_jobs_env(tmp_path, monkeypatch):
    monkeypatch.setenv("WACHFORGE_JOBS", "many")
    assert main(["build", "--config", write(tmp_path, K1), "--out", str(tmp_path)]) == 2


def test_seed_override_changes_run_dir(tmp_path):
    out = tmp_path / "runs"
    cfg = write(tmp_path, K1)
    main(["build", "--config", cfg, "--out", str(out)])
    main(["build", "--config", cfg, "--out", str(out), "--seed", "99"])
    assert len(os.listdir(out)) == 2


def test_selftest(tmp_path, capsys):
    assert main(["selftest", "--out", str(tmp_path)]) == 0
    assert "selftest: PASS" in capsys.readouterr().out
