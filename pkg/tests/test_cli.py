import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from shapley_forge.cli import app, dumps_json17


def run_app(args, capsys):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    with pytest.raises(SystemExit) as exc:
        app(args)
    out, err = capsys.readouterr()
    code = exc.value.code if exc.value.code is not None else 0
    return code, out, err


@pytest.fixture
def game_file(tmp_path):
    path = tmp_path / "game.json"
    path.write_text(json.dumps({"n": 3, "weights": [49, 49, 2], "quota": 51}))
    return str(path)


@pytest.fixture
def target_file(tmp_path):
    path = tmp_path / "target.json"
    path.write_text(
        json.dumps({"n": 3, "shapley": [2 / 3, 2 / 3, 2 / 3], "convention": "generalized"})
    )
    return str(path)


# ---------------------------------------------------------------------------
# JSON formatting helper
# ---------------------------------------------------------------------------


def test_dumps_json17_roundtrips_floats():
    vals = [0.1, 1 / 3, 2e-17, 1.7976931348623157e308, -0.0, 123456789.123456789]
    text = dumps_json17({"xs": vals, "n": 3, "ok": True, "none": None})
    back = json.loads(text)
    assert back["xs"] == vals
    assert back["n"] == 3 and back["ok"] is True and back["none"] is None


def test_dumps_json17_handles_numpy_scalars():
    text = dumps_json17({"a": np.float64(0.25), "b": np.int64(7), "c": np.arange(3)})
    assert json.loads(text) == {"a": 0.25, "b": 7, "c": [0, 1, 2]}


def test_dumps_json17_rejects_exotic_objects():
    with pytest.raises(TypeError):
        dumps_json17({"f": object()})


# ---------------------------------------------------------------------------
# compute / estimate
# ---------------------------------------------------------------------------


def test_compute_exact_enum(game_file, capsys):
    code, out, _ = run_app(["compute", "--game", game_file], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["convention"] == "generalized"
    assert doc["method"] == "exact-enum"
    assert np.allclose(doc["shapley"], 2 / 3, atol=1e-12)
    assert doc["manifest"]["command"] == "compute"
    assert doc["manifest"]["outcome"] == "ok"


def test_compute_modes_agree(game_file, capsys):
    code, out, _ = run_app(["compute", "--game", game_file, "--exact-dp"], capsys)
    dp = json.loads(out)["shapley"]
    code, out, _ = run_app(
        ["compute", "--game", game_file, "--samples", "40000", "--seed", "9"], capsys
    )
    doc = json.loads(out)
    assert doc["method"] == "sampled" and doc["m"] == 40000
    assert np.allclose(dp, 2 / 3, atol=1e-12)
    assert np.abs(np.asarray(doc["shapley"]) - np.asarray(dp)).max() <= 0.05


def test_compute_missing_game_exits_2(capsys):
    code, _, err = run_app(["compute", "--game", "/nonexistent.json"], capsys)
    assert code == 2
    assert "error:" in err


def test_estimate_schema(game_file, capsys):
    code, out, _ = run_app(
        ["estimate", "--game", game_file, "--gamma", "0.2", "--delta", "0.05", "--seed", "4"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["gamma"] == 0.2 and doc["seed"] == 4
    assert doc["m"] > 0
    assert np.abs(np.asarray(doc["shapley"]) - 2 / 3).max() <= 0.2


# ---------------------------------------------------------------------------
# solve / solve-bounded
# ---------------------------------------------------------------------------


def test_solve_writes_file_and_exits_0(target_file, tmp_path, capsys):
    out_path = tmp_path / "solution.json"
    code, _, err = run_app(
        [
            "solve",
            "--target",
            target_file,
            "--xi",
            "0.05",
            "--oracle",
            "dp",
            "--out",
            str(out_path),
        ],
        capsys,
    )
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["status"] == "solved"
    assert doc["est_dshapley"] <= 0.08
    assert len(doc["weights"]) == 3
    assert len(doc["guess"]) == 2
    assert doc["manifest"]["outcome"] == "solved"


def test_solve_standard_convention_doubles(tmp_path, capsys):
    path = tmp_path / "std.json"
    path.write_text(json.dumps({"n": 3, "shapley": [1 / 3, 1 / 3, 1 / 3], "convention": "standard"}))
    code, out, _ = run_app(["solve", "--target", str(path), "--xi", "0.05", "--oracle", "dp"], capsys)
    assert code == 0
    assert json.loads(out)["status"] == "solved"


def test_solve_unreachable_target_exits_1(tmp_path, capsys):
    path = tmp_path / "neg.json"
    path.write_text(json.dumps({"n": 3, "shapley": [-1.0, -1.0, -1.0], "convention": "generalized"}))
    with pytest.warns(UserWarning, match="sum to"):
        code, out, _ = run_app(["solve", "--target", str(path), "--xi", "0.05", "--oracle", "dp"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["status"] == "no-solution"
    assert doc["est_dshapley"] == pytest.approx(1 / np.sqrt(3), abs=1e-6)


def test_solve_bad_target_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 3, "shapley": [1, 2], "convention": "generalized"}))
    code, _, err = run_app(["solve", "--target", str(path)], capsys)
    assert code == 2
    path.write_text(json.dumps({"n": 3, "shapley": [1, 1, 0], "convention": "martian"}))
    code, _, err = run_app(["solve", "--target", str(path)], capsys)
    assert code == 2


def test_solve_bounded_requires_flag(target_file, capsys):
    with pytest.raises(SystemExit) as exc:
        app(["solve-bounded", "--target", target_file])
    assert exc.value.code == 2
    capsys.readouterr()


def test_solve_bounded_runs(target_file, capsys):
    code, out, _ = run_app(
        [
            "solve-bounded",
            "--target",
            target_file,
            "--weight-bound",
            "3",
            "--xi",
            "0.05",
            "--oracle",
            "dp",
        ],
        capsys,
    )
    assert code == 0
    assert json.loads(out)["status"] == "solved"


# ---------------------------------------------------------------------------
# sample-mu / diagnose / bench
# ---------------------------------------------------------------------------


def test_sample_mu_csv(capsys):
    code, out, err = run_app(["sample-mu", "-n", "6", "--samples", "10", "--seed", "2"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["sample_index", "wt", "bits"]
    assert len(rows) == 11
    for idx, wt, bits in rows[1:]:
        assert len(bits) == 6
        assert int(wt) == bits.count("+")
        assert 1 <= int(wt) <= 5
    # manifest goes to stderr when the table goes to stdout
    assert json.loads(err)["command"] == "sample-mu"


def test_sample_mu_sidecar_manifest(tmp_path, capsys):
    out_path = tmp_path / "draws.csv"
    code, _, _ = run_app(
        ["sample-mu", "-n", "4", "--samples", "5", "--out", str(out_path)], capsys
    )
    assert code == 0
    assert out_path.exists()
    manifest = json.loads((tmp_path / "draws.csv.manifest.json").read_text())
    assert manifest["command"] == "sample-mu"
    assert manifest["config"]["samples"] == 5


def test_diagnose_anticonc_mu(game_file, capsys):
    code, out, _ = run_app(
        ["diagnose", "anticonc-mu", "--game", game_file, "--r", "0.5"], capsys
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 1
    assert rows[0]["method"] == "exact"
    assert float(rows[0]["estimate"]) >= 0.0


def test_diagnose_balanced(game_file, capsys):
    code, out, _ = run_app(
        ["diagnose", "balanced", "--game", game_file, "--i", "1", "--r", "2", "--eta", "0.2"],
        capsys,
    )
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    assert row["within_bound"] in ("True", "False")
    assert float(row["bound"]) > 0


def test_diagnose_distances(game_file, tmp_path, capsys):
    other = tmp_path / "maj.json"
    other.write_text(json.dumps({"n": 3, "weights": [1, 1, 1], "threshold": 0.0}))
    code, out, _ = run_app(
        ["diagnose", "distances", "--game", game_file, "--other", str(other)], capsys
    )
    assert code == 0
    row = next(csv.DictReader(io.StringIO(out)))
    # the quota game computes the same function as the majority game
    assert float(row["d_shapley"]) == pytest.approx(0.0, abs=1e-12)
    assert float(row["shapley_slack"]) >= 0.0


def test_diagnose_needs_other_for_distances(game_file, capsys):
    code, _, err = run_app(["diagnose", "distances", "--game", game_file], capsys)
    assert code == 2


def test_bench_identities(capsys):
    code, out, _ = run_app(["bench", "--suite", "identities", "--seed", "1"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["status"] == "pass" for r in rows)


def test_boost_debug_trace(target_file, capsys):
    code, out, _ = run_app(
        ["boost-debug", "--target", target_file, "--f0", "0", "--mean-corr", "0.3", "--xi", "0.05"],
        capsys,
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows
    assert {"t", "literal", "violation"} == set(rows[0])
    assert rows[0]["literal"].startswith(("+", "-"))


# ---------------------------------------------------------------------------
# process-level checks
# ---------------------------------------------------------------------------


def test_console_script_subprocess(game_file):
    proc = subprocess.run(
        [sys.executable, "-m", "shapley_forge.cli", "--threads", "1", "compute", "--game", game_file],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0
    doc = json.loads(proc.stdout)
    assert np.allclose(doc["shapley"], 2 / 3, atol=1e-12)


def test_threads_flag_sets_env(game_file):
    probe = (
        "import os, json, shapley_forge.cli as c; c._configure_threads(['--threads', '2']); "
        "print(os.environ['OPENBLAS_NUM_THREADS'], os.environ['OMP_NUM_THREADS'])"
    )
    proc = subprocess.run(
        [sys.executable, "-c", probe], capture_output=True, text=True, timeout=60
    )
    assert proc.returncode == 0
    assert proc.stdout.split() == ["2", "2"]
