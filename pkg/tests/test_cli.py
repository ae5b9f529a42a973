import argparse
import json

import numpy as np
import pytest

from app.cli.common import run_guarded
from main import main

SCALAR_FILE = {"M": 1, "K": 1, "channels": [[[1.0, 0.0]]], "sigma2": [1.0], "gamma_db": [0.0], "cbar": [2.0]}


@pytest.fixture
def scalar_file(tmp_path):
    path = tmp_path / "scalar.json"
    path.write_text(json.dumps(SCALAR_FILE), encoding="utf-8")
    return path


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps({
        "name": "cli",
        "scenario": {"num_users": 2, "active_relays": 3, "seed": 2},
        "gamma_db_sweep": [0.0, 2.0],
        "num_realizations": 2,
        "record_timings": False,
        "record_runs": False,
    }), encoding="utf-8")
    return path


def _last_json(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_solve_scalar(scalar_file, out_dir, capsys):
    assert main(["solve", str(scalar_file), "--out", str(out_dir)]) == 0
    summary = _last_json(capsys)
    assert summary["status"] == "Optimal"
    assert summary["total_power"] == pytest.approx(2.0, abs=1e-8)
    assert summary["certified"]
    for suffix in ["report.json", "dual_trace.csv", "primal_trace.csv", "solution.json"]:
        assert (out_dir / f"scalar_{suffix}").exists()


def test_solve_infeasible(tmp_path, out_dir):
    path = tmp_path / "hard.json"
    path.write_text(json.dumps({**SCALAR_FILE, "gamma_db": [6.0]}), encoding="utf-8")
    assert main(["solve", str(path), "--power-cap", "1e4", "--out", str(out_dir)]) == 2
    assert not (out_dir / "hard_solution.json").exists()


def test_solve_iteration_limit(scalar_file, out_dir):
    assert main(["solve", str(scalar_file), "--max-iter", "1", "--out", str(out_dir)]) == 3


def test_solve_missing_file(tmp_path, out_dir):
    assert main(["solve", str(tmp_path / "absent.json"), "--out", str(out_dir)]) == 1


@pytest.mark.parametrize("argv", [[], ["solve", "--bogus"], ["verify", "only_one.json"]])
def test_usage_errors(argv):
    assert main(argv) == 1


def test_invalid_flag_value(scalar_file, out_dir):
    assert main(["solve", str(scalar_file), "--tol-dual", "-1", "--out", str(out_dir)]) == 1


def test_verify_own_solution(scalar_file, out_dir, capsys):
    assert main(["solve", str(scalar_file), "--out", str(out_dir)]) == 0
    capsys.readouterr()
    assert main(["verify", str(scalar_file), str(out_dir / "scalar_solution.json"), "--out", str(out_dir)]) == 0
    assert json.loads(capsys.readouterr().out)["passed"]
    assert (out_dir / "scalar_solution_certificate.json").exists()


def test_verify_without_dual_part(scalar_file, out_dir):
    assert main(["solve", str(scalar_file), "--out", str(out_dir)]) == 0
    solution = json.loads((out_dir / "scalar_solution.json").read_text(encoding="utf-8"))
    solution.pop("dual")
    primal_only = out_dir / "primal_only.json"
    primal_only.write_text(json.dumps(solution), encoding="utf-8")
    assert main(["verify", str(scalar_file), str(primal_only), "--out", str(out_dir)]) == 0


def test_verify_rejects_corrupted_covariance(scalar_file, out_dir):
    assert main(["solve", str(scalar_file), "--out", str(out_dir)]) == 0
    solution = json.loads((out_dir / "scalar_solution.json").read_text(encoding="utf-8"))
    solution["Q"] = [[[0.1, 0.0]]]
    corrupted = out_dir / "corrupted.json"
    corrupted.write_text(json.dumps(solution), encoding="utf-8")
    assert main(["verify", str(scalar_file), str(corrupted), "--out", str(out_dir)]) == 4


def test_gen_then_solve(small_config, out_dir):
    target = out_dir / "generated.json"
    assert main(["gen", "--config", str(small_config), "--out", str(target)]) == 0
    data = json.loads(target.read_text(encoding="utf-8"))
    assert (data["M"], data["K"]) == (3, 2)
    assert main(["solve", str(target), "--out", str(out_dir)]) in (0, 2, 3)


def test_gen_count(small_config, out_dir):
    assert main(["gen", "--config", str(small_config), "--count", "3", "--out", str(out_dir)]) == 0
    assert sorted(p.name for p in out_dir.glob("instance_*.json")) == [
        "instance_2.json", "instance_3.json", "instance_4.json",
    ]


def test_sweep_and_rate(small_config, out_dir):
    assert main(["sweep", "--config", str(small_config), "--out", str(out_dir)]) == 0
    assert (out_dir / "cli_runs.csv").exists()
    assert (out_dir / "cli_summary.csv").exists()
    assert main(["rate", "--config", str(small_config), "--out", str(out_dir)]) == 0
    assert (out_dir / "cli_rates.csv").exists()


def test_invalid_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"num_realizations": 0}), encoding="utf-8")
    assert main(["sweep", "--config", str(path)]) == 1


def test_verify_rejects_dual_of_other_size(scalar_file, out_dir):
    assert main(["solve", str(scalar_file), "--out", str(out_dir)]) == 0
    solution = json.loads((out_dir / "scalar_solution.json").read_text(encoding="utf-8"))
    solution["dual"]["lambda_vectors"] = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]
    solution["dual"]["lambdas"] = [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]] * 2
    mismatched = out_dir / "mismatched.json"
    mismatched.write_text(json.dumps(solution), encoding="utf-8")
    assert main(["verify", str(scalar_file), str(mismatched), "--out", str(out_dir)]) == 4


def test_numerical_errors_exit_with_one():
    def handler(args):
        raise np.linalg.LinAlgError("Singular matrix")

    assert run_guarded(handler, argparse.Namespace()) == 1
