import json

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from app.core.exceptions import InstanceParseError
from app.models.problem import DualSolution, PrimalSolution, ProblemInstance
from app.services.dual_solver import lambda_recursion
from app.services.problem import (
    db_to_linear,
    linear_to_db,
    load_instance,
    load_solution,
    save_instance,
    save_solution,
    total_power,
)
from tests.factories import random_instance


def _write(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


SCALAR_FILE = {"M": 1, "K": 1, "channels": [[[1.0, 0.0]]], "sigma2": [1.0], "gamma_db": [0.0], "cbar": [2.0]}


def test_load_scalar_instance(tmp_path):
    inst = load_instance(_write(tmp_path / "scalar.json", SCALAR_FILE))
    assert (inst.M, inst.K) == (1, 1)
    assert inst.sinr_targets[0] == 1.0
    assert inst.channels[0, 0] == 1.0 + 0.0j
    assert inst.fronthaul_caps[0] == 2.0


def test_load_converts_db_targets(tmp_path):
    inst = load_instance(_write(tmp_path / "g.json", {**SCALAR_FILE, "gamma_db": [4.0]}))
    assert inst.sinr_targets[0] == pytest.approx(10 ** 0.4)
    assert inst.sinr_targets[0] == pytest.approx(2.5119, abs=1e-4)


def test_missing_channel_row_is_dimension_mismatch(tmp_path):
    payload = {**SCALAR_FILE, "K": 2, "sigma2": [1.0, 1.0], "gamma_db": [0.0, 0.0]}
    with pytest.raises(InstanceParseError, match="dimension mismatch"):
        load_instance(_write(tmp_path / "bad.json", payload))


@pytest.mark.parametrize("field,value", [("sigma2", [0.0]), ("cbar", [-1.0])])
def test_non_positive_parameters_rejected(tmp_path, field, value):
    with pytest.raises(InstanceParseError):
        load_instance(_write(tmp_path / "bad.json", {**SCALAR_FILE, field: value}))


def test_zero_channel_rejected(tmp_path):
    with pytest.raises(InstanceParseError, match="nonzero"):
        load_instance(_write(tmp_path / "bad.json", {**SCALAR_FILE, "channels": [[[0.0, 0.0]]]}))


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(InstanceParseError, match="cannot read"):
        load_instance(tmp_path / "absent.json")
    (tmp_path / "broken.json").write_text("{not json", encoding="utf-8")
    with pytest.raises(InstanceParseError):
        load_instance(tmp_path / "broken.json")


@given(st.integers(0, 10_000))
def test_targets_that_came_from_db_round_trip_exactly(seed):
    value = db_to_linear(float(np.random.default_rng(seed).uniform(-20.0, 20.0)))
    assert db_to_linear(linear_to_db(value)) == value


@given(st.floats(0.01, 100.0))
def test_arbitrary_linear_targets_round_trip_to_rounding(value):
    # not every float is the image of some dB value
    assert db_to_linear(linear_to_db(value)) == pytest.approx(value, rel=1e-14)


def test_instance_round_trip_is_bit_exact(tmp_path):
    inst = random_instance(7, M=4, K=3, gamma_db=4.0)
    loaded = load_instance(save_instance(inst, tmp_path / "inst.json"))
    assert_array_equal(loaded.channels, inst.channels)
    assert_array_equal(loaded.noise_powers, inst.noise_powers)
    assert_array_equal(loaded.sinr_targets, inst.sinr_targets)
    assert_array_equal(loaded.fronthaul_caps, inst.fronthaul_caps)


def test_instance_is_immutable():
    inst = random_instance(1)
    with pytest.raises(ValueError):
        inst.channels[0, 0] = 5.0


def test_with_targets_keeps_channels():
    inst = random_instance(3)
    other = inst.with_targets(gamma_db=6.0, cbar=1.5)
    assert_array_equal(other.channels, inst.channels)
    assert_allclose(other.gamma_db, 6.0)
    assert_array_equal(other.fronthaul_caps, 1.5)
    assert_allclose(other.eta, 2 ** 1.5)


def test_total_power_examples():
    scalar = PrimalSolution.from_beamformers([[np.sqrt(1.5)]], [[0.5]])
    assert total_power(scalar) == pytest.approx(2.0)
    zero = PrimalSolution.from_beamformers(np.zeros((2, 2)), np.zeros((2, 2)))
    assert total_power(zero) == 0.0
    unit = PrimalSolution.from_beamformers(np.eye(2), np.eye(2))
    assert total_power(unit) == pytest.approx(4.0)


@given(st.integers(0, 10_000))
def test_total_power_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    K, M = 3, 4
    v = rng.standard_normal((K, M)) + 1j * rng.standard_normal((K, M))
    A = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    Q = A @ A.conj().T
    U, _ = np.linalg.qr(rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M)))
    before = total_power(PrimalSolution.from_beamformers(v, Q))
    after = total_power(PrimalSolution.from_beamformers(v @ U.T, U @ Q @ U.conj().T))
    assert after == pytest.approx(before, rel=1e-12)


def test_solution_round_trip_with_dual(tmp_path):
    inst = random_instance(5)
    lambdas, vectors = lambda_recursion(inst, [0.3, 0.7])
    dual = DualSolution(beta=[0.3, 0.7], lambdas=lambdas, lambda_vectors=vectors)
    rng = np.random.default_rng(0)
    primal = PrimalSolution.from_beamformers(rng.standard_normal((2, 3)) + 0j, np.eye(3))
    path = save_solution(primal, tmp_path / "sol.json", dual)
    loaded, loaded_dual = load_solution(path)
    assert_array_equal(loaded.beamformers, primal.beamformers)
    assert_array_equal(loaded.Q, primal.Q)
    assert_array_equal(loaded_dual.lambdas, dual.lambdas)
    assert_array_equal(loaded_dual.beta, dual.beta)


def test_solution_without_dual(tmp_path):
    primal = PrimalSolution.from_beamformers([[1.0]], [[0.5]])
    _, dual = load_solution(save_solution(primal, tmp_path / "sol.json"))
    assert dual is None


def test_problem_instance_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        ProblemInstance(channels=[[1.0, 0.5]], noise_powers=[1.0], sinr_targets=[1.0], fronthaul_caps=[1.0])
