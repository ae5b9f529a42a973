import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from app.core.exceptions import NumericalPivotError
from app.models.problem import ProblemInstance, SolveStatus
from app.schemas.config import DualIterConfig
from app.services.diagnostics import growth_bound
from app.services.dual_solver import (
    I_map,
    dual_fpi,
    dual_residual_D,
    gamma_matrix,
    lambda_recursion,
    schur_step,
)
from tests.factories import random_instance, scalar_instance

seeds = st.integers(0, 2 ** 31)
dims = st.sampled_from([(2, 2), (3, 2), (3, 4), (5, 3)])


def _random_beta(seed, K, scale=1.0):
    return np.random.default_rng(seed + 1).exponential(scale, K)


def _pivots(inst, beta):
    lambdas, _ = lambda_recursion(inst, beta)
    M = inst.M
    return np.real(lambdas[np.arange(M), np.arange(M), np.arange(M)])


def test_gamma_matrix_examples(scalar):
    assert_allclose(gamma_matrix(random_instance(0), [0.0, 0.0]), np.eye(3))
    assert gamma_matrix(scalar, [2.0])[0, 0] == pytest.approx(3.0)


@given(seeds)
def test_gamma_minus_identity_is_psd(seed):
    inst = random_instance(seed)
    G = gamma_matrix(inst, _random_beta(seed, inst.K))
    assert_allclose(G, G.conj().T)
    assert np.linalg.eigvalsh(G - np.eye(inst.M)).min() >= -1e-12


def test_schur_step_examples():
    assert_allclose(schur_step(np.eye(2), 2.0), [[1.0]])
    assert schur_step(np.array([[2.0, 1.0], [1.0, 2.0]]), 2.0)[0, 0] == pytest.approx(1.75)


@given(seeds, st.floats(0.1, 10.0), st.floats(1.1, 20.0))
def test_schur_step_homogeneous(seed, c, eta):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    G = A @ A.conj().T + np.eye(4)
    assert_allclose(schur_step(c * G, eta), c * schur_step(G, eta), rtol=1e-12)


def test_schur_step_guards_pivot():
    with pytest.raises(NumericalPivotError):
        schur_step(np.array([[0.0, 1.0], [1.0, 1.0]]), 2.0)


@pytest.mark.parametrize("beta", [0.0, 0.5, 2.0, 7.0])
def test_scalar_lambda(scalar, beta):
    lambdas, vectors = lambda_recursion(scalar, [beta])
    assert lambdas[0, 0, 0].real == pytest.approx((1.0 + beta) / 3.0)
    assert vectors[0, 0].real > 0


def test_two_relay_identity_example():
    inst = ProblemInstance(
        channels=[[1.0, 0.0], [0.0, 1.0]],
        noise_powers=[1.0, 1.0],
        sinr_targets=[1.0, 1.0],
        fronthaul_caps=[1.0, 1.0],
    )
    lambdas, _ = lambda_recursion(inst, [0.0, 0.0])
    assert_allclose(lambdas[0], np.diag([1.0, 0.0]), atol=1e-15)
    assert_allclose(lambdas[1], np.diag([0.0, 1.0]), atol=1e-15)
    assert dual_residual_D(inst, [0.0, 0.0], lambdas) == pytest.approx(0.0, abs=1e-15)


def test_residual_of_zero_lambdas():
    inst = random_instance(2, M=4)
    assert dual_residual_D(inst, np.zeros(inst.K), np.zeros((4, 4, 4))) == pytest.approx(2.0)


@given(seeds, dims)
def test_lambda_recursion_solves_D(seed, dim):
    M, K = dim
    inst = random_instance(seed, M=M, K=K)
    beta = _random_beta(seed, K, scale=5.0)
    lambdas, vectors = lambda_recursion(inst, beta)
    scale = np.linalg.norm(gamma_matrix(inst, beta))
    assert dual_residual_D(inst, beta, lambdas) <= 1e-10 * scale
    for m in range(M):
        L = lambdas[m]
        assert np.all(L[:m, :] == 0) and np.all(L[:, :m] == 0)
        eigs = np.sort(np.abs(np.linalg.eigvalsh(L)))
        if M > 1:
            assert eigs[-2] <= 1e-10 * np.linalg.norm(L)
        assert vectors[m, m].real > 0 and vectors[m, m].imag == 0


def test_scalar_I_map(scalar):
    assert I_map(scalar, [0.0])[0] == pytest.approx(4.0 / 3.0)
    assert I_map(scalar, [4.0 / 3.0])[0] == pytest.approx(16.0 / 9.0)
    assert I_map(scalar, [2.0])[0] == pytest.approx(2.0)


@given(seeds, dims)
def test_fast_path_matches_plain(seed, dim):
    M, K = dim
    inst = random_instance(seed, M=M, K=K)
    beta = _random_beta(seed, K)
    assert_allclose(I_map(inst, beta, fast=True), I_map(inst, beta), rtol=1e-10)


@given(seeds, dims)
@settings(max_examples=100)
def test_I_is_positive_and_monotone(seed, dim):
    M, K = dim
    inst = random_instance(seed, M=M, K=K)
    low = _random_beta(seed, K)
    high = low + np.random.default_rng(seed + 2).exponential(1.0, K)
    I_low, I_high = I_map(inst, low), I_map(inst, high)
    assert np.all(I_map(inst, np.zeros(K)) > 0)
    assert np.all(I_high >= I_low * (1 - 1e-10))


@given(seeds, dims, st.sampled_from([1.1, 2.0, 10.0]))
@settings(max_examples=100)
def test_I_is_strictly_subhomogeneous(seed, dim, alpha):
    M, K = dim
    inst = random_instance(seed, M=M, K=K)
    beta = _random_beta(seed, K)
    assert np.all(alpha * I_map(inst, beta) - I_map(inst, alpha * beta) > 1e-12)


@given(seeds, dims, st.sampled_from([1.1, 2.0, 10.0]))
@settings(max_examples=100)
def test_pivots_positive_monotone_subhomogeneous(seed, dim, alpha):
    M, K = dim
    inst = random_instance(seed, M=M, K=K)
    beta = _random_beta(seed, K)
    bigger = beta + np.random.default_rng(seed + 3).exponential(1.0, K)
    p = _pivots(inst, beta)
    assert np.all(p > 0)
    assert np.all(_pivots(inst, bigger) >= p * (1 - 1e-10))
    assert np.all(alpha * p - _pivots(inst, alpha * beta) > 1e-12)


@given(seeds, st.floats(1.01, 10.0))
def test_growth_is_bounded(seed, alpha):
    inst = random_instance(seed, M=3, K=3)
    growth, bound = growth_bound(inst, _random_beta(seed, 3), alpha)
    assert np.all(growth < bound)


def test_scalar_dual_converges(scalar, tight_dual):
    run = dual_fpi(scalar, tight_dual)
    assert run.status is SolveStatus.OPTIMAL
    assert run.beta[0] == pytest.approx(2.0, abs=1e-9)
    assert run.objectives[-1] == pytest.approx(2.0, abs=1e-9)
    assert run.solution.lambdas[0, 0, 0].real == pytest.approx(1.0, abs=1e-9)


def test_scalar_error_ratio_is_one_third(scalar):
    run = dual_fpi(scalar, DualIterConfig(tol=1e-12, keep_iterates=True))
    errors = np.abs(run.iterates[:, 0] - 2.0)
    assert_allclose(errors[1:8] / errors[:7], 1.0 / 3.0, rtol=1e-6)


def test_zero_start_trace_strictly_increasing(scalar):
    run = dual_fpi(scalar, DualIterConfig(tol=1e-10))
    assert run.objectives[0] == pytest.approx(4.0 / 3.0)
    assert np.all(np.diff(run.objectives) > 0)


def test_scalar_infeasible_detected(scalar_infeasible):
    run = dual_fpi(scalar_infeasible, DualIterConfig(power_cap=1e4))
    assert run.status is SolveStatus.INFEASIBLE
    assert run.solution is None
    assert run.objectives[-1] > 1e4
    assert np.all(np.diff(run.objectives) > 0)
    assert run.objectives[1] - run.objectives[0] == pytest.approx(4.0)


def test_over_demanding_instances_infeasible():
    for seed in range(10):
        inst = random_instance(seed, M=2, K=4, gamma_db=20.0, cbar=1.0)
        run = dual_fpi(inst, DualIterConfig(power_cap=1e6))
        assert run.status is SolveStatus.INFEASIBLE
        assert np.all(np.diff(run.objectives) > 0)


def test_iteration_limit_is_a_status(scalar):
    run = dual_fpi(scalar, DualIterConfig(max_iter=1))
    assert run.status is SolveStatus.ITERATION_LIMIT
    assert run.iterations == 1


def test_fast_iteration_matches(tight_dual):
    inst = random_instance(9, M=4, K=3)
    plain = dual_fpi(inst, tight_dual)
    fast = dual_fpi(inst, tight_dual.model_copy(update={"fast": True}))
    assert_allclose(fast.beta, plain.beta, rtol=1e-10)


@given(seeds)
def test_converged_beta_positive_and_feasible_random(seed):
    inst = random_instance(seed)
    run = dual_fpi(inst, DualIterConfig(tol=1e-11))
    assert run.status is SolveStatus.OPTIMAL
    assert np.all(run.beta > 0)
    assert np.all(np.diff(run.objectives) > 0)
