import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.models.problem import DualSolution, PrimalSolution, SolveStatus
from app.models.scenario import Scenario
from app.schemas.config import DualIterConfig
from app.services.dual_solver import dual_fpi, lambda_recursion
from app.services.pipeline import solve_instance
from app.services.scenario_gen import generate_instance
from app.services.verifier import certify, fronthaul_psd_constraint, fronthaul_rate, sinr
from tests.factories import random_instance

seeds = st.integers(0, 2 ** 31)


def _random_candidate(seed, M=4, K=3):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((K, M)) + 1j * rng.standard_normal((K, M))
    A = rng.standard_normal((M, M)) + 1j * rng.standard_normal((M, M))
    return PrimalSolution.from_beamformers(v, A @ A.conj().T / M + 0.1 * np.eye(M))


def test_scalar_sinr(scalar):
    sol = PrimalSolution.from_beamformers([[np.sqrt(1.5)]], [[0.5]])
    assert sinr(scalar, sol, 0) == pytest.approx(1.0)
    assert sinr(scalar, PrimalSolution.from_beamformers([[0.0]], [[0.0]]), 0) == 0.0


@given(seeds, st.floats(0.1, 10.0))
def test_sinr_is_scale_invariant_without_noise(seed, c):
    inst = random_instance(seed, M=4, K=3)
    inst = inst.model_copy(update={"noise_powers": np.full(3, 1e-300)})
    sol = _random_candidate(seed)
    scaled = PrimalSolution.from_beamformers(np.sqrt(c) * sol.beamformers, c * sol.Q)
    for k in range(3):
        assert sinr(inst, scaled, k) == pytest.approx(sinr(inst, sol, k), rel=1e-10)


def test_scalar_fronthaul(scalar):
    tight = PrimalSolution.from_beamformers([[np.sqrt(1.5)]], [[0.5]])
    assert fronthaul_rate(scalar, tight, 0) == pytest.approx(2.0)
    assert fronthaul_psd_constraint(scalar, tight, 0) == pytest.approx(0.0, abs=1e-12)
    slack = PrimalSolution.from_beamformers([[1.0]], [[1.0]])
    assert fronthaul_rate(scalar, slack, 0) == pytest.approx(1.0)
    assert fronthaul_psd_constraint(scalar, slack, 0) == pytest.approx(2.0)


def test_fronthaul_rate_degenerate_branches(scalar):
    assert fronthaul_rate(scalar, PrimalSolution.from_beamformers([[0.0]], [[0.0]]), 0) == 0.0
    assert fronthaul_rate(scalar, PrimalSolution.from_beamformers([[1.0]], [[0.0]]), 0) == float("inf")


@given(seeds, st.floats(0.5, 6.0))
@settings(max_examples=100)
def test_rate_and_psd_forms_agree(seed, cbar):
    inst = random_instance(seed, M=4, K=3, cbar=cbar)
    sol = _random_candidate(seed)
    for m in range(inst.M):
        rate = fronthaul_rate(inst, sol, m)
        if abs(rate - cbar) < 1e-6:
            continue
        assert (rate <= cbar) == (fronthaul_psd_constraint(inst, sol, m) >= 0)


def test_certify_scalar_optimum(scalar):
    outcome = solve_instance(scalar)
    report = certify(scalar, outcome.primal, outcome.dual)
    assert report.passed, report.failing
    assert report.primal_objective == pytest.approx(2.0, abs=1e-8)
    assert report.dual_objective == pytest.approx(2.0, abs=1e-8)
    assert report.q_min_eig == pytest.approx(0.5, abs=1e-8)


def test_nearly_tight_fronthaul_passes_slackness(scalar):
    lambdas, vectors = lambda_recursion(scalar, [2.0])
    dual = DualSolution(beta=[2.0], lambdas=lambdas, lambda_vectors=vectors)
    nudged = PrimalSolution(
        beamformers=[[np.sqrt(1.5)]],
        Q=[[0.5 + 1e-13]],
        powers=[1.5],
        directions=[[1.0]],
    )
    # B = eta Q - load is 3e-13 here, below the residual floor
    report = certify(scalar, nudged, dual)
    assert report.residuals["fronthaul_slackness"] < 1e-10
    assert report.passed, report.failing


def test_default_scenario_optimum_certifies():
    inst = generate_instance(Scenario(num_users=8, seed=3))
    outcome = solve_instance(inst)
    assert outcome.report.status is SolveStatus.OPTIMAL, outcome.report.failing
    report = certify(inst, outcome.primal, outcome.dual)
    assert report.passed, report.failing
    assert max(report.residuals.values()) <= 1e-7
    assert report.duality_gap_rel <= 1e-6


def test_perturbed_power_fails_sinr_equality():
    inst = random_instance(21, M=4, K=3)
    outcome = solve_instance(inst)
    primal = outcome.primal
    v = primal.beamformers.copy()
    v[0] *= np.sqrt(1.01)
    report = certify(inst, PrimalSolution.from_beamformers(v, primal.Q), outcome.dual)
    assert not report.passed
    assert "sinr_equality" in report.failing
    assert report.duality_gap_rel > 0


def test_swapped_multipliers_fail_dual_residual():
    inst = random_instance(22)
    outcome = solve_instance(inst)
    dual = outcome.dual
    assert abs(dual.beta[0] - dual.beta[1]) > 1e-3 * dual.beta.max()
    swapped = DualSolution(beta=dual.beta[::-1], lambdas=dual.lambdas, lambda_vectors=dual.lambda_vectors)
    report = certify(inst, outcome.primal, swapped)
    assert "dual_residual" in report.failing


@given(seeds)
def test_dual_iterates_bound_primal_optimum(seed):
    inst = random_instance(seed, M=4, K=3)
    outcome = solve_instance(inst)
    run = dual_fpi(inst, DualIterConfig(tol=1e-10))
    optimum = outcome.report.primal_objective
    assert np.all(np.asarray(run.objectives) <= optimum * (1 + 1e-9))


@given(seeds)
def test_optimal_compression_covariance_is_positive_definite(seed):
    inst = random_instance(seed, M=4, K=3)
    outcome = solve_instance(inst)
    assert outcome.report.certified, outcome.report.failing
    Q = outcome.primal.Q
    assert np.linalg.eigvalsh(Q).min() > 1e-10 * np.trace(Q).real / inst.M
