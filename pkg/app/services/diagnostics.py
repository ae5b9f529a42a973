"""
Convergence-rate quantities of the two fixed point iterations.

The dual iteration contracts in the Thompson metric with an asymptotic rate
bounded by lambda(beta*) / (1 + lambda(beta*)); the primal iteration is affine
and converges at the spectral radius of its matrix. Both theoretical and
observed rates are computed here.
"""

import logging
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from app.core.exceptions import MetricDomainError
from app.models.problem import DualSolution, ProblemInstance, SolveStatus
from app.models.scenario import Scenario
from app.schemas.config import DualIterConfig
from app.services.dual_solver import I_map, c_matrices, dual_fpi
from app.services.primal_solver import affine_decomposition, gain_matrix, q_from_p, spectral_radius
from app.services.scenario_gen import generate_instance

logger = logging.getLogger(__name__)

RATE_WINDOW = 20
RATE_SKIP = 3
REFERENCE_TOL = 1e-13

RATE_COLUMNS = ["gamma_db", "theoretical_rate", "practical_rate", "iters", "status"]


def thompson_metric(beta1: Sequence[float], beta2: Sequence[float]) -> float:
    """
    mu(beta1, beta2) = max_k |ln(beta1_k / beta2_k)|.

    Raises:
        MetricDomainError: if an entry of either vector is not positive
    """
    b1 = np.asarray(beta1, dtype=float)
    b2 = np.asarray(beta2, dtype=float)
    if np.any(b1 <= 0) or np.any(b2 <= 0):
        raise MetricDomainError("Thompson metric needs strictly positive vectors")
    return float(np.max(np.abs(np.log(b1 / b2))))


def _lambda_per_user(inst: ProblemInstance, beta: Sequence[float]) -> np.ndarray:
    eye = np.eye(inst.M)
    return np.array([np.linalg.norm(C - eye, 2) for C in c_matrices(inst, beta)])


def lambda_of_beta(inst: ProblemInstance, beta: Sequence[float]) -> float:
    """lambda(beta) = max_k ||C_k(beta) - I||_2."""
    return float(np.max(_lambda_per_user(inst, beta)))


def dual_rate_bound(inst: ProblemInstance, beta_star: Sequence[float]) -> float:
    """Asymptotic linear rate bound lambda / (1 + lambda) of the dual iteration."""
    lam = lambda_of_beta(inst, beta_star)
    return lam / (1.0 + lam)


def kappa(alpha: float, lam: float) -> float:
    """kappa(alpha, lambda) = log_alpha((1 + alpha lambda) / (1 + lambda)), alpha > 1."""
    return float(np.log((1.0 + alpha * lam) / (1.0 + lam)) / np.log(alpha))


def growth_bound(inst: ProblemInstance, beta: Sequence[float], alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-user growth I_k(alpha beta) / I_k(beta) and its bound
    (1 + alpha lambda_k) / (1 + lambda_k) with lambda_k = ||C_k(beta) - I||_2.
    """
    beta = np.asarray(beta, dtype=float)
    growth = I_map(inst, alpha * beta) / I_map(inst, beta)
    lam = _lambda_per_user(inst, beta)
    return growth, (1.0 + alpha * lam) / (1.0 + lam)


def contraction_witness(inst: ProblemInstance, beta: Sequence[float], beta_tilde: Sequence[float]) -> Tuple[float, float]:
    """
    Both sides of the one-step contraction inequality of I in the Thompson metric.

    Returns:
        (mu(I(beta), I(beta_tilde)) / mu(beta, beta_tilde),
         max_k max(log_a(I_k(a beta_tilde) / I_k(beta_tilde)), log_a(I_k(a beta) / I_k(beta))))
        with a = exp(mu(beta, beta_tilde))

    Raises:
        MetricDomainError: if the two points coincide or are not positive
    """
    beta = np.asarray(beta, dtype=float)
    beta_tilde = np.asarray(beta_tilde, dtype=float)
    mu = thompson_metric(beta, beta_tilde)
    if mu == 0.0:
        raise MetricDomainError("contraction ratio is undefined for identical points")
    I_b, I_t = I_map(inst, beta), I_map(inst, beta_tilde)
    alpha = np.exp(mu)
    lhs = thompson_metric(I_b, I_t) / mu
    rhs = max(
        np.max(np.log(I_map(inst, alpha * beta_tilde) / I_t)),
        np.max(np.log(I_map(inst, alpha * beta) / I_b)),
    ) / mu
    return float(lhs), float(rhs)


def closed_form_g_matrix(inst: ProblemInstance, dual: DualSolution, dirs: np.ndarray) -> np.ndarray:
    """
    Closed-form rate matrix with Q(e_k) in every entry of row k:
    G_kk = gamma_k h_k^H Q(e_k) h_k / g_kk,
    G_kj = gamma_k (g_kj + h_k^H Q(e_k) h_k) / g_kk.
    """
    H = inst.channels
    g = gain_matrix(inst, dirs)
    own = np.diag(g)
    hQh = np.array([
        np.real(np.vdot(H[k], q_from_p(inst, e, dual, dirs) @ H[k]))
        for k, e in enumerate(np.eye(inst.K))
    ])
    G = inst.sinr_targets[:, None] * (g + hQh[:, None]) / own[:, None]
    G[np.diag_indices(inst.K)] = inst.sinr_targets * hQh / own
    return G


def primal_rate(inst: ProblemInstance, dual: DualSolution, dirs: np.ndarray) -> Tuple[float, float]:
    """
    Spectral radii of the probed matrix of J and of :func:`closed_form_g_matrix`.
    """
    G, _ = affine_decomposition(inst, dual, dirs)
    return spectral_radius(G), spectral_radius(closed_form_g_matrix(inst, dual, dirs))


def _tail_mean(ratios: Iterable[float], window: int, skip: int) -> float:
    ratios = np.asarray(list(ratios), dtype=float)
    if skip:
        ratios = ratios[:-skip]
    ratios = ratios[-window:]
    ratios = ratios[np.isfinite(ratios)]
    return float(np.mean(ratios)) if ratios.size else float("nan")


def observed_dual_rate(
    iterates: np.ndarray,
    beta_star: Sequence[float],
    window: int = RATE_WINDOW,
    skip: int = RATE_SKIP,
) -> float:
    """
    Mean ratio mu(beta^{i+1}, beta*) / mu(beta^i, beta*) over the last ``window``
    iterations, dropping the final ``skip``. Iterates start at iteration 1.
    """
    mus = np.array([thompson_metric(b, beta_star) for b in iterates])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = mus[1:] / mus[:-1]
    return _tail_mean(ratios, window, skip)


def observed_primal_rate(
    iterates: np.ndarray,
    p_star: Sequence[float],
    window: int = RATE_WINDOW,
    skip: int = RATE_SKIP,
) -> float:
    """
    Mean ratio ||p^{i+1} - p*|| / ||p^i - p*|| over the tail of the iteration.
    """
    errors = np.linalg.norm(np.asarray(iterates) - np.asarray(p_star)[None, :], axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = errors[1:] / errors[:-1]
    return _tail_mean(ratios, window, skip)


def observed_step_rate(steps: Sequence[float], window: int = RATE_WINDOW, skip: int = RATE_SKIP) -> float:
    """
    Tail mean of consecutive step-norm ratios; needs no reference solution.
    """
    steps = np.asarray(steps, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = steps[1:] / steps[:-1]
    return _tail_mean(ratios, window, skip)


def rate_row(inst: ProblemInstance, cfg: Optional[DualIterConfig] = None) -> dict:
    """
    Theoretical and observed dual rate of one instance.

    The reference point beta* is a separate solve at a tolerance of 1e-13.
    """
    cfg = cfg or DualIterConfig()
    run = dual_fpi(inst, cfg.model_copy(update={"keep_iterates": True}))
    row = {
        "gamma_db": float(inst.gamma_db[0]),
        "theoretical_rate": float("nan"),
        "practical_rate": float("nan"),
        "iters": run.iterations,
        "status": run.status.value,
    }
    if run.status is not SolveStatus.OPTIMAL:
        return row
    reference = dual_fpi(inst, cfg.model_copy(update={"tol": REFERENCE_TOL, "keep_iterates": False}))
    if reference.status is not SolveStatus.OPTIMAL:
        logger.warning("reference solve at tol %.0e ended %s; rates left undefined", REFERENCE_TOL, reference.status.value)
        row["status"] = reference.status.value
        return row
    beta_star = reference.beta
    row["theoretical_rate"] = dual_rate_bound(inst, beta_star)
    row["practical_rate"] = observed_dual_rate(run.iterates, beta_star)
    return row


def rate_table(
    scenario: Scenario,
    gamma_list: Sequence[float],
    cfg: Optional[DualIterConfig] = None,
) -> pd.DataFrame:
    """
    Theoretical versus practical dual rate over SINR targets on one channel draw.

    Non-optimal grid points keep their status and NaN rates.

    Returns:
        DataFrame with columns gamma_db, theoretical_rate, practical_rate, iters, status
    """
    base = generate_instance(scenario)
    rows = []
    for gamma in gamma_list:
        row = rate_row(base.with_targets(gamma_db=gamma), cfg)
        row["gamma_db"] = float(gamma)
        logger.info(
            "rate at %.2f dB: theoretical=%.4f practical=%.4f (%d iterations, %s)",
            gamma, row["theoretical_rate"], row["practical_rate"], row["iters"], row["status"],
        )
        rows.append(row)
    return pd.DataFrame(rows, columns=RATE_COLUMNS)
