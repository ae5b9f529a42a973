"""
Dual side of the solver: the Lambda recursion and the dual fixed point iteration.

For multipliers beta the matrices Lambda_m(beta) are obtained in closed form by
peeling one relay at a time off Gamma(beta) = I + sum_k beta_k h_k h_k^H, which
makes the enhanced dual feasibility condition D(beta, {Lambda_m}) = 0 hold
exactly. The remaining condition on beta is the fixed point beta = I(beta) of a
standard interference mapping, solved by plain iteration from beta0.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from app.core.config import settings
from app.core.exceptions import ConfigError, NumericalPivotError
from app.models.problem import DualRun, DualSolution, ProblemInstance, SolveStatus
from app.schemas.config import DualIterConfig

logger = logging.getLogger(__name__)


def gamma_matrix(inst: ProblemInstance, beta: Sequence[float]) -> np.ndarray:
    """
    Gamma(beta) = I + sum_k beta_k h_k h_k^H.
    """
    H = inst.channels
    beta = np.asarray(beta, dtype=float)
    return np.eye(inst.M, dtype=complex) + H.T @ (beta[:, None] * H.conj())


def schur_step(Gamma: np.ndarray, eta: float) -> np.ndarray:
    """
    Relaxed Schur complement S_eta(Gamma) of the leading pivot.

    S_eta(Gamma) = Gamma[1:, 1:] - Gamma[1:, 0] Gamma[0, 1:] / ((eta / (eta - 1)) Gamma[0, 0])

    Raises:
        NumericalPivotError: if Gamma[0, 0] <= PIVOT_EPS
    """
    Gamma = np.asarray(Gamma, dtype=complex)
    pivot = float(np.real(Gamma[0, 0]))
    if pivot <= settings.PIVOT_EPS:
        raise NumericalPivotError(f"Schur pivot {pivot:.3e} is not positive")
    return Gamma[1:, 1:] - np.outer(Gamma[1:, 0], Gamma[0, 1:]) / ((eta / (eta - 1.0)) * pivot)


def lambda_recursion(inst: ProblemInstance, beta: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rank-one dual matrices Lambda_m(beta) for every relay.

    Relay m consumes the leading pivot of the current block: its rank-one factor
    is read off the first column and the block shrinks by ``schur_step``.

    Returns:
        (lambdas, lambda_vectors) of shapes (M, M, M) and (M, M)

    Raises:
        NumericalPivotError: on a non-positive pivot (corrupted input)
    """
    M = inst.M
    eta = inst.eta
    lambdas = np.zeros((M, M, M), dtype=complex)
    vectors = np.zeros((M, M), dtype=complex)
    block = gamma_matrix(inst, beta)
    for m in range(M):
        pivot = float(np.real(block[0, 0]))
        if pivot <= settings.PIVOT_EPS:
            raise NumericalPivotError(f"pivot of relay {m + 1} is {pivot:.3e}")
        lead = np.sqrt(pivot / (eta[m] - 1.0))
        vectors[m, m] = lead
        vectors[m, m + 1:] = block[1:, 0] / (eta[m] * lead)
        lambdas[m] = np.outer(vectors[m], vectors[m].conj())
        if m + 1 < M:
            block = schur_step(block, eta[m])
    return lambdas, vectors


def _trailing(lambdas: np.ndarray) -> np.ndarray:
    """0 (+) Lambda_m^{(m:M, m:M)} for every m."""
    M = lambdas.shape[0]
    mask = np.arange(M)[None, :] >= np.arange(M)[:, None]
    return lambdas * (mask[:, :, None] & mask[:, None, :])


def dual_residual_D(inst: ProblemInstance, beta: Sequence[float], lambdas: np.ndarray) -> float:
    """
    Frobenius norm of
    D = I + sum_k beta_k h_k h_k^H + sum_m Lambda_m^{(m,m)} E_m - sum_m 2^{C_m} (0 (+) Lambda_m^{(m:M,m:M)}).
    """
    lambdas = np.asarray(lambdas, dtype=complex)
    M = inst.M
    pivots = np.real(lambdas[np.arange(M), np.arange(M), np.arange(M)])
    D = gamma_matrix(inst, beta) + np.diag(pivots) - np.tensordot(inst.eta, _trailing(lambdas), axes=1)
    return float(np.linalg.norm(D, "fro"))


def c_matrices(inst: ProblemInstance, beta: Sequence[float], pivots: Optional[np.ndarray] = None) -> np.ndarray:
    """
    C_k(beta) = I + sum_{j != k} beta_j h_j h_j^H + sum_m Lambda_m^{(m,m)} E_m for every k.

    Returns:
        (K, M, M) stack
    """
    beta = np.asarray(beta, dtype=float)
    if pivots is None:
        pivots = _pivots(inst, beta)
    H = inst.channels
    A = gamma_matrix(inst, beta) + np.diag(pivots)
    own = beta[:, None, None] * (H[:, :, None] * H.conj()[:, None, :])
    return A[None, :, :] - own


def _pivots(inst: ProblemInstance, beta: np.ndarray) -> np.ndarray:
    lambdas, _ = lambda_recursion(inst, beta)
    M = inst.M
    return np.real(lambdas[np.arange(M), np.arange(M), np.arange(M)])


def _shared_forms(inst: ProblemInstance, beta: np.ndarray, pivots: np.ndarray) -> np.ndarray:
    """h_k^H A^{-1} h_k for A = Gamma(beta) + diag(Lambda_m^{(m,m)}), one factorization."""
    H = inst.channels
    A = gamma_matrix(inst, beta) + np.diag(pivots)
    X = cho_solve(cho_factor(A, lower=True), H.T)
    return np.real(np.sum(H.conj().T * X, axis=0))


def quadratic_forms(inst: ProblemInstance, beta: Sequence[float], fast: bool = False) -> np.ndarray:
    """
    s_k = h_k^H C_k(beta)^{-1} h_k for every k.

    The plain path factors each C_k. The fast path factors
    A = Gamma(beta) + diag(Lambda_m^{(m,m)}) once and removes the own-user term
    by the Sherman-Morrison identity.
    """
    beta = np.asarray(beta, dtype=float)
    H = inst.channels
    pivots = _pivots(inst, beta)
    if fast:
        s_full = _shared_forms(inst, beta, pivots)
        return s_full / (1.0 - beta * s_full)
    s = np.empty(inst.K)
    for k, C in enumerate(c_matrices(inst, beta, pivots)):
        x = cho_solve(cho_factor(C, lower=True), H[k])
        s[k] = np.real(np.vdot(H[k], x))
    return s


def I_map(inst: ProblemInstance, beta: Sequence[float], fast: bool = False) -> np.ndarray:
    """
    Standard interference mapping I_k(beta) = gamma_k / (h_k^H C_k(beta)^{-1} h_k).

    Args:
        inst: Problem instance
        beta: Nonnegative multipliers
        fast: Share one factorization across users

    Returns:
        (K,) strictly positive vector
    """
    beta = np.asarray(beta, dtype=float)
    if fast:
        s_full = _shared_forms(inst, beta, _pivots(inst, beta))
        return inst.sinr_targets * (1.0 / s_full - beta)
    return inst.sinr_targets / quadratic_forms(inst, beta)


def dual_fpi(inst: ProblemInstance, cfg: Optional[DualIterConfig] = None) -> DualRun:
    """
    Dual fixed point iteration beta <- I(beta).

    Converges when max_k |beta_k^{new} - beta_k| / beta_k^{new} <= tol. The
    instance is declared infeasible as soon as the dual objective
    sum_k beta_k sigma_k^2 exceeds ``power_cap``.

    Args:
        inst: Problem instance
        cfg: Iteration controls (defaults from settings)

    Returns:
        DualRun with status Optimal, Infeasible or IterationLimit
    """
    cfg = cfg or DualIterConfig()
    beta = np.zeros(inst.K) if cfg.beta0 is None else np.asarray(cfg.beta0, dtype=float)
    if beta.shape != (inst.K,):
        raise ConfigError(f"beta0 must have {inst.K} entries, got {beta.shape[0]}")
    trace = []
    history = [] if cfg.keep_iterates else None
    status = SolveStatus.ITERATION_LIMIT
    logger.info("dual iteration started (M=%d, K=%d, tol=%.1e)", inst.M, inst.K, cfg.tol)

    for it in range(1, cfg.max_iter + 1):
        new = I_map(inst, beta, fast=cfg.fast)
        objective = float(new @ inst.noise_powers)
        step = float(np.max(np.abs(new - beta) / new))
        trace.append((it, objective, step))
        if history is not None:
            history.append(new)
        beta = new
        if it % settings.LOG_EVERY == 0:
            logger.debug("dual iter %d: objective=%.6e step=%.3e", it, objective, step)
        if objective > cfg.power_cap:
            status = SolveStatus.INFEASIBLE
            break
        if step <= cfg.tol:
            status = SolveStatus.OPTIMAL
            break

    solution = None
    if status is SolveStatus.OPTIMAL:
        lambdas, vectors = lambda_recursion(inst, beta)
        solution = DualSolution(beta=beta, lambdas=lambdas, lambda_vectors=vectors)
        logger.info("dual iteration converged in %d iterations, objective %.6e", len(trace), trace[-1][1])
    elif status is SolveStatus.INFEASIBLE:
        logger.warning(
            "dual objective %.3e exceeded cap %.3e after %d iterations: infeasible",
            trace[-1][1], cfg.power_cap, len(trace),
        )
    else:
        logger.warning("dual iteration hit the limit of %d iterations", cfg.max_iter)

    return DualRun(
        status=status,
        beta=beta,
        solution=solution,
        iterations=len(trace),
        trace=trace,
        iterates=np.array(history) if history is not None else None,
    )
