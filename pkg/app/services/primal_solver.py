"""
Primal recovery: beam directions from the dual certificate, the power fixed
point iteration, and the backward reconstruction of the compression covariance.
"""

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from app.core.config import settings
from app.core.exceptions import (
    ConfigError,
    DegenerateDirectionError,
    DegenerateDualError,
    raise_negative_power,
    raise_not_contractive,
)
from app.models.problem import DualSolution, PrimalRun, PrimalSolution, ProblemInstance, SolveStatus
from app.schemas.config import PrimalIterConfig
from app.services.dual_solver import c_matrices

logger = logging.getLogger(__name__)


def beam_directions(inst: ProblemInstance, dual: DualSolution) -> np.ndarray:
    """
    Unit directions v_k proportional to C_k^{-1} h_k, phased so h_k^H v_k > 0.

    Returns:
        (K, M) array, row k is the direction of user k
    """
    H = inst.channels
    dirs = np.empty_like(H)
    for k, C in enumerate(c_matrices(inst, dual.beta, dual.pivots)):
        x = cho_solve(cho_factor(C, lower=True), H[k])
        x /= np.linalg.norm(x)
        phase = np.vdot(H[k], x)
        dirs[k] = x * (np.conj(phase) / abs(phase))
    return dirs


def gain_matrix(inst: ProblemInstance, dirs: np.ndarray) -> np.ndarray:
    """
    g[k, j] = |h_k^H v_j|^2.
    """
    return np.abs(inst.channels.conj() @ np.asarray(dirs).T) ** 2


def q_from_p(inst: ProblemInstance, p: Sequence[float], dual: DualSolution, dirs: np.ndarray) -> np.ndarray:
    """
    Compression covariance Q(p) solving B_m lambda_m = 0 for every relay.

    Built backward from relay M: the column below the diagonal follows from the
    trailing block and lambda_m, the diagonal entry from the pivot row.

    Raises:
        DegenerateDualError: if some lambda_m^{(m)} vanishes
    """
    p = np.asarray(p, dtype=float)
    M = inst.M
    eta = inst.eta
    vecs = dual.lambda_vectors
    load = p @ (np.abs(np.asarray(dirs)) ** 2)
    Q = np.zeros((M, M), dtype=complex)
    for m in range(M - 1, -1, -1):
        lead = float(np.real(vecs[m, m]))
        if lead <= settings.PIVOT_EPS:
            raise DegenerateDualError(f"lambda_{m + 1}^({m + 1}) = {lead:.3e}; optimal Q is singular")
        if m == M - 1:
            Q[m, m] = load[m] / (eta[m] - 1.0)
            continue
        tail = vecs[m, m + 1:]
        Q_t = Q[m + 1:, m + 1:]
        col = -(Q_t @ tail) / lead
        Q[m + 1:, m] = col
        Q[m, m + 1:] = col.conj()
        quad = float(np.real(np.vdot(tail, Q_t @ tail)))
        Q[m, m] = (eta[m] / (eta[m] - 1.0)) * quad / lead ** 2 + load[m] / (eta[m] - 1.0)
    return Q


def J_map(
    inst: ProblemInstance,
    p: Sequence[float],
    dual: DualSolution,
    dirs: np.ndarray,
    gains: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Affine power mapping
    J_k(p) = gamma_k (sum_{j != k} p_j g_kj + h_k^H Q(p) h_k + sigma_k^2) / g_kk.

    Args:
        gains: Precomputed ``gain_matrix(inst, dirs)``

    Raises:
        DegenerateDirectionError: if g_kk vanishes for some user
    """
    p = np.asarray(p, dtype=float)
    g = gain_matrix(inst, dirs) if gains is None else gains
    own = np.diag(g)
    floor = settings.PIVOT_EPS * np.sum(np.abs(inst.channels) ** 2, axis=1)
    if np.any(own <= floor):
        k = int(np.argmax(own <= floor))
        raise DegenerateDirectionError(f"direction of user {k + 1} carries no signal (g_kk = {own[k]:.3e})")
    H = inst.channels
    Q = q_from_p(inst, p, dual, dirs)
    hQh = np.real(np.sum((H.conj() @ Q) * H, axis=1))
    interference = g @ p - own * p
    return inst.sinr_targets * (interference + hQh + inst.noise_powers) / own


def primal_objective(p: np.ndarray, Q: np.ndarray) -> float:
    """sum_k p_k + tr Q (unit directions)."""
    return float(np.sum(p) + np.real(np.trace(Q)))


def primal_fpi(
    inst: ProblemInstance,
    dual: DualSolution,
    dirs: np.ndarray,
    cfg: Optional[PrimalIterConfig] = None,
) -> PrimalRun:
    """
    Power fixed point iteration p <- J(p).

    Args:
        inst: Problem instance
        dual: Converged dual certificate
        dirs: Beam directions from :func:`beam_directions`
        cfg: Iteration controls (defaults from settings)

    Returns:
        PrimalRun with status Optimal or IterationLimit
    """
    cfg = cfg or PrimalIterConfig()
    p = np.zeros(inst.K) if cfg.p0 is None else np.asarray(cfg.p0, dtype=float)
    if p.shape != (inst.K,):
        raise ConfigError(f"p0 must have {inst.K} entries, got {p.shape[0]}")
    gains = gain_matrix(inst, dirs)
    trace = []
    history = [] if cfg.keep_iterates else None
    status = SolveStatus.ITERATION_LIMIT
    Q = q_from_p(inst, p, dual, dirs)

    for it in range(1, cfg.max_iter + 1):
        new = J_map(inst, p, dual, dirs, gains)
        Q = q_from_p(inst, new, dual, dirs)
        objective = primal_objective(new, Q)
        step = float(np.max(np.abs(new - p) / new))
        trace.append((it, objective, step))
        if history is not None:
            history.append(new)
        p = new
        if it % settings.LOG_EVERY == 0:
            logger.debug("primal iter %d: objective=%.6e step=%.3e", it, objective, step)
        if not np.isfinite(objective):
            logger.warning("primal iteration diverged at iteration %d", it)
            break
        if step <= cfg.tol:
            status = SolveStatus.OPTIMAL
            break

    if status is SolveStatus.OPTIMAL:
        logger.info("primal iteration converged in %d iterations, objective %.6e", len(trace), trace[-1][1])
    else:
        logger.warning("primal iteration stopped after %d iterations without converging", len(trace))

    return PrimalRun(
        status=status,
        powers=p,
        Q=Q,
        iterations=len(trace),
        trace=trace,
        iterates=np.array(history) if history is not None else None,
    )


def affine_decomposition(inst: ProblemInstance, dual: DualSolution, dirs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Probe J(p) = G p + c column by column.

    Returns:
        (G, c) with c = J(0) and G e_j = J(e_j) - J(0)
    """
    gains = gain_matrix(inst, dirs)
    c = J_map(inst, np.zeros(inst.K), dual, dirs, gains)
    G = np.empty((inst.K, inst.K))
    for j, e in enumerate(np.eye(inst.K)):
        G[:, j] = J_map(inst, e, dual, dirs, gains) - c
    return G, c


def spectral_radius(G: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(G))))


def solve_direct_linear(inst: ProblemInstance, dual: DualSolution, dirs: np.ndarray) -> PrimalRun:
    """
    Solve (I - G) p = c for the fixed point of the affine power mapping.

    Returns:
        PrimalRun with status Optimal and no trace

    Raises:
        NotContractiveError: if the spectral radius of G is >= 1
        NegativePowerError: if the solution of the linear system has a negative entry
    """
    G, c = affine_decomposition(inst, dual, dirs)
    rho = spectral_radius(G)
    if rho >= 1.0:
        raise_not_contractive(rho)
    p = np.linalg.solve(np.eye(inst.K) - G, c)
    if np.any(p < 0):
        raise_negative_power(p)
    logger.info("direct linear solve: spectral radius %.6f", rho)
    return PrimalRun(status=SolveStatus.OPTIMAL, powers=p, Q=q_from_p(inst, p, dual, dirs))


def assemble_solution(p: Sequence[float], Q: np.ndarray, dirs: np.ndarray) -> PrimalSolution:
    """
    Rank-one beamformers v_k = sqrt(p_k) v_k-hat packaged with Q.
    """
    p = np.asarray(p, dtype=float)
    dirs = np.asarray(dirs, dtype=complex)
    return PrimalSolution(
        beamformers=np.sqrt(p)[:, None] * dirs,
        Q=Q,
        powers=p,
        directions=dirs,
    )
