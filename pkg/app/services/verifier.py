"""
Independent certification of primal/dual pairs.

Nothing here calls the solvers: every residual is recomputed from the instance,
the primal solution and the dual certificate alone. Residuals are relative to
the natural scale of the quantity they measure, with an absolute floor.
"""

import logging
from typing import Dict, Optional

import numpy as np
from scipy.linalg import eigvalsh, pinvh

from app.core.config import settings
from app.models.problem import DualSolution, PrimalSolution, ProblemInstance
from app.schemas.report import CertificationReport
from app.services.dual_solver import c_matrices, dual_residual_D, gamma_matrix
from app.services.problem import total_power

logger = logging.getLogger(__name__)


def _cross_gains(inst: ProblemInstance, sol: PrimalSolution) -> np.ndarray:
    """h_k^H v_j for every (k, j)."""
    return inst.channels.conj() @ sol.beamformers.T


def _hQh(inst: ProblemInstance, Q: np.ndarray) -> np.ndarray:
    H = inst.channels
    return np.real(np.sum((H.conj() @ Q) * H, axis=1))


def _denominators(inst: ProblemInstance, sol: PrimalSolution) -> np.ndarray:
    power = np.abs(_cross_gains(inst, sol)) ** 2
    interference = power.sum(axis=1) - np.diag(power)
    return interference + _hQh(inst, sol.Q) + inst.noise_powers


def sinr(inst: ProblemInstance, sol: PrimalSolution, k: int) -> float:
    """
    SINR of user k: |h_k^H v_k|^2 / (sum_{j != k} |h_k^H v_j|^2 + h_k^H Q h_k + sigma_k^2).
    """
    signal = abs(np.vdot(inst.channels[k], sol.beamformers[k])) ** 2
    return float(signal / _denominators(inst, sol)[k])


def _relay_load(sol: PrimalSolution, m: int) -> float:
    """sum_k |v_{k,m}|^2 + Q^{(m,m)}."""
    return float(np.sum(np.abs(sol.beamformers[:, m]) ** 2) + np.real(sol.Q[m, m]))


def fronthaul_rate(inst: ProblemInstance, sol: PrimalSolution, m: int) -> float:
    """
    Compression rate log2(load_m / q_m) of relay m.

    q_m is the Schur complement of Q^{(m,m)} given relays m+1..M, with a
    pseudo-inverse for singular trailing blocks. A vanishing q_m gives rate 0
    for an unused relay and +inf otherwise.
    """
    Q = sol.Q
    q = float(np.real(Q[m, m]))
    if m + 1 < inst.M:
        tail = Q[m + 1:, m]
        inv = pinvh(Q[m + 1:, m + 1:], rtol=settings.PINV_RTOL)
        q -= float(np.real(np.vdot(tail, inv @ tail)))
    load = _relay_load(sol, m)
    if q <= settings.RESIDUAL_FLOOR:
        return 0.0 if load <= settings.RESIDUAL_FLOOR else float("inf")
    return float(np.log2(load / q))


def fronthaul_matrix(inst: ProblemInstance, sol: PrimalSolution, m: int) -> np.ndarray:
    """
    B_m = 2^{C_m} (0 (+) Q^{(m:M,m:M)}) - (sum_k |v_{k,m}|^2 + Q^{(m,m)}) E_m, full M x M.
    """
    B = np.zeros((inst.M, inst.M), dtype=complex)
    B[m:, m:] = inst.eta[m] * sol.Q[m:, m:]
    B[m, m] -= _relay_load(sol, m)
    return B


def fronthaul_psd_constraint(inst: ProblemInstance, sol: PrimalSolution, m: int) -> float:
    """
    Smallest eigenvalue of the trailing block B_m^{(m:M,m:M)}; >= 0 means
    the fronthaul constraint of relay m holds.
    """
    block = fronthaul_matrix(inst, sol, m)[m:, m:]
    return float(eigvalsh((block + block.conj().T) / 2.0)[0])


def _ratio(value: float, scale: float) -> float:
    return float(value / max(scale, settings.RESIDUAL_FLOOR))


def _sinr_equality(inst: ProblemInstance, primal: PrimalSolution) -> float:
    signal = np.abs(np.diag(_cross_gains(inst, primal))) ** 2
    denom = _denominators(inst, primal)
    return float(np.max(np.abs(signal / inst.sinr_targets - denom) / denom))


def fronthaul_scale(inst: ProblemInstance, primal: PrimalSolution, m: int) -> float:
    """eta_m ||Q^{(m:M,m:M)}|| + load_m, the size of the terms that make up B_m."""
    return float(inst.eta[m] * np.linalg.norm(primal.Q[m:, m:], 2) + _relay_load(primal, m))


def _fronthaul_psd(inst: ProblemInstance, primal: PrimalSolution) -> float:
    worst = 0.0
    for m in range(inst.M):
        value = max(0.0, -fronthaul_psd_constraint(inst, primal, m))
        worst = max(worst, _ratio(value, fronthaul_scale(inst, primal, m)))
    return worst


def _dual_psd(C: np.ndarray, inst: ProblemInstance, beta: np.ndarray) -> float:
    worst = 0.0
    H = inst.channels
    for k in range(inst.K):
        S = C[k] - (beta[k] / inst.sinr_targets[k]) * np.outer(H[k], H[k].conj())
        low = eigvalsh((S + S.conj().T) / 2.0)[0]
        worst = max(worst, _ratio(max(0.0, -low), np.linalg.norm(C[k], 2)))
    return worst


def _lambda_pattern(lambdas: np.ndarray) -> float:
    worst = 0.0
    M = lambdas.shape[0]
    for m in range(M):
        L = lambdas[m]
        leading = np.linalg.norm(L[:m, :]) + np.linalg.norm(L[:, :m])
        eigs = np.abs(eigvalsh((L + L.conj().T) / 2.0))
        second = np.sort(eigs)[-2] if M > 1 else 0.0
        worst = max(worst, _ratio(leading + second, np.linalg.norm(L)))
    return worst


def _fronthaul_slackness(inst: ProblemInstance, primal: PrimalSolution, lambdas: np.ndarray) -> float:
    # B_m itself cancels to roundoff when the constraint is tight, so scale by its terms
    worst = 0.0
    for m in range(inst.M):
        value = abs(np.trace(lambdas[m] @ fronthaul_matrix(inst, primal, m)))
        worst = max(worst, _ratio(value, np.linalg.norm(lambdas[m]) * fronthaul_scale(inst, primal, m)))
    return worst


def _sinr_slackness(C: np.ndarray, inst: ProblemInstance, primal: PrimalSolution, beta: np.ndarray) -> float:
    worst = 0.0
    H = inst.channels
    for k in range(inst.K):
        v = primal.beamformers[k]
        S = C[k] - (beta[k] / inst.sinr_targets[k]) * np.outer(H[k], H[k].conj())
        value = abs(np.vdot(v, S @ v))
        worst = max(worst, _ratio(value, np.linalg.norm(C[k], 2) * np.vdot(v, v).real))
    return worst


def certify(
    inst: ProblemInstance,
    primal: PrimalSolution,
    dual: DualSolution,
    tol: Optional[float] = None,
) -> CertificationReport:
    """
    Check the enhanced KKT system and the duality gap.

    Residuals (all relative):
        sinr_equality: SINR constraints hold with equality
        fronthaul_psd: every B_m is PSD
        q_psd: Q is PSD
        dual_residual: D(beta, {Lambda_m}) = 0
        dual_psd: C_k - (beta_k / gamma_k) h_k h_k^H is PSD
        lambda_pattern: Lambda_m is rank one with zero leading rows
        fronthaul_slackness: tr(Lambda_m B_m) = 0
        sinr_slackness: v_k^H (C_k - (beta_k / gamma_k) h_k h_k^H) v_k = 0
        duality_gap: |primal - dual| / max(1, dual)

    Never raises on a bad candidate; failures are listed in the report.
    """
    tol = settings.CERTIFY_TOL if tol is None else tol
    beta = dual.beta
    lambdas = dual.lambdas
    C = c_matrices(inst, beta, dual.pivots)
    Q = primal.Q
    q_eigs = eigvalsh((Q + Q.conj().T) / 2.0)
    primal_obj = total_power(primal)
    dual_obj = dual.objective(inst)
    gap = abs(primal_obj - dual_obj) / max(1.0, dual_obj)

    residuals: Dict[str, float] = {
        "sinr_equality": _sinr_equality(inst, primal),
        "fronthaul_psd": _fronthaul_psd(inst, primal),
        "q_psd": _ratio(max(0.0, -q_eigs[0]), np.max(np.abs(q_eigs))),
        "dual_residual": _ratio(dual_residual_D(inst, beta, lambdas), np.linalg.norm(gamma_matrix(inst, beta))),
        "dual_psd": _dual_psd(C, inst, beta),
        "lambda_pattern": _lambda_pattern(lambdas),
        "fronthaul_slackness": _fronthaul_slackness(inst, primal, lambdas),
        "sinr_slackness": _sinr_slackness(C, inst, primal, beta),
        "duality_gap": float(gap),
    }
    failing = [name for name, value in residuals.items() if not value <= tol]
    if failing:
        logger.info("certification failed: %s", ", ".join(failing))
    return CertificationReport(
        residuals=residuals,
        tol=tol,
        passed=not failing,
        failing=failing,
        primal_objective=primal_obj,
        dual_objective=dual_obj,
        duality_gap_rel=float(gap),
        q_min_eig=float(q_eigs[0]),
    )
