"""
End-to-end solve: dual iteration, beam directions, power iteration,
rank-one assembly and certification.
"""

import logging
import time
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.core.config import settings
from app.models.problem import DualSolution, PrimalSolution, ProblemInstance, SolveStatus
from app.schemas.config import DualIterConfig, PrimalIterConfig
from app.schemas.report import SolveReport
from app.services.diagnostics import dual_rate_bound
from app.services.dual_solver import dual_fpi
from app.services.primal_solver import assemble_solution, beam_directions, primal_fpi, solve_direct_linear
from app.services.verifier import certify

logger = logging.getLogger(__name__)


class SolveOutcome(BaseModel):
    """Report of one solve with the solutions it produced (None when not reached)."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    report: SolveReport
    primal: Optional[PrimalSolution] = None
    dual: Optional[DualSolution] = None


def solve_instance(
    inst: ProblemInstance,
    dual_cfg: Optional[DualIterConfig] = None,
    primal_cfg: Optional[PrimalIterConfig] = None,
    certify_tol: Optional[float] = None,
    direct: bool = False,
    record_timings: bool = True,
) -> SolveOutcome:
    """
    Run the full pipeline on one instance.

    The reported status is Optimal only when both iterations converged and the
    verifier passed every residual; a converged but uncertified result is
    reported as IterationLimit with the failing residuals listed.
    A primal iteration that diverges to a non-finite iterate also ends as
    IterationLimit, with no primal solution and no certification.

    Args:
        inst: Problem instance
        dual_cfg: Dual iteration controls
        primal_cfg: Primal iteration controls
        certify_tol: Certification tolerance (defaults to settings)
        direct: Solve the affine power equation directly instead of iterating
        record_timings: When False every time field is zero

    Returns:
        SolveOutcome
    """
    dual_cfg = dual_cfg or DualIterConfig()
    primal_cfg = primal_cfg or PrimalIterConfig()
    certify_tol = settings.CERTIFY_TOL if certify_tol is None else certify_tol
    clock = time.perf_counter if record_timings else (lambda: 0.0)

    start = clock()
    dual_run = dual_fpi(inst, dual_cfg)
    t_dual = clock() - start
    report = SolveReport(
        status=dual_run.status,
        M=inst.M,
        K=inst.K,
        dual_iters=dual_run.iterations,
        dual_objective=dual_run.objectives[-1] if dual_run.trace else None,
        dual_trace=dual_run.objectives,
        dual_steps=dual_run.steps,
        t_dual_s=t_dual,
        wall_time=t_dual,
    )
    if dual_run.status is not SolveStatus.OPTIMAL:
        return SolveOutcome(report=report)

    dual = dual_run.solution
    start = clock()
    dirs = beam_directions(inst, dual)
    if direct:
        primal_run = solve_direct_linear(inst, dual, dirs)
    else:
        primal_run = primal_fpi(inst, dual, dirs, primal_cfg)
    if not (np.all(np.isfinite(primal_run.powers)) and np.all(np.isfinite(primal_run.Q))):
        logger.warning("primal iteration left a non-finite iterate; skipping certification")
        report = report.model_copy(update={
            "status": SolveStatus.ITERATION_LIMIT,
            "primal_iters": primal_run.iterations,
            "primal_trace": primal_run.objectives,
            "primal_steps": primal_run.steps,
        })
        return SolveOutcome(report=report, dual=dual)
    primal = assemble_solution(primal_run.powers, primal_run.Q, dirs)
    t_primal = clock() - start

    start = clock()
    cert = certify(inst, primal, dual, certify_tol)
    t_certify = clock() - start

    status = primal_run.status
    if status is SolveStatus.OPTIMAL and not cert.passed:
        logger.warning("converged solution failed certification (%s)", ", ".join(cert.failing))
        status = SolveStatus.ITERATION_LIMIT

    report = report.model_copy(update={
        "status": status,
        "primal_iters": primal_run.iterations,
        "dual_objective": cert.dual_objective,
        "primal_objective": cert.primal_objective,
        "duality_gap_rel": cert.duality_gap_rel,
        "kkt_residuals": cert.residuals,
        "certified": cert.passed,
        "failing": cert.failing,
        "rate_bound": dual_rate_bound(inst, dual.beta),
        "primal_trace": primal_run.objectives,
        "primal_steps": primal_run.steps,
        "t_primal_s": t_primal,
        "t_certify_s": t_certify,
        "wall_time": t_dual + t_primal + t_certify,
    })
    logger.info(
        "solve finished: %s, power %.6e, gap %.2e (%d dual / %d primal iterations)",
        status.value, cert.primal_objective, cert.duality_gap_rel,
        report.dual_iters, report.primal_iters,
    )
    return SolveOutcome(report=report, primal=primal, dual=dual)
