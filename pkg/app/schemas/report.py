"""
Pydantic schemas for certification and solve reports.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from app.models.problem import SolveStatus


class CertificationReport(BaseModel):
    """
    Verifier output, merged into SolveReport.

    Attributes:
        residuals: Residual name -> relative residual
        tol: Threshold applied to every residual
        passed: True when every residual is within tol
        failing: Names of the residuals above tol
        primal_objective: sum_k ||v_k||^2 + tr Q
        dual_objective: sum_k beta_k sigma_k^2
        duality_gap_rel: |primal - dual| / max(1, dual)
        q_min_eig: Smallest eigenvalue of Q
    """
    residuals: Dict[str, float]
    tol: float
    passed: bool
    failing: List[str] = Field(default_factory=list)
    primal_objective: float
    dual_objective: float
    duality_gap_rel: float
    q_min_eig: float


class SolveReport(BaseModel):
    """
    Auditable record of one run of the full pipeline.
    """
    status: SolveStatus
    M: int
    K: int
    dual_iters: int = 0
    primal_iters: int = 0
    dual_objective: Optional[float] = None
    primal_objective: Optional[float] = None
    duality_gap_rel: Optional[float] = None
    kkt_residuals: Dict[str, float] = Field(default_factory=dict)
    certified: bool = False
    failing: List[str] = Field(default_factory=list)
    rate_bound: Optional[float] = None
    dual_trace: List[float] = Field(default_factory=list)
    dual_steps: List[float] = Field(default_factory=list)
    primal_trace: List[float] = Field(default_factory=list)
    primal_steps: List[float] = Field(default_factory=list)
    t_dual_s: float = 0.0
    t_primal_s: float = 0.0
    t_certify_s: float = 0.0
    wall_time: float = 0.0
