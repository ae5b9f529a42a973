"""
Pydantic schemas for iteration and experiment configuration.

Defaults are taken from the global settings at construction time.
"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.config import settings
from app.models.scenario import Scenario


class DualIterConfig(BaseModel):
    """
    Dual fixed point iteration controls.

    Attributes:
        tol: Relative componentwise convergence tolerance
        max_iter: Iteration budget
        power_cap: Dual objective above which the instance is declared infeasible
        beta0: Initial multipliers (None means the zero vector)
        fast: Share one factorization across users when evaluating I(beta)
        keep_iterates: Record every beta iterate (needed for rate diagnostics)
    """
    model_config = ConfigDict(frozen=True)

    tol: float = Field(default_factory=lambda: settings.DUAL_TOL, gt=0)
    max_iter: int = Field(default_factory=lambda: settings.MAX_ITER, ge=1)
    power_cap: float = Field(default_factory=lambda: settings.POWER_CAP, gt=0)
    beta0: Optional[List[float]] = None
    fast: bool = False
    keep_iterates: bool = False

    @field_validator("beta0")
    @classmethod
    def _nonnegative(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and any(b < 0 for b in v):
            raise ValueError("beta0 must be nonnegative")
        return v


class PrimalIterConfig(BaseModel):
    """
    Primal fixed point iteration controls.

    Attributes:
        tol: Relative componentwise convergence tolerance
        max_iter: Iteration budget
        p0: Initial powers (None means the zero vector)
        keep_iterates: Record every p iterate
    """
    model_config = ConfigDict(frozen=True)

    tol: float = Field(default_factory=lambda: settings.PRIMAL_TOL, gt=0)
    max_iter: int = Field(default_factory=lambda: settings.MAX_ITER, ge=1)
    p0: Optional[List[float]] = None
    keep_iterates: bool = False

    @field_validator("p0")
    @classmethod
    def _nonnegative(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and any(p < 0 for p in v):
            raise ValueError("p0 must be nonnegative")
        return v


class ExperimentConfig(BaseModel):
    """
    Sweep / bench / rate-table configuration, stored as a single JSON file.

    Attributes:
        name: Experiment tag used for output files and results-store rows
        scenario: Base scenario; its seed is the first realization seed
        gamma_db_sweep: SINR targets to sweep [dB]
        cbar_sweep: Fronthaul capacities to sweep
        relay_sweep: Optional active-relay counts to sweep (None keeps the scenario's)
        user_sweep: Optional user counts to sweep (None keeps the scenario's)
        num_realizations: Seeds per grid point (seed, seed+1, ...)
        dual, primal: Iteration controls
        certify_tol: Certification tolerance
        output_dir: Directory for CSV/JSON artifacts
        workers: Process count for realizations
        record_timings: Write wall times (False writes zeros for bit-identical output)
        record_runs: Persist per-run rows to the results store
    """
    name: str = "experiment"
    scenario: Scenario = Field(default_factory=Scenario)
    gamma_db_sweep: List[float] = Field(default_factory=lambda: [4.0], min_length=1)
    cbar_sweep: List[float] = Field(default_factory=lambda: [3.0], min_length=1)
    relay_sweep: Optional[List[int]] = Field(default=None, min_length=1)
    user_sweep: Optional[List[int]] = Field(default=None, min_length=1)
    num_realizations: int = Field(default=200, ge=1)
    dual: DualIterConfig = Field(default_factory=DualIterConfig)
    primal: PrimalIterConfig = Field(default_factory=PrimalIterConfig)
    certify_tol: float = Field(default_factory=lambda: settings.CERTIFY_TOL, gt=0)
    output_dir: str = Field(default_factory=lambda: settings.OUTPUT_DIR)
    workers: int = Field(default_factory=lambda: settings.WORKERS, ge=1)
    record_timings: bool = True
    record_runs: bool = Field(default_factory=lambda: settings.RECORD_RUNS)

    @field_validator("cbar_sweep")
    @classmethod
    def _positive_caps(cls, v: List[float]) -> List[float]:
        if any(c <= 0 for c in v):
            raise ValueError("fronthaul capacities must be positive")
        return v
