"""
Pydantic schemas for files, configs and reports.
"""

from app.schemas.config import DualIterConfig, ExperimentConfig, PrimalIterConfig
from app.schemas.instance import InstanceFile
from app.schemas.report import CertificationReport, SolveReport
from app.schemas.solution import DualPart, SolutionFile

__all__ = [
    "CertificationReport",
    "DualIterConfig",
    "DualPart",
    "ExperimentConfig",
    "InstanceFile",
    "PrimalIterConfig",
    "SolutionFile",
    "SolveReport",
]
