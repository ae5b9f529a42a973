"""
Models package - domain value objects and results-store models.

Import SolveRun here to ensure it is discovered by SQLAlchemy
when creating tables via Base.metadata.create_all()
"""

from app.models.problem import (
    DualRun,
    DualSolution,
    PrimalRun,
    PrimalSolution,
    ProblemInstance,
    SolveStatus,
)
from app.models.run import SolveRun
from app.models.scenario import Scenario

__all__ = [
    "DualRun",
    "DualSolution",
    "PrimalRun",
    "PrimalSolution",
    "ProblemInstance",
    "Scenario",
    "SolveRun",
    "SolveStatus",
]
