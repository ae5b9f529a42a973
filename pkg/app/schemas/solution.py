"""
Pydantic schema of the solution JSON file.

The primal part mirrors PrimalSolution; the optional dual part mirrors
DualSolution. Complex entries use the [re, im] convention.
"""

from typing import List, Optional

from pydantic import Field

from app.schemas.base import ComplexMatrix, WireSchema


class DualPart(WireSchema):
    beta: List[float]
    lambda_vectors: ComplexMatrix
    lambdas: List[ComplexMatrix]


class SolutionFile(WireSchema):
    """Solution as stored on disk."""
    M: int = Field(..., ge=1)
    K: int = Field(..., ge=1)
    beamformers: ComplexMatrix
    Q: ComplexMatrix
    powers: List[float]
    directions: ComplexMatrix
    dual: Optional[DualPart] = None
    total_power: Optional[float] = None


