"""
Base Pydantic schemas and the complex-number wire convention.

Complex numbers travel as [re, im] pairs; matrices are row-major nested lists.
"""

from typing import Any, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

ComplexPair = Tuple[float, float]
ComplexVector = List[ComplexPair]
ComplexMatrix = List[ComplexVector]


class WireSchema(BaseModel):
    """
    Base for file schemas: unknown keys are rejected so typos surface as errors.
    """
    model_config = ConfigDict(extra="forbid")


def to_pairs(arr: np.ndarray) -> Any:
    """Convert a complex array of any rank into nested [re, im] lists."""
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def from_pairs(pairs: Any) -> np.ndarray:
    """Inverse of :func:`to_pairs`."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]
