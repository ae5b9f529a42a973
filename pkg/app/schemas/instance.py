"""
Pydantic schema of the instance JSON file.

    { "M": int, "K": int, "channels": [[[re, im] x M] x K],
      "sigma2": [K reals], "gamma_db": [K reals], "cbar": [M reals] }
"""

from typing import List

from pydantic import Field, model_validator

from app.schemas.base import ComplexMatrix, WireSchema


class InstanceFile(WireSchema):
    """Instance as stored on disk; SINR targets are in dB."""
    M: int = Field(..., ge=1, description="Relay count")
    K: int = Field(..., ge=1, description="User count")
    channels: ComplexMatrix = Field(..., description="K rows of M [re, im] pairs")
    sigma2: List[float] = Field(..., description="Noise powers")
    gamma_db: List[float] = Field(..., description="SINR targets in dB")
    cbar: List[float] = Field(..., description="Fronthaul capacities")

    @model_validator(mode="after")
    def _check_dimensions(self) -> "InstanceFile":
        if len(self.channels) != self.K:
            raise ValueError(f"dimension mismatch in channels: expected {self.K} rows, got {len(self.channels)}")
        for k, row in enumerate(self.channels):
            if len(row) != self.M:
                raise ValueError(f"dimension mismatch in channels[{k}]: expected {self.M} entries, got {len(row)}")
        for name, expected in (("sigma2", self.K), ("gamma_db", self.K), ("cbar", self.M)):
            actual = len(getattr(self, name))
            if actual != expected:
                raise ValueError(f"dimension mismatch in {name}: expected {expected} entries, got {actual}")
        return self
