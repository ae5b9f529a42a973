"""
Network geometry and propagation parameters that generate problem instances.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Scenario(BaseModel):
    """
    Wrapped-around hexagonal deployment of single-antenna relays and users.

    Attributes:
        num_relays: Size of the hexagonal layout (7 or 19)
        num_users: Number of single-antenna users K
        inter_site_distance: Distance between neighbouring relays [m]
        relay_height: Relay antenna height [m]
        pathloss_a: Pathloss constant [dB]
        pathloss_b: Pathloss slope [dB/decade of distance in km]
        noise_psd_dbm_hz: Noise power spectral density [dBm/Hz]
        bandwidth_hz: System bandwidth [Hz]
        gamma_db: SINR target of every user [dB]
        cbar: Fronthaul capacity of every relay [bits per channel use]
        active_relays: Keep only the first M relays of the layout ordering
        seed: Seed of the channel and placement draws
    """
    model_config = ConfigDict(frozen=True)

    num_relays: int = Field(default=7, description="7 or 19")
    num_users: int = Field(default=8, ge=1)
    inter_site_distance: float = Field(default=150.0, gt=0)
    relay_height: float = Field(default=30.0, ge=0)
    pathloss_a: float = 140.7
    pathloss_b: float = 36.7
    noise_psd_dbm_hz: float = -169.0
    bandwidth_hz: float = Field(default=2e7, gt=0)
    gamma_db: float = 4.0
    cbar: float = Field(default=3.0, gt=0)
    active_relays: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)

    @model_validator(mode="after")
    def _check_active(self) -> "Scenario":
        if self.active_relays is not None and self.active_relays > self.num_relays:
            raise ValueError("active_relays cannot exceed num_relays")
        return self

    @property
    def M(self) -> int:
        return self.active_relays or self.num_relays
