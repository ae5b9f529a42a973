"""
Domain value objects shared by every solver module.

Conventions:
- ``channels`` has shape (K, M); row k is the channel vector h_k.
- Beamformers and directions have shape (K, M); row k is v_k.
- Matrices are M x M complex; ``lambdas`` stacks the M dual matrices as (M, M, M).
- Powers are in normalized units (noise power sigma_k^2 of the instance).
- Relay M is compressed first and relay 1 last; relay m is index m-1 here.

All objects are frozen and hold read-only arrays, so they can be shared
across workers.
"""

from enum import Enum
from typing import Any, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from app.models.base import frozen_array


class SolveStatus(str, Enum):
    """Outcome of a solve."""
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    ITERATION_LIMIT = "IterationLimit"


class ArrayModel(BaseModel):
    """Base for frozen models carrying numpy arrays."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class ProblemInstance(ArrayModel):
    """
    Immutable input of the power-minimization problem.

    Attributes:
        channels: (K, M) complex channel matrix, row k is h_k
        noise_powers: (K,) positive noise powers sigma_k^2
        sinr_targets: (K,) positive SINR targets, linear scale
        fronthaul_caps: (M,) positive fronthaul capacities in bits per channel use
    """
    channels: np.ndarray
    noise_powers: np.ndarray
    sinr_targets: np.ndarray
    fronthaul_caps: np.ndarray

    @field_validator("channels", mode="before")
    @classmethod
    def _complex_matrix(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v, complex)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("channels must be a non-empty K x M matrix")
        return arr

    @field_validator("noise_powers", "sinr_targets", "fronthaul_caps", mode="before")
    @classmethod
    def _positive_vector(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v, float)
        if arr.ndim != 1:
            raise ValueError("must be a one-dimensional vector")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise ValueError("all entries must be finite and strictly positive")
        return arr

    @model_validator(mode="after")
    def _check_dimensions(self) -> "ProblemInstance":
        K, M = self.channels.shape
        if self.noise_powers.shape != (K,):
            raise ValueError(f"noise_powers must have {K} entries, got {self.noise_powers.shape[0]}")
        if self.sinr_targets.shape != (K,):
            raise ValueError(f"sinr_targets must have {K} entries, got {self.sinr_targets.shape[0]}")
        if self.fronthaul_caps.shape != (M,):
            raise ValueError(f"fronthaul_caps must have {M} entries, got {self.fronthaul_caps.shape[0]}")
        if not np.all(np.isfinite(self.channels)):
            raise ValueError("channels must be finite")
        if np.any(np.linalg.norm(self.channels, axis=1) == 0):
            raise ValueError("channel vectors must be nonzero")
        return self

    @property
    def M(self) -> int:
        return self.channels.shape[1]

    @property
    def K(self) -> int:
        return self.channels.shape[0]

    @property
    def eta(self) -> np.ndarray:
        """2^{C_m} per relay."""
        return np.exp2(self.fronthaul_caps)

    @property
    def gamma_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.sinr_targets)

    def with_targets(self, gamma_db=None, cbar=None) -> "ProblemInstance":
        """
        Derive an instance with new SINR targets and/or capacities, same channels.

        Args:
            gamma_db: Scalar or (K,) SINR targets in dB
            cbar: Scalar or (M,) fronthaul capacities
        """
        sinr = self.sinr_targets
        caps = self.fronthaul_caps
        if gamma_db is not None:
            sinr = np.broadcast_to(10.0 ** (np.asarray(gamma_db, dtype=float) / 10.0), (self.K,))
        if cbar is not None:
            caps = np.broadcast_to(np.asarray(cbar, dtype=float), (self.M,))
        return ProblemInstance(
            channels=self.channels,
            noise_powers=self.noise_powers,
            sinr_targets=sinr,
            fronthaul_caps=caps,
        )


class DualSolution(ArrayModel):
    """
    Dual certificate (beta, {Lambda_m}).

    Attributes:
        beta: (K,) nonnegative SINR multipliers
        lambdas: (M, M, M) stack of Hermitian rank-one matrices Lambda_m
        lambda_vectors: (M, M) rank-one factors, Lambda_m = lambda_m lambda_m^H,
            zero before index m and real positive at index m
    """
    beta: np.ndarray
    lambdas: np.ndarray
    lambda_vectors: np.ndarray

    @field_validator("beta", mode="before")
    @classmethod
    def _nonnegative(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v, float)
        if arr.ndim != 1 or np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("beta must be a finite nonnegative vector")
        return arr

    @field_validator("lambdas", "lambda_vectors", mode="before")
    @classmethod
    def _complex(cls, v: Any) -> np.ndarray:
        return frozen_array(v, complex)

    @model_validator(mode="after")
    def _check_shapes(self) -> "DualSolution":
        M = self.lambda_vectors.shape[0]
        if self.lambda_vectors.shape != (M, M):
            raise ValueError("lambda_vectors must be M x M")
        if self.lambdas.shape != (M, M, M):
            raise ValueError("lambdas must stack M matrices of size M x M")
        return self

    @property
    def pivots(self) -> np.ndarray:
        """Lambda_m^{(m,m)} for every m."""
        M = self.lambdas.shape[0]
        return np.real(self.lambdas[np.arange(M), np.arange(M), np.arange(M)])

    def objective(self, inst: ProblemInstance) -> float:
        """Dual objective sum_k beta_k sigma_k^2."""
        return float(self.beta @ inst.noise_powers)


class PrimalSolution(ArrayModel):
    """
    Rank-one primal solution ({v_k}, Q).

    The PSD invariant of Q is certified by the verifier rather than enforced here,
    so externally supplied (possibly corrupted) solutions can still be audited.

    Attributes:
        beamformers: (K, M) beamformers v_k = sqrt(p_k) * directions[k]
        Q: (M, M) Hermitian compression-noise covariance
        powers: (K,) nonnegative per-user powers p_k
        directions: (K, M) unit-norm beam directions
    """
    beamformers: np.ndarray
    Q: np.ndarray
    powers: np.ndarray
    directions: np.ndarray

    @field_validator("beamformers", "Q", "directions", mode="before")
    @classmethod
    def _complex(cls, v: Any) -> np.ndarray:
        return frozen_array(v, complex)

    @field_validator("powers", mode="before")
    @classmethod
    def _powers(cls, v: Any) -> np.ndarray:
        arr = frozen_array(v, float)
        if arr.ndim != 1 or np.any(arr < 0):
            raise ValueError("powers must be a nonnegative vector")
        return arr

    @model_validator(mode="after")
    def _check_shapes(self) -> "PrimalSolution":
        K = self.powers.shape[0]
        if self.beamformers.ndim != 2 or self.beamformers.shape[0] != K:
            raise ValueError("beamformers must be K x M")
        M = self.beamformers.shape[1]
        if self.directions.shape != (K, M):
            raise ValueError("directions must be K x M")
        if self.Q.shape != (M, M):
            raise ValueError("Q must be M x M")
        return self

    @classmethod
    def from_beamformers(cls, beamformers, Q) -> "PrimalSolution":
        """Build a solution from raw beamformers, splitting powers and directions."""
        v = np.asarray(beamformers, dtype=complex)
        norms = np.linalg.norm(v, axis=1)
        directions = np.zeros_like(v)
        nz = norms > 0
        directions[nz] = v[nz] / norms[nz, None]
        directions[~nz, 0] = 1.0
        return cls(beamformers=v, Q=Q, powers=norms ** 2, directions=directions)


TraceRow = Tuple[int, float, float]


class DualRun(ArrayModel):
    """
    Result of the dual fixed point iteration.

    Attributes:
        status: Optimal on convergence, Infeasible on cap breach, else IterationLimit
        beta: Last iterate
        solution: (beta, {Lambda_m(beta)}) when status is Optimal
        iterations: Number of map evaluations
        trace: (iteration, dual_objective, step_norm) per iteration
        iterates: (iterations, K) history when requested
    """
    status: SolveStatus
    beta: np.ndarray
    solution: Optional[DualSolution] = None
    iterations: int = 0
    trace: List[TraceRow] = []
    iterates: Optional[np.ndarray] = None

    @field_validator("beta", mode="before")
    @classmethod
    def _beta(cls, v: Any) -> np.ndarray:
        return frozen_array(v, float)

    @property
    def objectives(self) -> List[float]:
        return [row[1] for row in self.trace]

    @property
    def steps(self) -> List[float]:
        return [row[2] for row in self.trace]


class PrimalRun(ArrayModel):
    """
    Result of the primal fixed point iteration (or the direct linear solve).

    Attributes:
        status: Optimal on convergence, else IterationLimit
        powers: Last power iterate p
        Q: Q(p) of the last iterate
        iterations: Number of map evaluations (0 for the direct solve)
        trace: (iteration, primal_objective, step_norm) per iteration
        iterates: (iterations, K) history when requested
    """
    status: SolveStatus
    powers: np.ndarray
    Q: np.ndarray
    iterations: int = 0
    trace: List[TraceRow] = []
    iterates: Optional[np.ndarray] = None

    @field_validator("powers", mode="before")
    @classmethod
    def _powers(cls, v: Any) -> np.ndarray:
        return frozen_array(v, float)

    @field_validator("Q", mode="before")
    @classmethod
    def _q(cls, v: Any) -> np.ndarray:
        return frozen_array(v, complex)

    @property
    def objectives(self) -> List[float]:
        return [row[1] for row in self.trace]

    @property
    def steps(self) -> List[float]:
        return [row[2] for row in self.trace]
