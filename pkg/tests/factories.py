"""
Instance builders shared by the test modules.
"""

import numpy as np

from app.models.problem import ProblemInstance
from app.schemas.config import DualIterConfig
from app.services.dual_solver import dual_fpi
from app.services.primal_solver import beam_directions


def scalar_instance(gamma: float = 1.0, cbar: float = 2.0) -> ProblemInstance:
    """M = K = 1, h = 1, sigma^2 = 1."""
    return ProblemInstance(
        channels=[[1.0]],
        noise_powers=[1.0],
        sinr_targets=[gamma],
        fronthaul_caps=[cbar],
    )


def random_instance(seed: int, M: int = 3, K: int = 2, gamma_db: float = 0.0, cbar=None) -> ProblemInstance:
    """i.i.d. CN(0, 1) channels; feasible for K <= M at moderate targets."""
    rng = np.random.default_rng(seed)
    channels = (rng.standard_normal((K, M)) + 1j * rng.standard_normal((K, M))) / np.sqrt(2.0)
    caps = rng.uniform(2.0, 4.0, M) if cbar is None else np.full(M, cbar)
    return ProblemInstance(
        channels=channels,
        noise_powers=rng.uniform(0.5, 2.0, K),
        sinr_targets=np.full(K, 10.0 ** (gamma_db / 10.0)),
        fronthaul_caps=caps,
    )


def converged(inst: ProblemInstance, tol: float = 1e-12):
    """(dual solution, directions) of a feasible instance."""
    run = dual_fpi(inst, DualIterConfig(tol=tol))
    assert run.status.value == "Optimal"
    return run.solution, beam_directions(inst, run.solution)
