"""
Problem-model services: instance and solution (de)serialization and the
objective shared by every module.
"""

import logging
import math
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from app.core.exceptions import InstanceParseError, raise_dimension_mismatch, raise_parse_error
from app.models.problem import DualSolution, PrimalSolution, ProblemInstance
from app.schemas.base import from_pairs, to_pairs
from app.schemas.instance import InstanceFile
from app.schemas.solution import DualPart, SolutionFile

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _parse_error(exc: ValidationError) -> InstanceParseError:
    """Condense a pydantic ValidationError into its first, field-tagged message."""
    error = exc.errors()[0]
    field = ".".join(str(p) for p in error["loc"]) or None
    return InstanceParseError(error["msg"], field=field)


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """
    dB value whose conversion back through :func:`db_to_linear` reproduces
    ``value`` exactly whenever such a float exists.
    """
    guess = 10.0 * math.log10(value)
    if db_to_linear(guess) == value:
        return guess
    # db_to_linear is nondecreasing; bisect over the float line around the guess
    width = 1e-12 * max(1.0, abs(guess))
    lo, hi = guess - width, guess + width
    if not (db_to_linear(lo) <= value <= db_to_linear(hi)):
        return guess
    while True:
        mid = lo + (hi - lo) / 2.0
        if mid in (lo, hi):
            break
        if db_to_linear(mid) < value:
            lo = mid
        else:
            hi = mid
    for cand in (lo, hi):
        if db_to_linear(cand) == value:
            return cand
    return guess


def instance_from_file(data: InstanceFile) -> ProblemInstance:
    """
    Convert the on-disk schema into a validated ProblemInstance.

    Raises:
        InstanceParseError: if a parameter is non-positive or a channel is zero
    """
    try:
        return ProblemInstance(
            channels=from_pairs(data.channels),
            noise_powers=data.sigma2,
            sinr_targets=[db_to_linear(g) for g in data.gamma_db],
            fronthaul_caps=data.cbar,
        )
    except ValidationError as exc:
        raise _parse_error(exc) from exc


def instance_to_file(inst: ProblemInstance) -> InstanceFile:
    return InstanceFile(
        M=inst.M,
        K=inst.K,
        channels=to_pairs(inst.channels),
        sigma2=inst.noise_powers.tolist(),
        gamma_db=[linear_to_db(float(g)) for g in inst.sinr_targets],
        cbar=inst.fronthaul_caps.tolist(),
    )


def load_instance(path: PathLike) -> ProblemInstance:
    """
    Load and validate an instance JSON file.

    Args:
        path: Path to the instance file

    Returns:
        Validated ProblemInstance with linear SINR targets

    Raises:
        InstanceParseError: on unreadable JSON, schema violation, dimension
            mismatch or non-positive parameter
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = InstanceFile.model_validate_json(text)
    except ValidationError as exc:
        raise _parse_error(exc) from exc
    inst = instance_from_file(data)
    logger.debug("loaded instance %s (M=%d, K=%d)", path, inst.M, inst.K)
    return inst


def save_instance(inst: ProblemInstance, path: PathLike) -> Path:
    """
    Write an instance JSON file (SINR targets in dB).
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(instance_to_file(inst).model_dump_json(indent=2), encoding="utf-8")
    return path


def total_power(sol: PrimalSolution) -> float:
    """
    Total transmit power sum_k ||v_k||^2 + tr(Q).
    """
    return float(np.sum(np.abs(sol.beamformers) ** 2) + np.real(np.trace(sol.Q)))


def solution_to_file(primal: PrimalSolution, dual: Optional[DualSolution] = None) -> SolutionFile:
    K, M = primal.beamformers.shape
    dual_part = None
    if dual is not None:
        dual_part = DualPart(
            beta=dual.beta.tolist(),
            lambda_vectors=to_pairs(dual.lambda_vectors),
            lambdas=to_pairs(dual.lambdas),
        )
    return SolutionFile(
        M=M,
        K=K,
        beamformers=to_pairs(primal.beamformers),
        Q=to_pairs(primal.Q),
        powers=primal.powers.tolist(),
        directions=to_pairs(primal.directions),
        dual=dual_part,
        total_power=total_power(primal),
    )


def solution_from_file(data: SolutionFile) -> Tuple[PrimalSolution, Optional[DualSolution]]:
    """
    Raises:
        InstanceParseError: if the arrays do not have consistent shapes
    """
    try:
        primal = PrimalSolution(
            beamformers=from_pairs(data.beamformers),
            Q=from_pairs(data.Q),
            powers=data.powers,
            directions=from_pairs(data.directions),
        )
        dual = None
        if data.dual is not None:
            dual = DualSolution(
                beta=data.dual.beta,
                lambda_vectors=from_pairs(data.dual.lambda_vectors),
                lambdas=from_pairs(data.dual.lambdas),
            )
    except (ValidationError, ValueError) as exc:
        raise InstanceParseError(f"inconsistent solution arrays: {exc}") from exc
    if primal.beamformers.shape != (data.K, data.M):
        raise_parse_error(f"expected {data.K} x {data.M} beamformers", field="beamformers")
    if dual is not None and dual.beta.size != data.K:
        raise_dimension_mismatch("dual.beta", data.K, dual.beta.size)
    return primal, dual


def load_solution(path: PathLike) -> Tuple[PrimalSolution, Optional[DualSolution]]:
    """
    Load a solution JSON file.

    Returns:
        (primal, dual) where dual is None if the file carries no certificate

    Raises:
        InstanceParseError: on unreadable or malformed files
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = SolutionFile.model_validate_json(text)
    except ValidationError as exc:
        raise _parse_error(exc) from exc
    return solution_from_file(data)


def save_solution(primal: PrimalSolution, path: PathLike, dual: Optional[DualSolution] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(solution_to_file(primal, dual).model_dump_json(indent=2), encoding="utf-8")
    return path
