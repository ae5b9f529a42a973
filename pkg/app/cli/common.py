"""
Flags, config merging and exit-code mapping shared by every subcommand.

Precedence of values: command-line flag, then config file, then settings.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Callable, Dict, Optional, TypeVar

import numpy as np
from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.exceptions import ConfigError, FPIError, InstanceParseError
from app.models.problem import SolveStatus
from app.models.scenario import Scenario
from app.schemas.config import ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
EXIT_ITERATION_LIMIT = 3
EXIT_CERTIFICATION = 4

STATUS_EXIT_CODES = {
    SolveStatus.OPTIMAL: EXIT_OK,
    SolveStatus.INFEASIBLE: EXIT_INFEASIBLE,
    SolveStatus.ITERATION_LIMIT: EXIT_ITERATION_LIMIT,
}

ModelT = TypeVar("ModelT", bound=BaseModel)


def common_parser() -> argparse.ArgumentParser:
    """Parent parser with the flags every subcommand accepts."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", help="experiment config JSON (ExperimentConfig)")
    parser.add_argument("--seed", type=int, help="scenario seed / first realization seed")
    parser.add_argument("--tol-dual", type=float, help="dual relative tolerance")
    parser.add_argument("--tol-primal", type=float, help="primal relative tolerance")
    parser.add_argument("--max-iter", type=int, help="iteration budget of each fixed point iteration")
    parser.add_argument("--power-cap", type=float, help="dual objective above which the instance is infeasible")
    parser.add_argument("--out", help="output directory (or file for gen --count 1)")
    parser.add_argument("--workers", type=int, help="worker processes for realizations")
    parser.add_argument("--fast", action="store_true", help="shared-factorization dual map")
    parser.add_argument("--direct", action="store_true", help="solve the power equation directly")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    return parser


def log_level(args: argparse.Namespace) -> str:
    if getattr(args, "verbose", False):
        return "DEBUG"
    if getattr(args, "quiet", False):
        return "WARNING"
    return settings.LOG_LEVEL


def merge(model: ModelT, updates: Dict[str, Any]) -> ModelT:
    """
    Re-validate ``model`` with ``updates`` applied (None values are ignored).

    Raises:
        ConfigError: if the merged values violate a constraint
    """
    data = model.model_dump()
    data.update({k: v for k, v in updates.items() if v is not None})
    try:
        return type(model).model_validate(data)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def load_experiment_config(path: Optional[str]) -> ExperimentConfig:
    """
    Read an ExperimentConfig JSON file; no path gives the defaults.

    Raises:
        InstanceParseError: if the file cannot be read
        ConfigError: if it does not validate
    """
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InstanceParseError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return ExperimentConfig.model_validate_json(text)
    except ValidationError as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc


def apply_flags(cfg: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Override config values with the flags that were given."""
    dual = merge(cfg.dual, {
        "tol": args.tol_dual,
        "max_iter": args.max_iter,
        "power_cap": args.power_cap,
        "fast": True if args.fast else None,
    })
    primal = merge(cfg.primal, {"tol": args.tol_primal, "max_iter": args.max_iter})
    scenario = merge(cfg.scenario, {"seed": args.seed})
    return merge(cfg, {
        "dual": dual.model_dump(),
        "primal": primal.model_dump(),
        "scenario": scenario.model_dump(),
        "workers": args.workers,
        "output_dir": args.out,
    })


def experiment_from_args(args: argparse.Namespace) -> ExperimentConfig:
    return apply_flags(load_experiment_config(args.config), args)


def scenario_from_args(args: argparse.Namespace) -> Scenario:
    return experiment_from_args(args).scenario


def run_guarded(handler: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    """
    Run a subcommand handler, mapping package, I/O and numerical errors to exit code 1.
    """
    try:
        return handler(args)
    except FPIError as exc:
        logger.error("%s", exc)
        return EXIT_ERROR
    except OSError as exc:
        logger.error("I/O error: %s", exc)
        return EXIT_ERROR
    except (ValueError, np.linalg.LinAlgError) as exc:
        logger.error("numerical error: %s", exc)
        return EXIT_ERROR
