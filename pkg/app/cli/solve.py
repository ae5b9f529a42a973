"""
``solve``: run the full pipeline on one instance and write its artifacts.
"""

import argparse
import asyncio
import json
import logging
from pathlib import Path

from app.cli.common import STATUS_EXIT_CODES, experiment_from_args, run_guarded
from app.services.artifacts import write_solve_artifacts
from app.services.pipeline import solve_instance
from app.services.problem import load_instance
from app.services.scenario_gen import generate_instance

logger = logging.getLogger(__name__)


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser(
        "solve",
        parents=[parent],
        help="solve one instance (file, or generated from the scenario)",
    )
    parser.add_argument("instance", nargs="?", help="instance JSON; omitted means generate from --config/--seed")
    parser.set_defaults(func=lambda args: run_guarded(handle, args))


def handle(args: argparse.Namespace) -> int:
    """
    Exit codes: 0 Optimal, 2 Infeasible, 3 IterationLimit, 1 on errors.
    """
    cfg = experiment_from_args(args)
    if args.instance:
        inst = load_instance(args.instance)
        stem = Path(args.instance).stem
    else:
        inst = generate_instance(cfg.scenario)
        stem = f"scenario_{cfg.scenario.seed}"
    outcome = solve_instance(inst, cfg.dual, cfg.primal, cfg.certify_tol, direct=args.direct)
    asyncio.run(write_solve_artifacts(cfg.output_dir, outcome, stem))

    report = outcome.report
    print(json.dumps({
        "status": report.status.value,
        "total_power": report.primal_objective,
        "dual_objective": report.dual_objective,
        "duality_gap_rel": report.duality_gap_rel,
        "dual_iters": report.dual_iters,
        "primal_iters": report.primal_iters,
        "certified": report.certified,
    }))
    return STATUS_EXIT_CODES[report.status]
