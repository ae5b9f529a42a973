"""
``verify``: certify an externally supplied solution against its instance.
"""

import argparse
import asyncio
import logging
from pathlib import Path

from app.cli.common import EXIT_CERTIFICATION, EXIT_OK, experiment_from_args, run_guarded
from app.models.problem import SolveStatus
from app.services.artifacts import write_json
from app.services.dual_solver import dual_fpi
from app.services.problem import load_instance, load_solution
from app.services.verifier import certify

logger = logging.getLogger(__name__)


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("verify", parents=[parent], help="certify a solution file")
    parser.add_argument("instance", help="instance JSON")
    parser.add_argument("solution", help="solution JSON")
    parser.set_defaults(func=lambda args: run_guarded(handle, args))


def handle(args: argparse.Namespace) -> int:
    """
    Exit codes: 0 when every residual passes, 4 otherwise, 1 on I/O or parse errors.

    A solution file without a dual part is certified against the dual
    certificate recomputed by the dual iteration.
    """
    cfg = experiment_from_args(args)
    inst = load_instance(args.instance)
    primal, dual = load_solution(args.solution)
    if primal.beamformers.shape != (inst.K, inst.M):
        logger.error("solution is %d x %d, instance is %d x %d", *primal.beamformers.shape, inst.K, inst.M)
        return EXIT_CERTIFICATION
    if dual is not None and (dual.beta.size, dual.lambda_vectors.shape[0]) != (inst.K, inst.M):
        logger.error(
            "dual certificate is for K=%d, M=%d, instance has K=%d, M=%d",
            dual.beta.size, dual.lambda_vectors.shape[0], inst.K, inst.M,
        )
        return EXIT_CERTIFICATION
    if dual is None:
        run = dual_fpi(inst, cfg.dual)
        if run.status is not SolveStatus.OPTIMAL:
            logger.error("no dual certificate available: dual iteration ended %s", run.status.value)
            return EXIT_CERTIFICATION
        dual = run.solution

    report = certify(inst, primal, dual, cfg.certify_tol)
    out = Path(cfg.output_dir) / f"{Path(args.solution).stem}_certificate.json"
    asyncio.run(write_json(out, report))
    print(report.model_dump_json(indent=2))
    if not report.passed:
        logger.error("certification failed: %s", ", ".join(report.failing))
        return EXIT_CERTIFICATION
    return EXIT_OK
