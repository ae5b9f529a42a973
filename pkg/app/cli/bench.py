"""
``bench``: per-phase wall times on fixed seeds.
"""

import argparse
import asyncio

from app.cli.common import EXIT_OK, experiment_from_args, run_guarded
from app.services.experiments import run_bench


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("bench", parents=[parent], help="time the solver phases")
    parser.set_defaults(func=lambda args: run_guarded(handle, args))


def handle(args: argparse.Namespace) -> int:
    cfg = experiment_from_args(args)
    bench = asyncio.run(run_bench(cfg, direct=args.direct))
    summary = bench.groupby("status")[["t_dual_s", "t_primal_s", "t_certify_s", "t_total_s"]].mean()
    print(summary.to_string())
    return EXIT_OK
