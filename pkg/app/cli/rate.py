"""
``rate``: theoretical versus practical dual convergence rate over gamma_db_sweep.
"""

import argparse
import asyncio

from app.cli.common import EXIT_OK, experiment_from_args, run_guarded
from app.services.experiments import run_rate


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("rate", parents=[parent], help="convergence-rate table")
    parser.set_defaults(func=lambda args: run_guarded(handle, args))


def handle(args: argparse.Namespace) -> int:
    cfg = experiment_from_args(args)
    rates = asyncio.run(run_rate(cfg))
    print(rates.to_string(index=False))
    return EXIT_OK
