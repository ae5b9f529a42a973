"""
``sweep``: averaged results over a (M, K, gamma, cbar) grid of seeded realizations.
"""

import argparse
import asyncio

from app.cli.common import EXIT_OK, experiment_from_args, run_guarded
from app.services.experiments import run_sweep


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("sweep", parents=[parent], help="parameter sweep from a config file")
    parser.set_defaults(func=lambda args: run_guarded(handle, args))


def handle(args: argparse.Namespace) -> int:
    cfg = experiment_from_args(args)
    _, summary = asyncio.run(run_sweep(cfg, direct=args.direct))
    print(summary.to_string(index=False))
    return EXIT_OK
