"""
Command-line entry point of the fronthaul-aware beamforming solver.

Usage:
    python main.py solve instance.json --out results/
    python main.py sweep --config sweep.json --workers 4
    python main.py verify instance.json results/instance_solution.json
    python main.py gen --seed 3 --out instance.json
"""

import argparse
import sys
from typing import Optional, Sequence

from app.cli import COMMANDS
from app.cli.common import EXIT_ERROR, EXIT_OK, common_parser, log_level
from app.core.config import settings
from app.core.logging import configure_logging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpi",
        description="Joint beamforming and fronthaul compression power minimization by fixed point iteration.",
    )
    parser.add_argument("--version", action="version", version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    parent = common_parser()
    for command in COMMANDS:
        command.register(subparsers, parent)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments, configure logging and dispatch to the subcommand.

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors share exit code 1 with other input errors
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    configure_logging(log_level(args))
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
