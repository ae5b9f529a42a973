"""
Command-line subcommands. Each module exposes ``register(subparsers, parent)``.
"""

from app.cli import bench, gen, rate, solve, sweep, verify

COMMANDS = [solve, sweep, verify, bench, gen, rate]

__all__ = ["COMMANDS"]
