"""
``gen``: write generated instances in the instance JSON format.
"""

import argparse
import logging
from pathlib import Path

from app.cli.common import EXIT_OK, experiment_from_args, merge, run_guarded
from app.services.problem import save_instance
from app.services.scenario_gen import generate_instance

logger = logging.getLogger(__name__)


def register(subparsers, parent: argparse.ArgumentParser) -> None:
    parser = subparsers.add_parser("gen", parents=[parent], help="emit instances from a scenario")
    parser.add_argument("--count", type=int, default=1, help="number of consecutive seeds")
    parser.set_defaults(func=lambda args: run_guarded(handle, args))


def handle(args: argparse.Namespace) -> int:
    """
    With ``--count 1`` and an ``--out`` ending in .json the instance is written
    to that file; otherwise files ``instance_<seed>.json`` go to the output directory.
    """
    cfg = experiment_from_args(args)
    scenario = cfg.scenario
    out = Path(cfg.output_dir)
    if args.count == 1 and out.suffix == ".json":
        targets = [(scenario, out)]
    else:
        targets = [
            (merge(scenario, {"seed": scenario.seed + r}), out / f"instance_{scenario.seed + r}.json")
            for r in range(args.count)
        ]
    for sc, path in targets:
        save_instance(generate_instance(sc), path)
        print(path)
    logger.info("wrote %d instance file(s)", len(targets))
    return EXIT_OK
