"""
Artifact writers for the harness: JSON documents and CSV tables.

Files are written asynchronously so experiment runners can overlap output with
pending solves; a single coroutine owns each file.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import aiofiles
import pandas as pd
from pydantic import BaseModel

from app.models.problem import DualSolution, PrimalSolution
from app.services.pipeline import SolveOutcome
from app.services.problem import solution_to_file

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


async def write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "w", encoding="utf-8") as fh:
        await fh.write(text)
    logger.debug("wrote %s", path)
    return path


async def write_json(path: PathLike, payload: Union[BaseModel, Dict]) -> Path:
    """Write a pydantic model or a plain mapping as indented JSON."""
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    return await write_text(path, text)


async def write_frame(path: PathLike, frame: pd.DataFrame) -> Path:
    """Write a DataFrame as CSV without the index."""
    return await write_text(path, frame.to_csv(index=False))


def trace_frame(objectives: Sequence[float], steps: Sequence[float], objective_column: str) -> pd.DataFrame:
    """
    Trace table with columns (iteration, <objective_column>, step_norm).
    """
    return pd.DataFrame({
        "iteration": range(1, len(objectives) + 1),
        objective_column: list(objectives),
        "step_norm": list(steps),
    })


async def write_solution(path: PathLike, primal: PrimalSolution, dual: Optional[DualSolution] = None) -> Path:
    return await write_json(path, solution_to_file(primal, dual))


async def write_solve_artifacts(out_dir: PathLike, outcome: SolveOutcome, stem: str = "solve") -> List[Path]:
    """
    Write the report, the traces and, when reached, the solution of one solve.

    Files:
        <stem>_report.json, <stem>_dual_trace.csv, <stem>_primal_trace.csv,
        <stem>_solution.json
    """
    out_dir = Path(out_dir)
    report = outcome.report
    written = [
        await write_json(out_dir / f"{stem}_report.json", report),
        await write_frame(
            out_dir / f"{stem}_dual_trace.csv",
            trace_frame(report.dual_trace, report.dual_steps, "dual_objective"),
        ),
    ]
    if outcome.primal is not None:
        written.append(await write_frame(
            out_dir / f"{stem}_primal_trace.csv",
            trace_frame(report.primal_trace, report.primal_steps, "primal_objective"),
        ))
        written.append(await write_solution(out_dir / f"{stem}_solution.json", outcome.primal, outcome.dual))
    return written
