"""
Monte-Carlo experiment runners behind the sweep, bench and rate commands.

Realizations are independent: they are fanned out to a process pool and
gathered in submission order, so the output never depends on scheduling.
"""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from app.core.database import close_db, get_engine, init_db, session_scope
from app.core.exceptions import FPIError
from app.crud import create_runs
from app.models.problem import SolveStatus
from app.models.scenario import Scenario
from app.schemas.config import DualIterConfig, ExperimentConfig, PrimalIterConfig
from app.services.artifacts import write_frame
from app.services.diagnostics import observed_step_rate, rate_table
from app.services.pipeline import solve_instance
from app.services.scenario_gen import generate_instance

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = [
    "seed", "gamma_db", "cbar", "status", "total_power", "dual_obj", "gap_rel",
    "dual_iters", "primal_iters", "rate_bound", "rate_practical", "t_dual_s", "t_primal_s",
    "M", "K", "certified", "t_certify_s", "error",
]

BENCH_COLUMNS = [
    "seed", "gamma_db", "cbar", "M", "K", "status", "dual_iters", "primal_iters",
    "t_dual_s", "t_primal_s", "t_certify_s", "t_total_s",
]

GROUP_KEYS = ["M", "K", "gamma_db", "cbar"]

ERROR_STATUS = "Error"


class RunTask(BaseModel):
    """One realization of one grid point; picklable for the process pool."""
    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    dual: DualIterConfig
    primal: PrimalIterConfig
    certify_tol: float
    direct: bool = False
    record_timings: bool = True


def run_realization(task: RunTask) -> Dict[str, Any]:
    """
    Generate, solve and certify one instance; failures become an Error row.
    """
    sc = task.scenario
    row: Dict[str, Any] = {
        "seed": sc.seed,
        "gamma_db": sc.gamma_db,
        "cbar": sc.cbar,
        "M": sc.M,
        "K": sc.num_users,
        "status": ERROR_STATUS,
        "certified": False,
        "total_power": None,
        "dual_obj": None,
        "gap_rel": None,
        "dual_iters": 0,
        "primal_iters": 0,
        "rate_bound": None,
        "rate_practical": None,
        "t_dual_s": 0.0,
        "t_primal_s": 0.0,
        "t_certify_s": 0.0,
        "error": None,
    }
    try:
        outcome = solve_instance(
            generate_instance(sc),
            task.dual,
            task.primal,
            task.certify_tol,
            direct=task.direct,
            record_timings=task.record_timings,
        )
    except (FPIError, ValueError, np.linalg.LinAlgError) as exc:
        logger.warning("seed %d at %.2f dB / %.2f failed: %s", sc.seed, sc.gamma_db, sc.cbar, exc)
        row["error"] = str(exc)[:500]
        return row

    report = outcome.report
    row.update({
        "status": report.status.value,
        "certified": report.certified,
        "total_power": report.primal_objective,
        "dual_obj": report.dual_objective,
        "gap_rel": report.duality_gap_rel,
        "dual_iters": report.dual_iters,
        "primal_iters": report.primal_iters,
        "rate_bound": report.rate_bound,
        "rate_practical": observed_step_rate(report.dual_steps) if report.dual_steps else None,
        "t_dual_s": report.t_dual_s,
        "t_primal_s": report.t_primal_s,
        "t_certify_s": report.t_certify_s,
    })
    if report.status is not SolveStatus.OPTIMAL:
        # only certified numbers leave the harness
        row.update({"total_power": None, "gap_rel": None})
    return row


def build_tasks(cfg: ExperimentConfig, direct: bool = False, record_timings: Optional[bool] = None) -> List[RunTask]:
    """
    Expand the grid (M, K, gamma, cbar) x realizations into tasks, in a fixed order.

    Realization r of every grid point uses seed ``scenario.seed + r``.
    """
    base = cfg.scenario
    relays = cfg.relay_sweep or [base.M]
    users = cfg.user_sweep or [base.num_users]
    timings = cfg.record_timings if record_timings is None else record_timings
    tasks = []
    for M, K, gamma, cbar in product(relays, users, cfg.gamma_db_sweep, cfg.cbar_sweep):
        for r in range(cfg.num_realizations):
            sc = Scenario.model_validate({
                **base.model_dump(),
                "active_relays": M,
                "num_users": K,
                "gamma_db": gamma,
                "cbar": cbar,
                "seed": base.seed + r,
            })
            tasks.append(RunTask(
                scenario=sc,
                dual=cfg.dual,
                primal=cfg.primal,
                certify_tol=cfg.certify_tol,
                direct=direct,
                record_timings=timings,
            ))
    return tasks


async def gather_in_pool(fn: Callable, items: Sequence, workers: int) -> List:
    """
    Map ``fn`` over ``items``; in-process for one worker, else on a process pool.

    Results keep the order of ``items``.
    """
    if workers <= 1:
        return [fn(item) for item in items]
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [loop.run_in_executor(pool, fn, item) for item in items]
        return list(await asyncio.gather(*futures))


def aggregate(runs: pd.DataFrame) -> pd.DataFrame:
    """
    Per grid point: mean/std of certified total power, mean iteration counts,
    and the feasibility fraction (share of Optimal rows).
    """
    frame = runs.copy()
    frame["optimal"] = frame["status"] == SolveStatus.OPTIMAL.value
    frame["gap_rel"] = frame["gap_rel"].astype(float)
    frame["power"] = frame["total_power"].where(frame["optimal"]).astype(float)
    frame["dual_iters_opt"] = frame["dual_iters"].where(frame["optimal"]).astype(float)
    frame["primal_iters_opt"] = frame["primal_iters"].where(frame["optimal"]).astype(float)
    summary = frame.groupby(GROUP_KEYS, sort=True).agg(
        realizations=("seed", "size"),
        feasible_fraction=("optimal", "mean"),
        mean_power=("power", "mean"),
        std_power=("power", "std"),
        mean_dual_iters=("dual_iters_opt", "mean"),
        mean_primal_iters=("primal_iters_opt", "mean"),
        max_gap_rel=("gap_rel", "max"),
    )
    return summary.reset_index()


async def persist_runs(rows: Sequence[Dict[str, Any]], experiment: str, url: Optional[str] = None) -> int:
    """
    Store per-run rows in the results store under ``experiment``.
    """
    records = []
    for row in rows:
        record = {k: v for k, v in row.items() if k not in ("M", "K")}
        record.update({"experiment": experiment, "num_relays": row["M"], "num_users": row["K"]})
        records.append({k: (None if isinstance(v, float) and np.isnan(v) else v) for k, v in record.items()})
    engine = get_engine(url)
    try:
        await init_db(engine)
        async with session_scope(engine) as db:
            count = await create_runs(db, rows=records)
    finally:
        await close_db(engine)
    logger.info("stored %d runs for experiment '%s'", count, experiment)
    return count


def _out_dir(cfg: ExperimentConfig, out_dir: Optional[str]) -> Path:
    return Path(out_dir or cfg.output_dir)


async def run_sweep(
    cfg: ExperimentConfig,
    out_dir: Optional[str] = None,
    direct: bool = False,
    db_url: Optional[str] = None,
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Solve every realization of the grid and write per-run and summary CSVs.

    Files: <name>_runs.csv, <name>_summary.csv in the output directory.

    Returns:
        (runs, summary) DataFrames
    """
    tasks = build_tasks(cfg, direct=direct)
    logger.info("sweep '%s': %d solves on %d worker(s)", cfg.name, len(tasks), cfg.workers)
    rows = await gather_in_pool(run_realization, tasks, cfg.workers)
    runs = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    summary = aggregate(runs)
    target = _out_dir(cfg, out_dir)
    await write_frame(target / f"{cfg.name}_runs.csv", runs)
    await write_frame(target / f"{cfg.name}_summary.csv", summary)
    if cfg.record_runs:
        await persist_runs(rows, cfg.name, db_url)
    return runs, summary


async def run_bench(
    cfg: ExperimentConfig,
    out_dir: Optional[str] = None,
    direct: bool = False,
    db_url: Optional[str] = None,
) -> pd.DataFrame:
    """
    Time every realization of the grid by phase; writes <name>_bench.csv.
    """
    tasks = build_tasks(cfg, direct=direct, record_timings=True)
    logger.info("bench '%s': %d solves on %d worker(s)", cfg.name, len(tasks), cfg.workers)
    rows = await gather_in_pool(run_realization, tasks, cfg.workers)
    bench = pd.DataFrame(rows)
    bench["t_total_s"] = bench["t_dual_s"] + bench["t_primal_s"] + bench["t_certify_s"]
    bench = bench[BENCH_COLUMNS]
    await write_frame(_out_dir(cfg, out_dir) / f"{cfg.name}_bench.csv", bench)
    if cfg.record_runs:
        await persist_runs(rows, f"{cfg.name}-bench", db_url)
    return bench


def _rate_for_seed(args: Tuple[Scenario, Sequence[float], DualIterConfig]) -> pd.DataFrame:
    scenario, gammas, dual = args
    table = rate_table(scenario, gammas, dual)
    table.insert(0, "seed", scenario.seed)
    return table


async def run_rate(cfg: ExperimentConfig, out_dir: Optional[str] = None) -> pd.DataFrame:
    """
    Rate table over ``gamma_db_sweep`` for each realization seed; writes <name>_rates.csv.
    """
    base = cfg.scenario
    jobs = [
        (base.model_copy(update={"seed": base.seed + r}), list(cfg.gamma_db_sweep), cfg.dual)
        for r in range(cfg.num_realizations)
    ]
    tables = await gather_in_pool(_rate_for_seed, jobs, cfg.workers)
    rates = pd.concat(tables, ignore_index=True)
    await write_frame(_out_dir(cfg, out_dir) / f"{cfg.name}_rates.csv", rates)
    return rates
