"""
CRUD operations for the SolveRun results-store model.
"""

from typing import List

from sqlalchemy import func, select
from sqlalchemy.ext.asyncio import AsyncSession

from app.crud.base import CRUDBase
from app.models.run import SolveRun


class CRUDSolveRun(CRUDBase[SolveRun]):
    """
    CRUD operations for SolveRun.

    Inherits common CRUD operations from CRUDBase and adds experiment queries.
    """

    async def get_by_experiment(self, db: AsyncSession, experiment: str) -> List[SolveRun]:
        """
        Get every run recorded under an experiment tag, in insertion order.
        """
        return await self.get_by_field(db, "experiment", experiment)

    async def count_uncertified_optimal(self, db: AsyncSession, experiment: str) -> int:
        """
        Count Optimal rows that did not pass certification (should always be 0).
        """
        result = await db.execute(
            select(func.count())
            .select_from(SolveRun)
            .where(SolveRun.experiment == experiment)
            .where(SolveRun.status == "Optimal")
            .where(SolveRun.certified.is_(False))
        )
        return int(result.scalar_one())


# Create a singleton instance
crud_solve_run = CRUDSolveRun(SolveRun)

# Expose functions
get_run = crud_solve_run.get
get_runs = crud_solve_run.get_multi
get_runs_by_experiment = crud_solve_run.get_by_experiment
create_run = crud_solve_run.create
create_runs = crud_solve_run.create_many
