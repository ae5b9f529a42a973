"""
CRUD operations for results-store models.
"""

from app.crud.run import (
    crud_solve_run,
    get_run,
    get_runs,
    get_runs_by_experiment,
    create_run,
    create_runs,
)

__all__ = [
    "crud_solve_run",
    "get_run",
    "get_runs",
    "get_runs_by_experiment",
    "create_run",
    "create_runs",
]
