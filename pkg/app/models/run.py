"""
Results-store record of one harness solve.

One row per (experiment, seed, gamma_db, cbar, M, K) realization, mirroring
the per-run CSV columns.
"""

from typing import Optional

from sqlalchemy import String
from sqlalchemy.orm import Mapped, mapped_column

from app.db.base import Base
from app.models.base import TimestampMixin, PrimaryKeyMixin


class SolveRun(Base, TimestampMixin, PrimaryKeyMixin):
    """
    Attributes:
        experiment: Tag grouping the rows of one sweep or bench invocation
        seed, gamma_db, cbar, num_relays, num_users: Grid point and realization
        status: Optimal, Infeasible, IterationLimit or Error
        certified: True when the verifier passed every residual
        total_power, dual_obj, gap_rel: Objectives (NULL unless solved)
        dual_iters, primal_iters: Iteration counts
        rate_bound, rate_practical: Dual convergence-rate diagnostics
        t_dual_s, t_primal_s, t_certify_s: Phase wall times
    """
    __tablename__ = "solve_runs"

    experiment: Mapped[str] = mapped_column(String(100), nullable=False, index=True)
    seed: Mapped[int] = mapped_column(nullable=False)
    gamma_db: Mapped[float] = mapped_column(nullable=False)
    cbar: Mapped[float] = mapped_column(nullable=False)
    num_relays: Mapped[int] = mapped_column(nullable=False)
    num_users: Mapped[int] = mapped_column(nullable=False)
    status: Mapped[str] = mapped_column(String(20), nullable=False, index=True)
    certified: Mapped[bool] = mapped_column(default=False, nullable=False)

    total_power: Mapped[Optional[float]] = mapped_column(nullable=True)
    dual_obj: Mapped[Optional[float]] = mapped_column(nullable=True)
    gap_rel: Mapped[Optional[float]] = mapped_column(nullable=True)
    dual_iters: Mapped[int] = mapped_column(default=0, nullable=False)
    primal_iters: Mapped[int] = mapped_column(default=0, nullable=False)
    rate_bound: Mapped[Optional[float]] = mapped_column(nullable=True)
    rate_practical: Mapped[Optional[float]] = mapped_column(nullable=True)
    t_dual_s: Mapped[float] = mapped_column(default=0.0, nullable=False)
    t_primal_s: Mapped[float] = mapped_column(default=0.0, nullable=False)
    t_certify_s: Mapped[float] = mapped_column(default=0.0, nullable=False)
    error: Mapped[Optional[str]] = mapped_column(String(500), nullable=True)

    def __repr__(self) -> str:
        return (
            f"<SolveRun(id={self.id}, experiment='{self.experiment}', seed={self.seed}, "
            f"gamma_db={self.gamma_db}, cbar={self.cbar}, status='{self.status}')>"
        )
