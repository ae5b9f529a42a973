"""
Base class for all results-store models.

SQLAlchemy 2.0 declarative mapping; see app.models.run.SolveRun.
"""

from sqlalchemy.orm import DeclarativeBase


class Base(DeclarativeBase):
    """
    Base class for all database models.

    Example:
        class SolveRun(Base):
            __tablename__ = "solve_runs"

            id: Mapped[int] = mapped_column(primary_key=True)
            status: Mapped[str] = mapped_column(String(20))
    """
    pass
