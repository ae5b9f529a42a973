"""
Results-store connection and session management.

This module handles:
- Async database engine creation
- Session scope with commit/rollback for harness writers
- Table creation and engine disposal
"""

from contextlib import asynccontextmanager
from pathlib import Path
from typing import AsyncIterator, Optional

from sqlalchemy.engine import make_url
from sqlalchemy.ext.asyncio import (
    create_async_engine,
    AsyncSession,
    async_sessionmaker,
    AsyncEngine,
)
from sqlalchemy.pool import StaticPool

from app.core.config import settings
from app.db.base import Base


def get_engine(url: Optional[str] = None) -> AsyncEngine:
    """
    Create and configure the async database engine.

    Args:
        url: Database URL; defaults to ``settings.RESULTS_DB_URL``

    Returns:
        AsyncEngine: Configured async engine for the results store
    """
    url = url or settings.RESULTS_DB_URL
    parsed = make_url(url)
    # Special handling for SQLite
    if parsed.get_backend_name() == "sqlite":
        if parsed.database and parsed.database != ":memory:":
            Path(parsed.database).parent.mkdir(parents=True, exist_ok=True)
        return create_async_engine(
            url,
            echo=settings.RESULTS_DB_ECHO,
            connect_args={"check_same_thread": False},  # Needed for SQLite
            poolclass=StaticPool,
        )
    return create_async_engine(
        url,
        echo=settings.RESULTS_DB_ECHO,
        pool_pre_ping=True,  # Verify connections before using
    )


@asynccontextmanager
async def session_scope(engine: AsyncEngine) -> AsyncIterator[AsyncSession]:
    """
    Provide a session that commits on success and rolls back on error.

    Usage:
        async with session_scope(engine) as db:
            await crud_solve_run.create_many(db, rows=rows)

    Yields:
        AsyncSession: Database session
    """
    factory = async_sessionmaker(
        engine,
        class_=AsyncSession,
        expire_on_commit=False,  # Don't expire objects after commit
        autoflush=False,  # Manual flush control
    )
    async with factory() as session:
        try:
            yield session
            await session.commit()
        except Exception:
            await session.rollback()
            raise


async def init_db(engine: AsyncEngine) -> None:
    """
    Create all results-store tables that do not exist yet.
    """
    # Registers SolveRun on Base.metadata
    import app.models.run  # noqa: F401

    async with engine.begin() as conn:
        await conn.run_sync(Base.metadata.create_all)


async def close_db(engine: AsyncEngine) -> None:
    """
    Close the database engine and all connections.
    """
    await engine.dispose()
