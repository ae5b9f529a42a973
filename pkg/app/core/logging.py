"""
Logging setup shared by the CLI and the experiment workers.
"""

import logging
from typing import Optional

from app.core.config import settings


def configure_logging(level: Optional[str] = None) -> None:
    """
    Install one stream handler on the root logger.

    Args:
        level: Level name overriding ``settings.LOG_LEVEL`` (e.g. "DEBUG")
    """
    logging.basicConfig(
        level=(level or settings.LOG_LEVEL).upper(),
        format=settings.LOG_FORMAT,
        force=True,
    )
    # aiosqlite logs every statement at DEBUG
    logging.getLogger("aiosqlite").setLevel(logging.WARNING)
