"""
Base model mixins for common patterns.

This module provides reusable mixins for the results-store models and the
array coercion shared by the immutable domain value objects.
"""

from datetime import datetime

import numpy as np
from sqlalchemy import DateTime, func
from sqlalchemy.orm import Mapped, mapped_column


class TimestampMixin:
    """
    Mixin that adds created_at and updated_at timestamp fields.
    """
    created_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True),
        server_default=func.now(),
        nullable=False
    )
    updated_at: Mapped[datetime] = mapped_column(
        DateTime(timezone=True),
        server_default=func.now(),
        onupdate=func.now(),
        nullable=False
    )


class PrimaryKeyMixin:
    """
    Mixin that adds a standard integer primary key with index.
    """
    id: Mapped[int] = mapped_column(primary_key=True, index=True)


def frozen_array(value, dtype) -> np.ndarray:
    """
    Copy ``value`` into a read-only numpy array of the given dtype.
    """
    arr = np.array(value, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr
