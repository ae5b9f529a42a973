"""
Generic CRUD base class shared by the results-store models.
"""

from typing import Generic, TypeVar, Type, Optional, List, Any, Dict, Sequence

from sqlalchemy import select
from sqlalchemy.ext.asyncio import AsyncSession

from app.db.base import Base

# Type variable for the mapped model
ModelType = TypeVar("ModelType", bound=Base)


class CRUDBase(Generic[ModelType]):
    """
    Generic CRUD operations base class.

    Example:
        class CRUDSolveRun(CRUDBase[SolveRun]):
            pass

    Attributes:
        model: The SQLAlchemy model class
    """

    def __init__(self, model: Type[ModelType]):
        self.model = model

    async def get(self, db: AsyncSession, id: int) -> Optional[ModelType]:
        """
        Get a single record by ID.

        Returns:
            Model instance or None if not found
        """
        result = await db.execute(select(self.model).where(self.model.id == id))
        return result.scalar_one_or_none()

    async def get_multi(
        self,
        db: AsyncSession,
        *,
        skip: int = 0,
        limit: int = 100
    ) -> List[ModelType]:
        """
        Get multiple records with pagination, in insertion order.
        """
        result = await db.execute(
            select(self.model)
            .order_by(self.model.id)
            .offset(skip)
            .limit(limit)
        )
        return list(result.scalars().all())

    async def create(self, db: AsyncSession, *, obj_in: Dict[str, Any]) -> ModelType:
        """
        Create a new record from a mapping of column values.

        Returns:
            Created model instance
        """
        db_obj = self.model(**obj_in)
        db.add(db_obj)
        await db.flush()
        await db.refresh(db_obj)
        return db_obj

    async def create_many(
        self,
        db: AsyncSession,
        *,
        rows: Sequence[Dict[str, Any]]
    ) -> int:
        """
        Insert many records in one flush.

        Returns:
            Number of inserted records
        """
        db.add_all([self.model(**row) for row in rows])
        await db.flush()
        return len(rows)

    async def get_by_field(
        self,
        db: AsyncSession,
        field_name: str,
        field_value: Any
    ) -> List[ModelType]:
        """
        Get all records whose ``field_name`` equals ``field_value``.
        """
        field = getattr(self.model, field_name)
        result = await db.execute(
            select(self.model).where(field == field_value).order_by(self.model.id)
        )
        return list(result.scalars().all())
