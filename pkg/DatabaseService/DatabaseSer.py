from sqlalchemy import Engine, and_
from sqlalchemy.orm import sessionmaker
from tenacity import retry, wait_exponential, stop_after_attempt
from sqlmodel import SQLModel, Session, create_engine, select
from typing import Optional, List, Type, Dict, Any
from contextlib import contextmanager
from LoggerService import LoggerService
from time import time


class DatabaseService:
    """Synchronous SQLModel storage with retried queries; one engine per database URL."""
    MAX_RETRIES = 5
    ENGINES: Dict[str, Engine] = {}

    def __init__(self, url: str, logger: Optional[LoggerService] = None):
        self.url = url
        self.engine = self.get_engine(url)
        self.logging = logger.get_logger() if logger else None
        self.session_factory = sessionmaker(bind=self.engine, class_=Session, expire_on_commit=False)
        SQLModel.metadata.create_all(self.engine)

    @classmethod
    def get_engine(cls, url: str) -> Engine:
        if url not in cls.ENGINES:
            cls.ENGINES[url] = create_engine(
                url,
                echo=False,
                pool_pre_ping=True,
                connect_args={"check_same_thread": False, "timeout": 30} if url.startswith("sqlite") else {},
            )
        return cls.ENGINES[url]

    @classmethod
    def dispose(cls, url: str) -> None:
        engine = cls.ENGINES.pop(url, None)
        if engine is not None:
            engine.dispose()

    @contextmanager
    def session_scope(self):
        """Session with rollback on error."""
        session = self.get_session()
        try:
            yield session
        except Exception as e:
            if self.logging:
                self.logging.error(f"Session error: {e}", exc_info=True)
            session.rollback()
            raise
        finally:
            session.close()

    def get_session(self) -> Session:
        return self.session_factory()

    @retry(wait=wait_exponential(multiplier=0.1, min=0.1, max=2), stop=stop_after_attempt(MAX_RETRIES),
           reraise=True)
    def execute_query(self, query: Any, *args, **kwargs):
        """Runs `query(session, ...)` or a select statement; retried while the database is locked."""
        start_time = time()
        with self.session_scope() as session:
            if self.logging:
                self.logging.info(f"Executing query: {query.__name__ if callable(query) else query}")
            result = query(session, *args, **kwargs) if callable(query) else session.exec(query).all()
            if self.logging:
                self.logging.info(f"Query executed in {time() - start_time:.2f} seconds.")
            return result

    def add(self, instance: SQLModel) -> Optional[int]:
        def _add(session: Session):
            session.add(instance)
            session.commit()
            session.refresh(instance)
            return instance.id

        return self.execute_query(_add)

    def update(self, instance: SQLModel) -> Optional[int]:
        def _update(session: Session):
            merged = session.merge(instance)
            session.commit()
            session.refresh(merged)
            return merged.id

        return self.execute_query(_update)

    def get(self, model: Type[SQLModel], filters: Optional[Dict[str, Any]] = None,
            limit: Optional[int] = None) -> List[SQLModel]:
        """
        Records of a table.
        :param model: SQLModel table type.
        :param filters: equality conditions, e.g. {"status": "completed"}.
        :param limit: maximum number of records.
        """
        query = select(model)
        if filters:
            conditions = [getattr(model, key) == value for key, value in filters.items() if hasattr(model, key)]
            if conditions:
                query = query.where(and_(*conditions))
            elif self.logging:
                self.logging.warning(f"No valid filters applied for model {model.__name__}")
        if limit:
            query = query.limit(limit)
        records = self.execute_query(query)
        if self.logging:
            self.logging.info(f"Retrieved {len(records)} records from {model.__name__}")
        return records

    def delete(self, model: Type[SQLModel], filters: Dict[str, Any]) -> int:
        def _delete(session: Session):
            conditions = [getattr(model, key) == value for key, value in filters.items() if hasattr(model, key)]
            records = session.exec(select(model).where(and_(*conditions))).all()
            for record in records:
                session.delete(record)
            session.commit()
            return len(records)

        count = self.execute_query(_delete)
        if self.logging and count:
            self.logging.info(f"Deleted {count} records from {model.__name__}")
        return count
