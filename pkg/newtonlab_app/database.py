from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import DeclarativeBase, sessionmaker

from . import config


def clean_database_url(url: str) -> str:
    url = (url or "").strip()
    # Force psycopg v3 driver
    if url.startswith("postgres://"):
        url = url.replace("postgres://", "postgresql+psycopg://", 1)
    elif url.startswith("postgresql://"):
        url = url.replace("postgresql://", "postgresql+psycopg://", 1)
    return url


DATABASE_URL = clean_database_url(config.DATABASE_URL)


class Base(DeclarativeBase):
    pass


def make_engine(url: str) -> Engine:
    return create_engine(url, pool_pre_ping=True)


# The run ledger is optional: without DATABASE_URL the library, CLI and
# stateless endpoints still work.
engine: Optional[Engine] = make_engine(DATABASE_URL) if DATABASE_URL else None

SessionLocal = sessionmaker(
    bind=engine,
    autoflush=False,
    autocommit=False,
)


def ledger_enabled() -> bool:
    return engine is not None


def get_db():
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()
