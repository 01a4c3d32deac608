# _init_db.py

from newtonlab_app.database import engine
from newtonlab_app.models import Base  # noqa: F401


def main():
    if engine is None:
        raise SystemExit("DATABASE_URL is missing; nothing to create.")
    Base.metadata.create_all(bind=engine)
    print("Database tables created or verified.")


if __name__ == "__main__":
    main()
