import json
import os

import pytest
from sqlalchemy.orm import sessionmaker

from newtonlab_app.database import Base, make_engine
from newtonlab_app.executor import enqueue_render, process_render_tasks, record_run
from newtonlab_app.models import AnalysisRun, AuditLog, RenderTask
from newtonlab_app.render import RenderJob


@pytest.fixture
def db(tmp_path):
    engine = make_engine(f"sqlite:///{tmp_path / 'ledger.db'}")
    Base.metadata.create_all(bind=engine)
    session = sessionmaker(bind=engine, autoflush=False)()
    try:
        yield session
    finally:
        session.close()
        engine.dispose()


def test_record_run(db):
    ok = record_run(db, "cycles", {"period": 1}, {"cycles": []}, None)
    bad = record_run(db, "cycles", {"roots": "[1]"}, error="roots must be a list")
    assert ok.status == "SUCCEEDED" and bad.status == "FAILED"
    assert json.loads(ok.params_json) == {"period": 1}
    events = sorted(row.event for row in db.query(AuditLog).all())
    assert events == ["RUN_FAILED", "RUN_SUCCEEDED"]
    assert db.query(AnalysisRun).count() == 2


def test_render_queue(db, tmp_path):
    job = RenderJob(roots=[(1.0, 0.0), (-1.0, 0.0)], resolution=(8, 8), iter_cap=20, format="ppm")
    queued = enqueue_render(db, job)
    db.add(RenderTask(status="PENDING", payload_json=json.dumps({"resolution": [0, 4]})))
    db.commit()

    out = process_render_tasks(db, render_dir=str(tmp_path / "renders"))
    assert out == {"rendered": 1, "failed": 1}

    done = db.query(RenderTask).filter_by(id=queued.id).one()
    assert done.status == "SUCCEEDED"
    assert os.path.exists(done.output_path)
    failed = db.query(RenderTask).filter(RenderTask.id != queued.id).one()
    assert failed.status == "FAILED" and failed.error
