import json
import logging
import os
import time
from datetime import datetime
from typing import Optional

from sqlalchemy.orm import Session

from . import config
from .database import SessionLocal, ledger_enabled
from .models import AnalysisRun, AuditLog, RenderTask
from .render import RenderJob, run_job, write_image

logger = logging.getLogger(__name__)


# =========================
# Helpers
# =========================

def _now():
    return datetime.utcnow()


def _log(db: Session, run_id, task_id, event, detail):
    db.add(AuditLog(
        run_id=run_id,
        task_id=task_id,
        event=(event or "")[:120],
        detail=(detail or "")[:5000],
        created_at=_now(),
    ))


def _parse_payload(payload_json: str) -> dict:
    try:
        return json.loads(payload_json or "{}")
    except json.JSONDecodeError:
        return {}


def record_run(db: Session, command: str, params: dict, report: Optional[dict] = None,
               verified: Optional[bool] = None, error: str = "") -> AnalysisRun:
    """Store one finished analysis in the ledger."""
    run = AnalysisRun(
        command=command,
        status="FAILED" if error else "SUCCEEDED",
        params_json=json.dumps(params, default=str),
        report_json=json.dumps(report or {}, default=str),
        verified=verified,
        error=(error or "")[:2000],
        finished_at=_now(),
    )
    db.add(run)
    db.flush()
    _log(db, run.id, None, f"RUN_{run.status}", f"{command} verified={verified}")
    db.commit()
    return run


def record_run_if_enabled(command: str, params: dict, report: Optional[dict] = None,
                          verified: Optional[bool] = None, error: str = "") -> Optional[int]:
    if not ledger_enabled():
        logger.info("no DATABASE_URL; %s run not recorded", command)
        return None
    db = SessionLocal()
    try:
        return record_run(db, command, params, report, verified, error).id
    finally:
        db.close()


def enqueue_render(db: Session, job: RenderJob) -> RenderTask:
    task = RenderTask(status="PENDING", payload_json=job.model_dump_json())
    db.add(task)
    db.flush()
    _log(db, None, task.id, "RENDER_QUEUED", job.mode)
    db.commit()
    db.refresh(task)
    return task


def _output_path(task: RenderTask, job: RenderJob, render_dir: str) -> str:
    if job.out:
        return job.out
    return os.path.join(render_dir, f"task-{task.id}-{job.mode}.{job.format}")


# =========================
# Executor
# =========================

def process_render_tasks(db: Session, run_id: Optional[int] = None, limit: int = 20,
                         render_dir: Optional[str] = None) -> dict:
    render_dir = render_dir or config.RENDER_DIR
    tasks = (
        db.query(RenderTask)
        .filter(RenderTask.status == "PENDING")
        .order_by(RenderTask.created_at.asc())
        .limit(limit)
        .all()
    )
    logger.info("pending render tasks found: %d", len(tasks))

    done = failed = 0
    for task in tasks:
        try:
            job = RenderJob.model_validate(_parse_payload(task.payload_json))
            task.status = "RUNNING"
            task.started_at = _now()
            db.commit()

            path = _output_path(task, job, render_dir)
            write_image(run_job(job), path, job.format)

            task.output_path = path
            task.status = "SUCCEEDED"
            task.error = ""
            task.finished_at = _now()
            _log(db, run_id, task.id, "RENDER_DONE", path)
            done += 1
            db.commit()

        except Exception as e:
            task.status = "FAILED"
            task.error = str(e)[:2000]
            task.finished_at = _now()
            _log(db, run_id, task.id, "RENDER_ERROR", task.error)
            failed += 1
            db.commit()

    return {"rendered": done, "failed": failed}


def run_executor_once(db: Optional[Session] = None) -> dict:
    own = db is None
    db = SessionLocal() if own else db
    run = None
    try:
        run = AnalysisRun(command="executor", status="STARTED", params_json="{}")
        db.add(run)
        db.commit()
        db.refresh(run)
        _log(db, run.id, None, "EXECUTOR_TICK", "Scanning for pending render tasks")
        db.commit()

        out = process_render_tasks(db, run.id)

        run.status = "SUCCEEDED"
        run.report_json = json.dumps(out)
        run.finished_at = _now()
        _log(db, run.id, None, "EXECUTOR_DONE", json.dumps(out))
        db.commit()
        return out

    except Exception as e:
        logger.exception("executor tick failed")
        if run:
            run.status = "FAILED"
            run.error = str(e)[:2000]
            run.finished_at = _now()
            _log(db, run.id, None, "EXECUTOR_CRASH", run.error)
            db.commit()
        return {"rendered": 0, "failed": 0, "error": str(e)}

    finally:
        if own:
            db.close()


def run_executor_loop():
    logging.basicConfig(level=config.LOG_LEVEL)
    if not ledger_enabled():
        raise RuntimeError("DATABASE_URL is missing; the render worker needs the task table.")

    while True:
        logger.info("worker tick %s", _now())
        run_executor_once()
        time.sleep(config.EXECUTOR_SLEEP_SECONDS)
