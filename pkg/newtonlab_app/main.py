# newtonlab_app/main.py
# Newton-map dynamics service: stateless analysis endpoints plus a queued render ledger.

import logging
from typing import Any, Callable, Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import Response
from pydantic import BaseModel, ValidationError
from sqlalchemy import text

from . import config
from .basins import Window
from .database import SessionLocal, engine, ledger_enabled
from .errors import NewtonLabError
from .executor import _log, enqueue_render, record_run
from .models import Base, RenderTask
from .render import RenderJob, image_bytes, render_julia, render_param_per2
from .reports import (
    berkovich_report,
    blaschke_report,
    classify_report,
    cycles_report,
    degenerate_report,
    epstein_report,
    is_verified,
)
from .schemas import SCHEMAS, schema_for

logger = logging.getLogger(__name__)

app = FastAPI(title="NewtonLab - Newton map dynamics")


# =========================
# Startup / Schema
# =========================
@app.on_event("startup")
def _startup():
    logging.basicConfig(level=config.LOG_LEVEL)
    # Safe create; does not drop/alter tables
    if ledger_enabled():
        Base.metadata.create_all(bind=engine)


# =========================
# Request bodies
# =========================
class RootsRequest(BaseModel):
    roots: Any
    resolution: int = 256
    window: Optional[tuple[float, float, float, float]] = None
    iter_cap: Optional[int] = None
    eps: Optional[float] = None
    period: int = 2


class FamilyRequest(BaseModel):
    family: str
    t_values: Optional[list[float]] = None
    period: int = 2
    negate: bool = False
    shrink: bool = False


class BlaschkeRequest(BaseModel):
    k: int = 2
    a_count: int = 6
    a_values: Optional[list[float]] = None


# =========================
# Helpers
# =========================
def _run(command: str, params: dict, build: Callable[[], BaseModel]) -> dict:
    """Build a report, record it when a ledger exists, map failures to HTTP errors."""
    try:
        model = build()
    except (NewtonLabError, ValueError, ValidationError) as e:
        _record(command, params, error=str(e))
        raise HTTPException(status_code=422, detail=str(e))
    except Exception as e:
        logger.exception("%s failed", command)
        raise HTTPException(status_code=500, detail=str(e))
    out = model.model_dump(mode="json")
    _record(command, params, out, is_verified(model))
    return out


def _record(command: str, params: dict, report: Optional[dict] = None,
            verified: Optional[bool] = None, error: str = "") -> None:
    if not ledger_enabled():
        return
    db = SessionLocal()
    try:
        record_run(db, command, params, report, verified, error)
    except Exception as e:
        logger.warning("could not record %s run: %s", command, e)
    finally:
        db.close()


def _window(w) -> Optional[Window]:
    return None if w is None else Window(*w)


# =========================
# Health
# =========================
@app.get("/health")
def health():
    if ledger_enabled():
        with engine.begin() as conn:
            conn.execute(text("SELECT 1"))
    return {"ok": True, "ledger": ledger_enabled()}


# =========================
# Analyses
# =========================
@app.post("/classify")
def classify(req: RootsRequest):
    return _run("classify", req.model_dump(), lambda: classify_report(
        req.roots, req.resolution, _window(req.window), req.iter_cap, req.eps))


@app.post("/epstein")
def epstein(req: RootsRequest):
    return _run("epstein", req.model_dump(), lambda: epstein_report(req.roots, req.iter_cap))


@app.post("/cycles")
def cycles(req: RootsRequest):
    return _run("cycles", req.model_dump(), lambda: cycles_report(req.roots, req.period))


@app.post("/berkovich")
def berkovich(req: FamilyRequest):
    return _run("berkovich", req.model_dump(), lambda: berkovich_report(req.family))


@app.post("/degenerate")
def degenerate(req: FamilyRequest):
    return _run("degenerate", req.model_dump(), lambda: degenerate_report(
        req.family, req.t_values, req.period, req.negate, req.shrink))


@app.post("/blaschke")
def blaschke(req: BlaschkeRequest):
    return _run("blaschke", req.model_dump(), lambda: blaschke_report(req.k, req.a_count, req.a_values))


# =========================
# Renders
# =========================
def _render(job: RenderJob, draw) -> Response:
    try:
        image = draw(job)
    except (NewtonLabError, ValueError) as e:
        raise HTTPException(status_code=422, detail=str(e))
    media = "image/x-portable-pixmap" if job.format == "ppm" else "image/png"
    return Response(content=image_bytes(image, job.format), media_type=media)


@app.post("/render/julia")
def render_julia_endpoint(job: RenderJob):
    return _render(job.model_copy(update={"mode": "julia"}), render_julia)


@app.post("/render/per2")
def render_per2_endpoint(job: RenderJob):
    return _render(job.model_copy(update={"mode": "param-per2"}), render_param_per2)


@app.post("/jobs/render")
def enqueue(job: RenderJob):
    if not ledger_enabled():
        raise HTTPException(status_code=503, detail="DATABASE_URL is not configured")
    db = SessionLocal()
    try:
        task = enqueue_render(db, job)
        return {"id": task.id, "status": task.status}
    finally:
        db.close()


@app.get("/jobs/{task_id}")
def job_status(task_id: int):
    if not ledger_enabled():
        raise HTTPException(status_code=503, detail="DATABASE_URL is not configured")
    db = SessionLocal()
    try:
        task = db.query(RenderTask).filter_by(id=task_id).first()
        if not task:
            raise HTTPException(status_code=404, detail="task not found")
        _log(db, None, task.id, "JOB_POLLED", task.status)
        db.commit()
        return {
            "id": task.id,
            "status": task.status,
            "output_path": task.output_path,
            "error": task.error,
        }
    finally:
        db.close()


@app.get("/schemas")
def list_schemas():
    return {"schemas": sorted(SCHEMAS)}


@app.get("/schemas/{name}")
def get_schema(name: str):
    try:
        return schema_for(name)
    except KeyError as e:
        raise HTTPException(status_code=404, detail=str(e))
