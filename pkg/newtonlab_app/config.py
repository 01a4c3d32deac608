import os


def _float(name: str, default: str) -> float:
    return float((os.getenv(name) or default).strip())


def _int(name: str, default: str) -> int:
    return int((os.getenv(name) or default).strip())


# =========================
# Numerical tolerances
# =========================

ROOT_RESIDUAL = _float("NEWTONLAB_ROOT_RESIDUAL", "1e-12")
HOLE_TOL = _float("NEWTONLAB_HOLE_TOL", "1e-8")
CHORDAL_TOL = _float("NEWTONLAB_CHORDAL_TOL", "1e-9")
INDETERMINATE_TOL = _float("NEWTONLAB_INDETERMINATE_TOL", "1e-12")
SOLVER_CAP = _int("NEWTONLAB_SOLVER_CAP", "70")

QUAD_NODES = _int("NEWTONLAB_QUAD_NODES", "512")
MIN_RADIUS = _float("NEWTONLAB_MIN_RADIUS", "1e-6")
ROTATION_QMAX = _int("NEWTONLAB_ROTATION_QMAX", "64")
ROTATION_TOL = _float("NEWTONLAB_ROTATION_TOL", "1e-9")
TAIL_TOL = _float("NEWTONLAB_TAIL_TOL", "1e-10")

PUISEUX_ORDER = _int("NEWTONLAB_PUISEUX_ORDER", "8")
PRUNE = _float("NEWTONLAB_PRUNE", "1e-12")

ITER_CAP = _int("NEWTONLAB_ITER_CAP", "2000")
EPS = _float("NEWTONLAB_EPS", "1e-9")
CYCLE_MATCH = _float("NEWTONLAB_CYCLE_MATCH", "1e-6")


# =========================
# Service
# =========================

DATABASE_URL = (os.getenv("DATABASE_URL") or "").strip()
RENDER_DIR = (os.getenv("NEWTONLAB_RENDER_DIR") or "renders").strip()
EXECUTOR_SLEEP_SECONDS = _int("EXECUTOR_SLEEP_SECONDS", "30")
LOG_LEVEL = (os.getenv("NEWTONLAB_LOG_LEVEL") or "INFO").strip().upper()
