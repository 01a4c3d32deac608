import colorsys
import io
import logging
import os
from typing import Literal, Optional, Sequence

import numpy as np
from PIL import Image, ImageDraw, ImageFont
from pydantic import BaseModel, Field, field_validator

from . import config
from .basins import UNRESOLVED, BasinRaster, Window, basin_raster, classify_hyperbolic_type
from .newton_construct import NewtonMap, newton_from_roots, per2_slice

logger = logging.getLogger(__name__)

# Non-authoritative default c-window for the Per_2(0) slice.
PER2_WINDOW = (-2.5, 3.5, -3.0, 3.0)

BLACK = (0, 0, 0)
CYCLE_COLOR = (250, 200, 20)
OTHER_CYCLE_COLOR = (230, 40, 170)

FATE_CRITICAL_CYCLE = -2
FATE_OTHER_CYCLE = -3
PER2_MAX_PERIOD = 8


# =========================
# Jobs
# =========================

class RenderJob(BaseModel):
    mode: Literal["julia", "param-per2"] = "julia"
    window: Optional[tuple[float, float, float, float]] = None  # xmin, xmax, ymin, ymax
    resolution: tuple[int, int] = (400, 400)
    iter_cap: int = Field(default_factory=lambda: config.ITER_CAP, ge=1)
    eps: float = Field(default_factory=lambda: config.EPS, gt=0)
    roots: list[tuple[float, float]] = []
    marks: list[tuple[float, float]] = []
    format: Literal["ppm", "png"] = "png"
    out: Optional[str] = None

    @field_validator("resolution")
    @classmethod
    def _positive(cls, v):
        if v[0] < 1 or v[1] < 1:
            raise ValueError("resolution must be positive")
        return v

    @field_validator("window")
    @classmethod
    def _ordered(cls, v):
        if v is not None and (v[0] >= v[1] or v[2] >= v[3]):
            raise ValueError("window must be xmin < xmax, ymin < ymax")
        return v

    def complex_roots(self) -> list[complex]:
        return [complex(re, im) for re, im in self.roots]

    def as_window(self) -> Optional[Window]:
        return None if self.window is None else Window(*self.window)


def parse_window(text: str) -> tuple[float, float, float, float]:
    """"x0,y0,x1,y1" (two corners) to (xmin, xmax, ymin, ymax)."""
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 4:
        raise ValueError(f"window needs four numbers, got {text!r}")
    x0, y0, x1, y1 = parts
    return min(x0, x1), max(x0, x1), min(y0, y1), max(y0, y1)


def parse_resolution(text: str) -> tuple[int, int]:
    w, _, h = text.lower().partition("x")
    return int(w), int(h or w)


# =========================
# Palette
# =========================

def root_color(index: int, count: int) -> tuple[int, int, int]:
    r, g, b = colorsys.hsv_to_rgb((index / max(count, 1)) % 1.0, 0.55, 0.95)
    return int(255 * r), int(255 * g), int(255 * b)


def cycle_color(index: int, phase: int, period: int) -> tuple[int, int, int]:
    hue = (0.13 + 0.29 * index) % 1.0
    value = 1.0 - 0.35 * phase / max(period, 1)
    r, g, b = colorsys.hsv_to_rgb(hue, 1.0, value)
    return int(255 * r), int(255 * g), int(255 * b)


def palette_for(raster: BasinRaster) -> np.ndarray:
    n_roots = sum(1 for t in raster.targets if t.kind == "root")
    colors = []
    for t in raster.targets:
        if t.kind == "root":
            colors.append(root_color(t.index, n_roots))
        else:
            colors.append(cycle_color(t.index, t.phase, raster.free_cycles[t.index].period))
    return np.array(colors + [BLACK], dtype=np.float64)


def _shade(iterations: np.ndarray) -> np.ndarray:
    return 0.45 + 0.55 * np.exp(-iterations / 25.0)


# =========================
# Renders
# =========================

def render_julia(job: RenderJob, N: Optional[NewtonMap] = None) -> Image.Image:
    """Dynamical plane colored by basin; unresolved pixels black."""
    if N is None:
        N = newton_from_roots(job.complex_roots())
    raster = basin_raster(N, job.as_window(), tuple(job.resolution), job.iter_cap, job.eps)
    palette = palette_for(raster)
    labels = np.where(raster.labels == UNRESOLVED, len(palette) - 1, raster.labels)
    rgb = palette[labels] * _shade(raster.iterations)[..., None]
    rgb[raster.labels == UNRESOLVED] = 0
    logger.info("julia render %s: %s", raster.resolution, raster.counts())
    return Image.fromarray(np.clip(rgb, 0, 255).astype(np.uint8), "RGB")


def per2_roots(c: np.ndarray) -> np.ndarray:
    """The four roots of 12 P_c for every c, ordered by angle about their centroid c/2."""
    flat = np.asarray(c, dtype=complex).ravel()
    companion = np.zeros((flat.size, 4, 4), dtype=complex)
    companion[:, 1:, :3] = np.eye(3)
    # z^4 - 2c z^3 + (4c - 3) z + (3 - 4c)
    companion[:, 0, 0] = 2 * flat
    companion[:, 0, 2] = -(4 * flat - 3)
    companion[:, 0, 3] = -(3 - 4 * flat)
    roots = np.linalg.eigvals(companion)
    order = np.argsort(np.angle(roots - flat[:, None] / 2), axis=1)
    return np.take_along_axis(roots, order, axis=1).reshape(np.shape(c) + (4,))


def _nearest_root(roots: np.ndarray, z: np.ndarray) -> np.ndarray:
    return np.argmin(np.abs(roots - z[..., None]), axis=-1).astype(np.int8)


def per2_critical_fate(window: Window, resolution: tuple[int, int], iter_cap: int = None,
                       eps: float = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per pixel c: fate of the free critical point c under N_c.

    Returns (fate, iterations, c-grid). fate k >= 0 is the index of the root
    reached (see per2_roots), FATE_CRITICAL_CYCLE the cycle 0 <-> 1,
    FATE_OTHER_CYCLE another attracting cycle, UNRESOLVED otherwise.
    """
    iter_cap = config.ITER_CAP if iter_cap is None else iter_cap
    eps = config.EPS if eps is None else eps
    c = window.grid(resolution)
    z = c.copy()
    fate = np.full(c.shape, UNRESOLVED, dtype=np.int8)
    iterations = np.full(c.shape, iter_cap, dtype=np.int32)
    active = np.ones(c.shape, dtype=bool)
    lost = np.zeros(c.shape, dtype=bool)

    def newton(cc, zz):
        p = zz ** 4 / 12 - cc * zz ** 3 / 6 + (4 * cc - 3) * zz / 12 + (3 - 4 * cc) / 12
        dp = zz ** 3 / 3 - cc * zz ** 2 / 2 + (4 * cc - 3) / 12
        step = p / dp
        return zz - step, step

    with np.errstate(all="ignore"):
        for it in range(iter_cap):
            if not active.any():
                break
            idx = np.flatnonzero(active.ravel())
            w, step = newton(c.ravel()[idx], z.ravel()[idx])
            z.ravel()[idx] = w
            at_root = np.abs(step) <= eps
            on_cycle = ~at_root & ((np.abs(w) <= config.CYCLE_MATCH) | (np.abs(w - 1) <= config.CYCLE_MATCH))
            gone = ~np.isfinite(w)
            fate.ravel()[idx[on_cycle]] = FATE_CRITICAL_CYCLE
            lost.ravel()[idx[gone]] = True
            done = at_root | on_cycle | gone
            iterations.ravel()[idx[done]] = it + 1
            active.ravel()[idx[done]] = False
        settled = ~active & ~lost & (fate == UNRESOLVED)
        if settled.any():
            fate[settled] = _nearest_root(per2_roots(c[settled]), z[settled])

        if active.any():
            cc = c[active]
            orbit = [z[active]]
            for _ in range(2 * PER2_MAX_PERIOD):
                orbit.append(newton(cc, orbit[-1])[0])
            last = orbit[-1]
            period = np.zeros(last.shape, dtype=np.int32)
            for p in range(PER2_MAX_PERIOD, 0, -1):
                period[np.abs(orbit[-1 - p] - last) <= config.CYCLE_MATCH] = p
            tail = np.full(last.shape, UNRESOLVED, dtype=np.int8)
            tail[period > 1] = FATE_OTHER_CYCLE
            fixed = period == 1
            if fixed.any():
                tail[fixed] = _nearest_root(per2_roots(cc[fixed]), last[fixed])
            fate[active] = tail
    return fate, iterations, c


def per2_palette() -> dict[int, tuple[int, int, int]]:
    colors = {k: root_color(k, 4) for k in range(4)}
    colors[FATE_CRITICAL_CYCLE] = CYCLE_COLOR
    colors[FATE_OTHER_CYCLE] = OTHER_CYCLE_COLOR
    colors[UNRESOLVED] = BLACK
    return colors


def render_param_per2(job: RenderJob) -> Image.Image:
    """c-plane of the Per_2(0) slice colored by where the free critical point c goes."""
    window = job.as_window() or Window(*PER2_WINDOW)
    fate, iterations, _ = per2_critical_fate(window, tuple(job.resolution), job.iter_cap, job.eps)
    rgb = np.zeros(fate.shape + (3,))
    for k, color in per2_palette().items():
        rgb[fate == k] = color
    rgb *= _shade(iterations)[..., None]
    image = Image.fromarray(np.clip(rgb, 0, 255).astype(np.uint8), "RGB")
    if job.marks:
        draw_type_letters(image, window, [complex(x, y) for x, y in job.marks])
    return image


def draw_type_letters(image: Image.Image, window: Window, points: Sequence[complex],
                      resolution: int = 128) -> list[str]:
    """Overlay the hyperbolic type letter of N_c at each marked parameter c."""
    draw = ImageDraw.Draw(image)
    font = ImageFont.load_default()
    letters = []
    for c in points:
        try:
            letter = classify_hyperbolic_type(per2_slice(c), resolution=resolution).type
        except Exception as e:
            logger.warning("type letter at c=%s failed: %s", c, e)
            letter = "?"
        letters.append(letter)
        pix = window.pixel_of(c, image.size)
        if pix is None:
            continue
        row, col = pix
        draw.text((col - 3, row - 5), letter, fill=(255, 255, 255), font=font)
    return letters


# =========================
# Output
# =========================

def image_bytes(image: Image.Image, fmt: str = "png") -> bytes:
    buf = io.BytesIO()
    image.save(buf, format="PPM" if fmt == "ppm" else "PNG")
    return buf.getvalue()


def write_image(image: Image.Image, path: str, fmt: Optional[str] = None) -> str:
    fmt = fmt or ("ppm" if path.lower().endswith(".ppm") else "png")
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(image_bytes(image, fmt))
    return path


def run_job(job: RenderJob) -> Image.Image:
    if job.mode == "julia":
        return render_julia(job)
    return render_param_per2(job)
