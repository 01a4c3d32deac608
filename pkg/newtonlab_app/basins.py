"""Raster basins of Newton maps and the seven hyperbolic types of quartics.

Pixels are iterated until they land within eps of a root or within
CYCLE_MATCH of a point of a free (super)attracting cycle. Each
(target, phase) mask is split into 4-connected components; the immediate
basin of a cycle point is the component containing its pixel.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from . import config
from .complex_rational import ProjectivePoint, as_point, evaluate, evaluate_affine
from .epstein import CycleReport, attracting_cycles_from_critical_orbits
from .errors import NewtonLabError
from .newton_construct import NewtonMap, classify_critical_points

logger = logging.getLogger(__name__)

UNRESOLVED = -1
BOUNDARY_PIXELS = 2
MAX_RETRIES = 2

HYPERBOLIC_TYPES = ("A", "B", "C", "D", "IE", "FE1", "FE2")


# =========================
# Types
# =========================

@dataclass(frozen=True)
class Window:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @classmethod
    def square(cls, center: complex, half_width: float) -> "Window":
        return cls(center.real - half_width, center.real + half_width,
                   center.imag - half_width, center.imag + half_width)

    @classmethod
    def around(cls, points: Sequence[complex], pad: float = 2.0, min_half_width: float = 0.5) -> "Window":
        pts = np.array([complex(p) for p in points if np.isfinite(complex(p))])
        if pts.size == 0:
            return cls.square(0j, 2.0)
        lo = complex(pts.real.min(), pts.imag.min())
        hi = complex(pts.real.max(), pts.imag.max())
        center = (lo + hi) / 2
        half = max((hi.real - lo.real) / 2, (hi.imag - lo.imag) / 2, min_half_width)
        return cls.square(center, pad * half)

    def contains(self, z: complex) -> bool:
        return self.xmin <= z.real <= self.xmax and self.ymin <= z.imag <= self.ymax

    def grid(self, resolution: tuple[int, int]) -> np.ndarray:
        """Pixel centres; row 0 is the top edge."""
        width, height = resolution
        xs = self.xmin + (np.arange(width) + 0.5) * (self.xmax - self.xmin) / width
        ys = self.ymax - (np.arange(height) + 0.5) * (self.ymax - self.ymin) / height
        return xs[None, :] + 1j * ys[:, None]

    def pixel_of(self, z: complex, resolution: tuple[int, int]) -> Optional[tuple[int, int]]:
        if not self.contains(z):
            return None
        width, height = resolution
        col = int((z.real - self.xmin) / (self.xmax - self.xmin) * width)
        row = int((self.ymax - z.imag) / (self.ymax - self.ymin) * height)
        return min(row, height - 1), min(col, width - 1)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return self.xmin, self.xmax, self.ymin, self.ymax


@dataclass(frozen=True)
class Target:
    kind: str  # "root" or "cycle"
    index: int
    phase: int = 0

    def describe(self) -> str:
        if self.kind == "root":
            return f"root {self.index}"
        return f"cycle {self.index} phase {self.phase}"


@dataclass
class BasinRaster:
    window: Window
    resolution: tuple[int, int]
    labels: np.ndarray
    components: np.ndarray
    targets: list[Target]
    iterations: np.ndarray
    roots: np.ndarray
    free_cycles: list[CycleReport] = field(default_factory=list)

    def target_id(self, target: Target) -> int:
        return self.targets.index(target)

    def label_at(self, z: complex) -> Optional[int]:
        pix = self.window.pixel_of(z, self.resolution)
        return None if pix is None else int(self.labels[pix])

    def component_at(self, z: complex) -> Optional[int]:
        pix = self.window.pixel_of(z, self.resolution)
        return None if pix is None else int(self.components[pix])

    def anchor(self, target: Target) -> complex:
        """The point whose component is the immediate basin of the target."""
        if target.kind == "root":
            return complex(self.roots[target.index])
        return self.free_cycles[target.index].points[target.phase].affine

    def counts(self) -> dict[str, int]:
        out = {t.describe(): int(np.sum(self.labels == i)) for i, t in enumerate(self.targets)}
        out["unresolved"] = int(np.sum(self.labels == UNRESOLVED))
        return out


@dataclass(frozen=True)
class CriticalAssignment:
    point: complex
    multiplicity: int
    target: Optional[Target]
    immediate: Optional[bool]
    component: Optional[int]
    steps: int = 0


@dataclass(frozen=True)
class HyperbolicTypeReport:
    type: str
    free_cycles: tuple
    critical_assignments: tuple
    reason: str = ""
    resolution: Optional[tuple[int, int]] = None
    window: Optional[Window] = None


# =========================
# Raster
# =========================

def free_cycles_of(N: NewtonMap, horizon: int = None) -> list[CycleReport]:
    roots = N.numeric_roots
    out = []
    for cyc in attracting_cycles_from_critical_orbits(N.map, horizon):
        if cyc.period == 1 and np.min(np.abs(roots - cyc.points[0].affine)) <= config.CYCLE_MATCH:
            continue
        out.append(cyc)
    return out


def _targets(N: NewtonMap, cycles: Sequence[CycleReport]) -> list[Target]:
    out = [Target("root", j) for j in range(N.degree)]
    for c, cyc in enumerate(cycles):
        out.extend(Target("cycle", c, k) for k in range(cyc.period))
    return out


def default_window(N: NewtonMap, cycles: Sequence[CycleReport]) -> Window:
    points = list(N.numeric_roots)
    for cyc in cycles:
        points.extend(p.affine for p in cyc.points if not p.is_infinity)
    points.extend(c.location for c in classify_critical_points(N))
    return Window.around(points)


def basin_raster(N: NewtonMap, window: Optional[Window] = None, resolution: tuple[int, int] = (512, 512),
                 iter_cap: int = None, eps: float = None,
                 free_cycles: Optional[Sequence[CycleReport]] = None) -> BasinRaster:
    iter_cap = config.ITER_CAP if iter_cap is None else iter_cap
    eps = config.EPS if eps is None else eps
    cycles = list(free_cycles_of(N) if free_cycles is None else free_cycles)
    window = default_window(N, cycles) if window is None else window
    targets = _targets(N, cycles)
    f = N.map.numeric()
    roots = N.numeric_roots

    grid = window.grid(resolution)
    z = grid.ravel().copy()
    labels = np.full(z.shape, UNRESOLVED, dtype=np.int32)
    iterations = np.full(z.shape, iter_cap, dtype=np.int32)
    active = np.arange(z.size)

    cycle_points = []
    for c, cyc in enumerate(cycles):
        for k, p in enumerate(cyc.points):
            if not p.is_infinity:
                cycle_points.append((p.affine, c, k, cyc.period))
    first_cycle_id = {c: targets.index(Target("cycle", c, 0)) for c in range(len(cycles))}

    for it in range(iter_cap):
        if active.size == 0:
            break
        w = evaluate_affine(f, z[active])
        z[active] = w
        done = ~np.isfinite(w)
        iterations[active[done]] = it + 1
        for j, r in enumerate(roots):
            hit = ~done & (np.abs(w - r) <= eps)
            labels[active[hit]] = j
            iterations[active[hit]] = it + 1
            done |= hit
        for point, c, k, n in cycle_points:
            hit = ~done & (np.abs(w - point) <= config.CYCLE_MATCH)
            # z_(it+1) is near point k, so the starting pixel has phase k - (it+1)
            labels[active[hit]] = first_cycle_id[c] + (k - (it + 1)) % n
            iterations[active[hit]] = it + 1
            done |= hit
        active = active[~done]

    labels = labels.reshape(grid.shape)
    iterations = iterations.reshape(grid.shape)
    if active.size:
        logger.debug("%d of %d pixels unresolved after %d iterations", active.size, z.size, iter_cap)

    components = np.zeros(grid.shape, dtype=np.int32)
    offset = 0
    for t in range(len(targets)):
        comp, count = ndimage.label(labels == t)
        components[comp > 0] = comp[comp > 0] + offset
        offset += count
    return BasinRaster(window, tuple(resolution), labels, components, targets, iterations, roots, cycles)


def immediate_basin_member(raster: BasinRaster, point, target: Target) -> Optional[bool]:
    """True/False when decided from the raster, None when ambiguous."""
    z = as_point(point).affine
    anchor = raster.anchor(target)
    if abs(z - anchor) <= config.CYCLE_MATCH:
        return True
    pix = raster.window.pixel_of(z, raster.resolution)
    anchor_pix = raster.window.pixel_of(anchor, raster.resolution)
    if pix is None or anchor_pix is None:
        return None
    tid = raster.target_id(target)
    if raster.labels[pix] != tid or raster.labels[anchor_pix] != tid:
        return None if raster.labels[pix] == UNRESOLVED else False
    row, col = pix
    b = BOUNDARY_PIXELS
    block = raster.components[max(row - b, 0): row + b + 1, max(col - b, 0): col + b + 1]
    if np.any(block != raster.components[pix]):
        return None
    return bool(raster.components[pix] == raster.components[anchor_pix])


# =========================
# Classification
# =========================

def _critical_target(N: NewtonMap, c: complex, cycles: Sequence[CycleReport],
                     horizon: int, eps: float) -> tuple[Optional[Target], int]:
    f = N.map
    roots = N.numeric_roots
    p = ProjectivePoint.finite(c)
    for k in range(horizon + 1):
        if not p.is_infinity:
            z = p.affine
            d_roots = np.abs(roots - z)
            j = int(np.argmin(d_roots))
            if d_roots[j] <= eps:
                return Target("root", j), k
            for ci, cyc in enumerate(cycles):
                for idx, q in enumerate(cyc.points):
                    if q.distance(p) <= config.CYCLE_MATCH:
                        return Target("cycle", ci, (idx - k) % cyc.period), k
        p = evaluate(f, p)
    return None, horizon


def _decide(assignments: Sequence[CriticalAssignment]) -> tuple[str, str]:
    if any(a.target is None for a in assignments):
        return "unresolved", "a critical orbit did not reach a root or free cycle"
    if any(a.target.kind == "root" and a.immediate for a in assignments):
        return "IE", ""
    if any(a.immediate is None for a in assignments):
        return "unresolved", "raster ambiguity at a critical point"
    if len(assignments) != 2:
        return "unresolved", f"expected two additional critical points, got {len(assignments)}"
    a, b = assignments
    kinds = {a.target.kind, b.target.kind}
    if kinds == {"cycle"}:
        if a.target.index != b.target.index:
            return "D", ""
        if a.immediate and b.immediate:
            return ("A", "") if a.component == b.component else ("B", "")
        if a.immediate != b.immediate:
            return "C", ""
        return "unresolved", "both critical points in non-immediate components of one cycle"
    if kinds == {"root", "cycle"}:
        root_side = a if a.target.kind == "root" else b
        cycle_side = b if root_side is a else a
        if not root_side.immediate and cycle_side.immediate:
            return "FE1", ""
        return "unresolved", "root/cycle split without an immediate cycle basin"
    return "FE2", ""


def classify_hyperbolic_type(N: NewtonMap, resolution: int = 512, horizon: int = None,
                             window: Optional[Window] = None, eps: float = None) -> HyperbolicTypeReport:
    if N.degree != 4:
        raise ValueError("hyperbolic types are defined for quartic Newton maps")
    horizon = config.ITER_CAP if horizon is None else horizon
    eps = config.EPS if eps is None else eps
    cycles = free_cycles_of(N, horizon)
    window = default_window(N, cycles) if window is None else window

    additional = []
    for cp in classify_critical_points(N):
        if cp.kind == "additional":
            additional.append((cp.location, cp.multiplicity))
        elif cp.additional:
            additional.append((cp.location, cp.multiplicity - 1))

    targets = [_critical_target(N, c, cycles, horizon, eps) for c, _ in additional]
    res = resolution
    raster = None
    assignments: list[CriticalAssignment] = []
    for attempt in range(MAX_RETRIES + 1):
        raster = basin_raster(N, window, (res, res), horizon, eps, free_cycles=cycles)
        assignments = []
        for (c, mult), (target, steps) in zip(additional, targets):
            immediate = component = None
            if target is not None:
                immediate = immediate_basin_member(raster, c, target)
                component = raster.component_at(c)
            assignments.extend([CriticalAssignment(c, mult, target, immediate, component, steps)] * mult)
        if not any(a.target is not None and a.immediate is None for a in assignments):
            break
        if attempt < MAX_RETRIES:
            logger.warning("ambiguous basin membership at %dx%d; doubling resolution", res, res)
            res *= 2

    kind, reason = _decide(assignments)
    if kind == "unresolved":
        logger.info("hyperbolic type unresolved: %s", reason)
    return HyperbolicTypeReport(kind, tuple(cycles), tuple(assignments), reason, (res, res), window)
