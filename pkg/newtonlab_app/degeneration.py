"""Numeric sampling of degenerating families, checked against their limits over 𝕃.

A FamilySample holds the complex maps N_t for a decreasing list of t
together with the coefficient limit (holes kept). Cycles are continued in t
by nearest-point matching, their limits extrapolated to t = 0 over the last
three samples (Richardson in a fractional power of t), and the limit
sets compared with the holes of the limit map.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import config
from .basins import MAX_RETRIES, UNRESOLVED, Target, Window, basin_raster, classify_hyperbolic_type
from .berkovich import (
    GAUSS,
    FixTree,
    RationalMapOverL,
    analyze_family,
    build_fix_tree,
    induced_newton_from_roots,
    reduction,
)
from .complex_rational import HoleDecomposition, HomogeneousRationalMap, evaluate_affine, extract_holes
from .epstein import (
    PARABOLIC_ATTRACTING,
    PARABOLIC_INDIFFERENT,
    CycleReport,
    attracting_cycles_from_critical_orbits,
    find_cycles,
)
from .errors import NewtonLabError, ParseError
from .newton_construct import NewtonMap, classify_critical_points, newton_coefficients, newton_from_roots, per2_slice
from .puiseux import PuiseuxSeries, as_series

logger = logging.getLogger(__name__)

DEFAULT_T_VALUES = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
HOLE_MATCH = 1e-6
REFINE_DEPTH = 3
SHADOW_TOL = 0.2
RICHARDSON_EXPONENTS = tuple(sorted({Fraction(p, k) for k in range(1, 5) for p in range(1, 3 * k + 1)}))


# =========================
# Family specs
# =========================

@dataclass(frozen=True)
class FamilySpec:
    roots: tuple
    negate: bool = False
    text: str = ""

    @classmethod
    def parse(cls, text: str, truncation=None, negate: bool = False) -> "FamilySpec":
        """"r = t; s = 1/2" (roots 0, 1, r, s) or "roots = -1, -t, 0, t, 1"."""
        values: dict[str, str] = {}
        for part in text.split(";"):
            if not part.strip():
                continue
            if "=" not in part:
                raise ParseError(f"expected name = series in {part!r}")
            name, expr = part.split("=", 1)
            values[name.strip().lower()] = expr.strip()
        if "roots" in values:
            roots = tuple(as_series(x.strip(), truncation) for x in values["roots"].split(",") if x.strip())
        elif {"r", "s"} <= set(values):
            r = as_series(values["r"], truncation)
            s = as_series(values["s"], truncation)
            roots = (PuiseuxSeries.zero(r.truncation), PuiseuxSeries.constant(1.0, r.truncation), r, s)
        else:
            raise ParseError(f"family {text!r} names neither r and s nor roots")
        return cls(roots, negate, text)

    @property
    def pair(self) -> Optional[tuple[PuiseuxSeries, PuiseuxSeries]]:
        if len(self.roots) == 4 and self.roots[0].is_zero and (self.roots[1] - 1).is_zero:
            return self.roots[2], self.roots[3]
        return None


# =========================
# Samples
# =========================

@dataclass
class FamilySample:
    t_values: list
    maps: list
    newton: list
    limit: HomogeneousRationalMap
    holes: HoleDecomposition
    spec: Optional[FamilySpec] = None
    series_map: Optional[RationalMapOverL] = None
    gap: Fraction = Fraction(1)
    label: str = ""
    dropped: list = field(default_factory=list)
    builder: Optional[Callable] = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        return self.limit.formal_degree

    @property
    def finite_holes(self) -> list[complex]:
        return [p.affine for p in self.holes.hole_points() if not p.is_infinity]

    def at(self, t: float) -> tuple[HomogeneousRationalMap, Optional[NewtonMap]]:
        if self.builder is None:
            raise NewtonLabError("this sample was built from explicit maps and cannot be refined in t")
        return self.builder(t)

    def is_hole(self, z: complex, tol: float = HOLE_MATCH) -> bool:
        return any(abs(z - h) <= tol for h in self.finite_holes)


def _negated(f: HomogeneousRationalMap) -> HomogeneousRationalMap:
    return HomogeneousRationalMap.from_coefficients(-f.num_array, f.den_array, exact=False)


def coefficient_gap(f: RationalMapOverL) -> Fraction:
    """Smallest positive exponent among the normalized coefficients: N_t - red(N) = O(t^gap)."""
    g = f.normalized()
    exps = [q for c in g.coefficients for q, _ in c.terms if q > 0]
    if exps:
        return min(exps)
    return min(c.truncation for c in g.coefficients)


def _checked_t_values(t_values) -> list[float]:
    ts = sorted((float(t) for t in (DEFAULT_T_VALUES if t_values is None else t_values)), reverse=True)
    if not ts or ts[-1] <= 0:
        raise ValueError("t values must be positive")
    return ts


def _collect(ts: list[float], builder: Callable, label: str):
    maps, newton, kept, dropped = [], [], [], []
    for t in ts:
        try:
            f, N = builder(t)
        except NewtonLabError as e:
            logger.warning("dropping t=%g from %s: %s", t, label or "family", e)
            dropped.append(t)
            continue
        kept.append(t)
        maps.append(f)
        newton.append(N)
    if not kept:
        raise NewtonLabError(f"every sampled t of {label or 'the family'} was dropped")
    return kept, maps, newton, dropped


def sample_family(spec, t_values=None, truncation=None) -> FamilySample:
    """Complex Newton maps of a series family at each t, with the reduction as limit."""
    if isinstance(spec, str):
        spec = FamilySpec.parse(spec, truncation)
    elif not isinstance(spec, FamilySpec):
        spec = FamilySpec(tuple(as_series(x, truncation) for x in spec))
    ts = _checked_t_values(t_values)
    series_map = induced_newton_from_roots(spec.roots, negate=spec.negate)
    limit = reduction(series_map)

    def builder(t: float):
        N = newton_from_roots([x.evaluate_at(t) for x in spec.roots])
        f = N.map.numeric()
        return (_negated(f) if spec.negate else f), N

    label = spec.text or ", ".join(str(x) for x in spec.roots)
    kept, maps, newton, dropped = _collect(ts, builder, label)
    return FamilySample(kept, maps, newton, limit, extract_holes(limit), spec, series_map,
                        coefficient_gap(series_map), label, dropped, builder)


def sample_maps(t_values: Sequence[float], maps: Sequence[HomogeneousRationalMap],
                limit_map: HomogeneousRationalMap, gap=1, label: str = "") -> FamilySample:
    """A sample from explicitly given maps, e.g. a synthetic family."""
    if len(t_values) != len(maps):
        raise ValueError("one map per t value is needed")
    order = sorted(range(len(maps)), key=lambda i: -float(t_values[i]))
    return FamilySample(
        [float(t_values[i]) for i in order],
        [maps[i].numeric() for i in order],
        [None] * len(maps),
        limit_map,
        extract_holes(limit_map),
        gap=Fraction(gap),
        label=label,
    )


def _per2_series_coefficients(c: PuiseuxSeries) -> list[PuiseuxSeries]:
    twelfth = 1 / 12
    zero = PuiseuxSeries.zero(c.truncation)
    return [
        (3 - c.scaled(4)).scaled(twelfth),
        (c.scaled(4) - 3).scaled(twelfth),
        zero,
        c.scaled(-1 / 6),
        PuiseuxSeries.constant(twelfth, c.truncation),
    ]


def sample_per2_family(c_of_t, t_values=None, truncation=None) -> FamilySample:
    """Per_2(0) slice along a series path c(t); the 0 <-> 1 cycle persists for every t."""
    c = as_series(c_of_t, truncation)
    ts = _checked_t_values(t_values)
    num, den = newton_coefficients(_per2_series_coefficients(c))
    series_map = RationalMapOverL(tuple(num), tuple(den)).normalized()
    limit = reduction(series_map)

    def builder(t: float):
        N = per2_slice(c.evaluate_at(t))
        return N.map.numeric(), N

    label = f"per2 c = {c}"
    kept, maps, newton, dropped = _collect(ts, builder, label)
    return FamilySample(kept, maps, newton, limit, extract_holes(limit), None, series_map,
                        coefficient_gap(series_map), label, dropped, builder)


# =========================
# Cycle tracks
# =========================

@dataclass
class CycleTrack:
    period: int
    t_values: list
    positions: list
    reports: list
    limits: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    limit_set: list = field(default_factory=list)
    colliding_holes: list = field(default_factory=list)
    hole_phases: list = field(default_factory=list)
    lost: bool = False
    note: str = ""

    @property
    def hole_collision(self) -> bool:
        return bool(self.colliding_holes)

    @property
    def relation(self) -> str:
        """"disjoint", "proper" ({hole} ⊊ Γ) or "equal" (Γ made of holes only)."""
        if not self.colliding_holes:
            return "disjoint"
        if len(self.hole_phases) == len(self.limits):
            return "equal"
        return "proper"

    def contains(self, z: complex, tol: float = HOLE_MATCH) -> bool:
        return any(abs(z - g) <= tol for g in self.limit_set)

    def only(self, z: complex, tol: float = HOLE_MATCH) -> bool:
        return bool(self.limit_set) and all(abs(z - g) <= tol for g in self.limit_set)


def _neville_at_zero(s: Sequence[float], y: Sequence[complex]) -> tuple[complex, complex]:
    """Value at s = 0 of the interpolant through all points, and through all but the first."""
    p = [complex(v) for v in y]
    n = len(p)
    lower = p[-1]
    for m in range(1, n):
        if m == n - 1:
            lower = p[1]
        for i in range(n - m):
            p[i] = (s[i] * p[i + 1] - s[i + m] * p[i]) / (s[i] - s[i + m])
    return p[0], lower


def _richardson(ts: Sequence[float], seq: Sequence[complex], exponent: Fraction) -> tuple[complex, float]:
    s = [float(t) ** float(exponent) for t in ts[-3:]]
    limit, lower = _neville_at_zero(s, seq[-3:])
    return limit, abs(limit - lower)


def _extrapolate(ts: Sequence[float], seq: Sequence[complex]) -> tuple[complex, float]:
    """Richardson extrapolation to t = 0 over the last three samples.

    Cycle points are Puiseux series in t, so the expansion variable is t^e.
    e is the member of RICHARDSON_EXPONENTS whose spacing ratio
    (s2 - s1)/(s1 - s0) best matches the observed ratio of differences.
    The error estimate is the change from the two-point extrapolant.
    """
    if len(ts) != len(seq):
        raise ValueError("one t value per sample")
    if len(seq) == 1:
        return complex(seq[0]), math.inf
    if len(seq) == 2:
        return _richardson(ts, seq, Fraction(1))
    t0, t1, t2 = (float(t) for t in ts[-3:])
    y0, y1, y2 = (complex(y) for y in seq[-3:])
    d1, d2 = y1 - y0, y2 - y1
    floor = 1e-15 * max(1.0, abs(y2))
    if abs(d1) <= floor or abs(d2) <= floor:
        return y2, abs(d2)
    observed = math.log(abs(d2) / abs(d1))

    def mismatch(e: Fraction) -> float:
        s0, s1, s2 = t0 ** float(e), t1 ** float(e), t2 ** float(e)
        return abs(observed - math.log(abs((s2 - s1) / (s1 - s0))))

    exponent = min(RICHARDSON_EXPONENTS, key=mismatch)
    limit, err = _richardson(ts, seq, exponent)
    logger.debug("extrapolated in t^%s: %s (+-%.1e)", exponent, limit, err)
    return limit, err


def _min_gap(points: Sequence[complex]) -> float:
    if len(points) < 2:
        return math.inf
    return min(abs(a - b) for i, a in enumerate(points) for b in points[i + 1:])


def _aligned(prev: Sequence[complex], cycle: CycleReport) -> tuple[list[complex], float]:
    pts = cycle.affine_points
    n = len(pts)
    best, best_shift = math.inf, 0
    for shift in range(n):
        move = max(abs(pts[(i + shift) % n] - prev[i]) for i in range(n))
        if move < best:
            best, best_shift = move, shift
    return [pts[(i + best_shift) % n] for i in range(n)], best


def _candidates(f: HomogeneousRationalMap, N: Optional[NewtonMap], period: int,
                horizon: Optional[int]) -> list[CycleReport]:
    """Attracting cycles of exact period `period`, excluding roots and cycles through ∞."""
    cycles = attracting_cycles_from_critical_orbits(f, horizon, max_period=period)
    if f.formal_degree ** period + 1 <= config.SOLVER_CAP:
        try:
            direct = find_cycles(f, max_period=period)
        except NewtonLabError as e:
            logger.warning("direct cycle search failed (%s); keeping critical-orbit cycles", e)
            direct = []
        for cyc in direct:
            if not any(c.period == cyc.period and c.contains(cyc.points[0]) for c in cycles):
                cycles.append(cyc)
    roots = N.numeric_roots if N is not None else np.array([], dtype=complex)
    out = []
    for cyc in cycles:
        if cyc.period != period or not cyc.is_attracting:
            continue
        if any(p.is_infinity for p in cyc.points):
            continue
        if period == 1 and roots.size and np.min(np.abs(roots - cyc.points[0].affine)) <= config.CYCLE_MATCH:
            continue
        out.append(cyc)
    return out


def _step(prev: list[complex], t_prev: float, t_new: float, sample: FamilySample, period: int,
          horizon: Optional[int], maps: Optional[tuple], depth: int = 0):
    """Continue one cycle from t_prev to t_new; returns (report, positions) or None."""
    f, N = maps if maps is not None else sample.at(t_new)
    best = None
    for cyc in _candidates(f, N, period, horizon):
        pts, move = _aligned(prev, cyc)
        if best is None or move < best[2]:
            best = (cyc, pts, move)
    if best is not None and best[2] <= 0.5 * _min_gap(prev):
        return best[0], best[1]
    if depth >= REFINE_DEPTH or sample.builder is None:
        return None
    t_mid = math.sqrt(t_prev * t_new)
    try:
        mid = _step(prev, t_prev, t_mid, sample, period, horizon, None, depth + 1)
    except NewtonLabError:
        return None
    if mid is None:
        return None
    return _step(mid[1], t_mid, t_new, sample, period, horizon, None, depth + 1)


def _finish(track: CycleTrack, sample: FamilySample) -> CycleTrack:
    for i in range(track.period):
        limit, err = _extrapolate(track.t_values, [pos[i] for pos in track.positions])
        track.limits.append(limit)
        track.errors.append(err)
    for limit, err in zip(track.limits, track.errors):
        tol = max(10 * err, 1e-7) if math.isfinite(err) else 1e-7
        if not any(abs(limit - g) <= tol for g in track.limit_set):
            track.limit_set.append(limit)
    for i, (limit, err) in enumerate(zip(track.limits, track.errors)):
        tol = max(10 * err, HOLE_MATCH) if math.isfinite(err) else HOLE_MATCH
        for h in sample.finite_holes:
            if abs(limit - h) <= tol:
                track.hole_phases.append(i)
                if not any(abs(h - c) <= HOLE_MATCH for c in track.colliding_holes):
                    track.colliding_holes.append(h)
                break
    return track


def track_limit_cycles(sample: FamilySample, period: int, horizon: Optional[int] = None) -> list[CycleTrack]:
    """Continue every free attracting cycle of the given period from the largest t down."""
    if period < 1:
        raise ValueError("period must be >= 1")
    start = _candidates(sample.maps[0], sample.newton[0], period, horizon)
    if not start:
        raise NewtonLabError(f"no attracting cycle of period {period} at t = {sample.t_values[0]:g}")
    tracks = [CycleTrack(period, [sample.t_values[0]], [list(c.affine_points)], [c]) for c in start]
    for k in range(1, len(sample.t_values)):
        t_prev, t_new = sample.t_values[k - 1], sample.t_values[k]
        for track in tracks:
            if track.lost:
                continue
            try:
                found = _step(track.positions[-1], t_prev, t_new, sample, period, horizon,
                              (sample.maps[k], sample.newton[k]))
            except NewtonLabError as e:
                found = None
                track.note = str(e)
            if found is None:
                track.lost = True
                track.note = track.note or f"continuation rejected between t={t_prev:g} and t={t_new:g}"
                logger.warning("cycle track lost: %s", track.note)
                continue
            report, pts = found
            track.t_values.append(t_new)
            track.positions.append(pts)
            track.reports.append(report)
    return [_finish(track, sample) for track in tracks]


# =========================
# Limit dichotomies
# =========================

@dataclass(frozen=True)
class DichotomyReport:
    tag: str
    holds: bool
    meets_hole: bool
    relations: tuple
    reason: str = ""


def limit_dichotomy(tracks: Sequence[CycleTrack], tag: str) -> DichotomyReport:
    """Where the limit sets of the free cycles may sit for a type-D family of the given type."""
    relations = tuple(t.relation for t in tracks)
    meets = any(t.hole_collision for t in tracks)

    def proper_at(track: CycleTrack, a: complex) -> bool:
        return track.contains(a) and not track.only(a)

    if tag == "type1":
        holds = any(proper_at(t, 0j) for t in tracks)
        reason = "" if holds else "no limit set strictly contains the hole 0"
    elif tag == "type2":
        holds = any(proper_at(t, a) for t in tracks for a in (0j, 1 + 0j))
        reason = "" if holds else "no limit set strictly contains 0 or 1"
    elif tag == "type3a":
        holds = any(t.contains(0j) for t in tracks)
        reason = "" if holds else "no limit set contains 0"
    elif tag == "type3b":
        holds = len(tracks) >= 2 and all(t.contains(0j) for t in tracks)
        if holds and any(t.only(0j) for t in tracks):
            holds = any(proper_at(t, 0j) for t in tracks)
        reason = "" if holds else "both limit sets must contain 0, one strictly"
    else:
        holds = not meets
        reason = "" if holds else "a nondegenerate family cannot collide with holes"
    if tag != "nondegenerate" and not meets:
        holds, reason = False, "no limit set meets a hole"
    return DichotomyReport(tag, holds, meets, relations, reason)


# =========================
# Basin shrinkage
# =========================

@dataclass
class ShrinkReport:
    applicable: bool
    reason: str = ""
    hole: Optional[complex] = None
    phase: Optional[int] = None
    other_phase: Optional[int] = None
    t_values: list = field(default_factory=list)
    diameters: list = field(default_factory=list)
    separations: list = field(default_factory=list)
    neighbourhood: float = 0.0
    monotone: bool = False
    separated: bool = False

    @property
    def ok(self) -> bool:
        return not self.applicable or (self.monotone and self.separated)


def _phase_in(report: CycleReport, z: complex) -> int:
    return int(np.argmin([abs(p - z) for p in report.affine_points]))


def _component_mask(N: NewtonMap, cycle: CycleReport, phase: int, window: Window, resolution: int):
    """Pixels of the Fatou component of cycle point `phase`, with its pixel grid; None if unresolved."""
    z0 = cycle.points[phase].affine
    res = resolution
    for attempt in range(MAX_RETRIES + 1):
        raster = basin_raster(N, window, (res, res), free_cycles=[cycle])
        pix = window.pixel_of(z0, raster.resolution)
        if pix is not None and raster.labels[pix] == raster.target_id(Target("cycle", 0, phase)):
            return raster.components == raster.components[pix], window.grid(raster.resolution)
        if pix is not None and raster.labels[pix] != UNRESOLVED:
            return None
        res *= 2
        logger.warning("cycle pixel unresolved; retrying basin raster at %d^2", res)
    return None


def _touches_border(mask: np.ndarray) -> bool:
    return bool(mask[0].any() or mask[-1].any() or mask[:, 0].any() or mask[:, -1].any())


def basin_shrink_check(sample: FamilySample, track: CycleTrack, resolution: int = 192,
                       max_doublings: int = 4) -> ShrinkReport:
    """Diameter of the Fatou component at the hole-bound cycle point, per t."""
    if not track.hole_phases:
        return ShrinkReport(False, "the cycle does not collide with a hole")
    if track.relation == "equal":
        return ShrinkReport(False, "the whole cycle collides with the hole")
    if any(N is None for N in sample.newton):
        return ShrinkReport(False, "basin rasters need Newton maps at every sample")
    i0 = track.hole_phases[0]
    i1 = next(i for i in range(track.period) if i not in track.hole_phases)
    hole = next(h for h in sample.finite_holes if abs(track.limits[i0] - h) <= max(10 * track.errors[i0], HOLE_MATCH))
    radius_v = 0.25 * abs(track.limits[i1] - hole)
    report = ShrinkReport(True, hole=hole, phase=i0, other_phase=i1, neighbourhood=radius_v)

    for t, pts, cyc in zip(track.t_values, track.positions, track.reports):
        N = sample.newton[sample.t_values.index(t)]
        z0, z1 = pts[i0], pts[i1]
        p0, p1 = _phase_in(cyc, z0), _phase_in(cyc, z1)

        scale = float(np.min(np.abs(N.numeric_roots - z0)))
        half = max(2 * scale, 1e-9)
        diameter = None
        for _ in range(max_doublings + 1):
            found = _component_mask(N, cyc, p0, Window.square(z0, half), resolution)
            if found is None:
                break
            mask, grid = found
            if not _touches_border(mask):
                pts_in = grid[mask]
                diameter = float(np.hypot(np.ptp(pts_in.real), np.ptp(pts_in.imag)))
                break
            half *= 2
        report.t_values.append(t)
        report.diameters.append(diameter)

        found = _component_mask(N, cyc, p1, Window.around([hole, z1], pad=1.5), resolution)
        if found is None:
            report.separations.append(None)
        else:
            mask, grid = found
            report.separations.append(float(np.min(np.abs(grid[mask] - hole))))

    diam = report.diameters
    report.monotone = all(d is not None for d in diam) and all(b < a for a, b in zip(diam, diam[1:]))
    report.separated = all(s is not None and s >= radius_v for s in report.separations[1:])
    if not report.monotone:
        logger.warning("component diameters %s at the hole are not decreasing", diam)
    return report


# =========================
# Parabolic collisions
# =========================

@dataclass(frozen=True)
class CollisionReport:
    status: str  # "parabolic", "disjoint", "at-hole" or "inconsistent"
    meeting: Optional[complex] = None
    cycle: Optional[CycleReport] = None
    classification: Optional[str] = None
    attracting_side: Optional[bool] = None
    note: str = ""


def parabolic_collision_check(sample: FamilySample, first: CycleTrack, second: CycleTrack) -> CollisionReport:
    """Two attracting cycles with meeting limits must meet at a parabolic cycle of the reduced map."""
    tol = max([HOLE_MATCH] + [10 * e for e in first.errors + second.errors if math.isfinite(e)])
    meeting = next((a for a in first.limit_set for b in second.limit_set if abs(a - b) <= tol), None)
    if meeting is None:
        return CollisionReport("disjoint")
    if sample.is_hole(meeting, tol):
        return CollisionReport("at-hole", meeting, note="limits meet at a hole; the reduced map says nothing there")
    g = sample.holes.reduced_map
    period = len(first.limit_set)
    try:
        cycles = find_cycles(g, max_period=period)
    except NewtonLabError as e:
        return CollisionReport("inconsistent", meeting, note=f"cycle search on the reduced map failed: {e}")
    near = [c for c in cycles if c.period == period and min(abs(p - meeting) for p in c.affine_points) <= max(tol, 1e-4)]
    if not near:
        return CollisionReport("inconsistent", meeting, note="the common limit is not a cycle of the reduced map")
    cycle = near[0]
    if not cycle.is_parabolic:
        return CollisionReport("inconsistent", meeting, cycle, cycle.classification,
                           note="merging attracting cycles must limit on a parabolic cycle")
    side = cycle.classification in (PARABOLIC_ATTRACTING, PARABOLIC_INDIFFERENT)
    if not side:
        logger.warning("attracting cycles merged at a %s cycle", cycle.classification)
    return CollisionReport("parabolic", meeting, cycle, cycle.classification, side)


# =========================
# Convergence and Berkovich cross-checks
# =========================

@dataclass(frozen=True)
class UniformConvergenceReport:
    t_values: tuple
    deviations: tuple
    bounds: tuple
    points_used: int

    @property
    def ok(self) -> bool:
        return all(d <= b for d, b in zip(self.deviations, self.bounds))


def uniform_convergence_check(sample: FamilySample, grid: int = 20, distance: float = 0.2,
                              window: tuple = (-1.5, 1.5, -1.5, 1.5)) -> UniformConvergenceReport:
    """max |N_t(z) - N̂(z)| over a grid kept `distance` away from holes and poles of N̂.

    Deviations are measured in (1 + |N̂|)^-2 units and multiplied by
    min(1, |H(z)|), H the hole polynomial: the rate degrades like 1/|H| near holes.
    """
    g = sample.holes.reduced_map
    xmin, xmax, ymin, ymax = window
    zs = (np.linspace(xmin, xmax, grid)[None, :] + 1j * np.linspace(ymin, ymax, grid)[:, None]).ravel()
    den = g.den_array
    poles = np.roots(den[::-1]) if np.count_nonzero(den) > 1 else np.array([], dtype=complex)
    avoid = np.concatenate([np.array(sample.finite_holes, dtype=complex), poles])
    if avoid.size:
        keep = np.min(np.abs(zs[:, None] - avoid[None, :]), axis=1) >= distance
        zs = zs[keep]
    limit_values = evaluate_affine(g, zs)
    weight = (1 + np.abs(limit_values)) ** 2
    near_hole = np.ones(zs.shape)
    for point, mult in sample.holes.holes:
        if not point.is_infinity:
            near_hole *= np.abs(zs - point.affine) ** mult
    weight /= np.minimum(1.0, near_hole)
    deviations, bounds = [], []
    for t, f in zip(sample.t_values, sample.maps):
        diff = np.abs(evaluate_affine(f, zs) - limit_values) / weight
        deviations.append(float(np.max(diff)) if diff.size else 0.0)
        bounds.append(10 * t ** float(sample.gap))
    return UniformConvergenceReport(tuple(sample.t_values), tuple(deviations), tuple(bounds), int(zs.size))


@dataclass
class ConsistencyReport:
    tag: Optional[str]
    coefficient_deviations: list = field(default_factory=list)
    coefficient_bounds: list = field(default_factory=list)
    coefficient_ok: bool = False
    decay_ok: bool = False
    critical_rows: list = field(default_factory=list)
    critical_ok: Optional[bool] = None
    critical_fates_ok: Optional[bool] = None
    shadow_rows: list = field(default_factory=list)
    shadow_ok: Optional[bool] = None
    offending: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.offending


def _coefficient_rows(sample: FamilySample) -> tuple[list, list]:
    v0 = sample.limit.coefficient_vector()
    j = int(np.argmax(np.abs(v0)))
    base = v0 / v0[j]
    size = float(np.max(np.abs(base)))
    deviations, bounds = [], []
    for t, f in zip(sample.t_values, sample.maps):
        v = f.coefficient_vector()
        deviations.append(float(np.max(np.abs(v / v[j] - base))))
        bounds.append(10 * t ** float(sample.gap) * max(1.0, size))
    return deviations, bounds


def _estimated_valuation(values: Sequence[complex], ts: Sequence[float]) -> float:
    mags = np.abs(np.asarray(values, dtype=complex))
    if np.any(mags == 0):
        return math.inf
    return float(np.polyfit(np.log(ts), np.log(mags), 1)[0])


def _anchor_name(tree: FixTree, index: int) -> str:
    v = tree.vertices[index]
    return v.joins[0].split("∨")[0] if v.joins else "0"


def _shadow_projection(track: CycleTrack, phase: int, tree: FixTree) -> tuple[str, bool]:
    """Numeric stand-in for π_Hfix of a cycle point: valuations read off the last samples."""
    ts = track.t_values[-3:]
    pos = [p[phase] for p in track.positions[-3:]]
    if len(ts) < 2:
        return "too few samples", False

    def v_to(name: str) -> float:
        leaf = tree.leaves[name]
        return _estimated_valuation([z - leaf.evaluate_at(t) for z, t in zip(pos, ts)], ts)

    holding = [i for i, v in enumerate(tree.vertices) if v_to(_anchor_name(tree, i)) >= float(v.disk.q) - SHADOW_TOL]
    if not holding:
        return f"{GAUSS}–∞", False
    w = max(holding, key=lambda i: tree.vertices[i].disk.q)
    qw = float(tree.vertices[w].disk.q)
    inner = [_anchor_name(tree, i) for i, v in enumerate(tree.vertices)
             if v.disk.q > tree.vertices[w].disk.q and tree.vertices[w].disk.contains_disk(v.disk)]
    inner += [name for name, leaf in tree.leaves.items() if tree.vertices[w].disk.contains(leaf)]
    deeper = [name for name in inner if v_to(name) > qw + SHADOW_TOL]
    if deeper:
        return f"{tree.vertices[w].name}–{deeper[0]}", False
    return tree.vertices[w].name, w in tree.v_rep


def compare_with_berkovich(sample: FamilySample, tracks: Sequence[CycleTrack] = ()) -> ConsistencyReport:
    """Numeric limits against the predictions of the induced map over 𝕃."""
    pair = sample.spec.pair if sample.spec is not None else None
    report = ConsistencyReport(None)

    report.coefficient_deviations, report.coefficient_bounds = _coefficient_rows(sample)
    report.coefficient_ok = all(d <= b for d, b in zip(report.coefficient_deviations, report.coefficient_bounds))
    if not report.coefficient_ok:
        report.offending.append("coefficient limit")
    ratios_ok = []
    devs, ts = report.coefficient_deviations, sample.t_values
    for k in range(1, len(devs)):
        if devs[k - 1] > 1e-11 and devs[k] > 1e-11:
            ratios_ok.append(devs[k] / devs[k - 1] <= 2 * (ts[k] / ts[k - 1]) ** float(sample.gap))
    report.decay_ok = all(ratios_ok)
    if not report.decay_ok:
        report.offending.append("coefficient decay")

    if pair is None or sample.spec.negate:
        return report

    analysis = analyze_family(*pair)
    report.tag = analysis.tag
    if not analysis.degeneration.is_degenerate:
        return report

    t_min, N = sample.t_values[-1], sample.newton[-1]
    numeric = [cp.location for cp in classify_critical_points(N) if cp.kind == "additional" or cp.additional]
    rows = []
    for c in analysis.critical_points:
        value = c.evaluate_at(t_min)
        nearest = min(numeric, key=lambda z: abs(z - value)) if numeric else None
        gap = abs(nearest - value) if nearest is not None else math.inf
        rows.append({
            "series": str(c),
            "reduction": complex(c.reduce()),
            "numeric": nearest,
            "distance": gap,
            "bound": 1e-6 + 10 * t_min ** float(min(c.truncation, 4)),
        })
    report.critical_rows = rows
    report.critical_ok = all(r["distance"] <= r["bound"] for r in rows)
    if not report.critical_ok:
        report.offending.append("critical points")
    report.critical_fates_ok = analysis.checks.get("critical_fates")
    if not report.critical_fates_ok:
        report.offending.append("critical_fates")

    if tracks:
        tree = build_fix_tree(*pair)
        shadow = []
        for track in tracks:
            if track.period < 2 or track.lost:
                continue
            for i, limit in enumerate(track.limits):
                if i in track.hole_phases:
                    where, ok = _shadow_projection(track, i, tree)
                else:
                    near_leaf = [name for name, leaf in tree.leaves.items() if abs(limit - leaf.reduce()) <= 1e-4]
                    where, ok = (GAUSS, not near_leaf)
                shadow.append({"period": track.period, "phase": i, "limit": limit, "projection": where, "ok": ok})
        report.shadow_rows = shadow
        report.shadow_ok = all(r["ok"] for r in shadow)
        if not report.shadow_ok:
            report.offending.append("cycle projections")
    if report.offending:
        logger.warning("berkovich comparison for %s fails: %s", sample.label, report.offending)
    return report


def type_d_hypothesis(sample: FamilySample, resolution: int = 256) -> list[str]:
    """Hyperbolic type of each sampled quartic; the two-free-cycle results assume all are D."""
    out = []
    for t, N in zip(sample.t_values, sample.newton):
        if N is None or N.degree != 4:
            out.append("n/a")
            continue
        out.append(classify_hyperbolic_type(N, resolution=resolution).type)
        logger.info("t=%g classified %s", t, out[-1])
    return out
