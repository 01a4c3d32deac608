"""Cycles and Epstein's fixed-point calculus.

For a cycle of period n every quantity is computed for f^n at the first
cycle point: multiplier ρ, multiplicity m, holomorphic index 𝔦 (contour
integral of 1/(z - f^n(z))) and résidu itératif 𝔗 = m/2 - 𝔦. Iterates are
evaluated pointwise on the contour, never expanded, so parabolic cycles
with large rotation denominators stay cheap.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy

from . import config
from .complex_rational import (
    HomogeneousRationalMap,
    ProjectivePoint,
    Z,
    _exact_poly,
    as_point,
    conjugate_by_inversion,
    critical_points,
    derivative_affine,
    evaluate,
    evaluate_affine,
    evaluate_exact,
    fixed_points,
    iterate,
    multiplier_at,
    to_exact,
)
from .errors import (
    IndexQuadratureError,
    NewtonLabError,
    NotFixedError,
    ParseError,
    SolverCapError,
)

logger = logging.getLogger(__name__)

SUPERATTRACTING_TOL = 1e-9
INDIFFERENT_TOL = 1e-8
RESIDU_SIGN_TOL = 1e-6
MACROSCOPIC = 1e-3
NEAR_LIMIT = 1e-6

SUPERATTRACTING = "superattracting"
ATTRACTING = "attracting"
IRRATIONALLY_INDIFFERENT = "irrationally-indifferent"
REPELLING = "repelling"
PARABOLIC_ATTRACTING = "parabolic-attracting"
PARABOLIC_INDIFFERENT = "parabolic-indifferent"
PARABOLIC_REPELLING = "parabolic-repelling"

NONREPELLING = {SUPERATTRACTING, ATTRACTING, IRRATIONALLY_INDIFFERENT,
                PARABOLIC_ATTRACTING, PARABOLIC_INDIFFERENT, PARABOLIC_REPELLING}


# =========================
# Reports
# =========================

@dataclass(frozen=True)
class CycleReport:
    points: tuple
    period: int
    multiplier: complex
    multiplicity: int
    index: complex
    residu: complex
    classification: str
    degeneracy: Optional[int] = None
    rotation: Optional[tuple[int, int]] = None
    # multiplicity and résidu of f^(nq) for parabolic cycles
    iterate_multiplicity: Optional[int] = None
    iterate_residu: Optional[complex] = None

    @property
    def affine_points(self) -> list[complex]:
        return [p.affine for p in self.points]

    @property
    def is_parabolic(self) -> bool:
        return self.classification.startswith("parabolic")

    @property
    def is_attracting(self) -> bool:
        return self.classification in (SUPERATTRACTING, ATTRACTING)

    def contains(self, p, tol: float = None) -> bool:
        p = as_point(p)
        tol = config.CYCLE_MATCH if tol is None else tol
        return any(q.distance(p) <= tol for q in self.points)

    def distance_to(self, p: ProjectivePoint) -> float:
        return min(q.distance(p) for q in self.points)


@dataclass(frozen=True)
class CriticalOrbit:
    point: ProjectivePoint
    status: str  # "finite", "infinite" or "unresolved"
    target: Optional[int] = None  # index into FsiReport.cycles
    steps: int = 0
    note: str = ""


@dataclass(frozen=True)
class FsiReport:
    gamma_per_cycle: tuple
    gamma_total: int
    delta: int
    satisfied: Optional[bool]
    orbits: tuple = ()
    status: str = "ok"

    @property
    def cycles(self) -> list[CycleReport]:
        return [c for c, _ in self.gamma_per_cycle]


# =========================
# Charts and pointwise iteration
# =========================

def _chart(f: HomogeneousRationalMap, p: ProjectivePoint) -> tuple[HomogeneousRationalMap, complex]:
    if abs(p.y) < abs(p.x) * 1e-3:
        return conjugate_by_inversion(f.numeric()), p.y / p.x
    return f.numeric(), p.affine


def _iterate_with_derivative(g: HomogeneousRationalMap, z, k: int):
    z = np.asarray(z, dtype=complex)
    der = np.ones_like(z)
    with np.errstate(all="ignore"):
        for _ in range(k):
            der = der * derivative_affine(g, z)
            z = evaluate_affine(g, z)
    return z, der


def _cycle_multiplier(f: HomogeneousRationalMap, p0: ProjectivePoint, n: int) -> complex:
    g, w0 = _chart(f, p0)
    _, der = _iterate_with_derivative(g, np.array([w0]), n)
    rho = complex(der[0])
    if np.isfinite(rho):
        return rho
    # the orbit passes through the chart's point at infinity
    return complex(multiplier_at(iterate(f, n), p0))


def _rotation(rho: complex) -> Optional[tuple[int, int]]:
    theta = (math.atan2(rho.imag, rho.real) / (2 * math.pi)) % 1.0
    frac = Fraction(theta).limit_denominator(config.ROTATION_QMAX)
    if abs(theta - frac) > config.ROTATION_TOL:
        return None
    q = frac.denominator
    return frac.numerator % q, q


def _classify_multiplier(rho: complex) -> str:
    r = abs(rho)
    if r <= SUPERATTRACTING_TOL:
        return SUPERATTRACTING
    if r < 1.0 - INDIFFERENT_TOL:
        return ATTRACTING
    if r > 1.0 + INDIFFERENT_TOL:
        return REPELLING
    return "indifferent"


# =========================
# Contour quadrature
# =========================

def _contour_values(g: HomogeneousRationalMap, center: complex, r: float, k: int):
    nodes = config.QUAD_NODES
    ring = r * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    z = center + ring
    fz, dfz = _iterate_with_derivative(g, z, k)
    with np.errstate(all="ignore"):
        gap = z - fz
        index = np.mean(ring / gap)
        mult = np.mean(ring * (1.0 - dfz) / gap)
    if not (np.isfinite(index) and np.isfinite(mult)):
        return None
    if np.min(np.abs(gap)) <= 1e-14 * max(1.0, abs(center)):
        return None
    return complex(index), complex(mult)


def _initial_radius(f: HomogeneousRationalMap, p0: ProjectivePoint, n: int, cycle_points: Sequence,
                    neighbours: Optional[Sequence[ProjectivePoint]] = None) -> float:
    g, w0 = _chart(f, p0)
    radius = 0.25
    neighbours = list(neighbours or [])
    d = f.formal_degree
    if not neighbours and d ** n + 1 <= config.SOLVER_CAP:
        try:
            neighbours = [rec.location for rec in fixed_points(iterate(f, n))]
        except NewtonLabError as e:
            logger.debug("fixed points of f^%d unavailable for the contour radius: %s", n, e)
    neighbours += list(cycle_points)
    inverted = abs(p0.y) < abs(p0.x) * 1e-3
    for q in neighbours:
        if q.distance(p0) <= config.CYCLE_MATCH:
            continue
        if inverted:
            w = complex(math.inf) if q.x == 0 else q.y / q.x
        else:
            w = q.affine
        if np.isfinite(w):
            radius = min(radius, 0.5 * abs(w - w0))
    return max(radius, config.MIN_RADIUS)


def _stable_quadrature(f: HomogeneousRationalMap, p0: ProjectivePoint, k: int, r0: float,
                       expected_multiplicity: Optional[int] = None) -> tuple[complex, int, float]:
    """Index and multiplicity of f^k at p0, shrinking until r and r/2 agree."""
    g, w0 = _chart(f, p0)
    r = r0
    shrunk = False
    while r >= config.MIN_RADIUS:
        outer = _contour_values(g, w0, r, k)
        inner = _contour_values(g, w0, r / 2, k)
        if outer is not None and inner is not None:
            (i1, m1), (i2, m2) = outer, inner
            m = int(round(m1.real))
            stable = (
                abs(m1 - m) < 1e-3
                and abs(m2 - m) < 1e-3
                and abs(i1 - i2) <= 1e-7 * max(1.0, abs(i1))
                and (expected_multiplicity is None or m == expected_multiplicity)
            )
            if stable:
                if shrunk:
                    logger.debug("index contour shrunk to radius %.2e", r)
                return i1, m, r
        r /= 2
        shrunk = True
    raise IndexQuadratureError(
        f"no stable contour around {p0.as_pair() or 'infinity'} above radius {config.MIN_RADIUS:.0e}"
    )


def _residu_for_iterate(f, p0, k, r0) -> tuple[complex, int]:
    idx, m, _ = _stable_quadrature(f, p0, k, r0)
    return m / 2 - idx, m


# =========================
# Cycle analysis
# =========================

def analyze_cycle(f: HomogeneousRationalMap, points: Sequence,
                  neighbours: Optional[Sequence[ProjectivePoint]] = None) -> CycleReport:
    """CycleReport for given cycle points; neighbours are other fixed points of f^n if known."""
    f = f.numeric()
    pts = tuple(as_point(p) for p in points)
    n = len(pts)
    if n == 0:
        raise ValueError("empty cycle")
    for i, p in enumerate(pts):
        image = evaluate(f, p)
        if image.distance(pts[(i + 1) % n]) > config.CYCLE_MATCH:
            raise NotFixedError(f"point {i} of the cycle does not map to point {(i + 1) % n}")

    rho = _cycle_multiplier(f, pts[0], n)
    kind = _classify_multiplier(rho)
    rotation = None
    if kind == "indifferent":
        rotation = _rotation(rho)
        kind = IRRATIONALLY_INDIFFERENT if rotation is None else "parabolic"
        if rotation is None:
            logger.info("multiplier %s on the unit circle with no rotation of denominator <= %d",
                        rho, config.ROTATION_QMAX)

    r0 = _initial_radius(f, pts[0], n, pts, neighbours)
    expected = None if rotation == (0, 1) else 1
    index, m, radius = _stable_quadrature(f, pts[0], n, r0, expected)
    if m == 1 and abs(1 - rho) > 0:
        closed = 1.0 / (1.0 - rho)
        if abs(index - closed) > 1e-6 * max(1.0, abs(closed)):
            raise IndexQuadratureError(
                f"contour index {index:.8g} disagrees with 1/(1-ρ) = {closed:.8g}"
            )
    residu = m / 2 - index

    if kind != "parabolic":
        return CycleReport(pts, n, rho, m, index, residu, kind)

    _, q = rotation
    if q == 1:
        m_q, residu_q = m, residu
    else:
        residu_q, m_q = _residu_for_iterate(f, pts[0], n * q, radius)
    if (m_q - 1) % q:
        logger.warning("multiplicity %d of f^%d is not 1 mod %d", m_q, n * q, q)
    nu = max(1, (m_q - 1) // q)

    residu_2q, _ = _residu_for_iterate(f, pts[0], 2 * n * q, radius / 2)
    if abs(residu_q - 2 * residu_2q) > 1e-5 * max(1.0, abs(residu_q)):
        logger.warning(
            "résidu itératif does not halve under iteration: %s vs 2 * %s", residu_q, residu_2q
        )

    re = residu_q.real
    if re < -RESIDU_SIGN_TOL:
        kind = PARABOLIC_ATTRACTING
    elif re > RESIDU_SIGN_TOL:
        kind = PARABOLIC_REPELLING
    else:
        kind = PARABOLIC_INDIFFERENT
    return CycleReport(pts, n, rho, m, index, residu, kind, nu, rotation, m_q, residu_q)


def holomorphic_index(f: HomogeneousRationalMap, cycle: CycleReport) -> complex:
    f = f.numeric()
    p0 = cycle.points[0]
    r0 = _initial_radius(f, p0, cycle.period, cycle.points)
    index, m, _ = _stable_quadrature(f, p0, cycle.period, r0)
    if m == 1:
        closed = 1.0 / (1.0 - cycle.multiplier)
        if abs(index - closed) > 1e-6 * max(1.0, abs(closed)):
            raise IndexQuadratureError(f"contour index {index} disagrees with 1/(1-ρ) = {closed}")
    return index


def residu_iteratif(f: HomogeneousRationalMap, cycle: CycleReport) -> complex:
    f = f.numeric()
    p0 = cycle.points[0]
    r0 = _initial_radius(f, p0, cycle.period, cycle.points)
    index, m, radius = _stable_quadrature(f, p0, cycle.period, r0)
    residu = m / 2 - index
    if cycle.is_parabolic and cycle.rotation and cycle.rotation[1] == 1:
        halved, _ = _residu_for_iterate(f, p0, 2 * cycle.period, radius / 2)
        if abs(residu - 2 * halved) > 1e-5 * max(1.0, abs(residu)):
            logger.warning("résidu itératif of f^2 is not half of that of f at %s", p0.as_pair())
    return residu


def cycle_gamma(cycle: CycleReport) -> int:
    kind = cycle.classification
    if kind in (REPELLING, SUPERATTRACTING):
        return 0
    if kind in (ATTRACTING, IRRATIONALLY_INDIFFERENT):
        return 1
    if kind == PARABOLIC_REPELLING:
        return int(cycle.degeneracy)
    return int(cycle.degeneracy) + 1


# =========================
# Cycle search
# =========================

def _in_region(p: ProjectivePoint, region) -> bool:
    if region is None:
        return True
    if p.is_infinity:
        return False
    xmin, xmax, ymin, ymax = region
    z = p.affine
    return xmin <= z.real <= xmax and ymin <= z.imag <= ymax


def _orbit(f: HomogeneousRationalMap, p: ProjectivePoint, n: int) -> list[ProjectivePoint]:
    out = [p]
    for _ in range(n - 1):
        out.append(evaluate(f, out[-1]))
    return out


def _polish(f: HomogeneousRationalMap, p: ProjectivePoint, n: int) -> ProjectivePoint:
    """Newton steps on f^n(z) - z evaluated along the orbit."""
    if p.is_infinity:
        return p
    z = p.affine
    for _ in range(5):
        fz, der = _iterate_with_derivative(f, np.array([z]), n)
        fz, der = complex(fz[0]), complex(der[0])
        if not (np.isfinite(fz) and np.isfinite(der)) or abs(der - 1) < 1e-6:
            break
        step = (fz - z) / (der - 1)
        trial = z + step
        ft, _ = _iterate_with_derivative(f, np.array([trial]), n)
        if abs(complex(ft[0]) - trial) >= abs(fz - z):
            break
        z = trial
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            break
    return ProjectivePoint.finite(z)


def default_max_period(f: HomogeneousRationalMap) -> int:
    d = max(f.formal_degree, 2)
    p = 1
    while d ** (p + 1) + 1 <= config.SOLVER_CAP and p < 3:
        p += 1
    return p


def find_cycles(f: HomogeneousRationalMap, max_period: Optional[int] = None, region=None) -> list[CycleReport]:
    """Every cycle of exact period <= max_period meeting the region."""
    f = f.numeric()
    d = f.formal_degree
    if d < 2:
        raise ValueError("cycle search needs degree >= 2")
    max_period = default_max_period(f) if max_period is None else max_period
    found: list[CycleReport] = []
    for n in range(1, max_period + 1):
        if d ** n + 1 > config.SOLVER_CAP:
            raise SolverCapError(f"period {n} needs degree {d ** n} > solver cap {config.SOLVER_CAP}")
        F = f if n == 1 else iterate(f, n)
        records = fixed_points(F)
        locations = [rec.location for rec in records]
        for rec in records:
            p0 = rec.location if rec.multiplicity > 1 else _polish(f, rec.location, n)
            orbit = _orbit(f, p0, n + 1)
            exact_period = next(
                (k for k in range(1, n + 1) if orbit[k].distance(p0) <= config.CYCLE_MATCH), None
            )
            if exact_period != n:
                continue
            if any(c.period == n and c.contains(p0) for c in found):
                continue
            if not any(_in_region(p, region) for p in orbit[:n]):
                continue
            found.append(analyze_cycle(f, orbit[:n], locations))
    logger.debug("found %d cycle(s) up to period %d", len(found), max_period)
    return found


def attracting_cycles_from_critical_orbits(f: HomogeneousRationalMap, horizon: int = None,
                                           max_period: int = 16) -> list[CycleReport]:
    """Attracting cycles reached by following every critical orbit."""
    f = f.numeric()
    horizon = config.ITER_CAP if horizon is None else horizon
    found: list[CycleReport] = []
    for c, _ in critical_points(f):
        orbit = [c]
        for k in range(1, horizon + 1):
            orbit.append(evaluate(f, orbit[-1]))
            period = next(
                (n for n in range(1, min(max_period, k) + 1)
                 if orbit[k].distance(orbit[k - n]) <= config.TAIL_TOL),
                None,
            )
            if period is None:
                continue
            points = orbit[k - period + 1: k + 1]
            if any(cyc.contains(points[-1]) for cyc in found):
                break
            try:
                report = analyze_cycle(f, points)
            except NewtonLabError as e:
                logger.warning("limit of the critical orbit of %s not analysable: %s", c.as_pair(), e)
                break
            if report.is_attracting:
                found.append(report)
            break
    return found


# =========================
# γ and δ
# =========================

def _merge_cycles(*groups: Sequence[CycleReport]) -> list[CycleReport]:
    out: list[CycleReport] = []
    for group in groups:
        for cyc in group:
            if not any(o.period == cyc.period and o.contains(cyc.points[0]) for o in out):
                out.append(cyc)
    return out


def _exact_critical_points(f: HomogeneousRationalMap) -> list:
    fa, fb = _exact_poly(f.num_coeffs), _exact_poly(f.den_coeffs)
    w = fa.diff(Z) * fb - fa * fb.diff(Z)
    if w.is_zero:
        return []
    out = []
    try:
        found = sympy.roots(w.as_expr(), Z)
    except (NotImplementedError, sympy.PolynomialError):
        return []
    for root in found:
        try:
            out.append(to_exact(root))
        except ParseError:
            continue
    if 2 * f.formal_degree - 2 > w.degree():
        out.append(sympy.oo)
    return out


def _confirm_exact_hit(f: HomogeneousRationalMap, c: ProjectivePoint, steps: int, period: int) -> Optional[bool]:
    """True/False when the hit can be decided exactly, None otherwise."""
    if not f.exact:
        return None
    candidate = None
    for e in _exact_critical_points(f):
        if as_point(e).distance(c) <= 1e-12:
            candidate = e
            break
    if candidate is None:
        return None
    z = candidate
    for _ in range(steps):
        z = evaluate_exact(f, sympy.oo if z == sympy.zoo else z)
    w = z
    for _ in range(period):
        w = evaluate_exact(f, sympy.oo if w == sympy.zoo else w)
    return bool(sympy.expand(w - z) == 0) if z != sympy.zoo else w == sympy.zoo


def _follow(f, c: ProjectivePoint, cycles: list[CycleReport], horizon: int):
    def nearest(p):
        dists = [cyc.distance_to(p) for cyc in cycles]
        j = int(np.argmin(dists))
        return dists[j], j

    if not cycles:
        return CriticalOrbit(c, "unresolved", note="no cycles known"), []
    dist, j = nearest(c)
    if dist <= config.TAIL_TOL:
        return CriticalOrbit(c, "finite", j, 0, "on the cycle"), []
    z = c
    tail = [c]
    prev = dist
    for k in range(1, horizon + 1):
        z = evaluate(f, z)
        dist, j = nearest(z)
        if dist <= config.TAIL_TOL:
            if prev > MACROSCOPIC:
                confirmed = _confirm_exact_hit(f, c, k, cycles[j].period)
                if confirmed is False:
                    logger.warning("numeric hit of %s on a cycle not confirmed exactly", c.as_pair())
                    return CriticalOrbit(c, "infinite", j, k, "near miss"), tail
                return CriticalOrbit(c, "finite", j, k, "lands on the cycle"), []
            return CriticalOrbit(c, "infinite", j, k, "converges"), tail
        if dist > NEAR_LIMIT:
            tail.append(z)
        prev = dist
    if cycles[j].is_parabolic and dist < 1e-2:
        return CriticalOrbit(c, "infinite", j, horizon, "slow convergence to a parabolic cycle"), tail
    return CriticalOrbit(c, "unresolved", None, horizon, f"no convergence in {horizon} steps"), tail


def _same_tail(a: list[ProjectivePoint], b: list[ProjectivePoint]) -> bool:
    if not a or not b:
        return False
    pa = np.array([[p.x, p.y] for p in a])
    pb = np.array([[p.x, p.y] for p in b])
    cross = np.abs(np.outer(pa[:, 0], pb[:, 1]) - np.outer(pa[:, 1], pb[:, 0]))
    return bool(cross.min() <= config.TAIL_TOL)


def gamma_delta(f: HomogeneousRationalMap, critical_orbit_horizon: int = None,
                max_period: Optional[int] = None) -> FsiReport:
    horizon = config.ITER_CAP if critical_orbit_horizon is None else critical_orbit_horizon
    fn = f.numeric()
    cycles = _merge_cycles(
        find_cycles(fn, max_period),
        attracting_cycles_from_critical_orbits(fn, horizon),
    )
    gammas = tuple((cyc, cycle_gamma(cyc)) for cyc in cycles)
    gamma_total = sum(g for _, g in gammas)

    orbits: list[CriticalOrbit] = []
    tails: list[list] = []
    for c, _ in critical_points(fn):
        orbit, tail = _follow(f, c, cycles, horizon)
        orbits.append(orbit)
        tails.append(tail)

    infinite = [i for i, o in enumerate(orbits) if o.status == "infinite"]
    parent = {i: i for i in infinite}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a_pos, a in enumerate(infinite):
        for b in infinite[a_pos + 1:]:
            if orbits[a].target == orbits[b].target and _same_tail(tails[a], tails[b]):
                parent[find(a)] = find(b)
    delta = len({find(i) for i in infinite})

    unresolved = [o for o in orbits if o.status == "unresolved"]
    if unresolved:
        logger.warning("%d critical orbit(s) unresolved after %d steps", len(unresolved), horizon)
        return FsiReport(gammas, gamma_total, delta, None, tuple(orbits), "unresolved")
    return FsiReport(gammas, gamma_total, delta, gamma_total <= delta, tuple(orbits), "ok")
