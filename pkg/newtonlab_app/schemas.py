"""JSON report models. Complex numbers travel as [re, im]; ∞ as null.

``python -m newtonlab_app.schemas [DIR]`` writes one <name>.schema.json per report (default ./schemas).
"""
from __future__ import annotations

import json
import math
import os
import sys
from typing import Any, Optional

from pydantic import BaseModel

from .basins import HyperbolicTypeReport
from .berkovich import FamilyAnalysis
from .blaschke import EscapeTable
from .complex_rational import HomogeneousRationalMap, HoleDecomposition, ProjectivePoint
from .degeneration import (
    ConsistencyReport,
    CycleTrack,
    DichotomyReport,
    FamilySample,
    CollisionReport,
    ShrinkReport,
    UniformConvergenceReport,
)
from .epstein import CycleReport, FsiReport

Pair = Optional[list[float]]


def cx(z) -> Pair:
    if z is None:
        return None
    if isinstance(z, ProjectivePoint):
        return z.as_pair()
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return None
    return [z.real, z.imag]


def _finite(x: float) -> Optional[float]:
    return x if x is not None and math.isfinite(x) else None


# =========================
# Complex dynamics
# =========================

class MapModel(BaseModel):
    degree: int
    num: list[Pair]
    den: list[Pair]
    exact_num: Optional[list[str]] = None
    exact_den: Optional[list[str]] = None

    @classmethod
    def of(cls, f: HomogeneousRationalMap) -> "MapModel":
        return cls(
            degree=f.formal_degree,
            num=[cx(c) for c in f.num_array],
            den=[cx(c) for c in f.den_array],
            exact_num=[str(c) for c in f.num_coeffs] if f.exact else None,
            exact_den=[str(c) for c in f.den_coeffs] if f.exact else None,
        )


class HoleModel(BaseModel):
    point: Pair
    multiplicity: int


class HolesModel(BaseModel):
    holes: list[HoleModel]
    reduced_map: MapModel

    @classmethod
    def of(cls, d: HoleDecomposition) -> "HolesModel":
        return cls(
            holes=[HoleModel(point=cx(p), multiplicity=m) for p, m in d.holes],
            reduced_map=MapModel.of(d.reduced_map),
        )


class CycleReportModel(BaseModel):
    points: list[Pair]
    period: int
    multiplier: Pair
    multiplicity: int
    index: Pair
    residu: Pair
    classification: str
    degeneracy: Optional[int] = None
    rotation: Optional[tuple[int, int]] = None
    iterate_multiplicity: Optional[int] = None
    iterate_residu: Pair = None

    @classmethod
    def of(cls, c: CycleReport) -> "CycleReportModel":
        return cls(
            points=[cx(p) for p in c.points],
            period=c.period,
            multiplier=cx(c.multiplier),
            multiplicity=c.multiplicity,
            index=cx(c.index),
            residu=cx(c.residu),
            classification=c.classification,
            degeneracy=c.degeneracy,
            rotation=c.rotation,
            iterate_multiplicity=c.iterate_multiplicity,
            iterate_residu=cx(c.iterate_residu),
        )


class CriticalOrbitModel(BaseModel):
    point: Pair
    status: str
    target: Optional[int] = None
    steps: int = 0
    note: str = ""


class FsiReportModel(BaseModel):
    cycles: list[CycleReportModel]
    gamma_per_cycle: list[int]
    gamma_total: int
    delta: int
    satisfied: Optional[bool]
    status: str
    orbits: list[CriticalOrbitModel]

    @classmethod
    def of(cls, r: FsiReport) -> "FsiReportModel":
        return cls(
            cycles=[CycleReportModel.of(c) for c in r.cycles],
            gamma_per_cycle=[g for _, g in r.gamma_per_cycle],
            gamma_total=r.gamma_total,
            delta=r.delta,
            satisfied=r.satisfied,
            status=r.status,
            orbits=[
                CriticalOrbitModel(point=cx(o.point), status=o.status, target=o.target, steps=o.steps, note=o.note)
                for o in r.orbits
            ],
        )


class CriticalAssignmentModel(BaseModel):
    point: Pair
    multiplicity: int
    target: Optional[str]
    immediate: Optional[bool]
    steps: int


class HyperbolicTypeModel(BaseModel):
    type: str
    reason: str
    free_cycles: list[CycleReportModel]
    critical_assignments: list[CriticalAssignmentModel]
    resolution: Optional[tuple[int, int]] = None
    window: Optional[tuple[float, float, float, float]] = None

    @classmethod
    def of(cls, r: HyperbolicTypeReport) -> "HyperbolicTypeModel":
        return cls(
            type=r.type,
            reason=r.reason,
            free_cycles=[CycleReportModel.of(c) for c in r.free_cycles],
            critical_assignments=[
                CriticalAssignmentModel(
                    point=cx(a.point),
                    multiplicity=a.multiplicity,
                    target=a.target.describe() if a.target is not None else None,
                    immediate=a.immediate,
                    steps=a.steps,
                )
                for a in r.critical_assignments
            ],
            resolution=r.resolution,
            window=r.window.as_tuple() if r.window is not None else None,
        )


class CyclesModel(BaseModel):
    period: int
    cycles: list[CycleReportModel]


# =========================
# Berkovich
# =========================

class HoleRowModel(BaseModel):
    point: Pair
    multiplicity: int
    colliding: int
    multiplier: Pair
    expected: float
    ok: bool


class ReducedInvariantsModel(BaseModel):
    degree: int
    superattracting: int
    attracting: int
    gamma: int
    delta: int


class CriticalReductionModel(BaseModel):
    value: Pair
    target: Pair
    steps: int
    infinite: bool


class CriticalFatesModel(BaseModel):
    free_critical: int
    attracting_fixed: list[Pair]
    reductions: list[CriticalReductionModel]


class RescalingModel(BaseModel):
    vertex: str
    scale: str
    shift: str
    degree: int
    superattracting: int
    attracting: int
    fixed_critical: int
    holes: HolesModel


class BerkovichAnalysisModel(BaseModel):
    type: str
    swapped: bool
    r: str
    s: str
    induced_map: dict[str, Any]
    tree: dict[str, Any]
    reduction: MapModel
    holes: HolesModel
    hole_rows: list[HoleRowModel]
    critical_points: list[str]
    sigma: list[str]
    sigma_expected: list[str]
    fix_projections: list[str]
    invariants: Optional[ReducedInvariantsModel] = None
    critical_fates: Optional[CriticalFatesModel] = None
    rescalings: list[RescalingModel]
    checks: dict[str, bool]
    verified: bool

    @classmethod
    def of(cls, a: FamilyAnalysis) -> "BerkovichAnalysisModel":
        t1 = a.invariants
        t2 = a.critical_fates
        return cls(
            type=a.tag,
            swapped=a.degeneration.swapped,
            r=str(a.degeneration.r),
            s=str(a.degeneration.s),
            induced_map=a.map.to_json(),
            tree=a.tree.to_json(),
            reduction=MapModel.of(a.reduction),
            holes=HolesModel.of(a.holes),
            hole_rows=[
                HoleRowModel(point=cx(h.point), multiplicity=h.multiplicity, colliding=h.colliding,
                             multiplier=cx(h.multiplier), expected=h.expected, ok=h.ok)
                for h in a.hole_rows
            ],
            critical_points=[str(c) for c in a.critical_points],
            sigma=[p.label() for p in a.sigma],
            sigma_expected=[p.label() for p in a.sigma_expected],
            fix_projections=[p.label() for p in a.fix_projections],
            invariants=None if t1 is None else ReducedInvariantsModel(
                degree=t1.degree, superattracting=t1.superattracting, attracting=t1.attracting,
                gamma=t1.gamma, delta=t1.delta,
            ),
            critical_fates=None if t2 is None else CriticalFatesModel(
                free_critical=t2.free_critical,
                attracting_fixed=[cx(z) for z in t2.attracting_fixed],
                reductions=[
                    CriticalReductionModel(value=cx(c.value), target=cx(c.target), steps=c.steps, infinite=c.infinite)
                    for c in t2.reductions
                ],
            ),
            rescalings=[
                RescalingModel(
                    vertex=row.vertex, scale=str(row.scale), shift=str(row.shift), degree=row.degree,
                    superattracting=row.superattracting, attracting=row.attracting,
                    fixed_critical=row.fixed_critical, holes=HolesModel.of(row.decomposition),
                )
                for row in a.rescalings
            ],
            checks={k: bool(v) for k, v in a.checks.items()},
            verified=a.verified,
        )


# =========================
# Degenerations
# =========================

class TrackModel(BaseModel):
    period: int
    t_values: list[float]
    positions: list[list[Pair]]
    limits: list[Pair]
    errors: list[Optional[float]]
    limit_set: list[Pair]
    colliding_holes: list[Pair]
    relation: str
    lost: bool
    note: str = ""

    @classmethod
    def of(cls, t: CycleTrack) -> "TrackModel":
        return cls(
            period=t.period,
            t_values=t.t_values,
            positions=[[cx(z) for z in pos] for pos in t.positions],
            limits=[cx(z) for z in t.limits],
            errors=[_finite(e) for e in t.errors],
            limit_set=[cx(z) for z in t.limit_set],
            colliding_holes=[cx(z) for z in t.colliding_holes],
            relation=t.relation,
            lost=t.lost,
            note=t.note,
        )


class DichotomyModel(BaseModel):
    tag: str
    holds: bool
    meets_hole: bool
    relations: list[str]
    reason: str = ""

    @classmethod
    def of(cls, d: DichotomyReport) -> "DichotomyModel":
        return cls(tag=d.tag, holds=d.holds, meets_hole=d.meets_hole, relations=list(d.relations), reason=d.reason)


class ShrinkModel(BaseModel):
    applicable: bool
    reason: str
    hole: Pair = None
    t_values: list[float]
    diameters: list[Optional[float]]
    separations: list[Optional[float]]
    neighbourhood: float
    monotone: bool
    separated: bool
    ok: bool

    @classmethod
    def of(cls, s: ShrinkReport) -> "ShrinkModel":
        return cls(
            applicable=s.applicable, reason=s.reason, hole=cx(s.hole), t_values=s.t_values,
            diameters=s.diameters, separations=s.separations, neighbourhood=s.neighbourhood,
            monotone=s.monotone, separated=s.separated, ok=s.ok,
        )


class CollisionModel(BaseModel):
    status: str
    meeting: Pair = None
    classification: Optional[str] = None
    attracting_side: Optional[bool] = None
    note: str = ""

    @classmethod
    def of(cls, p: CollisionReport) -> "CollisionModel":
        return cls(status=p.status, meeting=cx(p.meeting), classification=p.classification,
                   attracting_side=p.attracting_side, note=p.note)


class UniformModel(BaseModel):
    t_values: list[float]
    deviations: list[float]
    bounds: list[float]
    points_used: int
    ok: bool

    @classmethod
    def of(cls, u: UniformConvergenceReport) -> "UniformModel":
        return cls(t_values=list(u.t_values), deviations=list(u.deviations), bounds=list(u.bounds),
                   points_used=u.points_used, ok=u.ok)


class ConsistencyModel(BaseModel):
    tag: Optional[str]
    coefficient_deviations: list[float]
    coefficient_bounds: list[float]
    coefficient_ok: bool
    decay_ok: bool
    critical_rows: list[dict[str, Any]]
    critical_ok: Optional[bool]
    critical_fates_ok: Optional[bool]
    shadow_rows: list[dict[str, Any]]
    shadow_ok: Optional[bool]
    offending: list[str]
    ok: bool

    @classmethod
    def of(cls, c: ConsistencyReport) -> "ConsistencyModel":
        def clean(row: dict) -> dict:
            return {k: (cx(v) if isinstance(v, complex) else _finite(v) if isinstance(v, float) else v)
                    for k, v in row.items()}

        return cls(
            tag=c.tag,
            coefficient_deviations=c.coefficient_deviations,
            coefficient_bounds=c.coefficient_bounds,
            coefficient_ok=c.coefficient_ok,
            decay_ok=c.decay_ok,
            critical_rows=[clean(r) for r in c.critical_rows],
            critical_ok=c.critical_ok,
            critical_fates_ok=c.critical_fates_ok,
            shadow_rows=[clean(r) for r in c.shadow_rows],
            shadow_ok=c.shadow_ok,
            offending=list(c.offending),
            ok=c.ok,
        )


class DegenerationReportModel(BaseModel):
    family: str
    t_values: list[float]
    dropped: list[float]
    gap: str
    limit_map: MapModel
    holes: HolesModel
    tracks: list[TrackModel]
    dichotomy: Optional[DichotomyModel] = None
    uniform: UniformModel
    consistency: ConsistencyModel
    shrink: list[ShrinkModel] = []
    collisions: list[CollisionModel] = []
    verified: bool

    @classmethod
    def of(cls, sample: FamilySample, tracks, uniform, consistency, dichotomy=None, shrink=()) -> "DegenerationReportModel":
        verified = uniform.ok and consistency.ok and (dichotomy is None or dichotomy.holds) and all(s.ok for s in shrink)
        return cls(
            family=sample.label,
            t_values=sample.t_values,
            dropped=sample.dropped,
            gap=str(sample.gap),
            limit_map=MapModel.of(sample.limit),
            holes=HolesModel.of(sample.holes),
            tracks=[TrackModel.of(t) for t in tracks],
            dichotomy=None if dichotomy is None else DichotomyModel.of(dichotomy),
            uniform=UniformModel.of(uniform),
            consistency=ConsistencyModel.of(consistency),
            shrink=[ShrinkModel.of(s) for s in shrink],
            verified=verified,
        )


# =========================
# Blaschke
# =========================

class EscapeRowModel(BaseModel):
    a: float
    x_a: float
    image: float
    invariant: bool
    overshoot: float
    distance: float
    limit_distance: float


class BlaschkeTableModel(BaseModel):
    k: int
    limit: str
    rows: list[EscapeRowModel]
    x_increasing: bool
    all_invariant: bool
    limit_decreasing: bool
    distance_bounded: Optional[bool]
    verified: bool

    @classmethod
    def of(cls, table: EscapeTable) -> "BlaschkeTableModel":
        return cls.model_validate(table.to_json())


SCHEMAS: dict[str, type[BaseModel]] = {
    "cycle_report": CycleReportModel,
    "fsi_report": FsiReportModel,
    "hyperbolic_type": HyperbolicTypeModel,
    "cycles": CyclesModel,
    "berkovich_analysis": BerkovichAnalysisModel,
    "degeneration": DegenerationReportModel,
    "blaschke_table": BlaschkeTableModel,
}


def schema_for(name: str) -> dict:
    if name not in SCHEMAS:
        raise KeyError(f"unknown schema {name!r}; known: {', '.join(sorted(SCHEMAS))}")
    return SCHEMAS[name].model_json_schema()


def export_schemas(directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    paths = []
    for name in sorted(SCHEMAS):
        path = os.path.join(directory, f"{name}.schema.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(schema_for(name), fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths.append(path)
    return paths


def main(argv: Optional[list[str]] = None) -> None:
    argv = sys.argv[1:] if argv is None else argv
    for path in export_schemas(argv[0] if argv else "schemas"):
        print(path)


if __name__ == "__main__":
    main()
