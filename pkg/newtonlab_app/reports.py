"""Parameter parsing and report assembly shared by the CLI and the HTTP service."""
import itertools
import json
import logging
from typing import Optional, Sequence

from .basins import Window, classify_hyperbolic_type
from .berkovich import DEGENERATE_TYPES, analyze_family, analyze_normalized, normalize_family
from .blaschke import default_a_sequence, escape_diagnostics
from .degeneration import (
    FamilySpec,
    basin_shrink_check,
    compare_with_berkovich,
    limit_dichotomy,
    parabolic_collision_check,
    sample_family,
    sample_per2_family,
    track_limit_cycles,
    uniform_convergence_check,
)
from .epstein import find_cycles, gamma_delta
from .errors import NewtonLabError, ParseError
from .newton_construct import PRESETS, NewtonMap, example_preset, newton_from_roots
from .schemas import (
    BerkovichAnalysisModel,
    BlaschkeTableModel,
    CycleReportModel,
    CyclesModel,
    DegenerationReportModel,
    FsiReportModel,
    HyperbolicTypeModel,
    CollisionModel,
)

logger = logging.getLogger(__name__)


# =========================
# Inputs
# =========================

def parse_roots(value) -> list:
    """Roots as JSON ("[[0,0],[1,0]]", "["1/2", "i"]") or a comma list of exact scalars.

    [re, im] pairs give floating roots; strings and integers stay exact.
    """
    if isinstance(value, str):
        text = value.strip()
        try:
            value = json.loads(text)
        except json.JSONDecodeError:
            value = [part.strip() for part in text.strip("[]").split(",") if part.strip()]
    if not isinstance(value, list) or len(value) < 2:
        raise ParseError("roots must be a list of at least two entries")
    roots = []
    for entry in value:
        if isinstance(entry, (list, tuple)):
            if len(entry) != 2:
                raise ParseError(f"root {entry!r} is not an [re, im] pair")
            roots.append(complex(float(entry[0]), float(entry[1])))
        elif isinstance(entry, float):
            roots.append(complex(entry))
        elif isinstance(entry, (int, str)):
            roots.append(entry)
        else:
            raise ParseError(f"cannot read root {entry!r}")
    return roots


def newton_for(roots) -> NewtonMap:
    """A preset name ("double-critical") or a root list."""
    if isinstance(roots, str) and roots.strip().lower().replace("_", "-") in PRESETS:
        return example_preset(roots).newton()
    return newton_from_roots(parse_roots(roots))


def parse_t_values(text: Optional[str]) -> Optional[list[float]]:
    if not text:
        return None
    return [float(p) for p in text.split(",") if p.strip()]


# =========================
# Reports
# =========================

def classify_report(roots, resolution: int = 512, window: Optional[Window] = None,
                    iter_cap: int = None, eps: float = None) -> HyperbolicTypeModel:
    N = newton_for(roots)
    report = classify_hyperbolic_type(N, resolution=resolution, horizon=iter_cap, window=window, eps=eps)
    return HyperbolicTypeModel.of(report)


def epstein_report(roots, horizon: int = None) -> FsiReportModel:
    N = newton_for(roots)
    return FsiReportModel.of(gamma_delta(N.map, critical_orbit_horizon=horizon))


def cycles_report(roots, period: int) -> CyclesModel:
    N = newton_for(roots)
    cycles = [c for c in find_cycles(N.map.numeric(), max_period=period) if c.period == period]
    return CyclesModel(period=period, cycles=[CycleReportModel.of(c) for c in cycles])


def berkovich_report(family: str, truncation=None) -> BerkovichAnalysisModel:
    spec = FamilySpec.parse(family, truncation)
    pair = spec.pair
    if pair is not None:
        try:
            analysis = analyze_family(*pair)
        except NewtonLabError as e:
            logger.info("family %s not in normal form (%s); normalizing", family, e)
            analysis = analyze_normalized(spec.roots)
    else:
        analysis = analyze_normalized(spec.roots)
    return BerkovichAnalysisModel.of(analysis)


def _family_tag(spec: FamilySpec) -> Optional[str]:
    if len(spec.roots) != 4:
        return None
    try:
        return normalize_family(spec.roots).degeneration.tag
    except NewtonLabError as e:
        logger.warning("could not classify %s: %s", spec.text, e)
        return None


def degenerate_report(family: str, t_values: Optional[Sequence[float]] = None, period: int = 2,
                      negate: bool = False, shrink: bool = False) -> DegenerationReportModel:
    """Sample a family, track its attracting cycles and compare against the limit over 𝕃.

    "c = <series>" selects the Per_2(0) slice along c(t); anything else is
    parsed as a root family.
    """
    head = family.split("=", 1)[0].strip().lower()
    tag = None
    if head == "c":
        sample = sample_per2_family(family.split("=", 1)[1], t_values)
    else:
        spec = FamilySpec.parse(family, negate=negate)
        sample = sample_family(spec, t_values)
        tag = None if negate else _family_tag(spec)

    try:
        tracks = track_limit_cycles(sample, period)
    except NewtonLabError as e:
        logger.warning("no cycles tracked for %s: %s", sample.label, e)
        tracks = []
    dichotomy = limit_dichotomy(tracks, tag) if tag in DEGENERATE_TYPES and tracks else None
    collisions = [parabolic_collision_check(sample, a, b) for a, b in itertools.combinations(tracks, 2)]
    shrinks = []
    if shrink:
        shrinks = [basin_shrink_check(sample, t) for t in tracks if t.relation == "proper"]
    report = DegenerationReportModel.of(
        sample,
        tracks,
        uniform_convergence_check(sample),
        compare_with_berkovich(sample, tracks),
        dichotomy,
        shrinks,
    )
    report.collisions = [CollisionModel.of(p) for p in collisions if p.status != "disjoint"]
    if any(p.status == "inconsistent" for p in report.collisions):
        report.verified = False
    return report


def blaschke_report(k: int = 2, a_count: int = 6, a_values: Optional[Sequence[float]] = None) -> BlaschkeTableModel:
    a_values = default_a_sequence(a_count) if a_values is None else list(a_values)
    return BlaschkeTableModel.of(escape_diagnostics(k, a_values))


def blaschke_text(k: int = 2, a_count: int = 6) -> str:
    return escape_diagnostics(k, default_a_sequence(a_count)).to_text()


def is_verified(model) -> Optional[bool]:
    if isinstance(model, FsiReportModel):
        return model.satisfied
    return getattr(model, "verified", None)


__all__ = [
    "berkovich_report",
    "blaschke_report",
    "blaschke_text",
    "classify_report",
    "cycles_report",
    "degenerate_report",
    "epstein_report",
    "is_verified",
    "newton_for",
    "parse_roots",
    "parse_t_values",
]
