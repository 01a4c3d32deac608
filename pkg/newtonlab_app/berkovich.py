"""Degenerating quartic Newton maps over the Puiseux field.

A degenerating family N_t becomes a single rational map over 𝕃 whose
coefficients are Puiseux series. Its reduction is the coefficient limit, the
finite tree spanned by {0, 1, r, s, ∞} in the Berkovich line locates where
the dynamics concentrates, and rescalings by affine maps over 𝕃 recover the
limits seen at the interior vertices of that tree.

Type II points are encoded as closed disks D(c, q) = {x : v(x - c) >= q},
of radius exp(-q), with c truncated below q so that equal disks compare equal.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .complex_rational import (
    HoleDecomposition,
    HomogeneousRationalMap,
    ProjectivePoint,
    critical_points,
    evaluate,
    evaluate_affine,
    extract_holes,
    fixed_points,
    multiplier_at,
)
from .epstein import SUPERATTRACTING_TOL, FsiReport, gamma_delta
from .errors import DegenerationError, NotIntegralError, TruncationError, VerificationError
from .newton_construct import newton_coefficients
from .puiseux import PuiseuxSeries, as_series

logger = logging.getLogger(__name__)

TYPE1 = "type1"
TYPE2 = "type2"
TYPE3A = "type3a"
TYPE3B = "type3b"
NONDEGENERATE = "nondegenerate"
DEGENERATE_TYPES = (TYPE1, TYPE2, TYPE3A, TYPE3B)

GAUSS = "ξ_g"
LEAF = "leaf"
VERTEX = "vertex"
EDGE = "edge"

# same-point tolerance for reductions and orbit targets of N-hat
LIMIT_TOL = 1e-8
ORBIT_CAP = 500


# =========================
# Polynomials over L
# =========================

def _one(truncation) -> PuiseuxSeries:
    return PuiseuxSeries.constant(1.0, truncation)


def _poly_from_roots(roots: Sequence[PuiseuxSeries]) -> list[PuiseuxSeries]:
    """Ascending coefficients of prod (z - x)."""
    truncation = min(x.truncation for x in roots)
    coeffs = [_one(truncation)]
    for x in roots:
        shifted = [PuiseuxSeries.zero(truncation)] + coeffs
        scaled = [x * c for c in coeffs] + [PuiseuxSeries.zero(truncation)]
        coeffs = [a - b for a, b in zip(shifted, scaled)]
    return coeffs


def _compose_affine(p: Sequence[PuiseuxSeries], a: PuiseuxSeries, b: PuiseuxSeries) -> list[PuiseuxSeries]:
    """Ascending coefficients of p(a z + b), Horner's scheme."""
    out = [p[-1]]
    for coeff in reversed(p[:-1]):
        times_z = [PuiseuxSeries.zero(a.truncation)] + [a * c for c in out]
        times_b = [b * c for c in out] + [PuiseuxSeries.zero(b.truncation)]
        out = [u + v for u, v in zip(times_z, times_b)]
        out[0] = out[0] + coeff
    return out


def _check_distinct(roots: Sequence[PuiseuxSeries]) -> None:
    for (i, x), (j, y) in itertools.combinations(enumerate(roots), 2):
        if (x - y).is_zero:
            raise DegenerationError(
                f"roots {i} and {j} coincide to truncation order {min(x.truncation, y.truncation)}"
            )


# =========================
# Maps over L
# =========================

@dataclass(frozen=True)
class RationalMapOverL:
    num: tuple
    den: tuple
    roots: tuple = ()

    @property
    def degree(self) -> int:
        return len(self.num) - 1

    @property
    def coefficients(self) -> tuple:
        return self.num + self.den

    @property
    def min_valuation(self):
        v = min(c.valuation for c in self.coefficients)
        if v == math.inf:
            raise DegenerationError("all coefficients vanish to truncation order")
        return v

    @property
    def is_normalized(self) -> bool:
        return self.min_valuation == 0

    def normalized(self) -> "RationalMapOverL":
        """Divide by t^v so that the largest coefficient has absolute value 1."""
        v = self.min_valuation
        if v == 0:
            return self
        return RationalMapOverL(
            tuple(c.shifted(-v) for c in self.num),
            tuple(c.shifted(-v) for c in self.den),
            self.roots,
        )

    def negated(self) -> "RationalMapOverL":
        return RationalMapOverL(tuple(-c for c in self.num), self.den, self.roots)

    def at(self, t0) -> HomogeneousRationalMap:
        """The complex map obtained by substituting t = t0."""
        return HomogeneousRationalMap.from_coefficients(
            [c.evaluate_at(t0) for c in self.num], [c.evaluate_at(t0) for c in self.den], exact=False
        )

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "num": [str(c) for c in self.num],
            "den": [str(c) for c in self.den],
        }


def induced_newton_from_roots(roots: Sequence, negate: bool = False, truncation=None) -> RationalMapOverL:
    """Newton map of prod (z - x) over 𝕃 for any list of distinct series roots."""
    series = tuple(as_series(x, truncation) for x in roots)
    if len(series) < 2:
        raise DegenerationError("a Newton map needs at least two roots")
    _check_distinct(series)
    num, den = newton_coefficients(_poly_from_roots(series))
    f = RationalMapOverL(tuple(num), tuple(den), series)
    if negate:
        f = f.negated()
    return f.normalized()


def induced_newton(r, s, truncation=None, negate: bool = False) -> RationalMapOverL:
    """The quartic N over 𝕃 with roots 0, 1, r, s."""
    r, s = as_series(r, truncation), as_series(s, truncation)
    zero = PuiseuxSeries.zero(r.truncation)
    one = _one(r.truncation)
    return induced_newton_from_roots((zero, one, r, s), negate=negate, truncation=truncation)


def reduction(f: RationalMapOverL) -> HomogeneousRationalMap:
    """Coefficient-wise reduction of the normalized map; holes are kept."""
    g = f.normalized()
    for c in g.coefficients:
        if c.truncation <= 0:
            raise TruncationError(
                f"coefficient known only below t^{c.truncation} after normalization; "
                "raise NEWTONLAB_PUISEUX_ORDER"
            )
    return HomogeneousRationalMap.from_coefficients(
        [c.reduce() for c in g.num], [c.reduce() for c in g.den], exact=False, normalize=False
    )


def bad_directions(f: RationalMapOverL) -> list[ProjectivePoint]:
    """Directions at ξ_g in which f fails to be locally injective: the holes of red(f)."""
    return extract_holes(reduction(f)).hole_points()


# =========================
# Degeneration types
# =========================

@dataclass(frozen=True)
class DegenerationType:
    tag: str
    r: PuiseuxSeries
    s: PuiseuxSeries
    swapped: bool = False

    @property
    def is_degenerate(self) -> bool:
        return self.tag != NONDEGENERATE


def _validate_pair(r: PuiseuxSeries, s: PuiseuxSeries) -> None:
    for name, x in (("r", r), ("s", s)):
        if x.is_zero or (x - 1).is_zero:
            raise DegenerationError(f"{name} coincides with a marked root 0 or 1")
    if (r - s).is_zero:
        raise DegenerationError("r and s coincide to truncation order")
    if r.valuation < 0 or s.valuation < 0:
        raise DegenerationError(
            "roots outside the unit disk are not in normal form; use normalize_family first"
        )


def classify_degeneration(r, s) -> DegenerationType:
    """Degeneration type of the quartic with roots 0, 1, r, s in normal form.

    The pair is reordered so that v(r) >= v(s); `swapped` records that.
    """
    r, s = as_series(r), as_series(s)
    _validate_pair(r, s)
    swapped = False
    if s.valuation > r.valuation:
        r, s, swapped = s, r, True
    vr, vs = r.valuation, s.valuation
    v_rs = (r - s).valuation

    if vr == 0:
        if (r - 1).valuation == 0 and (s - 1).valuation == 0 and v_rs == 0:
            tag = NONDEGENERATE
        else:
            raise DegenerationError(
                "a root collides with 1 or the two free roots collide away from 0; "
                "relabel with normalize_family"
            )
    elif vs == 0:
        tag = TYPE2 if (s - 1).valuation > 0 else TYPE1
    elif vr > vs:
        tag = TYPE3A
    elif v_rs == vr:
        tag = TYPE3B
    else:
        raise DegenerationError("r and s are closer to each other than to 0; relabel with normalize_family")
    logger.debug("classified r=%s s=%s as %s", r, s, tag)
    return DegenerationType(tag, r, s, swapped)


@dataclass(frozen=True)
class NormalizedFamily:
    degeneration: DegenerationType
    scale: PuiseuxSeries
    shift: PuiseuxSeries
    order: tuple

    def apply(self, x) -> PuiseuxSeries:
        return (as_series(x) - self.shift) / self.scale


def normalize_family(roots: Sequence, truncation=None) -> NormalizedFamily:
    """Affine change of coordinates over 𝕃 bringing four roots to 0, 1, r, s in normal form.

    A pair at maximal mutual distance goes to {0, 1}; every such ordered pair
    and both orders of the remaining roots are tried.
    """
    series = [as_series(x, truncation) for x in roots]
    if len(series) != 4:
        raise DegenerationError(f"normal forms are defined for quartics, got {len(series)} roots")
    _check_distinct(series)
    distances = {(i, j): (series[i] - series[j]).valuation for i in range(4) for j in range(4) if i != j}
    widest = min(distances.values())
    for (i, j), v in sorted(distances.items()):
        if v != widest:
            continue
        scale = series[j] - series[i]
        shift = series[i]
        rest = [k for k in range(4) if k not in (i, j)]
        for k, l in (rest, rest[::-1]):
            r = (series[k] - shift) / scale
            s = (series[l] - shift) / scale
            try:
                dtype = classify_degeneration(r, s)
            except DegenerationError:
                continue
            order = (i, j, l, k) if dtype.swapped else (i, j, k, l)
            return NormalizedFamily(dtype, scale, shift, order)
    raise DegenerationError("no maximal-distance normalization reaches a normal form")


# =========================
# Trees in the Berkovich line
# =========================

@dataclass(frozen=True)
class Disk:
    center: PuiseuxSeries
    q: Fraction

    @classmethod
    def around(cls, x: PuiseuxSeries, q) -> "Disk":
        q = Fraction(q)
        if x.truncation < q:
            raise TruncationError(f"centre known only below t^{x.truncation}, disk needs t^{q}")
        return cls(x.truncate_below(q), q)

    @classmethod
    def gauss(cls) -> "Disk":
        return cls(PuiseuxSeries.zero(0), Fraction(0))

    @property
    def radius(self) -> float:
        return math.exp(-self.q)

    def contains(self, x: PuiseuxSeries) -> bool:
        return (x - self.center).valuation >= self.q

    def contains_disk(self, other: "Disk") -> bool:
        return other.q >= self.q and self.contains(other.center)

    def same(self, other: "Disk") -> bool:
        return self.q == other.q and self.contains(other.center)

    def label(self) -> str:
        center = "0" if self.center.is_zero else str(self.center)
        return f"D({center}, q={self.q})"


@dataclass
class TreeVertex:
    name: str
    disk: Disk
    joins: list = field(default_factory=list)
    parent: Optional[int] = None
    children: list = field(default_factory=list)
    leaves: list = field(default_factory=list)
    valence: int = 0


@dataclass
class FixTree:
    leaves: dict
    vertices: list
    v_rep: list
    gauss: int = 0

    def vertex(self, name: str) -> TreeVertex:
        for v in self.vertices:
            if v.name == name or name in v.joins:
                return v
        raise KeyError(name)

    def index_of(self, disk: Disk) -> Optional[int]:
        for i, v in enumerate(self.vertices):
            if v.disk.same(disk):
                return i
        return None

    def rep_vertices(self) -> list[TreeVertex]:
        return [self.vertices[i] for i in self.v_rep]

    def anchor(self, v: TreeVertex) -> PuiseuxSeries:
        """A leaf inside v at full precision; D(anchor, q) is v's disk."""
        if not v.joins:
            return v.disk.center
        return self.leaves[v.joins[0].split("∨")[0]]

    def to_json(self) -> dict:
        def name_of(i):
            return None if i is None else self.vertices[i].name

        return {
            "leaves": {name: str(x) for name, x in self.leaves.items()} | {"∞": "∞"},
            "vertices": [
                {
                    "name": v.name,
                    "disk": v.disk.label(),
                    "joins": list(v.joins),
                    "parent": name_of(v.parent) or "∞",
                    "children": [name_of(c) for c in v.children],
                    "leaves": list(v.leaves),
                    "valence": v.valence,
                }
                for v in self.vertices
            ],
            "v_rep": [self.vertices[i].name for i in self.v_rep],
        }


def build_tree(leaves: dict) -> FixTree:
    """Hull of the given finite leaves together with ∞ and ξ_g.

    Internal vertices are the pairwise joins x∨y = D(x, v(x - y)); valence
    counts child vertices, leaves hanging directly off the vertex and the
    direction towards ∞.
    """
    vertices = [TreeVertex(GAUSS, Disk.gauss())]
    for (a, x), (b, y) in itertools.combinations(leaves.items(), 2):
        q = (x - y).valuation
        if q == math.inf:
            raise DegenerationError(f"leaves {a} and {b} coincide to truncation order")
        disk = Disk.around(x, q)
        join = f"{a}∨{b}"
        for v in vertices:
            if v.disk.same(disk):
                v.joins.append(join)
                break
        else:
            vertices.append(TreeVertex(join, disk, [join]))

    for i, v in enumerate(vertices):
        above = [j for j, u in enumerate(vertices) if j != i and u.disk.q < v.disk.q and u.disk.contains_disk(v.disk)]
        if above:
            v.parent = max(above, key=lambda j: vertices[j].disk.q)
            vertices[v.parent].children.append(i)
    for name, x in leaves.items():
        holding = [i for i, v in enumerate(vertices) if v.disk.contains(x)]
        if holding:
            vertices[max(holding, key=lambda i: vertices[i].disk.q)].leaves.append(name)
        else:
            logger.warning("leaf %s lies outside the unit disk; it hangs off the ∞ edge", name)
    for v in vertices:
        v.valence = len(v.children) + len(v.leaves) + 1

    v_rep = [i for i, v in enumerate(vertices) if v.valence >= 3]
    return FixTree(dict(leaves), vertices, v_rep)


def build_fix_tree(r, s) -> FixTree:
    """H_fix, the hull of {0, 1, r, s, ∞}, with V_rep its vertices of valence >= 3."""
    r, s = as_series(r), as_series(s)
    return build_tree({
        "0": PuiseuxSeries.zero(r.truncation),
        "1": _one(r.truncation),
        "r": r,
        "s": s,
    })


@dataclass(frozen=True)
class TreePoint:
    kind: str
    name: str
    disk: Optional[Disk] = None

    def same(self, other: "TreePoint") -> bool:
        if self.kind == LEAF or other.kind == LEAF:
            return self.kind == other.kind and self.name == other.name
        return self.disk.same(other.disk)

    def label(self) -> str:
        return self.name if self.disk is None else f"{self.name} {self.disk.label()}"


def project_to_tree(x, tree: FixTree, hull: str = "fix") -> TreePoint:
    """Projection of a type I point onto H_fix (hull="fix") or onto H_rep (hull="rep").

    The image is the smallest tree disk containing x, cut down to the branch
    point towards any deeper node inside it.
    """
    x = as_series(x)
    rep = hull == "rep"
    if not rep:
        for name, leaf in tree.leaves.items():
            if (x - leaf).is_zero:
                return TreePoint(LEAF, name)
    nodes = tree.rep_vertices() if rep else list(tree.vertices)
    holding = [v for v in nodes if v.disk.contains(x)]
    if not holding:
        if rep:
            top = min(nodes, key=lambda v: v.disk.q)
            return TreePoint(VERTEX, top.name, top.disk)
        return TreePoint(EDGE, f"{GAUSS}–∞", Disk.around(x, x.valuation))

    w = max(holding, key=lambda v: v.disk.q)
    inner = [(v.disk.center, v.name) for v in nodes if v.disk.q > w.disk.q and w.disk.contains_disk(v.disk)]
    if not rep:
        inner += [(leaf, name) for name, leaf in tree.leaves.items() if w.disk.contains(leaf)]
    best_q, best_name = w.disk.q, None
    for center, name in inner:
        qb = (x - center).valuation
        if qb > best_q:
            best_q, best_name = qb, name
    if best_name is None:
        return TreePoint(VERTEX, w.name, w.disk)
    return TreePoint(EDGE, f"{w.name}–{best_name}", Disk.around(x, best_q))


def _distinct_points(points: list[TreePoint]) -> list[TreePoint]:
    out: list[TreePoint] = []
    for p in points:
        if not any(p.same(q) for q in out):
            out.append(p)
    return out


# =========================
# Critical points over L
# =========================

def series_critical_points(r, s) -> tuple[PuiseuxSeries, PuiseuxSeries]:
    """Roots of P'' = 12z^2 - 6 e1 z + 2 e2 for P = z(z-1)(z-r)(z-s).

    The root of smaller valuation comes from the quadratic formula; the other
    from the product of roots, so no cancellation is lost.
    """
    r, s = as_series(r), as_series(s)
    e1 = 1 + r + s
    e2 = r + s + r * s
    root = ((e1 * e1).scaled(9) - e2.scaled(24)).sqrt()
    plus = (e1.scaled(3) + root).scaled(1 / 12)
    minus = (e1.scaled(3) - root).scaled(1 / 12)

    def size(x: PuiseuxSeries):
        return (x.valuation, -abs(x.leading_coefficient) if not x.is_zero else 0.0)

    big = min((plus, minus), key=size)
    if big.is_zero:
        raise TruncationError("both critical points vanish to truncation order; raise NEWTONLAB_PUISEUX_ORDER")
    small = e2.scaled(1 / 6) / big
    return big, small


def _free_series_critical_points(f: RationalMapOverL) -> list[PuiseuxSeries]:
    if len(f.roots) != 4:
        raise DegenerationError("series critical points are computed for quartics with roots 0, 1, r, s")
    r, s = f.roots[2], f.roots[3]
    return [c for c in series_critical_points(r, s) if not any((c - x).is_zero for x in f.roots)]


def expected_sigma(tag: str, tree: FixTree) -> list[TreePoint]:
    gauss = tree.vertices[tree.gauss]
    out = [TreePoint(VERTEX, gauss.name, gauss.disk)]
    if tag in (TYPE3A, TYPE3B):
        v = tree.vertex("0∨s")
        out.append(TreePoint(VERTEX, v.name, v.disk))
    return out


def free_critical_projections(f: RationalMapOverL, tree: FixTree, tag: Optional[str] = None,
                              verify: bool = True) -> list[TreePoint]:
    """Σ: projections of the free critical points onto H_rep."""
    sigma = _distinct_points([project_to_tree(c, tree, hull="rep") for c in _free_series_critical_points(f)])
    if verify and tag in DEGENERATE_TYPES:
        expected = expected_sigma(tag, tree)
        matches = len(sigma) == len(expected) and all(any(p.same(q) for q in sigma) for q in expected)
        if not matches:
            raise VerificationError(
                f"Σ = {[p.label() for p in sigma]} differs from {[p.label() for p in expected]} for {tag}",
                quantity="sigma",
            )
    return sigma


# =========================
# Rescaling
# =========================

def rescaling_reduction(f: RationalMapOverL, a, b) -> HomogeneousRationalMap:
    """red(M^-1 o f o M) for M(z) = a z + b, holes kept."""
    a, b = as_series(a), as_series(b)
    if a.is_zero:
        raise DegenerationError("rescaling needs a nonzero scale")
    fa = _compose_affine(f.num, a, b)
    fb = _compose_affine(f.den, a, b)
    num = [u - b * w for u, w in zip(fa, fb)]
    den = [a * w for w in fb]
    return reduction(RationalMapOverL(tuple(num), tuple(den)))


# =========================
# Family analysis
# =========================

@dataclass(frozen=True)
class HoleRow:
    point: ProjectivePoint
    multiplicity: int
    colliding: int
    multiplier: complex
    expected: float

    @property
    def ok(self) -> bool:
        return abs(self.multiplier - self.expected) <= 1e-6


@dataclass(frozen=True)
class ReducedInvariants:
    degree: int
    superattracting: int
    attracting: int
    gamma: int
    delta: int
    fsi: FsiReport


@dataclass(frozen=True)
class CriticalReduction:
    value: complex
    target: Optional[complex]
    steps: int
    infinite: bool


@dataclass(frozen=True)
class CriticalFates:
    free_critical: int
    attracting_fixed: tuple
    reductions: tuple


@dataclass(frozen=True)
class RescalingRow:
    vertex: str
    scale: PuiseuxSeries
    shift: PuiseuxSeries
    decomposition: HoleDecomposition
    degree: int
    superattracting: int
    attracting: int
    fixed_critical: int


@dataclass
class FamilyAnalysis:
    degeneration: DegenerationType
    map: RationalMapOverL
    tree: FixTree
    reduction: HomogeneousRationalMap
    holes: HoleDecomposition
    hole_rows: list = field(default_factory=list)
    critical_points: list = field(default_factory=list)
    sigma: list = field(default_factory=list)
    sigma_expected: list = field(default_factory=list)
    fix_projections: list = field(default_factory=list)
    invariants: Optional[ReducedInvariants] = None
    critical_fates: Optional[CriticalFates] = None
    rescalings: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def tag(self) -> str:
        return self.degeneration.tag

    @property
    def verified(self) -> bool:
        return all(self.checks.values())


EXPECTED_INVARIANTS = {
    TYPE1: {"degree": 3, "superattracting": 2, "attracting": 1, "gamma": (1, 2), "delta": (1, 2)},
    TYPE2: {"degree": 2, "superattracting": 0, "attracting": 2, "gamma": (2,), "delta": (2,)},
    TYPE3A: {"degree": 2, "superattracting": 1, "attracting": 1, "gamma": (1,), "delta": (1,)},
    TYPE3B: {"degree": 2, "superattracting": 1, "attracting": 1, "gamma": (1,), "delta": (1,)},
}

EXPECTED_ATTRACTING = {TYPE1: (0.0,), TYPE2: (0.0, 1.0), TYPE3A: (0.0,), TYPE3B: (0.0,)}


def _fixed_counts(g: HomogeneousRationalMap) -> tuple[int, int, list]:
    """Superattracting count, attracting (not super) count and the latter's finite locations."""
    sa, attracting, where = 0, 0, []
    for rec in fixed_points(g):
        size = abs(rec.multiplier)
        if size < SUPERATTRACTING_TOL:
            sa += 1
        elif size < 1 - 1e-8:
            attracting += 1
            if not rec.location.is_infinity:
                where.append(rec.location.affine)
    return sa, attracting, where


def _fixed_critical_count(g: HomogeneousRationalMap) -> int:
    count = 0
    for p, mult in critical_points(g):
        if evaluate(g, p).distance(p) <= 1e-7:
            count += mult
    return count


def _orbit_target(g: HomogeneousRationalMap, z: complex, targets: Sequence[complex]) -> CriticalReduction:
    w = complex(z)
    for step in range(ORBIT_CAP + 1):
        for loc in targets:
            gap = abs(w - loc)
            if gap <= LIMIT_TOL:
                return CriticalReduction(complex(z), loc, step, step > 0 and gap > 0.0)
        w = complex(evaluate_affine(g, w))
        if not np.isfinite(w):
            break
    return CriticalReduction(complex(z), None, ORBIT_CAP, True)


def _critical_fates_ok(tag: str, row: CriticalFates) -> bool:
    expected = EXPECTED_ATTRACTING[tag]
    where = row.attracting_fixed
    if len(where) != len(expected) or not all(any(abs(w - e) <= LIMIT_TOL for w in where) for e in expected):
        return False

    def lands_at_zero(c: CriticalReduction) -> bool:
        return abs(c.value) > LIMIT_TOL and c.target is not None and abs(c.target) <= LIMIT_TOL and c.infinite

    reds = row.reductions
    if tag == TYPE1:
        return any(lands_at_zero(c) for c in reds)
    if tag == TYPE2:
        hits = sorted(round(c.target.real) for c in reds if c.target is not None and c.infinite)
        return len(reds) == 2 and hits == [0, 1]
    return any(abs(c.value) <= LIMIT_TOL for c in reds) and any(lands_at_zero(c) for c in reds)


RESCALING_CHECKS = {
    TYPE1: ("0∨r", lambda row: row.degree == 2 and row.fixed_critical == 2),
    TYPE2: ("0∨r", lambda row: row.degree == 2 and row.fixed_critical == 2),
    TYPE3A: ("0∨s", lambda row: row.degree == 2 and row.superattracting + row.attracting == 2),
    TYPE3B: ("0∨r", lambda row: row.degree == 3 and row.superattracting == 3),
}


def analyze_family(r, s, truncation=None, horizon: Optional[int] = None) -> FamilyAnalysis:
    """Type, tree, Σ, reduction and its invariants, and rescaling limits for roots 0, 1, r, s."""
    dtype = classify_degeneration(as_series(r, truncation), as_series(s, truncation))
    r, s = dtype.r, dtype.s
    f = induced_newton(r, s)
    tree = build_fix_tree(r, s)
    red = reduction(f)
    holes = extract_holes(red)
    out = FamilyAnalysis(dtype, f, tree, red, holes)
    if not dtype.is_degenerate:
        out.checks["reduction_degree"] = holes.reduced_map.formal_degree == 4 and not holes.holes
        return out

    n_hat = holes.reduced_map
    for point, mult in holes.holes:
        if point.is_infinity:
            continue
        m = mult + 1
        out.hole_rows.append(HoleRow(point, mult, m, complex(multiplier_at(n_hat, point.affine)), (m - 1) / m))
    out.checks["hole_multipliers"] = all(row.ok for row in out.hole_rows)

    free = _free_series_critical_points(f)
    out.critical_points = free
    out.sigma = free_critical_projections(f, tree, dtype.tag, verify=False)
    out.sigma_expected = expected_sigma(dtype.tag, tree)
    out.checks["sigma"] = len(out.sigma) == len(out.sigma_expected) and all(
        any(p.same(q) for q in out.sigma) for p in out.sigma_expected
    )
    out.fix_projections = [project_to_tree(c, tree) for c in free]
    gauss = tree.vertices[tree.gauss]
    out.checks["free_critical_at_gauss"] = any(
        p.kind == VERTEX and p.disk.same(gauss.disk) for p in out.fix_projections
    )

    sa, attracting, where = _fixed_counts(n_hat)
    fsi = gamma_delta(n_hat, critical_orbit_horizon=horizon)
    out.invariants = ReducedInvariants(n_hat.formal_degree, sa, attracting, fsi.gamma_total, fsi.delta, fsi)
    want = EXPECTED_INVARIANTS[dtype.tag]
    out.checks["reduced_invariants"] = (
        out.invariants.degree == want["degree"]
        and sa == want["superattracting"]
        and attracting == want["attracting"]
        and fsi.gamma_total in want["gamma"]
        and fsi.delta in want["delta"]
    )

    targets = [rec.location.affine for rec in fixed_points(n_hat)
               if not rec.location.is_infinity and abs(rec.multiplier) < 1]
    reds = []
    for c in free:
        try:
            reds.append(_orbit_target(n_hat, c.reduce(), targets))
        except NotIntegralError:
            logger.warning("critical point %s is not integral; it reduces to ∞", c)
    out.critical_fates = CriticalFates(len(free), tuple(where), tuple(reds))
    out.checks["critical_fates"] = _critical_fates_ok(dtype.tag, out.critical_fates)

    for v in tree.rep_vertices():
        if v.name == GAUSS:
            continue
        a = PuiseuxSeries.monomial(1.0, v.disk.q)
        b = tree.anchor(v)
        decomposition = extract_holes(rescaling_reduction(f, a, b))
        g = decomposition.reduced_map
        rsa, ratt, _ = _fixed_counts(g)
        out.rescalings.append(
            RescalingRow(v.name, a, b, decomposition, g.formal_degree, rsa, ratt, _fixed_critical_count(g))
        )
    name, predicate = RESCALING_CHECKS[dtype.tag]
    quoted = [row for row in out.rescalings if row.vertex == tree.vertex(name).name]
    out.checks["rescaling"] = bool(quoted) and all(predicate(row) for row in quoted)

    failed = [k for k, ok in out.checks.items() if not ok]
    if failed:
        logger.warning("family r=%s s=%s (%s) fails checks %s", r, s, dtype.tag, failed)
    return out


def analyze_normalized(roots: Sequence, truncation=None, horizon: Optional[int] = None) -> FamilyAnalysis:
    """analyze_family after bringing arbitrary series roots to normal form."""
    family = normalize_family(roots, truncation)
    return analyze_family(family.degeneration.r, family.degeneration.s, truncation, horizon)


__all__ = [
    "RationalMapOverL",
    "DegenerationType",
    "NormalizedFamily",
    "Disk",
    "TreeVertex",
    "FixTree",
    "TreePoint",
    "FamilyAnalysis",
    "induced_newton",
    "induced_newton_from_roots",
    "reduction",
    "bad_directions",
    "classify_degeneration",
    "normalize_family",
    "build_tree",
    "build_fix_tree",
    "project_to_tree",
    "series_critical_points",
    "free_critical_projections",
    "rescaling_reduction",
    "analyze_family",
    "analyze_normalized",
]
