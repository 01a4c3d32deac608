"""Rational maps of the Riemann sphere in homogeneous coordinates.

A map of formal degree d is f([X:Y]) = [F_a(X,Y) : F_b(X,Y)] with
F_a = sum a_i X^i Y^(d-i) and F_b likewise. Coefficient tuples are stored
ascending in X, so F_a(z, 1) is the ordinary numerator polynomial. Points
of coefficient space where F_a and F_b share roots are allowed; those roots
are the holes, and extract_holes splits them off.

Two arithmetics are supported. Coefficients given as ints, Fractions,
strings or sympy numbers are kept exact over the Gaussian rationals and use
exact gcd; anything else is complex floating point.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np
import sympy
from numpy.polynomial import polynomial as npoly
from sympy.polys.domains import QQ_I
from sympy.polys.polyerrors import CoercionFailed, PolynomialError

from . import config
from .errors import (
    HoleMatchingError,
    IndeterminatePointError,
    NewtonLabError,
    NotFixedError,
    ParseError,
)
from .polyroots import cluster, degree, poly_roots

logger = logging.getLogger(__name__)

Z = sympy.Symbol("z")

# ρ within this distance of 1 marks a root of z - f(z) as a possible multiple one
PARABOLIC_TOL = 1e-6
FIXED_TOL = 1e-7


# =========================
# Exact scalars
# =========================

def is_exact_scalar(value) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, (int, Fraction, str)):
        return True
    if isinstance(value, sympy.Basic):
        return not value.has(sympy.Float)
    return False


def to_exact(value) -> sympy.Expr:
    """Canonical sympy Gaussian rational for an exact scalar."""
    if isinstance(value, sympy.Basic):
        expr = value
    elif isinstance(value, Fraction):
        expr = sympy.Rational(value.numerator, value.denominator)
    elif isinstance(value, int):
        expr = sympy.Integer(value)
    elif isinstance(value, str):
        try:
            expr = sympy.parse_expr(value.replace("^", "**"), local_dict={"i": sympy.I, "j": sympy.I, "I": sympy.I})
        except (sympy.SympifyError, SyntaxError, TypeError) as e:
            raise ParseError(f"cannot parse exact scalar {value!r}: {e}") from e
    else:
        raise ParseError(f"not an exact scalar: {value!r}")
    try:
        return QQ_I.to_sympy(QQ_I.from_sympy(sympy.expand(expr)))
    except CoercionFailed as e:
        raise ParseError(f"{value!r} is not a Gaussian rational") from e


def exact_div(a, b) -> sympy.Expr:
    qa = QQ_I.from_sympy(sympy.sympify(a))
    qb = QQ_I.from_sympy(sympy.sympify(b))
    if not qb:
        raise ZeroDivisionError("exact division by zero")
    return QQ_I.to_sympy(qa / qb)


def to_complex(value) -> complex:
    if isinstance(value, str):
        value = to_exact(value)
    if value in (sympy.oo, sympy.zoo):
        return complex(math.inf, 0.0)
    return complex(value)


def _exact_poly(coeffs_ascending) -> sympy.Poly:
    return sympy.Poly(list(reversed([to_exact(c) for c in coeffs_ascending])), Z, domain=QQ_I)


def _ascending(poly: sympy.Poly, length: int) -> list:
    coeffs = [] if poly.is_zero else list(reversed(poly.all_coeffs()))
    return coeffs + [sympy.Integer(0)] * (length - len(coeffs))


# =========================
# Projective points
# =========================

@dataclass(frozen=True)
class ProjectivePoint:
    """Unit-norm representative [x:y]; the larger coordinate is real positive."""

    x: complex
    y: complex

    @classmethod
    def of(cls, x, y) -> "ProjectivePoint":
        x, y = complex(x), complex(y)
        norm = math.hypot(abs(x), abs(y))
        if norm == 0.0 or not math.isfinite(norm):
            raise IndeterminatePointError("[0:0] is not a point of the sphere")
        x, y = x / norm, y / norm
        lead = x if abs(x) >= abs(y) else y
        phase = lead / abs(lead)
        return cls(x / phase, y / phase)

    @classmethod
    def finite(cls, z) -> "ProjectivePoint":
        return cls.of(complex(z), 1.0)

    @classmethod
    def infinity(cls) -> "ProjectivePoint":
        return cls(1.0 + 0j, 0j)

    @property
    def is_infinity(self) -> bool:
        return abs(self.y) <= config.CHORDAL_TOL

    @property
    def affine(self) -> complex:
        if self.y == 0:
            return complex(math.inf, 0.0)
        return self.x / self.y

    def distance(self, other: "ProjectivePoint") -> float:
        """Chordal distance (sine of the angle between the two lines)."""
        return abs(self.x * other.y - other.x * self.y)

    def close_to(self, other: "ProjectivePoint", tol: float = None) -> bool:
        return self.distance(other) <= (config.CHORDAL_TOL if tol is None else tol)

    def as_pair(self) -> Optional[list[float]]:
        if self.is_infinity:
            return None
        z = self.affine
        return [z.real, z.imag]


def as_point(value) -> ProjectivePoint:
    if isinstance(value, ProjectivePoint):
        return value
    if value in (sympy.oo, sympy.zoo) or (isinstance(value, str) and value.strip().lower() in ("inf", "oo", "infinity")):
        return ProjectivePoint.infinity()
    if is_exact_scalar(value):
        value = to_complex(to_exact(value))
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return ProjectivePoint.infinity()
    return ProjectivePoint.finite(z)


# =========================
# Maps
# =========================

def _normalized(coeffs: list, exact: bool) -> list:
    mags = [abs(to_complex(c)) for c in coeffs]
    top = max(mags)
    if top == 0.0:
        raise NewtonLabError("all coefficients vanish: not a point of coefficient space")
    lead = coeffs[mags.index(top)]
    if exact:
        return [exact_div(c, lead) for c in coeffs]
    return [complex(c) / lead for c in coeffs]


@dataclass(frozen=True)
class HomogeneousRationalMap:
    num_coeffs: tuple
    den_coeffs: tuple
    exact: bool = False

    @classmethod
    def from_coefficients(cls, num: Iterable, den: Iterable, exact: Optional[bool] = None,
                          normalize: bool = True) -> "HomogeneousRationalMap":
        num, den = list(num), list(den)
        if exact is None:
            exact = all(is_exact_scalar(c) for c in num + den)
        size = max(len(num), len(den), 1)
        zero = sympy.Integer(0) if exact else 0j
        num = num + [zero] * (size - len(num))
        den = den + [zero] * (size - len(den))
        if exact:
            num = [to_exact(c) for c in num]
            den = [to_exact(c) for c in den]
        else:
            num = [to_complex(c) for c in num]
            den = [to_complex(c) for c in den]
        if normalize:
            both = _normalized(num + den, exact)
            num, den = both[:size], both[size:]
        elif not any(abs(to_complex(c)) for c in num + den):
            raise NewtonLabError("all coefficients vanish: not a point of coefficient space")
        return cls(tuple(num), tuple(den), bool(exact))

    @property
    def formal_degree(self) -> int:
        return len(self.num_coeffs) - 1

    @property
    def num_array(self) -> np.ndarray:
        return np.array([to_complex(c) for c in self.num_coeffs], dtype=complex)

    @property
    def den_array(self) -> np.ndarray:
        return np.array([to_complex(c) for c in self.den_coeffs], dtype=complex)

    def numeric(self) -> "HomogeneousRationalMap":
        if not self.exact:
            return self
        return HomogeneousRationalMap.from_coefficients(self.num_array, self.den_array, exact=False)

    def coefficient_vector(self) -> np.ndarray:
        return np.concatenate([self.num_array, self.den_array])

    def __call__(self, z):
        return evaluate_affine(self, z)


def identity_map() -> HomogeneousRationalMap:
    return HomogeneousRationalMap.from_coefficients([0, 1], [1, 0])


def projective_distance(u, v) -> float:
    """Relative distance between coefficient vectors up to a common scalar."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        raise ValueError("coefficient vectors of different formal degree")
    denom = np.vdot(v, v)
    if denom == 0:
        return float(np.linalg.norm(u) > 0)
    lam = np.vdot(v, u) / denom
    return float(np.linalg.norm(u - lam * v) / max(np.linalg.norm(u), 1e-300))


def _homogeneous_value(coeffs: np.ndarray, x: complex, y: complex) -> complex:
    d = coeffs.size - 1
    if abs(x) <= abs(y):
        return complex(y ** d * npoly.polyval(x / y, coeffs))
    return complex(x ** d * npoly.polyval(y / x, coeffs[::-1]))


def evaluate(f: HomogeneousRationalMap, p, reduced: Optional["HoleDecomposition"] = None) -> ProjectivePoint:
    p = as_point(p)
    a = _homogeneous_value(f.num_array, p.x, p.y)
    b = _homogeneous_value(f.den_array, p.x, p.y)
    if max(abs(a), abs(b)) <= config.INDETERMINATE_TOL:
        if reduced is None:
            raise IndeterminatePointError(f"f is indeterminate at {p.as_pair() or 'infinity'}")
        return evaluate(reduced.reduced_map, p)
    return ProjectivePoint.of(a, b)


def evaluate_affine(f: HomogeneousRationalMap, z):
    """Vectorized f(z) on finite points; poles map to complex infinity."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        return npoly.polyval(z, f.num_array) / npoly.polyval(z, f.den_array)


def evaluate_exact(f: HomogeneousRationalMap, z):
    """Exact value on the Gaussian-rational path; sympy.zoo stands for infinity."""
    if not f.exact:
        raise NewtonLabError("evaluate_exact needs a map with exact coefficients")
    if z in (sympy.oo, sympy.zoo):
        w = evaluate_exact(conjugate_by_inversion(f), 0)
        return sympy.zoo if w == 0 else (sympy.Integer(0) if w == sympy.zoo else exact_div(1, w))
    z = to_exact(z)
    a = _exact_poly(f.num_coeffs).eval(z)
    b = _exact_poly(f.den_coeffs).eval(z)
    if a == 0 and b == 0:
        raise IndeterminatePointError(f"f is indeterminate at {z}")
    if b == 0:
        return sympy.zoo
    return exact_div(a, b)


def conjugate_by_inversion(f: HomogeneousRationalMap) -> HomogeneousRationalMap:
    """The map w -> 1/f(1/w): [F_b(Y,X) : F_a(Y,X)]."""
    return HomogeneousRationalMap(tuple(reversed(f.den_coeffs)), tuple(reversed(f.num_coeffs)), f.exact)


def derivative_at(f: HomogeneousRationalMap, z: complex) -> complex:
    a, b = f.num_array, f.den_array
    av, bv = npoly.polyval(z, a), npoly.polyval(z, b)
    dav, dbv = npoly.polyval(z, npoly.polyder(a)), npoly.polyval(z, npoly.polyder(b))
    if bv == 0:
        raise NotFixedError(f"{z} is a pole; use the inversion chart")
    return complex((dav * bv - av * dbv) / (bv * bv))


def derivative_affine(f: HomogeneousRationalMap, z):
    z = np.asarray(z, dtype=complex)
    a, b = f.num_array, f.den_array
    av, bv = npoly.polyval(z, a), npoly.polyval(z, b)
    dav, dbv = npoly.polyval(z, npoly.polyder(a)), npoly.polyval(z, npoly.polyder(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (dav * bv - av * dbv) / (bv * bv)


# =========================
# Holes
# =========================

@dataclass(frozen=True)
class HoleDecomposition:
    holes: tuple
    reduced_map: HomogeneousRationalMap
    original: HomogeneousRationalMap

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.holes)

    def hole_points(self) -> list[ProjectivePoint]:
        return [p for p, _ in self.holes]

    def recompose(self) -> HomogeneousRationalMap:
        """H_f * f-hat as a point of the original coefficient space."""
        d = self.original.formal_degree
        factor = np.array([1.0 + 0j])
        for point, mult in self.holes:
            if point.is_infinity:
                continue
            for _ in range(mult):
                factor = np.convolve(factor, [-point.affine, 1.0])
        num = np.convolve(self.reduced_map.num_array, factor)
        den = np.convolve(self.reduced_map.den_array, factor)
        num = np.concatenate([num, np.zeros(d + 1 - num.size)])[: d + 1]
        den = np.concatenate([den, np.zeros(d + 1 - den.size)])[: d + 1]
        return HomogeneousRationalMap.from_coefficients(num, den, exact=False)


def _hole_at_infinity(a_deg: int, b_deg: int, d: int) -> int:
    return d - max(a_deg, b_deg)


def _extract_holes_exact(f: HomogeneousRationalMap) -> HoleDecomposition:
    d = f.formal_degree
    fa, fb = _exact_poly(f.num_coeffs), _exact_poly(f.den_coeffs)
    a_deg = -1 if fa.is_zero else fa.degree()
    b_deg = -1 if fb.is_zero else fb.degree()
    k_inf = _hole_at_infinity(a_deg, b_deg, d)
    g = fb.monic() if fa.is_zero else (fa.monic() if fb.is_zero else fa.gcd(fb))
    g_deg = g.degree()

    holes: list[tuple[ProjectivePoint, int]] = []
    if g_deg > 0:
        try:
            found = sympy.roots(g.as_expr(), Z)
        except (NotImplementedError, PolynomialError):
            found = {}
        if sum(found.values()) == g_deg:
            for root, mult in found.items():
                holes.append((ProjectivePoint.finite(to_complex(root)), int(mult)))
        else:
            coeffs = [to_complex(c) for c in _ascending(g, g_deg + 1)]
            for root, mult in cluster(poly_roots(coeffs), 1e-6):
                holes.append((ProjectivePoint.finite(root), mult))
    if k_inf > 0:
        holes.append((ProjectivePoint.infinity(), k_inf))

    d_red = d - k_inf - max(g_deg, 0)
    ra = fa if fa.is_zero else fa.exquo(g)
    rb = fb if fb.is_zero else fb.exquo(g)
    reduced = HomogeneousRationalMap.from_coefficients(
        _ascending(ra, d_red + 1), _ascending(rb, d_red + 1), exact=True
    )
    return HoleDecomposition(tuple(holes), reduced, f)


def _low_zeros(c: np.ndarray) -> int:
    nz = np.nonzero(np.abs(c) > 0)[0]
    return int(nz[0]) if nz.size else c.size


def _match_common_roots(ra: list, rb: list) -> list[complex]:
    tol = config.HOLE_TOL
    unused = list(rb)
    common = []
    for x in ra:
        if not unused:
            break
        dists = [abs(x - y) for y in unused]
        j = int(np.argmin(dists))
        scale = max(1.0, abs(x))
        if dists[j] <= tol * scale:
            common.append((x + unused.pop(j)) / 2)
        elif dists[j] <= 100.0 * tol * scale:
            raise HoleMatchingError(
                f"roots {x} and {unused[j]} are {dists[j]:.3e} apart, within a factor 100 of "
                f"the matching tolerance {tol:.0e}: refuse to decide whether this is a hole"
            )
    return common


def _extract_holes_numeric(f: HomogeneousRationalMap) -> HoleDecomposition:
    d = f.formal_degree
    a, b = f.num_array, f.den_array
    a_deg, b_deg = degree(a), degree(b)
    k_inf = _hole_at_infinity(a_deg, b_deg, d)

    holes: list[tuple[ProjectivePoint, int]] = []
    if a_deg < 0 or b_deg < 0:
        # one side vanishes identically: every root of the other is a hole
        other = b if a_deg < 0 else a
        other_deg = max(a_deg, b_deg)
        common = list(poly_roots(other[: other_deg + 1])) if other_deg > 0 else []
        zero_mult = 0
    else:
        zero_mult = min(_low_zeros(a), _low_zeros(b))
        a_core, b_core = a[zero_mult: a_deg + 1], b[zero_mult: b_deg + 1]
        ra = list(poly_roots(a_core)) if a_core.size > 1 else []
        rb = list(poly_roots(b_core)) if b_core.size > 1 else []
        common = _match_common_roots(ra, rb)

    for root, mult in cluster(common, 1e-6):
        holes.append((ProjectivePoint.finite(root), mult))
    if zero_mult:
        merged = [(p, m) for p, m in holes if p.close_to(ProjectivePoint.finite(0.0))]
        holes = [(p, m) for p, m in holes if not p.close_to(ProjectivePoint.finite(0.0))]
        holes.insert(0, (ProjectivePoint.finite(0.0), zero_mult + sum(m for _, m in merged)))
    if k_inf > 0:
        holes.append((ProjectivePoint.infinity(), k_inf))

    d_red = d - sum(m for _, m in holes)

    def deflate(c: np.ndarray) -> np.ndarray:
        c = c[zero_mult:]
        for root in common:
            c, _ = npoly.polydiv(c, [-root, 1.0])
            c = np.atleast_1d(c)
        out = np.zeros(d_red + 1, dtype=complex)
        n = min(c.size, d_red + 1)
        out[:n] = c[:n]
        return out

    if a_deg < 0:
        ra_c, rb_c = np.zeros(d_red + 1, dtype=complex), np.eye(1, d_red + 1, 0, dtype=complex)[0]
    elif b_deg < 0:
        ra_c, rb_c = np.eye(1, d_red + 1, 0, dtype=complex)[0], np.zeros(d_red + 1, dtype=complex)
    else:
        ra_c, rb_c = deflate(a), deflate(b)
    reduced = HomogeneousRationalMap.from_coefficients(ra_c, rb_c, exact=False)
    return HoleDecomposition(tuple(holes), reduced, f)


def extract_holes(f: HomogeneousRationalMap) -> HoleDecomposition:
    decomposition = _extract_holes_exact(f) if f.exact else _extract_holes_numeric(f)
    if decomposition.holes:
        logger.debug(
            "extracted %d hole(s), reduced degree %d",
            len(decomposition.holes), decomposition.reduced_map.formal_degree,
        )
    return decomposition


# =========================
# Fixed points and multipliers
# =========================

@dataclass(frozen=True)
class FixedPointRecord:
    location: ProjectivePoint
    multiplier: complex
    multiplicity: int


def _fixed_polynomial(f: HomogeneousRationalMap) -> np.ndarray:
    """Affine coefficients of F_a(z,1) - z F_b(z,1), formal degree d+1."""
    d = f.formal_degree
    g = np.zeros(d + 2, dtype=complex)
    g[: d + 1] += f.num_array
    g[1:] -= f.den_array
    return g


def _multiplier_numeric(f: HomogeneousRationalMap, p: ProjectivePoint) -> complex:
    if abs(p.y) < abs(p.x):
        return derivative_at(conjugate_by_inversion(f), p.y / p.x)
    return derivative_at(f, p.x / p.y)


def fixed_points(f: HomogeneousRationalMap) -> list[FixedPointRecord]:
    f = f.numeric()
    d = f.formal_degree
    g = _fixed_polynomial(f)
    g_deg = degree(g)
    if g_deg < 0:
        raise NewtonLabError("the identity map has no isolated fixed points")
    inf_mult = d + 1 - g_deg

    finite = list(poly_roots(g[: g_deg + 1])) if g_deg > 0 else []
    records: list[FixedPointRecord] = []
    near_one = []
    for z in finite:
        rho = derivative_at(f, z)
        if abs(rho - 1.0) > PARABOLIC_TOL:
            records.append(FixedPointRecord(ProjectivePoint.finite(z), rho, 1))
        else:
            near_one.append(z)
    for z, mult in cluster(near_one, 1e-3):
        records.append(FixedPointRecord(ProjectivePoint.finite(z), derivative_at(f, z), mult))

    if inf_mult > 0:
        rho_inf = derivative_at(conjugate_by_inversion(f), 0.0)
        if inf_mult > 1:
            rho_inf = 1.0 + 0j
        records.append(FixedPointRecord(ProjectivePoint.infinity(), rho_inf, inf_mult))

    total = sum(r.multiplicity for r in records)
    if total != d + 1:
        raise NewtonLabError(f"fixed-point multiplicities sum to {total}, expected {d + 1}")
    return records


def multiplier_at(f: HomogeneousRationalMap, z):
    """ρ = f'(z) at a fixed point, exact when f and z are exact."""
    exact_point = z in (sympy.oo, sympy.zoo) or is_exact_scalar(z)
    if f.exact and exact_point:
        if z in (sympy.oo, sympy.zoo) or (isinstance(z, str) and z.strip().lower() in ("inf", "oo")):
            return multiplier_at(conjugate_by_inversion(f), 0)
        z = to_exact(z)
        fa, fb = _exact_poly(f.num_coeffs), _exact_poly(f.den_coeffs)
        av, bv = fa.eval(z), fb.eval(z)
        if av == 0 and bv == 0:
            raise IndeterminatePointError(f"{z} is a hole; use the reduced map")
        if bv == 0 or sympy.expand(av - z * bv) != 0:
            raise NotFixedError(f"{z} is not fixed")
        w = (fa.diff(Z) * fb - fa * fb.diff(Z)).eval(z)
        return exact_div(w, bv * bv)

    f = f.numeric()
    p = as_point(z)
    image = evaluate(f, p)
    if image.distance(p) > FIXED_TOL:
        raise NotFixedError(f"point {p.as_pair() or 'infinity'} is not fixed (moves by {image.distance(p):.2e})")
    return _multiplier_numeric(f, p)


# =========================
# Iteration and critical points
# =========================

def _powers(c: np.ndarray, n: int) -> list[np.ndarray]:
    out = [np.array([1.0 + 0j])]
    for _ in range(n):
        out.append(np.convolve(out[-1], c))
    return out


def compose(f: HomogeneousRationalMap, g: HomogeneousRationalMap) -> HomogeneousRationalMap:
    """f o g as a point of the coefficient space of degree deg f * deg g."""
    f, g = f.numeric(), g.numeric()
    d, e = f.formal_degree, g.formal_degree
    pa, pb = _powers(g.num_array, d), _powers(g.den_array, d)
    size = d * e + 1
    num = np.zeros(size, dtype=complex)
    den = np.zeros(size, dtype=complex)
    for i in range(d + 1):
        term = np.convolve(pa[i], pb[d - i])[:size]
        num[: term.size] += f.num_array[i] * term
        den[: term.size] += f.den_array[i] * term
    return HomogeneousRationalMap.from_coefficients(num, den, exact=False)


def iterate(f: HomogeneousRationalMap, n: int) -> HomogeneousRationalMap:
    if n < 1:
        raise ValueError("iterate needs n >= 1")
    out = f.numeric()
    for _ in range(n - 1):
        out = compose(f, out)
    return out


def critical_points(f: HomogeneousRationalMap) -> list[tuple[ProjectivePoint, int]]:
    """Zeros of the Wronskian F_a'F_b - F_aF_b' with multiplicity, 2d-2 in total."""
    f = f.numeric()
    d = f.formal_degree
    a, b = f.num_array, f.den_array
    w = npoly.polysub(npoly.polymul(npoly.polyder(a), b), npoly.polymul(a, npoly.polyder(b)))
    w = np.concatenate([w, np.zeros(max(0, 2 * d - 1 - w.size))])[: 2 * d - 1]
    w_deg = degree(w)
    out = [(ProjectivePoint.finite(z), m) for z, m in cluster(poly_roots(w[: w_deg + 1]) if w_deg > 0 else [], 1e-6)]
    if 2 * d - 2 - max(w_deg, 0) > 0:
        out.append((ProjectivePoint.infinity(), 2 * d - 2 - max(w_deg, 0)))
    return out
