"""Newton maps N_P(z) = z - P(z)/P'(z) built from marked roots or polynomials."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import sympy
from numpy.polynomial import polynomial as npoly
from sympy.polys.domains import QQ_I

from .complex_rational import (
    Z,
    HomogeneousRationalMap,
    exact_div,
    is_exact_scalar,
    to_complex,
    to_exact,
)
from .errors import RepeatedRootsError
from .polyroots import cluster, poly_roots

logger = logging.getLogger(__name__)

ROOT_SEPARATION = 1e-12
SHARED_ROOT_TOL = 1e-8


# =========================
# Types
# =========================

@dataclass(frozen=True)
class NewtonMap:
    roots: tuple
    map: HomogeneousRationalMap
    second_derivative_roots: tuple
    poly_coeffs: tuple
    exact: bool = False

    @property
    def degree(self) -> int:
        return len(self.roots)

    @property
    def numeric_roots(self) -> np.ndarray:
        return np.array([to_complex(r) for r in self.roots], dtype=complex)

    @property
    def poly_array(self) -> np.ndarray:
        return np.array([to_complex(c) for c in self.poly_coeffs], dtype=complex)

    def P(self, z):
        return npoly.polyval(z, self.poly_array)

    def dP(self, z):
        return npoly.polyval(z, npoly.polyder(self.poly_array))

    def ddP(self, z):
        return npoly.polyval(z, npoly.polyder(self.poly_array, 2))


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    kind: str  # "root" or "additional"
    free: bool
    multiplicity: int
    additional: bool = False

    @property
    def is_root(self) -> bool:
        return self.kind == "root"


@dataclass(frozen=True)
class MarkedNormalForm:
    normalized_roots: tuple
    conjugating_affine: tuple  # (scale, shift): z -> scale * z + shift

    def apply(self, z):
        scale, shift = self.conjugating_affine
        return scale * z + shift


# =========================
# Coefficient formulas
# =========================

def newton_coefficients(p: Sequence) -> tuple[list, list]:
    """Homogeneous numerator zP' - P and denominator P' of formal degree d.

    p is ascending and of length d+1. num_k = (k-1) p_k, den_k = (k+1) p_(k+1).
    The formula stays meaningful when P has repeated roots.
    """
    d = len(p) - 1
    num = [(k - 1) * p[k] for k in range(d + 1)]
    den = [(k + 1) * p[k + 1] for k in range(d)] + [0 * p[0]]
    return num, den


def _exact_polynomial_from_roots(roots: Sequence) -> list:
    poly = sympy.Poly(1, Z, domain=QQ_I)
    for r in roots:
        poly = poly * sympy.Poly([1, -to_exact(r)], Z, domain=QQ_I)
    return list(reversed(poly.all_coeffs()))


def _numeric_polynomial_from_roots(roots: Sequence) -> list:
    return list(npoly.polyfromroots(np.asarray([to_complex(r) for r in roots], dtype=complex)).astype(complex))


def _check_distinct(roots: Sequence, exact: bool) -> None:
    for i, j in itertools.combinations(range(len(roots)), 2):
        if exact:
            repeated = sympy.expand(to_exact(roots[i]) - to_exact(roots[j])) == 0
        else:
            repeated = abs(to_complex(roots[i]) - to_complex(roots[j])) <= ROOT_SEPARATION
        if repeated:
            raise RepeatedRootsError(
                f"roots {i} and {j} coincide ({roots[i]}); "
                "use degenerate_newton or the degeneration lab for colliding roots"
            )


def _second_derivative_coeffs(p: Sequence) -> list:
    d = len(p) - 1
    return [(k + 2) * (k + 1) * p[k + 2] for k in range(d - 1)]


def _second_derivative_roots(p: Sequence, exact: bool) -> tuple:
    dd = _second_derivative_coeffs(p)
    if len(dd) <= 1:
        return ()
    if exact:
        poly = sympy.Poly(list(reversed(dd)), Z, domain=QQ_I)
        found = sympy.roots(poly.as_expr(), Z)
        if sum(found.values()) == poly.degree():
            out = []
            for root, mult in found.items():
                out.extend([root] * int(mult))
            return tuple(out)
    return tuple(poly_roots([to_complex(c) for c in dd]))


# =========================
# Constructors
# =========================

def _build(roots: tuple, p: list, exact: bool) -> NewtonMap:
    num, den = newton_coefficients(p)
    f = HomogeneousRationalMap.from_coefficients(num, den, exact=exact)
    return NewtonMap(
        roots=roots,
        map=f,
        second_derivative_roots=_second_derivative_roots(p, exact),
        poly_coeffs=tuple(p),
        exact=exact,
    )


def newton_from_roots(roots: Sequence) -> NewtonMap:
    roots = tuple(roots)
    if len(roots) < 2:
        raise ValueError("a Newton map needs at least two roots")
    exact = all(is_exact_scalar(r) for r in roots)
    if exact:
        roots = tuple(to_exact(r) for r in roots)
    else:
        roots = tuple(to_complex(r) for r in roots)
    _check_distinct(roots, exact)
    p = _exact_polynomial_from_roots(roots) if exact else _numeric_polynomial_from_roots(roots)
    return _build(roots, p, exact)


def newton_from_polynomial(coeffs: Sequence) -> NewtonMap:
    """Newton map of P given by ascending coefficients (leading one nonzero)."""
    coeffs = list(coeffs)
    while len(coeffs) > 1 and to_complex(coeffs[-1]) == 0:
        coeffs.pop()
    if len(coeffs) < 3:
        raise ValueError("a Newton map needs a polynomial of degree at least 2")
    exact = all(is_exact_scalar(c) for c in coeffs)
    if exact:
        p = [to_exact(c) for c in coeffs]
        poly = sympy.Poly(list(reversed(p)), Z, domain=QQ_I)
        if poly.gcd(poly.diff(Z)).degree() > 0:
            raise RepeatedRootsError("P has a repeated root; use degenerate_newton")
    else:
        p = [to_complex(c) for c in coeffs]
    roots = tuple(poly_roots([to_complex(c) for c in p]))
    if not exact:
        _check_distinct(roots, False)
    return _build(roots, p, exact)


def degenerate_newton(roots: Sequence) -> HomogeneousRationalMap:
    """The point of coefficient space given by the Newton formula at any root list.

    Repeated roots are allowed; the result then has holes. Roots {0, 0, 1}
    give X[2X^2 - XY : 3XY - 2Y^2].
    """
    roots = list(roots)
    exact = all(is_exact_scalar(r) for r in roots)
    p = _exact_polynomial_from_roots(roots) if exact else _numeric_polynomial_from_roots(roots)
    num, den = newton_coefficients(p)
    return HomogeneousRationalMap.from_coefficients(num, den, exact=exact)


def per2_coefficients(c) -> list:
    """Ascending coefficients of z^4/12 - c z^3/6 + (4c-3)z/12 + (3-4c)/12."""
    if is_exact_scalar(c):
        c = to_exact(c)
        twelfth = sympy.Rational(1, 12)
        return [(3 - 4 * c) * twelfth, (4 * c - 3) * twelfth, sympy.Integer(0), -c / 6, twelfth]
    c = complex(c)
    return [(3 - 4 * c) / 12, (4 * c - 3) / 12, 0j, -c / 6, 1 / 12 + 0j]


def per2_slice(c) -> NewtonMap:
    """Newton map on Per_2(0): 0 -> 1 -> 0 with additional critical points 0 and c."""
    return newton_from_polynomial(per2_coefficients(c))


# =========================
# Critical points
# =========================

def _grouped_second_derivative_roots(N: NewtonMap) -> list[tuple[complex, int]]:
    values = [to_complex(r) for r in N.second_derivative_roots]
    return cluster(values, 1e-6) if values else []


def classify_critical_points(N: NewtonMap) -> list[CriticalPoint]:
    """Roots of P (superattracting, fixed) and roots of P'' (additional).

    A point that is a root of both is reported once, as a root, with
    multiplicity 1 + its multiplicity as a root of P''.
    """
    additional = _grouped_second_derivative_roots(N)
    used = [False] * len(additional)
    out: list[CriticalPoint] = []
    for r in N.numeric_roots:
        extra = 0
        for k, (c, m) in enumerate(additional):
            if not used[k] and abs(c - r) <= SHARED_ROOT_TOL * max(1.0, abs(r)):
                used[k] = True
                extra += m
        out.append(CriticalPoint(complex(r), "root", False, 1 + extra, additional=extra > 0))
    for k, (c, m) in enumerate(additional):
        if used[k]:
            continue
        # an additional point off the roots moves: N(c) = c forces P(c) = 0
        out.append(CriticalPoint(complex(c), "additional", True, m, additional=True))
    return out


def free_critical_points(N: NewtonMap) -> list[CriticalPoint]:
    return [c for c in classify_critical_points(N) if c.free]


# =========================
# Marked normal form
# =========================

def _lex_key(values: Sequence[complex]) -> tuple:
    return tuple((round(v.real, 9), round(v.imag, 9)) for v in values)


def normalize_marked(roots: Sequence) -> MarkedNormalForm:
    """Send a pair of roots at maximal distance to (0, 1).

    Ties between pairs, and between the two orders of a pair, go to the
    outcome whose remaining roots are lexicographically smallest.
    """
    roots = list(roots)
    if len(roots) < 3:
        raise ValueError("normalize_marked needs at least three roots")
    exact = all(is_exact_scalar(r) for r in roots)
    values = [to_complex(r) for r in roots]
    _check_distinct(values, False)

    n = len(values)
    dmax = max(abs(values[i] - values[j]) for i, j in itertools.combinations(range(n), 2))
    best: Optional[tuple] = None
    for i, j in itertools.permutations(range(n), 2):
        if abs(values[i] - values[j]) < dmax * (1 - 1e-12):
            continue
        scale = 1.0 / (values[j] - values[i])
        shift = -values[i] * scale
        rest = [scale * values[k] + shift for k in range(n) if k not in (i, j)]
        key = _lex_key(rest)
        if best is None or key < best[0]:
            best = (key, i, j)
    _, i, j = best

    if exact:
        ri, rj = to_exact(roots[i]), to_exact(roots[j])
        scale = exact_div(1, rj - ri)
        shift = sympy.expand(-ri * scale)
        rest = [sympy.expand(scale * to_exact(roots[k]) + shift) for k in range(n) if k not in (i, j)]
        normalized = (sympy.Integer(0), sympy.Integer(1), *rest)
    else:
        scale = 1.0 / (values[j] - values[i])
        shift = -values[i] * scale
        rest = [scale * values[k] + shift for k in range(n) if k not in (i, j)]
        normalized = (0j, 1 + 0j, *rest)
    return MarkedNormalForm(normalized, (scale, shift))


# =========================
# Named example polynomials
# =========================

@dataclass(frozen=True)
class ExamplePreset:
    name: str
    coefficients: tuple  # ascending, exact
    expected_type: Optional[str]
    note: str = ""

    def newton(self) -> NewtonMap:
        return newton_from_polynomial(self.coefficients)


def _q(num: int, den: int = 1) -> Fraction:
    return Fraction(num, den)


PRESETS: dict[str, ExamplePreset] = {
    "double-critical": ExamplePreset(
        "double-critical", (_q(1, 4), _q(-1, 4), 0, 0, _q(1, 12)), "A",
        "additional critical point 0 is double and lies on the cycle 0 -> 1 -> 0",
    ),
    "unverified-cycle": ExamplePreset(
        "unverified-cycle", (_q(-11, 12), 1, _q(-1, 2), 0, _q(1, 12)), None,
        "a 2-cycle -1 <-> 1 is expected, but N(-1) = 2/5; classified numerically only",
    ),
    "split-critical": ExamplePreset(
        "split-critical", ("7/12 - i/2", "-7/12 + i/2", 0, "1/6 - i/4", _q(1, 12)), "C",
        "0 -> 1 -> 0; the other additional point -1 + 3i/2 maps into the immediate basin of 0",
    ),
    "two-free-cycles": ExamplePreset(
        "two-free-cycles", tuple(per2_coefficients(_q(13, 10))), "D",
        "0 on the cycle 0 -> 1 -> 0; 1.3 on its own 2-cycle",
    ),
    "fixed-additional": ExamplePreset(
        "fixed-additional", (0, _q(3, 4), 0, _q(-7, 24), _q(1, 12)), "IE",
        "0 is a root and additional; 7/4 lies in the basin of 0 but not its immediate basin",
    ),
    "escape-to-root": ExamplePreset(
        "escape-to-root", (_q(-15, 4), 1, _q(-3, 2), 0, _q(1, 4)), "FE2",
        "-1 -> 1 -> -3 with -3 a root",
    ),
}


def example_preset(name: str) -> ExamplePreset:
    key = name.strip().lower().replace("_", "-")
    if key not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")
    if PRESETS[key].expected_type is None:
        logger.warning("%s: %s", key, PRESETS[key].note)
    return PRESETS[key]
