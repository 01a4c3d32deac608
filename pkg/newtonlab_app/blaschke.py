"""The model map B_a(w) = -w^k (w - a)/(1 - a w) of an immediate basin escaping to ∞.

As a -> 1 the non-fixed critical point x_a tends to 1, the segment [0, x_a]
stays forward invariant, d(x_a, B_a(x_a)) stays bounded and B_a tends to w^k
locally uniformly on the disk.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import BracketingError

logger = logging.getLogger(__name__)

INVARIANCE_SAMPLES = 256
LIMIT_RADIUS = 0.9
LIMIT_SAMPLES = 512
BOUNDARY_SAMPLES = 100


@dataclass(frozen=True)
class BlaschkeParams:
    a: float
    k: int = 2

    def __post_init__(self):
        if not 0 < self.a < 1:
            raise ValueError(f"a must lie in (0, 1), got {self.a}")
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"k must be an integer >= 2, got {self.k}")


def blaschke(params: BlaschkeParams, w):
    w = np.asarray(w, dtype=complex)
    a, k = params.a, params.k
    return -(w ** k) * (w - a) / (1 - a * w)


def blaschke_derivative_numerator(params: BlaschkeParams) -> np.ndarray:
    """Quadratic q with B_a'(w) = w^(k-1) q(w) / (1 - a w)^2, ascending coefficients.

    q(w) = k a w^2 - ((k+1) + (k-1) a^2) w + k a; its roots are x_a and 1/x_a.
    """
    a, k = params.a, params.k
    return np.array([k * a, -((k + 1) + (k - 1) * a * a), k * a])


def _sign_changes(values: np.ndarray) -> int:
    s = np.sign(values)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def nonfixed_critical(params: BlaschkeParams) -> float:
    """x_a: the critical point of B_a in (0, 1)."""
    q = np.polynomial.Polynomial(blaschke_derivative_numerator(params))
    grid = np.linspace(0.0, 1.0, 1025)
    if _sign_changes(q(grid)) != 1:
        raise BracketingError(f"expected exactly one critical point in (0, 1) for a={params.a}, k={params.k}")
    try:
        return float(brentq(q, 0.0, 1.0, xtol=1e-15))
    except ValueError as e:
        raise BracketingError(f"could not bracket x_a for a={params.a}: {e}") from e


def hyperbolic_distance(p: complex, q: complex) -> float:
    """Poincaré distance on the unit disk, curvature -1."""
    pseudo = abs((p - q) / (1 - np.conj(p) * q))
    if pseudo >= 1:
        return math.inf
    return 2 * math.atanh(pseudo)


def segment_invariant(params: BlaschkeParams, x_a: float, samples: int = INVARIANCE_SAMPLES) -> tuple[bool, float]:
    """B_a([0, x_a]) ⊆ [0, x_a] on a sampled grid; also returns the largest overshoot."""
    xs = np.linspace(0.0, x_a, samples)
    values = blaschke(params, xs)
    overshoot = max(
        float(np.max(np.abs(values.imag))),
        float(np.max(values.real - x_a)),
        float(np.max(-values.real)),
    )
    return overshoot <= 1e-12, overshoot


def limit_distance(params: BlaschkeParams, radius: float = LIMIT_RADIUS, samples: int = LIMIT_SAMPLES) -> float:
    """sup over |w| <= radius of |B_a(w) - w^k|; attained on the circle."""
    w = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.max(np.abs(blaschke(params, w) - w ** params.k)))


def taylor_coefficients(params: BlaschkeParams, n: int = 8, radius: float = 0.5) -> np.ndarray:
    """First n Taylor coefficients at 0 by FFT on a circle inside the disk of convergence 1/a."""
    m = 256
    w = radius * np.exp(2j * np.pi * np.arange(m) / m)
    coeffs = np.fft.fft(blaschke(params, w)) / m
    return coeffs[:n] / radius ** np.arange(n)


def local_degree(params: BlaschkeParams, tol: float = 1e-10) -> int:
    c = taylor_coefficients(params, params.k + 2)
    return int(np.argmax(np.abs(c) > tol))


def boundary_modulus_defect(params: BlaschkeParams, samples: int = BOUNDARY_SAMPLES) -> float:
    theta = 2 * np.pi * np.arange(samples) / samples
    return float(np.max(np.abs(np.abs(blaschke(params, np.exp(1j * theta))) - 1)))


@dataclass(frozen=True)
class EscapeRow:
    a: float
    x_a: float
    image: float
    invariant: bool
    overshoot: float
    distance: float
    limit_distance: float


@dataclass
class EscapeTable:
    k: int
    rows: list
    limit: str = "w^k"

    @property
    def x_increasing(self) -> bool:
        xs = [r.x_a for r in self.rows]
        return all(b > a for a, b in zip(xs, xs[1:]))

    @property
    def all_invariant(self) -> bool:
        return all(r.invariant for r in self.rows)

    @property
    def limit_decreasing(self) -> bool:
        ds = [r.limit_distance for r in self.rows]
        return all(b < a for a, b in zip(ds, ds[1:]))

    def distance_bounded(self, reference: int = 2, band: float = 0.2) -> Optional[bool]:
        """Distances after row `reference` stay within `band` of it; None with too few rows."""
        if len(self.rows) <= reference + 1:
            return None
        ref = self.rows[reference].distance
        return all(abs(r.distance - ref) <= band * ref for r in self.rows[reference + 1:])

    @property
    def verified(self) -> bool:
        bounded = self.distance_bounded()
        return self.x_increasing and self.all_invariant and self.limit_decreasing and bounded is not False

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "limit": self.limit,
            "rows": [asdict(r) for r in self.rows],
            "x_increasing": self.x_increasing,
            "all_invariant": self.all_invariant,
            "limit_decreasing": self.limit_decreasing,
            "distance_bounded": self.distance_bounded(),
            "verified": self.verified,
        }

    def to_text(self) -> str:
        head = f"{'a':>12}  {'x_a':>12}  {'B_a(x_a)':>12}  {'inv':>3}  {'d(x_a,B x_a)':>13}  {'sup|B_a-w^k|':>13}"
        lines = [f"k = {self.k}", head, "-" * len(head)]
        for r in self.rows:
            lines.append(
                f"{r.a:12.8f}  {r.x_a:12.8f}  {r.image:12.8f}  {'yes' if r.invariant else 'NO':>3}  "
                f"{r.distance:13.6f}  {r.limit_distance:13.3e}"
            )
        return "\n".join(lines)


def default_a_sequence(n: int = 6) -> list[float]:
    return [1 - 10.0 ** (-j) for j in range(1, n + 1)]


def escape_diagnostics(k: int = 2, a_sequence: Optional[Sequence[float]] = None) -> EscapeTable:
    a_sequence = default_a_sequence() if a_sequence is None else list(a_sequence)
    if any(b <= a for a, b in zip(a_sequence, a_sequence[1:])):
        raise ValueError("a values must increase")
    rows = []
    for a in a_sequence:
        params = BlaschkeParams(float(a), k)
        x_a = nonfixed_critical(params)
        image = complex(blaschke(params, x_a))
        invariant, overshoot = segment_invariant(params, x_a)
        if not invariant:
            logger.warning("segment [0, x_a] not invariant at a=%s (overshoot %.3e)", a, overshoot)
        rows.append(EscapeRow(
            a=float(a),
            x_a=x_a,
            image=image.real,
            invariant=invariant,
            overshoot=overshoot,
            distance=hyperbolic_distance(x_a, image),
            limit_distance=limit_distance(params),
        ))
    return EscapeTable(k, rows)


__all__ = [
    "BlaschkeParams",
    "EscapeRow",
    "EscapeTable",
    "blaschke",
    "blaschke_derivative_numerator",
    "boundary_modulus_defect",
    "default_a_sequence",
    "escape_diagnostics",
    "hyperbolic_distance",
    "limit_distance",
    "local_degree",
    "nonfixed_critical",
    "segment_invariant",
    "taylor_coefficients",
]
