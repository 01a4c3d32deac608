"""Truncated Puiseux series in t with complex coefficients.

A series stores its terms (exact Fraction exponent, complex coefficient)
strictly below its truncation order; everything from that order on is
unknown. |x| = exp(-v) where v is the leading exponent.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Iterable, Optional

import sympy

from . import config
from .errors import NotIntegralError, ParseError, SeriesDivisionByZero, TruncationError

logger = logging.getLogger(__name__)


def _fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    if isinstance(q, sympy.Rational):
        return Fraction(int(q.p), int(q.q))
    if isinstance(q, str):
        return Fraction(q)
    raise ParseError(f"exponent {q!r} is not an exact rational")


def _default_order() -> Fraction:
    return Fraction(config.PUISEUX_ORDER)


@dataclass(frozen=True)
class PuiseuxSeries:
    terms: tuple
    truncation: Fraction

    # ---- construction

    @classmethod
    def from_terms(cls, terms: Iterable, truncation=None, scale: Optional[float] = None) -> "PuiseuxSeries":
        truncation = _default_order() if truncation is None else _fraction(truncation)
        acc: dict[Fraction, complex] = {}
        for q, c in terms:
            q = _fraction(q)
            if q >= truncation:
                continue
            acc[q] = acc.get(q, 0j) + complex(c)
        if scale is None:
            scale = max((abs(c) for c in acc.values()), default=0.0)
        floor = config.PRUNE * scale
        kept = tuple(sorted((q, c) for q, c in acc.items() if abs(c) > floor))
        return cls(kept, truncation)

    @classmethod
    def constant(cls, c, truncation=None) -> "PuiseuxSeries":
        return cls.from_terms([(0, c)], truncation)

    @classmethod
    def monomial(cls, c, q, truncation=None) -> "PuiseuxSeries":
        """c t^q; a nonzero c with q at or past the truncation order is an error."""
        out = cls.from_terms([(q, c)], truncation)
        if out.is_zero and complex(c) != 0:
            raise TruncationError(
                f"t^{_fraction(q)} is not below the truncation order t^{out.truncation}; "
                "raise NEWTONLAB_PUISEUX_ORDER"
            )
        return out

    @classmethod
    def zero(cls, truncation=None) -> "PuiseuxSeries":
        return cls((), _default_order() if truncation is None else _fraction(truncation))

    @classmethod
    def t(cls, truncation=None) -> "PuiseuxSeries":
        return cls.monomial(1.0, 1, truncation)

    # ---- basic data

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def valuation(self):
        """Leading exponent; math.inf for the zero series."""
        return self.terms[0][0] if self.terms else math.inf

    @property
    def leading_coefficient(self) -> complex:
        if not self.terms:
            raise TruncationError("the zero series has no leading term; raise NEWTONLAB_PUISEUX_ORDER")
        return self.terms[0][1]

    def __abs__(self) -> float:
        return 0.0 if self.is_zero else math.exp(-float(self.valuation))

    @property
    def scale(self) -> float:
        return max((abs(c) for _, c in self.terms), default=0.0)

    def coefficient(self, q) -> complex:
        q = _fraction(q)
        for e, c in self.terms:
            if e == q:
                return c
        return 0j

    def with_truncation(self, truncation) -> "PuiseuxSeries":
        truncation = min(_fraction(truncation), self.truncation)
        return PuiseuxSeries(tuple((q, c) for q, c in self.terms if q < truncation), truncation)

    def truncate_below(self, q) -> "PuiseuxSeries":
        """Terms with exponent < q; the centre of the disk of radius exp(-q)."""
        q = _fraction(q)
        return PuiseuxSeries(tuple((e, c) for e, c in self.terms if e < q), min(q, self.truncation))

    def known_below(self, q) -> bool:
        return self.truncation >= _fraction(q)

    # ---- arithmetic

    def _coerce(self, other) -> Optional["PuiseuxSeries"]:
        if isinstance(other, PuiseuxSeries):
            return other
        if isinstance(other, (Number, sympy.Number)):
            return PuiseuxSeries.constant(complex(other), self.truncation)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        truncation = min(self.truncation, o.truncation)
        return PuiseuxSeries.from_terms(self.terms + o.terms, truncation, max(self.scale, o.scale))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(tuple((q, -c) for q, c in self.terms), self.truncation)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scaled(self, c) -> "PuiseuxSeries":
        c = complex(c)
        if c == 0:
            return PuiseuxSeries.zero(self.truncation)
        return PuiseuxSeries(tuple((q, c * a) for q, a in self.terms), self.truncation)

    def shifted(self, q) -> "PuiseuxSeries":
        """Multiplication by t^q."""
        q = _fraction(q)
        return PuiseuxSeries(tuple((e + q, c) for e, c in self.terms), self.truncation + q)

    def __mul__(self, other):
        if isinstance(other, (Number, sympy.Number)) and not isinstance(other, PuiseuxSeries):
            return self.scaled(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        vx, vy = self.valuation, other.valuation
        if self.is_zero and other.is_zero:
            truncation = self.truncation + other.truncation
        elif self.is_zero:
            truncation = self.truncation + vy
        elif other.is_zero:
            truncation = other.truncation + vx
        else:
            truncation = min(self.truncation + vy, other.truncation + vx)
        products = [(qa + qb, ca * cb) for qa, ca in self.terms for qb, cb in other.terms]
        return PuiseuxSeries.from_terms(products, truncation, self.scale * other.scale)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return PuiseuxSeries.constant(1.0, _default_order())
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def _unit_part(self) -> tuple[complex, Fraction, "PuiseuxSeries"]:
        """x = c t^v (1 + u) with v(u) > 0; u carries relative precision T - v."""
        if self.is_zero:
            raise SeriesDivisionByZero("series is zero to its truncation order")
        v, c = self.terms[0]
        relative = self.truncation - v
        u = PuiseuxSeries.from_terms(((q - v, a / c) for q, a in self.terms[1:]), relative)
        return c, v, u

    def inverse(self) -> "PuiseuxSeries":
        c, v, u = self._unit_part()
        relative = self.truncation - v
        total = PuiseuxSeries.constant(1.0, relative)
        if not u.is_zero:
            k_max = math.ceil(relative / u.valuation)
            power = PuiseuxSeries.constant(1.0, relative)
            for k in range(1, k_max + 1):
                power = power * (-u)
                if power.is_zero:
                    break
                total = total + power
        return PuiseuxSeries.from_terms(((q - v, a / c) for q, a in total.terms), self.truncation - 2 * v)

    def __truediv__(self, other):
        if isinstance(other, (Number, sympy.Number)) and not isinstance(other, PuiseuxSeries):
            if complex(other) == 0:
                raise SeriesDivisionByZero("division by the scalar 0")
            return self.scaled(1 / complex(other))
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def sqrt(self) -> "PuiseuxSeries":
        """Principal square root, the leading coefficient's branch chosen by cmath."""
        if self.is_zero:
            return PuiseuxSeries.zero(self.truncation / 2)
        c, v, u = self._unit_part()
        relative = self.truncation - v
        total = PuiseuxSeries.constant(1.0, relative)
        if not u.is_zero:
            k_max = math.ceil(relative / u.valuation)
            power = PuiseuxSeries.constant(1.0, relative)
            binom = 1.0
            for k in range(1, k_max + 1):
                binom *= (0.5 - (k - 1)) / k
                power = power * u
                if power.is_zero:
                    break
                total = total + power.scaled(binom)
        root = cmath.sqrt(c)
        half = v / 2
        return PuiseuxSeries.from_terms(((q + half, a * root) for q, a in total.terms), self.truncation - half)

    # ---- comparisons

    def close_to(self, other: "PuiseuxSeries", tol: float = 1e-9) -> bool:
        upto = min(self.truncation, other.truncation)
        diff = self.with_truncation(upto) - other.with_truncation(upto)
        return all(abs(c) <= tol * max(1.0, self.scale, other.scale) for _, c in diff.terms)

    def same_disk(self, other: "PuiseuxSeries", q) -> bool:
        """|x - y| <= exp(-q)."""
        return (self - other).valuation >= _fraction(q)

    # ---- reduction and evaluation

    def reduce(self) -> complex:
        if self.is_zero:
            return 0j
        v = self.valuation
        if v < 0:
            raise NotIntegralError(f"|x| = e^{-v} > 1: not in the ring of integers")
        return self.terms[0][1] if v == 0 else 0j

    def evaluate_at(self, t0) -> complex:
        t0 = complex(t0)
        return sum((c * t0 ** float(q) for q, c in self.terms), 0j)

    def truncation_error(self, t0) -> float:
        return abs(complex(t0)) ** float(self.truncation)

    # ---- text

    def __str__(self) -> str:
        if self.is_zero:
            return f"0 + O(t^{self.truncation})"
        parts = []
        for q, c in self.terms:
            coeff = _format_complex(c)
            if q == 0:
                parts.append(coeff)
                continue
            mono = "t" if q == 1 else (f"t^{q}" if q.denominator == 1 else f"t^({q})")
            parts.append(mono if coeff == "1" else f"{coeff}*{mono}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "terms": [[str(q), [c.real, c.imag]] for q, c in self.terms],
            "truncation": str(self.truncation),
            "text": str(self),
        }


def _format_complex(c: complex) -> str:
    re, im = round(c.real, 12), round(c.imag, 12)
    if im == 0:
        return f"{re:g}"
    if re == 0:
        return f"({im:g}i)"
    return f"({re:g}{im:+g}i)"


def as_series(value, truncation=None) -> PuiseuxSeries:
    if isinstance(value, PuiseuxSeries):
        return value
    if isinstance(value, str):
        return parse(value, truncation)
    return PuiseuxSeries.constant(complex(value), truncation)


# =========================
# Parsing
# =========================

T_SYMBOL = sympy.Symbol("t", positive=True)


def _walk(expr, truncation: Fraction) -> PuiseuxSeries:
    if expr == T_SYMBOL:
        return PuiseuxSeries.monomial(1.0, 1, truncation)
    if expr.is_number:
        return PuiseuxSeries.constant(complex(expr), truncation)
    if isinstance(expr, sympy.Add):
        out = PuiseuxSeries.zero(truncation)
        for arg in expr.args:
            out = out + _walk(arg, truncation)
        return out
    if isinstance(expr, sympy.Mul):
        out = PuiseuxSeries.constant(1.0, truncation)
        for arg in expr.args:
            out = out * _walk(arg, truncation)
        return out
    if isinstance(expr, sympy.Pow):
        base, exp = expr.args
        if base == T_SYMBOL and exp.is_Rational:
            return PuiseuxSeries.monomial(1.0, _fraction(exp), truncation)
        if exp.is_Integer:
            return _walk(base, truncation) ** int(exp)
        if exp == sympy.Rational(1, 2):
            return _walk(base, truncation).sqrt()
        if exp == sympy.Rational(-1, 2):
            return _walk(base, truncation).sqrt().inverse()
    raise ParseError(f"unsupported series expression {expr}")


def parse(text: str, truncation=None) -> PuiseuxSeries:
    """Series literal such as "t", "t^(3/2) + 2*t^2", "1/2" or "1/(1 - t)"."""
    truncation = _default_order() if truncation is None else _fraction(truncation)
    try:
        expr = sympy.sympify(
            text.replace("^", "**"),
            locals={"t": T_SYMBOL, "i": sympy.I, "I": sympy.I, "sqrt": sympy.sqrt},
        )
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ParseError(f"cannot parse series {text!r}: {e}") from e
    free = expr.free_symbols - {T_SYMBOL}
    if free:
        raise ParseError(f"unknown symbols {sorted(map(str, free))} in series {text!r}")
    return _walk(expr, truncation)
