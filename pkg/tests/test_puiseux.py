import math
from fractions import Fraction

import numpy as np
import pytest

from newtonlab_app.errors import NewtonLabError, NotIntegralError, ParseError, SeriesDivisionByZero, TruncationError
from newtonlab_app.puiseux import PuiseuxSeries, parse


def test_parse_keeps_fractional_exponents():
    x = parse("t^(3/2) + 2*t^2")
    assert x.valuation == Fraction(3, 2)
    assert x.coefficient(2) == 2
    assert str(x) == "t^(3/2) + 2*t^2"
    assert abs(x) == pytest.approx(math.exp(-1.5))


def test_geometric_series_from_division():
    x = parse("1/(1 - t)")
    assert x.truncation == 8
    assert all(x.coefficient(k) == pytest.approx(1) for k in range(8))


def test_square_root_of_a_square():
    x = parse("(1 + t)^2")
    assert x.sqrt().close_to(parse("1 + t"))
    half = PuiseuxSeries.t().sqrt()
    assert half.valuation == Fraction(1, 2)
    assert (half * half).coefficient(1) == pytest.approx(1)


def test_reduction_to_the_residue_field():
    assert parse("2 + t").reduce() == 2
    assert parse("t^(1/3)").reduce() == 0
    assert PuiseuxSeries.zero().reduce() == 0
    with pytest.raises(NotIntegralError):
        parse("1/t").reduce()


def test_division_by_zero_series():
    with pytest.raises(SeriesDivisionByZero):
        PuiseuxSeries.zero().inverse()
    with pytest.raises(SeriesDivisionByZero):
        parse("t") / 0


def test_terms_past_the_truncation_order_are_rejected():
    with pytest.raises(TruncationError):
        parse("t^10")
    with pytest.raises(TruncationError):
        parse("1 + 3*t^8")
    with pytest.raises(NewtonLabError):
        PuiseuxSeries.monomial(2.0, 9)
    assert parse("t^10", truncation=12).valuation == 10
    assert PuiseuxSeries.monomial(0, 9).is_zero


def test_absolute_value_is_multiplicative():
    x, y = parse("t^5 + t^6"), parse("2*t^(1/2)")
    assert abs(x * y) == pytest.approx(abs(x) * abs(y))
    assert abs(x * x) == pytest.approx(abs(x) ** 2)


def test_unknown_symbol_is_a_parse_error():
    with pytest.raises(ParseError):
        parse("x + t")


def test_evaluation_and_disks():
    assert parse("t^(1/2)").evaluate_at(0.25) == pytest.approx(0.5)
    a, b = parse("t + t^3"), parse("t + 2*t^3")
    assert a.same_disk(b, 3)
    assert not a.same_disk(b, 4)
    assert not a.close_to(b)


def _random_series(rng, n_terms=4):
    exps = [Fraction(int(rng.integers(-4, 12)), int(rng.integers(1, 4))) for _ in range(n_terms)]
    coeffs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    return PuiseuxSeries.from_terms(zip(exps, coeffs))


def test_ultrametric_inequality_on_random_series():
    rng = np.random.default_rng(17)
    for _ in range(200):
        x, y = _random_series(rng), _random_series(rng)
        assert abs(x + y) <= max(abs(x), abs(y)) * (1 + 1e-12)
        if not x.is_zero and not y.is_zero:
            assert abs(x * y) == pytest.approx(abs(x) * abs(y))
        if abs(x) != abs(y):
            assert abs(x - y) == pytest.approx(max(abs(x), abs(y)))
