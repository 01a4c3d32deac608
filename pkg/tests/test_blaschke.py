import math

import numpy as np
import pytest

from newtonlab_app.blaschke import (
    BlaschkeParams,
    blaschke_derivative_numerator,
    boundary_modulus_defect,
    default_a_sequence,
    escape_diagnostics,
    hyperbolic_distance,
    limit_distance,
    local_degree,
    nonfixed_critical,
    segment_invariant,
    taylor_coefficients,
)


def test_parameters_are_checked():
    with pytest.raises(ValueError):
        BlaschkeParams(1.0)
    with pytest.raises(ValueError):
        BlaschkeParams(0.5, k=1)


def test_critical_point_pair():
    params = BlaschkeParams(0.9)
    x_a = nonfixed_critical(params)
    assert x_a == pytest.approx(0.71182, abs=1e-4)
    roots = np.sort(np.polynomial.Polynomial(blaschke_derivative_numerator(params)).roots().real)
    assert roots[0] == pytest.approx(x_a)
    assert roots[0] * roots[1] == pytest.approx(1)


def test_segment_and_boundary():
    params = BlaschkeParams(0.9)
    invariant, overshoot = segment_invariant(params, nonfixed_critical(params))
    assert invariant and overshoot <= 1e-12
    assert boundary_modulus_defect(params) < 1e-12


def test_local_degree_at_zero():
    params = BlaschkeParams(0.9)
    c = taylor_coefficients(params)
    assert abs(c[0]) < 1e-12 and abs(c[1]) < 1e-12
    assert c[2] == pytest.approx(0.9)
    assert local_degree(params) == 2


def test_hyperbolic_distance():
    assert hyperbolic_distance(0, 0.5) == pytest.approx(math.log(3))
    assert hyperbolic_distance(0, 1) == math.inf


def test_escape_table():
    table = escape_diagnostics()
    assert [r.a for r in table.rows] == default_a_sequence()
    assert table.x_increasing and table.all_invariant and table.limit_decreasing
    assert table.verified
    assert limit_distance(BlaschkeParams(0.99)) < limit_distance(BlaschkeParams(0.9))
    assert "k = 2" in table.to_text()


def test_a_values_must_increase():
    with pytest.raises(ValueError):
        escape_diagnostics(2, [0.99, 0.9])
