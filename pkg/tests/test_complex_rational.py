import numpy as np
import pytest
import sympy

from newtonlab_app.complex_rational import (
    HomogeneousRationalMap,
    ProjectivePoint,
    critical_points,
    evaluate,
    evaluate_affine,
    extract_holes,
    fixed_points,
    iterate,
    multiplier_at,
    projective_distance,
    to_exact,
)
from newtonlab_app.epstein import find_cycles
from newtonlab_app.errors import IndeterminatePointError, NewtonLabError, ParseError
from newtonlab_app.newton_construct import degenerate_newton, newton_from_roots
from newtonlab_app.polyroots import cluster, poly_roots


def _square():
    return HomogeneousRationalMap.from_coefficients([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])


def _random_roots(rng, n=4, min_gap=0.05):
    while True:
        radius = np.sqrt(rng.uniform(0, 1, n))
        roots = radius * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        gaps = [abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]]
        if min(gaps) >= min_gap:
            return list(roots)


def test_exact_scalars():
    assert to_exact("1/2 + i") == sympy.Rational(1, 2) + sympy.I
    assert to_exact(3) == 3
    with pytest.raises(ParseError):
        to_exact("sqrt(2)")


def test_projective_points():
    assert ProjectivePoint.infinity().is_infinity
    assert ProjectivePoint.finite(2).affine == pytest.approx(2)
    assert ProjectivePoint.of(2, 2).close_to(ProjectivePoint.finite(1))
    with pytest.raises(IndeterminatePointError):
        ProjectivePoint.of(0, 0)


def test_zero_map_is_rejected():
    with pytest.raises(NewtonLabError):
        HomogeneousRationalMap.from_coefficients([0, 0], [0, 0])


def test_cubic_collision_has_a_hole_with_half_multiplier():
    f = degenerate_newton([0, 0, 1])
    assert f.exact
    holes = extract_holes(f)
    assert len(holes.holes) == 1
    point, mult = holes.holes[0]
    assert point.close_to(ProjectivePoint.finite(0)) and mult == 1

    reduced = holes.reduced_map
    assert reduced.formal_degree == 2
    expected = HomogeneousRationalMap.from_coefficients([0, -1, 2], [-2, 3, 0])
    assert projective_distance(reduced.coefficient_vector(), expected.coefficient_vector()) < 1e-12
    assert multiplier_at(reduced, 0) == sympy.Rational(1, 2)


def test_evaluation_at_a_hole_needs_the_reduced_map():
    f = degenerate_newton([0, 0, 1]).numeric()
    holes = extract_holes(f)
    with pytest.raises(IndeterminatePointError):
        evaluate(f, 0.0)
    assert evaluate(f, 0.0, reduced=holes).close_to(ProjectivePoint.finite(0))


def test_recompose_returns_the_original_point():
    f = degenerate_newton([0, 0, 1, 2])
    holes = extract_holes(f)
    back = holes.recompose()
    assert projective_distance(back.coefficient_vector(), f.numeric().coefficient_vector()) < 1e-10


def test_numeric_hole_extraction_matches_exact():
    exact = extract_holes(degenerate_newton([0, 0, 1, 1]))
    numeric = extract_holes(degenerate_newton([0.0, 0.0, 1.0, 1.0]))
    assert sorted(m for _, m in exact.holes) == sorted(m for _, m in numeric.holes)
    assert numeric.reduced_map.formal_degree == exact.reduced_map.formal_degree == 2


def test_fixed_points_of_quadratic_newton():
    N = newton_from_roots([1, -1])
    records = fixed_points(N.map)
    assert sum(r.multiplicity for r in records) == 3
    at_inf = [r for r in records if r.location.is_infinity]
    assert len(at_inf) == 1 and at_inf[0].multiplier == pytest.approx(2)
    roots = [r for r in records if not r.location.is_infinity]
    assert all(abs(r.multiplier) < 1e-12 for r in roots)


def test_critical_points_and_iteration():
    f = _square()
    crit = critical_points(f)
    assert sum(m for _, m in crit) == 2
    assert any(p.is_infinity for p, _ in crit)
    g = iterate(f, 2)
    assert g.formal_degree == 4
    assert evaluate_affine(g, 1.1) == pytest.approx(1.1 ** 4)


def test_random_quartic_fixed_point_sums():
    rng = np.random.default_rng(20240611)
    for _ in range(100):
        N = newton_from_roots(_random_roots(rng))
        cycles = find_cycles(N.map, max_period=1)
        assert sum(c.multiplicity for c in cycles) == 5
        assert abs(sum(c.index for c in cycles) - 1) <= 1e-6
        assert abs(multiplier_at(N.map, "inf") - 4 / 3) <= 1e-12


def test_poly_roots_and_cluster():
    roots = np.sort_complex(poly_roots([-6, 11, -6, 1]))
    assert np.allclose(roots, [1, 2, 3])
    assert list(poly_roots([0, 0, 1])) == [0, 0]
    groups = cluster([1.0, 1.0 + 1e-9, 2.0], 1e-6)
    assert [m for _, m in groups] == [2, 1]
