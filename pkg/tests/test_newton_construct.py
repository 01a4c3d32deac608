import logging
from fractions import Fraction

import numpy as np
import pytest
import sympy

from newtonlab_app.complex_rational import evaluate_affine, evaluate_exact
from newtonlab_app.errors import RepeatedRootsError
from newtonlab_app.newton_construct import (
    classify_critical_points,
    example_preset,
    free_critical_points,
    newton_coefficients,
    newton_from_polynomial,
    newton_from_roots,
    normalize_marked,
    per2_slice,
)


def test_newton_coefficient_formula():
    num, den = newton_coefficients([1, 2, 3, 4, 5])
    assert num == [-1, 0, 3, 8, 15]
    assert den == [2, 6, 12, 20, 0]


def test_roots_are_superattracting_fixed_points():
    N = newton_from_roots([1, -1, "i", "-i"])
    assert N.exact and N.degree == 4
    for r in N.roots:
        assert sympy.simplify(evaluate_exact(N.map, r) - r) == 0
    values = evaluate_affine(N.map.numeric(), N.numeric_roots)
    assert np.allclose(values, N.numeric_roots)


def test_repeated_roots_are_rejected():
    with pytest.raises(RepeatedRootsError):
        newton_from_roots([0, 1, 1])
    with pytest.raises(RepeatedRootsError):
        newton_from_polynomial([0, 0, 1])


def test_per2_slice_cycle_holds_exactly():
    rng = np.random.default_rng(3)
    for _ in range(20):
        c = Fraction(int(rng.integers(-40, 40)), int(rng.integers(1, 17)))
        if c in (0, Fraction(3, 4), Fraction(1, 2)):
            continue
        N = per2_slice(c)
        assert evaluate_exact(N.map, 0) == 1
        assert evaluate_exact(N.map, 1) == 0
        additional = sorted(complex(cp.location).real for cp in classify_critical_points(N) if cp.additional)
        assert additional == pytest.approx(sorted([0.0, float(c)]))


def test_double_additional_critical_point():
    N = example_preset("double-critical").newton()
    extra = [cp for cp in classify_critical_points(N) if cp.kind == "additional"]
    assert len(extra) == 1
    assert extra[0].location == pytest.approx(0) and extra[0].multiplicity == 2
    assert extra[0].free


def test_root_that_is_also_additional():
    N = example_preset("fixed-additional").newton()
    points = classify_critical_points(N)
    at_zero = [cp for cp in points if cp.is_root and abs(cp.location) < 1e-12]
    assert len(at_zero) == 1
    assert at_zero[0].additional and at_zero[0].multiplicity == 2
    free = free_critical_points(N)
    assert len(free) == 1 and free[0].location == pytest.approx(7 / 4)


def test_unverified_cycle_is_flagged(caplog):
    with caplog.at_level(logging.WARNING, logger="newtonlab_app.newton_construct"):
        preset = example_preset("Unverified_Cycle")
    assert preset.expected_type is None
    assert "unverified-cycle" in caplog.text
    assert evaluate_exact(preset.newton().map, -1) == sympy.Rational(2, 5)


def test_unknown_preset():
    with pytest.raises(KeyError):
        example_preset("nope")


def test_normalize_marked_sends_widest_pair_to_zero_and_one():
    nf = normalize_marked([0, 2, 1])
    assert complex(nf.normalized_roots[0]) == 0
    assert complex(nf.normalized_roots[1]) == 1
    assert complex(nf.normalized_roots[2]) == pytest.approx(0.5)
    assert complex(nf.apply(2)) == pytest.approx(1)


def _random_roots(rng, n):
    return list(rng.normal(size=n) + 1j * rng.normal(size=n))


def test_normal_form_is_idempotent():
    rng = np.random.default_rng(5)
    for _ in range(50):
        nf = normalize_marked(_random_roots(rng, 4))
        again = normalize_marked(list(nf.normalized_roots))
        assert np.allclose(np.array(again.normalized_roots, dtype=complex),
                           np.array(nf.normalized_roots, dtype=complex), atol=1e-9)


def test_normal_form_ignores_affine_conjugation():
    rng = np.random.default_rng(6)
    for _ in range(50):
        roots = _random_roots(rng, 4)
        a = complex(*rng.normal(size=2))
        b = complex(*rng.normal(size=2))
        moved = normalize_marked([a * r + b for r in roots])
        base = normalize_marked(roots)
        assert np.allclose(np.array(moved.normalized_roots, dtype=complex),
                           np.array(base.normalized_roots, dtype=complex), atol=1e-9)
