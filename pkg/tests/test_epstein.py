from fractions import Fraction

import numpy as np
import pytest

from newtonlab_app import config
from newtonlab_app.complex_rational import HomogeneousRationalMap
from newtonlab_app.epstein import (
    ATTRACTING,
    PARABOLIC_ATTRACTING,
    PARABOLIC_INDIFFERENT,
    PARABOLIC_REPELLING,
    REPELLING,
    SUPERATTRACTING,
    CycleReport,
    analyze_cycle,
    attracting_cycles_from_critical_orbits,
    cycle_gamma,
    find_cycles,
    gamma_delta,
)
from newtonlab_app.errors import NotFixedError, SolverCapError
from newtonlab_app.newton_construct import newton_from_roots, per2_slice


def _poly(*coeffs):
    return HomogeneousRationalMap.from_coefficients(list(coeffs), [1.0] + [0.0] * (len(coeffs) - 1))


def test_quadratic_newton_has_nothing_to_count():
    report = gamma_delta(newton_from_roots([1, -1]).map)
    assert report.status == "ok"
    assert report.gamma_total == 0 and report.delta == 0
    assert report.satisfied is True


def test_attracting_fixed_point_index():
    cyc = analyze_cycle(_poly(0.0, 0.5, 1.0), [0])
    assert cyc.classification == ATTRACTING
    assert cyc.multiplicity == 1
    assert cyc.index == pytest.approx(2, abs=1e-6)
    assert cycle_gamma(cyc) == 1


def test_parabolic_fixed_point_with_attracting_residu():
    # z + z^2 + 2 z^3: index 2, résidu -1
    cyc = analyze_cycle(_poly(0.0, 1.0, 1.0, 2.0), [0])
    assert cyc.classification == PARABOLIC_ATTRACTING
    assert cyc.multiplicity == 2
    assert cyc.index == pytest.approx(2, abs=1e-6)
    assert cyc.residu.real == pytest.approx(-1, abs=1e-6)
    assert cyc.degeneracy == 1
    assert cycle_gamma(cyc) == 2


def test_points_that_do_not_form_a_cycle():
    with pytest.raises(NotFixedError):
        analyze_cycle(_poly(0.0, 0.0, 1.0), [2.0])


def test_repelling_two_cycle_of_the_square_map():
    cycles = find_cycles(_poly(0.0, 0.0, 1.0), max_period=2)
    two = [c for c in cycles if c.period == 2]
    assert len(two) == 1
    assert two[0].classification == REPELLING
    assert abs(two[0].multiplier) == pytest.approx(4)
    assert sum(c.multiplicity for c in cycles if c.period == 1) == 3


def test_solver_cap_is_enforced(monkeypatch):
    monkeypatch.setattr(config, "SOLVER_CAP", 4)
    with pytest.raises(SolverCapError):
        find_cycles(_poly(0.0, 0.0, 1.0), max_period=2)


def test_superattracting_cycle_found_from_critical_orbits():
    N = per2_slice(Fraction(13, 10))
    cycles = attracting_cycles_from_critical_orbits(N.map)
    assert any(
        c.period == 2 and c.contains(0) and c.contains(1) and c.classification == SUPERATTRACTING
        for c in cycles
    )


@pytest.mark.parametrize(
    "kind, degeneracy, gamma",
    [
        (REPELLING, None, 0),
        (SUPERATTRACTING, None, 0),
        (ATTRACTING, None, 1),
        (PARABOLIC_REPELLING, 2, 2),
        (PARABOLIC_INDIFFERENT, 1, 2),
        (PARABOLIC_ATTRACTING, 3, 4),
    ],
)
def test_cycle_gamma(kind, degeneracy, gamma):
    cyc = CycleReport((), 1, 1.0, 2, 0j, 0j, kind, degeneracy)
    assert cycle_gamma(cyc) == gamma


def _random_roots(rng, n=4, min_gap=0.05):
    while True:
        radius = np.sqrt(rng.uniform(0, 1, n))
        roots = radius * np.exp(2j * np.pi * rng.uniform(0, 1, n))
        gaps = [abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]]
        if min(gaps) >= min_gap:
            return list(roots)


@pytest.mark.slow
def test_refined_inequality_on_random_quartics():
    rng = np.random.default_rng(20240612)
    resolved = 0
    for _ in range(10):
        report = gamma_delta(newton_from_roots(_random_roots(rng)).map)
        assert report.satisfied is not False, (report.gamma_total, report.delta)
        if report.status == "ok":
            resolved += 1
            assert report.gamma_total <= report.delta
    assert resolved > 0
