import math
from fractions import Fraction

import pytest

from newtonlab_app.complex_rational import HomogeneousRationalMap
from newtonlab_app.degeneration import (
    CycleTrack,
    FamilySpec,
    _extrapolate,
    basin_shrink_check,
    compare_with_berkovich,
    limit_dichotomy,
    parabolic_collision_check,
    sample_family,
    sample_maps,
    sample_per2_family,
    track_limit_cycles,
    uniform_convergence_check,
)
from newtonlab_app.epstein import PARABOLIC_ATTRACTING
from newtonlab_app.errors import ParseError


def _track(limits, holes=()):
    phases = [i for i, z in enumerate(limits) if any(abs(z - h) < 1e-9 for h in holes)]
    return CycleTrack(
        len(limits), [], [], [],
        limits=list(limits), errors=[1e-9] * len(limits), limit_set=list(dict.fromkeys(limits)),
        colliding_holes=list(holes), hole_phases=phases,
    )


@pytest.fixture(scope="module")
def per2_sample():
    return sample_per2_family("3/4 + t")


@pytest.fixture(scope="module")
def parabolic_sample():
    # fixed points ±iδ merge at the parabolic point 0 of z + z^2 + 2z^3
    deltas = [0.04, 0.02, 0.01]
    maps = [HomogeneousRationalMap.from_coefficients([d * d, 1 + 2 * d * d, 1.0, 2.0], [1.0, 0.0, 0.0, 0.0])
            for d in deltas]
    limit = HomogeneousRationalMap.from_coefficients([0.0, 1.0, 1.0, 2.0], [1.0, 0.0, 0.0, 0.0])
    return sample_maps(deltas, maps, limit, label="parabolic merge")


def test_family_spec_forms():
    spec = FamilySpec.parse("r = t; s = 1/2")
    assert len(spec.roots) == 4
    r, s = spec.pair
    assert r.valuation == 1 and s.coefficient(0) == pytest.approx(0.5)

    odd = FamilySpec.parse("roots = -1, -t, 0, t, 1", negate=True)
    assert len(odd.roots) == 5 and odd.pair is None and odd.negate


@pytest.mark.parametrize("text", ["q = t", "r t", "r = t"])
def test_family_spec_errors(text):
    with pytest.raises(ParseError):
        FamilySpec.parse(text)


def test_richardson_recovers_a_quadratic_in_t():
    c0, c1, c2 = 1.5 - 0.5j, 2.0, 5.0
    ts = [1e-1, 1e-2, 1e-3]
    limit, err = _extrapolate(ts, [c0 + c1 * t + c2 * t * t for t in ts])
    assert abs(limit - c0) < 1e-9
    assert err < 1e-3


def test_richardson_in_a_fractional_power_of_t():
    ts = [1e-2, 1e-4, 1e-6]
    limit, _ = _extrapolate(ts, [1 + 3 * t ** 0.5 for t in ts])
    assert limit == pytest.approx(1.0, abs=1e-9)
    limit, err = _extrapolate([1.0, 0.5, 0.25], [4, 3.5, 3.25])
    assert limit == pytest.approx(3.0) and err == pytest.approx(0.0, abs=1e-12)


def test_extrapolation_edge_cases():
    assert _extrapolate([0.1], [2.0]) == (2.0, math.inf)
    assert _extrapolate([0.1, 0.01, 0.001], [0.5, 0.5, 0.5])[0] == 0.5
    with pytest.raises(ValueError):
        _extrapolate([0.1, 0.01], [1.0])


def test_dichotomy_on_given_limit_sets():
    proper = _track([0j, 1 + 0j], holes=[0j])
    equal = _track([0j], holes=[0j])
    away = _track([0.5 + 0.5j, 2 + 0j])
    assert proper.relation == "proper" and equal.relation == "equal" and away.relation == "disjoint"

    assert limit_dichotomy([proper], "type1").holds
    assert not limit_dichotomy([equal], "type1").holds
    assert limit_dichotomy([equal], "type3a").holds
    assert limit_dichotomy([proper, equal], "type3b").holds
    assert not limit_dichotomy([away], "type2").holds
    assert limit_dichotomy([away], "nondegenerate").holds
    assert not limit_dichotomy([proper], "nondegenerate").holds


def test_per2_cycle_keeps_one_point_at_the_hole(per2_sample):
    assert per2_sample.gap == 1
    assert per2_sample.is_hole(0j)
    tracks = track_limit_cycles(per2_sample, 2)
    cycle = [t for t in tracks if t.contains(0j) and t.contains(1 + 0j)]
    assert cycle and cycle[0].relation == "proper"
    assert limit_dichotomy(tracks, "type1").holds
    assert uniform_convergence_check(per2_sample).ok


@pytest.mark.slow
def test_per2_basin_at_the_hole(per2_sample):
    tracks = track_limit_cycles(per2_sample, 2)
    track = next(t for t in tracks if t.relation == "proper")
    report = basin_shrink_check(per2_sample, track, resolution=64)
    assert report.applicable
    assert abs(report.hole) < 1e-6
    assert len(report.diameters) == len(track.t_values)


def test_merging_attracting_points_meet_at_a_parabolic_point(parabolic_sample):
    tracks = track_limit_cycles(parabolic_sample, 1)
    assert len(tracks) == 2
    collision = parabolic_collision_check(parabolic_sample, tracks[0], tracks[1])
    assert collision.status == "parabolic"
    assert collision.classification == PARABOLIC_ATTRACTING
    assert collision.attracting_side is True


def test_collision_with_separate_limits(parabolic_sample):
    collision = parabolic_collision_check(parabolic_sample, _track([0j]), _track([1 + 0j]))
    assert collision.status == "disjoint"


def test_type1_coefficients_converge():
    sample = sample_family("r = t; s = 1/2", t_values=[1e-2, 1e-3, 1e-4])
    report = compare_with_berkovich(sample)
    assert report.tag == "type1"
    assert report.coefficient_ok


@pytest.mark.slow
def test_odd_quintic_two_cycle_collapses_into_the_hole():
    spec = FamilySpec.parse("roots = -1, -t, 0, t, 1", negate=True)
    sample = sample_family(spec, t_values=[1e-2, 1e-3, 1e-4])
    assert sample.gap == Fraction(2)
    holes = [(p.affine, m) for p, m in sample.holes.holes if not p.is_infinity]
    assert len(holes) == 1 and abs(holes[0][0]) < 1e-6 and holes[0][1] == 2
    tracks = track_limit_cycles(sample, 2)
    assert any(t.relation == "equal" and t.only(0j) for t in tracks)
