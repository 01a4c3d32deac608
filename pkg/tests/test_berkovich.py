import pytest

from newtonlab_app.berkovich import (
    GAUSS,
    NONDEGENERATE,
    TYPE1,
    TYPE2,
    TYPE3A,
    TYPE3B,
    analyze_family,
    bad_directions,
    build_fix_tree,
    classify_degeneration,
    induced_newton,
    reduction,
)
from newtonlab_app.complex_rational import HomogeneousRationalMap, ProjectivePoint, projective_distance
from newtonlab_app.errors import DegenerationError

CANONICAL = [
    ("t", "1/2", TYPE1, 3, [(1, 0.5)], (2, 1)),
    ("t", "1 - t", TYPE2, 2, [(1, 0.5), (1, 0.5)], (0, 2)),
    ("t^2", "t", TYPE3A, 2, [(2, 2 / 3)], (1, 1)),
    ("t", "2*t", TYPE3B, 2, [(2, 2 / 3)], (1, 1)),
]


@pytest.mark.parametrize("r, s, tag, degree, holes, counts", CANONICAL)
def test_canonical_families(r, s, tag, degree, holes, counts):
    analysis = analyze_family(r, s)
    assert analysis.tag == tag
    assert analysis.holes.reduced_map.formal_degree == degree

    rows = sorted(((row.multiplicity, row.multiplier) for row in analysis.hole_rows), key=lambda x: x[0])
    assert [m for m, _ in rows] == [m for m, _ in holes]
    for (_, got), (_, want) in zip(rows, holes):
        assert got == pytest.approx(want, abs=1e-6)

    assert analysis.checks["hole_multipliers"]
    assert analysis.checks["sigma"]
    assert analysis.checks["rescaling"]
    assert (analysis.invariants.superattracting, analysis.invariants.attracting) == counts


def test_type1_reduction():
    red = reduction(induced_newton("t", "1/2"))
    expected = HomogeneousRationalMap.from_coefficients([0, 0, 0.5, -3, 3], [0, 1, -4.5, 4, 0])
    assert projective_distance(red.coefficient_vector(), expected.coefficient_vector()) < 1e-9
    bad = bad_directions(induced_newton("t", "1/2"))
    assert len(bad) == 1 and bad[0].close_to(ProjectivePoint.finite(0))


def test_tree_of_a_type1_family():
    tree = build_fix_tree("t", "1/2")
    names = sorted(v.name for v in tree.rep_vertices())
    assert names == sorted([GAUSS, "0∨r"])
    assert tree.vertex(GAUSS).valence == 4
    assert tree.vertex("0∨r").valence == 3
    assert sorted(tree.vertex("0∨r").leaves) == ["0", "r"]


def test_tree_of_a_type2_family():
    tree = build_fix_tree("t", "1 - t")
    assert sorted(v.name for v in tree.rep_vertices()) == sorted([GAUSS, "0∨r", "1∨s"])
    assert all(v.valence == 3 for v in tree.rep_vertices())


def test_nested_disks_of_type3a():
    tree = build_fix_tree("t^2", "t")
    assert tree.vertex("0∨r").disk.q == 2
    assert tree.vertex("0∨s").disk.q == 1
    assert tree.vertex("r∨s") is tree.vertex("0∨s")
    assert all(v.valence == 3 for v in tree.rep_vertices())


def test_type3b_joins_share_one_vertex():
    tree = build_fix_tree("t", "2*t")
    v = tree.vertex("0∨r")
    assert "0∨s" in v.joins and v.valence == 4
    assert tree.vertex(GAUSS).valence == 3


def test_classification_reorders_by_valuation():
    d = classify_degeneration("t", "t^2")
    assert d.tag == TYPE3A and d.swapped
    assert classify_degeneration(2, -1).tag == NONDEGENERATE


@pytest.mark.parametrize("r, s", [("1/t", "1/2"), (0, "1/2"), ("t", "t")])
def test_invalid_pairs(r, s):
    with pytest.raises(DegenerationError):
        classify_degeneration(r, s)
