import numpy as np
import pytest

from newtonlab_app.basins import (
    UNRESOLVED,
    Target,
    Window,
    basin_raster,
    classify_hyperbolic_type,
    immediate_basin_member,
)
from newtonlab_app.newton_construct import example_preset, newton_from_roots


def test_window_grid_puts_row_zero_on_top():
    w = Window(-2.0, 2.0, -1.0, 1.0)
    g = w.grid((4, 2))
    assert g.shape == (2, 4)
    assert g[0, 0] == pytest.approx(complex(-1.5, 0.5))
    assert g[1, 3] == pytest.approx(complex(1.5, -0.5))
    assert w.pixel_of(complex(-1.5, 0.5), (4, 2)) == (0, 0)
    assert w.pixel_of(3.0, (4, 2)) is None
    assert Window.square(1j, 1.0).as_tuple() == (-1.0, 1.0, 0.0, 2.0)


def test_quadratic_basins_split_along_the_imaginary_axis():
    N = newton_from_roots([1, -1])
    raster = basin_raster(N, Window.square(0j, 2.0), (64, 64), iter_cap=200, free_cycles=[])
    plus = int(np.argmin(np.abs(N.numeric_roots - 1)))
    minus = 1 - plus
    assert raster.label_at(1.5) == plus
    assert raster.label_at(complex(-1.5, 1.0)) == minus
    assert not np.any(raster.labels == UNRESOLVED)
    for j in (plus, minus):
        assert np.unique(raster.components[raster.labels == j]).size == 1

    assert immediate_basin_member(raster, 1.5, Target("root", plus)) is True
    assert immediate_basin_member(raster, -1.5, Target("root", plus)) is False


def test_only_quartics_have_hyperbolic_types():
    with pytest.raises(ValueError):
        classify_hyperbolic_type(newton_from_roots([0, 1, 2]))


@pytest.mark.slow
@pytest.mark.parametrize("name", ["double-critical", "fixed-additional"])
def test_preset_types(name):
    preset = example_preset(name)
    report = classify_hyperbolic_type(preset.newton(), resolution=128)
    assert report.type == preset.expected_type


@pytest.mark.slow
@pytest.mark.parametrize("name", ["double-critical", "fixed-additional"])
def test_type_is_stable_under_resolution_doubling(name):
    N = example_preset(name).newton()
    coarse = classify_hyperbolic_type(N, resolution=128)
    fine = classify_hyperbolic_type(N, resolution=256)
    assert coarse.type == fine.type
