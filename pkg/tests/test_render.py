import numpy as np
import pytest
from pydantic import ValidationError

from newtonlab_app.basins import Window
from newtonlab_app.render import (
    FATE_CRITICAL_CYCLE,
    PER2_WINDOW,
    RenderJob,
    image_bytes,
    parse_resolution,
    parse_window,
    per2_critical_fate,
    per2_palette,
    per2_roots,
    render_julia,
    render_param_per2,
    write_image,
)

ROOTS = [(1.0, 0.0), (-1.0, 0.0)]


def test_parse_helpers():
    assert parse_window("-2,-1,2,1") == (-2.0, 2.0, -1.0, 1.0)
    assert parse_window("2,1,-2,-1") == (-2.0, 2.0, -1.0, 1.0)
    assert parse_resolution("32x16") == (32, 16)
    assert parse_resolution("64") == (64, 64)
    with pytest.raises(ValueError):
        parse_window("0,0,1")


def test_job_validation():
    with pytest.raises(ValidationError):
        RenderJob(window=(1.0, 0.0, 0.0, 1.0))
    with pytest.raises(ValidationError):
        RenderJob(resolution=(0, 4))
    with pytest.raises(ValidationError):
        RenderJob(iter_cap=0)


def test_unconverged_pixels_are_black():
    job = RenderJob(roots=ROOTS, window=(-2, 2, -2, 2), resolution=(8, 8), iter_cap=1, eps=1e-12)
    image = render_julia(job)
    assert image.size == (8, 8)
    assert image.getextrema() == ((0, 0), (0, 0), (0, 0))


def test_ppm_output_is_deterministic(tmp_path):
    job = RenderJob(roots=ROOTS, window=(-2, 2, -2, 2), resolution=(16, 16), iter_cap=50, format="ppm")
    first = image_bytes(render_julia(job), "ppm")
    second = image_bytes(render_julia(job), "ppm")
    assert first == second
    assert first.startswith(b"P6")
    path = write_image(render_julia(job), str(tmp_path / "out" / "julia.ppm"))
    with open(path, "rb") as fh:
        assert fh.read() == first


def test_parameter_plane_size():
    image = render_param_per2(RenderJob(mode="param-per2", resolution=(16, 12), iter_cap=30))
    assert image.size == (16, 12)


def test_per2_roots_solve_the_slice_polynomial():
    c = np.array([0.5 + 0.25j, -1.5, 2.0 - 1.0j])
    roots = per2_roots(c)
    assert roots.shape == (3, 4)
    for cc, rs in zip(c, roots):
        residual = rs ** 4 - 2 * cc * rs ** 3 + (4 * cc - 3) * rs + (3 - 4 * cc)
        assert np.max(np.abs(residual)) < 1e-9
        angles = np.angle(rs - cc / 2)
        assert np.all(np.diff(angles) >= 0)


def test_critical_point_on_the_cycle_at_c_zero():
    fate, iterations, grid = per2_critical_fate(Window.square(0j, 0.01), (1, 1), iter_cap=10)
    assert grid[0, 0] == 0
    assert fate[0, 0] == FATE_CRITICAL_CYCLE
    assert iterations[0, 0] == 1


def test_root_basins_get_distinct_colors():
    fate, _, _ = per2_critical_fate(Window(*PER2_WINDOW), (40, 40), iter_cap=200)
    reached = sorted(int(k) for k in np.unique(fate) if k >= 0)
    assert len(reached) >= 2
    palette = per2_palette()
    assert len({palette[k] for k in reached}) == len(reached)
    assert len(set(palette.values())) == len(palette)
