import numpy as np
import pytest

from brep.surface import BOTTOM, TOP
from data_preparation.shapes import box
from membership.classify import (
    PointClass,
    classify_point,
    classify_points,
    inside_bounded,
    ray_crossing_inside,
    ray_parity,
)
from membership.voxels import inside_mask_grid, region_mask, voxel_grid


def test_classify_point_in_cube(cube, tol, rng):
    assert classify_point((0.5, 0.5, 0.5), cube, rng, tol) is PointClass.INSIDE
    assert classify_point((2.0, 2.0, 2.0), cube, rng, tol) is PointClass.OUTSIDE
    assert classify_point((1.0, 0.5, 0.5), cube, rng, tol) is PointClass.ON_BOUNDARY


def test_classify_trivial_elements(tol, rng):
    assert classify_point((0, 0, 0), BOTTOM, rng, tol) is PointClass.OUTSIDE
    assert classify_point((0, 0, 0), TOP, rng, tol) is PointClass.INSIDE
    assert classify_points(np.zeros((3, 3)), TOP, rng, tol).tolist() == [1, 1, 1]


def test_ray_through_a_mesh_edge_is_degenerate(tol):
    # (0.5, 0.5) lies on the diagonal of the top and bottom faces
    assert ray_parity((0.5, 0.5, 0.5), box(), (0.0, 0.0, 1.0), tol) is None
    assert ray_parity((0.3, 0.2, 0.5), box(), (0.0, 0.0, 1.0), tol) == 1
    assert ray_parity((0.3, 0.2, 1.5), box(), (0.0, 0.0, 1.0), tol) == 0


def test_degenerate_first_ray_is_retried(tol, rng):
    assert ray_crossing_inside((0.5, 0.5, 0.5), box(), rng, tol, first_direction=(0.0, 0.0, 1.0))


def test_classify_points_in_shell(shell, tol, rng):
    points = np.array([(0.0, 0.0, 0.0), (1.5, 0.0, 0.0), (0.0, -1.5, 0.0), (5.0, 0.0, 0.0)])
    codes = classify_points(points, shell, rng, tol)
    assert codes.tolist() == [PointClass.OUTSIDE, PointClass.INSIDE, PointClass.INSIDE, PointClass.OUTSIDE]


def test_inside_bounded_vectorised(tol, rng):
    points = rng.uniform(-0.5, 1.5, size=(500, 3))
    expected = np.all((points > 0) & (points < 1), axis=1)
    np.testing.assert_array_equal(inside_bounded(points, box(), rng, tol), expected)


def test_voxel_scanline_counts_cube_centres():
    grid = voxel_grid((0, 0, 0), (1, 1, 1), 10)
    assert grid[0][0] == pytest.approx(-0.04)
    mask = inside_mask_grid(box(), grid)
    assert mask.sum() == 8 ** 3


def test_region_mask_of_shell_has_a_cavity(shell):
    lo, hi = shell.spadopag.bounds()
    grid = voxel_grid(lo, hi, 24)
    mask = region_mask(shell, grid)
    center = tuple(len(axis) // 2 for axis in grid)
    assert not mask[center]
    assert mask.any()
    assert not region_mask(BOTTOM, grid).any()
    assert region_mask(TOP, grid).all()
