import pytest

from boolean_algebra.operations import complement, difference, join, meet
from brep.surface import BOTTOM, TOP
from brep.topology import topology
from data_preparation.shapes import box, icosphere
from geometry.mesh import signed_volume
from tools.errors import InfiniteVolume
from verify.measures import mesh_volume

from conftest import element

OVERLAP = 0.5 * 0.75 * 0.875


def test_meet_with_trivial_elements(cube, tol, rng):
    assert meet(cube, BOTTOM, tol, rng).is_bottom
    assert meet(BOTTOM, cube, tol, rng).is_bottom
    assert meet(cube, TOP, tol, rng) is cube
    assert meet(TOP, cube, tol, rng) is cube


def test_meet_with_itself_and_its_complement(cube, tol, rng):
    assert meet(cube, cube, tol, rng) is cube
    assert meet(cube, complement(cube, tol, rng), tol, rng).is_bottom


def test_complement_of_trivial_elements(tol):
    assert complement(BOTTOM, tol).is_top
    assert complement(TOP, tol).is_bottom


def test_complement_of_cube_is_unbounded(cube, tol, rng):
    outside = complement(cube, tol, rng)
    assert len(outside.atoms) == 1
    assert outside.atoms[0].is_negative_type
    with pytest.raises(InfiniteVolume):
        mesh_volume(outside)


def test_complement_is_an_involution(cube, tol, rng):
    back = complement(complement(cube, tol, rng), tol, rng)
    surfaces = back.surfaces()
    assert len(surfaces) == 1 and surfaces[0].is_positive
    assert mesh_volume(back) == pytest.approx(1.0)


def test_meet_of_offset_cubes(cube, offset_cube, tol, rng):
    result = meet(cube, offset_cube, tol, rng)
    assert len(result.atoms) == 1
    assert mesh_volume(result) == pytest.approx(OVERLAP)
    lo, hi = result.spadopag.bounds()
    assert lo.tolist() == pytest.approx([0.5, 0.25, 0.125])
    assert hi.tolist() == pytest.approx([1.0, 1.0, 1.0])


def test_join_and_difference_of_offset_cubes(cube, offset_cube, tol, rng):
    union = join(cube, offset_cube, tol, rng)
    assert mesh_volume(union) == pytest.approx(2.0 - OVERLAP)
    assert topology(union).line() == "components=1 holes=0"
    rest = difference(cube, offset_cube, tol, rng)
    assert mesh_volume(rest) == pytest.approx(1.0 - OVERLAP)


def test_inclusion_exclusion(cube, offset_cube, tol, rng):
    a = mesh_volume(cube)
    b = mesh_volume(offset_cube)
    both = mesh_volume(meet(cube, offset_cube, tol, rng))
    either = mesh_volume(join(cube, offset_cube, tol, rng))
    assert either == pytest.approx(a + b - both, rel=1e-6)


def test_meet_of_disjoint_cubes_is_empty(cube, tol, rng):
    far = element(("far", box((3, 3, 3), (4, 4, 4))))
    assert meet(cube, far, tol, rng).is_bottom


def test_nested_balls(tol, rng):
    big = element(("big", icosphere(radius=3.0, level=1)))
    small = element(("small", icosphere(radius=1.0, level=1)))
    inner = meet(big, small, tol, rng)
    assert mesh_volume(inner) == pytest.approx(signed_volume(icosphere(radius=1.0, level=1)))
    hollow = difference(big, small, tol, rng)
    assert topology(hollow).line() == "components=1 holes=1"
    assert mesh_volume(hollow) == pytest.approx(
        signed_volume(icosphere(radius=3.0, level=1)) - signed_volume(icosphere(radius=1.0, level=1)))
