import numpy as np
import pytest

from brep.surface import GluedSurface, Orientation
from cutting.cutting import SegmentedSpadopag, SurfacePatch, cut
from cutting.intersections import detect_intersections
from data_preparation.shapes import box, ellipsoid, icosphere
from geometry.mesh import TriMesh, signed_volume
from geometry.primitives import Tolerance
from pasting.angles import DirectedAngle, directed_angle, select_mate
from pasting.pasting import divide, glue_surfaces, paste
from tools.errors import AmbiguousTie, NoCandidate, ParallelDegeneracy

from conftest import unit_square_patches

UP = np.array([0.0, 0.0, 1.0])
EAST = np.array([1.0, 0.0, 0.0])
NORTH = np.array([0.0, 1.0, 0.0])
TWO_FACES = np.array([(0, 1, 2), (0, 2, 3)])


def _patch(vertices, source, index=0):
    return SurfacePatch(vertices, TWO_FACES, source, Orientation.POSITIVE, index)


def test_directed_angle_conventions(tol):
    assert directed_angle(UP, EAST, NORTH, tol).theta == pytest.approx(np.pi / 2)
    assert directed_angle(UP, -EAST, NORTH, tol).theta == pytest.approx(3 * np.pi / 2)
    assert directed_angle(UP, UP, NORTH, tol).theta == pytest.approx(np.pi)
    with pytest.raises(ParallelDegeneracy):
        directed_angle(UP, -UP, NORTH, tol)


def test_parallel_threshold_follows_the_tolerance():
    tilt = np.array([1e-6, 0.0, 1.0])
    assert directed_angle(UP, tilt, NORTH, Tolerance(1e-3)).theta == np.pi
    assert directed_angle(UP, tilt, NORTH, Tolerance(1e-9)).theta == pytest.approx(np.pi - 1e-6, abs=1e-9)


def test_directed_angle_range():
    with pytest.raises(ValueError):
        DirectedAngle(0.0)
    assert DirectedAngle(1.0) < DirectedAngle(2.0)


def test_select_mate_prefers_the_tightest_wedge(tol):
    top, wall, flat = unit_square_patches()
    beta = _patch(top, 0)
    gamma = np.array([[top[1], top[2]]])
    mate = select_mate(beta, gamma, [_patch(flat, 2), _patch(wall, 1)], tol)
    assert mate.source == 1


def test_select_mate_single_and_empty(tol):
    top, wall, _ = unit_square_patches()
    beta = _patch(top, 0)
    gamma = np.array([[top[1], top[2]]])
    only = _patch(wall, 1)
    assert select_mate(beta, gamma, [only], tol) is only
    with pytest.raises(NoCandidate):
        select_mate(beta, gamma, [], tol)


def test_select_mate_tie(tol):
    top, wall, _ = unit_square_patches()
    beta = _patch(top, 0)
    gamma = np.array([[top[1], top[2]]])
    with pytest.raises(AmbiguousTie):
        select_mate(beta, gamma, [_patch(wall, 1), _patch(wall, 2)], tol)


def test_select_mate_steps_over_a_nested_region(tol):
    top, wall, flat = unit_square_patches()
    beta = _patch(top, 0)
    gamma = np.array([[top[1], top[2]]])
    # carries the edge like `top` and leaves it at 45 degrees, between top and wall
    slant = _patch(np.array([(1, 0, 1), (1, 1, 1), (0, 1, 0), (0, 0, 0)], dtype=float), 3)
    candidates = [_patch(flat, 2), _patch(wall, 1)]
    assert select_mate(beta, gamma, candidates, tol).source == 1
    assert select_mate(beta, gamma, candidates, tol, blockers=[slant]).source == 2
    with pytest.raises(NoCandidate):
        select_mate(beta, gamma, candidates[1:], tol, blockers=[slant])


def test_paste_closed_surfaces_only(tol, rng):
    seg = SegmentedSpadopag([], [GluedSurface(box(), id=7)])
    spadopag = paste(seg, tol, rng)
    assert len(spadopag.atoms) == 1
    assert spadopag.surfaces()[0].id == 0


def test_cut_then_paste_offset_cubes_gives_union_and_intersection(tol, rng):
    surfaces = [GluedSurface(box(), id=0), GluedSurface(box((0.5, 0.25, 0.125), (1.5, 1.25, 1.125)), id=1)]
    seg = cut(surfaces, detect_intersections(surfaces, tol), tol)
    glued = glue_surfaces(seg, tol)
    volumes = sorted(signed_volume(s.mesh) for s in glued)
    overlap = 0.5 * 0.75 * 0.875
    assert volumes == pytest.approx([overlap, 2.0 - overlap])
    assert all(s.is_positive for s in glued)


def test_divide_disconnected_closed_mesh(tol):
    # two separate spheres stored as one closed mesh
    upper = icosphere(radius=1.0, level=1)
    lower = icosphere((0.0, 0.0, 3.0), 1.0, 1)
    merged = TriMesh(np.vstack([upper.vertices, lower.vertices]),
                     np.vstack([upper.faces, lower.faces + len(upper.vertices)]))
    pieces = divide(merged, tol)
    assert len(pieces) == 2
    assert all(s.is_positive for s in pieces)


def test_divide_two_lenses_touching_along_a_circle(tol):
    # one mesh whose four halves all meet along the equator edges
    outer = ellipsoid(radii=(2.0, 2.0, 1.0), n_theta=12, n_phi=16)
    inner = ellipsoid(radii=(2.0, 2.0, 0.5), n_theta=12, n_phi=16).flipped()
    merged = TriMesh.from_triangles(np.vstack([outer.triangles, inner.triangles]), tol)
    pieces = divide(merged, tol)
    assert len(pieces) == 2
    assert all(s.mesh.is_closed() for s in pieces)
    total = sum(signed_volume(s.effective_mesh) for s in pieces)
    assert total == pytest.approx(signed_volume(outer) + signed_volume(inner))
