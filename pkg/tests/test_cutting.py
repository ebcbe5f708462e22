import numpy as np
import pytest

from brep.surface import GluedSurface
from cutting.cutting import cut, face_components
from cutting.intersections import chain_segments, detect_intersections, max_deviation
from cutting.octree import build_octree, candidate_pairs
from data_preparation.shapes import box, icosphere
from tools.errors import InconsistentProvenance


def _cubes():
    return [GluedSurface(box(), id=0), GluedSurface(box((0.5, 0.25, 0.125), (1.5, 1.25, 1.125)), id=1)]


def test_octree_splits_and_finds_every_touching_pair():
    sphere = icosphere(level=3)
    tree = build_octree(sphere.triangles, leaf_cap=8)
    assert tree.depth() > 0
    pairs = set(map(tuple, candidate_pairs(tree).tolist()))
    # faces sharing an edge overlap in their bounding boxes
    for a, b in [(0, 1), (1, 2), (2, 0)]:
        f0 = sphere.faces[0]
        neighbour = next(k for k, f in enumerate(sphere.faces[1:], start=1)
                         if f0[a] in f and f0[b] in f)
        assert (0, neighbour) in pairs


def test_octree_box_query_matches_brute_force():
    sphere = icosphere(level=2)
    tree = build_octree(sphere.triangles, leaf_cap=4)
    lo, hi = np.array([0.2, -0.3, 0.1]), np.array([0.9, 0.4, 1.0])
    tris = sphere.triangles
    expected = np.flatnonzero(np.all(tris.min(axis=1) <= hi, axis=1) & np.all(tris.max(axis=1) >= lo, axis=1))
    np.testing.assert_array_equal(np.sort(tree.query_box(lo, hi)), expected)


def test_chain_closed_square(tol):
    corners = np.array([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0)], dtype=float)
    segments = np.stack([corners, np.roll(corners, -1, axis=0)], axis=1)
    curves = chain_segments(segments[[2, 0, 3, 1]], tol)
    assert len(curves) == 1
    assert curves[0].closed
    assert len(curves[0]) == 4


def test_chain_open_and_junction(tol):
    path = np.array([[(0, 0, 0), (1, 0, 0)], [(1, 0, 0), (2, 0, 0)], [(2, 0, 0), (3, 0, 0)]], dtype=float)
    curves = chain_segments(path, tol)
    assert len(curves) == 1 and not curves[0].closed and len(curves[0]) == 4

    star = np.array([[(0, 0, 0), (1, 0, 0)], [(0, 0, 0), (0, 1, 0)], [(0, 0, 0), (0, 0, 1)]], dtype=float)
    assert len(chain_segments(star, tol)) == 3


def test_offset_cubes_meet_along_one_loop(tol):
    surfaces = _cubes()
    isect = detect_intersections(surfaces, tol)
    assert len(isect.curves) == 1
    loop = isect.curves[0]
    assert loop.closed
    assert loop.length() == pytest.approx(4.25)
    assert len(isect.isolated_points) == 0
    assert isect.surface_ids == (0, 1)
    assert max_deviation(isect, surfaces) < 1e-12


def test_disjoint_surfaces_do_not_intersect(tol):
    surfaces = [GluedSurface(box(), id=0), GluedSurface(box((3, 3, 3), (4, 4, 4)), id=1)]
    assert detect_intersections(surfaces, tol).is_empty


def test_cut_offset_cubes_into_four_patches(tol):
    surfaces = _cubes()
    seg = cut(surfaces, detect_intersections(surfaces, tol), tol)
    assert len(seg.patches) == 4
    assert not seg.closed_surfaces
    for source in (0, 1):
        pieces = [p for p in seg.patches if p.source == source]
        assert len(pieces) == 2
        assert sum(p.area() for p in pieces) == pytest.approx(6.0)
        assert sorted(p.index for p in pieces) == [0, 1]
    # the part of cube 0 inside cube 1 has area 0.5*0.75 + 0.5*0.875 + 0.75*0.875
    inside = min(p.area() for p in seg.patches if p.source == 0)
    assert inside == pytest.approx(0.375 + 0.4375 + 0.65625)
    for patch in seg.patches:
        assert len(patch.boundary_loops()) == 1
        assert patch.boundary_loops()[0].length() == pytest.approx(4.25)


def test_cut_without_curves_keeps_closed_surfaces(tol):
    surfaces = [GluedSurface(box(), id=0), GluedSurface(box((3, 3, 3), (4, 4, 4)), id=1)]
    seg = cut(surfaces, detect_intersections(surfaces, tol), tol)
    assert not seg.patches
    assert len(seg.closed_surfaces) == 2


def test_cut_rejects_foreign_intersections(tol):
    surfaces = _cubes()
    isect = detect_intersections(surfaces[:1], tol)
    with pytest.raises(InconsistentProvenance):
        cut(surfaces, isect, tol)


def test_face_components_split_along_cut_edges():
    # two triangles sharing edge (1, 2)
    faces = np.array([(0, 1, 2), (2, 1, 3)])
    count, _ = face_components(faces, np.zeros((0, 2)), 4)
    assert count == 1
    count, labels = face_components(faces, np.array([(2, 1)]), 4)
    assert count == 2 and labels[0] != labels[1]
