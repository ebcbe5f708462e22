import numpy as np
import pytest

from brep.inclusion import decompose_atoms, hasse, includes, interior_witness
from brep.surface import BOTTOM, TOP, GElement, GluedSurface, Orientation
from brep.topology import topology
from brep.validation import validate
from data_preparation.shapes import box, icosphere
from membership.classify import ray_crossing_inside
from tools.errors import NotRealizable

from conftest import element


def _sphere(radius, center=(0.0, 0.0, 0.0), id=0, inward=False):
    mesh = icosphere(center, radius, 1)
    return GluedSurface.from_oriented_mesh(mesh.flipped() if inward else mesh, id=id)


def test_orientation_from_winding():
    positive = GluedSurface.from_oriented_mesh(box())
    negative = GluedSurface.from_oriented_mesh(box().flipped())
    assert positive.orientation is Orientation.POSITIVE
    assert negative.orientation is Orientation.NEGATIVE
    # stored outward either way
    assert positive.bounded_volume == pytest.approx(1.0)
    assert negative.bounded_volume == pytest.approx(1.0)
    np.testing.assert_array_equal(negative.effective_mesh.faces, box().faces[:, ::-1])


def test_reversed_flips_only_the_flag():
    s = GluedSurface(box(), id=3)
    r = s.reversed()
    assert r.orientation is Orientation.NEGATIVE and r.id == 3
    assert r.reversed().same_as(s)


def test_interior_witness_is_inside(tol, rng):
    s = _sphere(1.0)
    witness = interior_witness(s, rng, tol)
    assert np.linalg.norm(witness) < 1.0
    assert ray_crossing_inside(witness, s, rng, tol)


def test_includes_nested_and_disjoint(tol, rng):
    outer = _sphere(2.0, id=0)
    inner = _sphere(1.0, id=1, inward=True)
    far = _sphere(1.0, (5.0, 0.0, 0.0), id=2)
    assert includes(outer, inner, tol, rng)
    assert not includes(inner, outer, tol, rng)
    assert not includes(outer, far, tol, rng)


def test_hasse_of_three_nested_spheres_is_a_chain(tol, rng):
    surfaces = [_sphere(3.0, id=0), _sphere(2.0, id=1, inward=True), _sphere(1.0, id=2)]
    diagram = hasse(surfaces, tol, rng)
    assert diagram.nodes == [0, 1, 2]
    assert diagram.edges == [(0, 1), (1, 2)]
    assert diagram.children(0) == [1] and diagram.parents(2) == [1]


def test_decompose_nested_spheres_into_two_atoms(tol, rng):
    surfaces = [_sphere(3.0, id=0), _sphere(2.0, id=1, inward=True), _sphere(1.0, id=2)]
    spadopag = decompose_atoms(surfaces, tol, rng)
    assert [[s.id for s in atom.surfaces] for atom in spadopag.atoms] == [[0, 1], [2]]


def test_decompose_unbounded_atom_comes_last(tol, rng):
    surfaces = [_sphere(1.0, id=0, inward=True), _sphere(1.0, (5.0, 0.0, 0.0), id=1, inward=True)]
    spadopag = decompose_atoms(surfaces, tol, rng)
    assert len(spadopag.atoms) == 1
    assert spadopag.atoms[0].is_negative_type
    assert len(spadopag.atoms[0].negatives) == 2


def test_decompose_rejects_same_orientation_nesting(tol, rng):
    surfaces = [_sphere(2.0, id=0), _sphere(1.0, id=1)]
    with pytest.raises(NotRealizable):
        decompose_atoms(surfaces, tol, rng)


def test_decompose_rejects_positive_in_unbounded_atom(tol, rng):
    surfaces = [_sphere(1.0, id=0, inward=True), _sphere(1.0, (5.0, 0.0, 0.0), id=1)]
    with pytest.raises(NotRealizable):
        decompose_atoms(surfaces, tol, rng)


def test_validate_accepts_shell(shell, tol, rng):
    assert validate(shell, tol, rng, resolution=32) == []


def test_validate_flags_comparable_negatives(tol, rng):
    atom = [_sphere(3.0, id=0), _sphere(2.0, id=1, inward=True), _sphere(1.0, id=2, inward=True)]
    g = GElement.from_surfaces(atom)
    violations = validate(g, tol, rng, check_regions=False)
    assert any("comparable" in v for v in violations)


def test_validate_flags_inward_storage(tol, rng):
    g = GElement.from_surfaces([GluedSurface(box().flipped())])
    assert any("outward" in v for v in validate(g, tol, rng))


def test_topology_reports(shell, cube):
    assert topology(BOTTOM).line() == "components=0 holes="
    assert topology(TOP).line() == "components=1 holes=0"
    assert topology(cube).line() == "components=1 holes=0"
    assert topology(shell).line() == "components=1 holes=1"


def test_topology_of_two_components():
    g = element(("big", icosphere(radius=3.0, level=1)),
                ("cavity0", icosphere((-1.3, 0.0, 0.0), 0.8, 1).flipped()),
                ("cavity1", icosphere((1.3, 0.0, 0.0), 0.8, 1).flipped()),
                ("small", icosphere((7.0, 0.0, 0.0), 1.5, 1)),
                ("cavity2", icosphere((7.0, 0.0, 0.0), 0.6, 1).flipped()))
    report = topology(g)
    assert report.components == 2
    assert report.holes_per_component == [2, 1]


def test_describe():
    assert BOTTOM.describe() == "0" and TOP.describe() == "1"
    g = GElement.from_surfaces([GluedSurface(box())])
    assert g.describe() == "{S0+}"
