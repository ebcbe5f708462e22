import numpy as np
import pytest

from brep.surface import BOTTOM
from brep.topology import topology
from data_preparation.shapes import icosphere
from geometry.mesh import TriMesh, signed_volume
from tools.console import Console
from tools.errors import BlowUp, QualityUnreached
from tracking.fields import FieldKind, VelocityField, deformation_field
from tracking.mars import MarsParams, advect, local_solutions, track
from tracking.remeshing import (
    SurgeryMesh, improve_mesh, improve_quality, min_angle, regularize_edges, regularize_mesh,
)
from verify.measures import mesh_volume

from conftest import element


def _vertices(g):
    return g.surfaces()[0].mesh.vertices


def test_params_validation():
    with pytest.raises(ValueError):
        MarsParams(0.0)
    with pytest.raises(ValueError):
        MarsParams(0.1, r_tiny=1.5)
    with pytest.raises(ValueError):
        MarsParams(0.1, alpha=1.2)
    with pytest.raises(ValueError):
        MarsParams(0.1, dt=-1.0)
    params = MarsParams.from_degrees(0.1, alpha_deg=20.0)
    assert params.alpha == pytest.approx(np.pi / 9)
    assert params.time_step == 0.1
    assert MarsParams(0.1, dt=0.01).time_step == 0.01


def test_deformation_field_reverses_at_half_period():
    points = np.random.default_rng(1).random((50, 3))
    np.testing.assert_allclose(deformation_field(points, 1.5, 3.0), 0.0, atol=1e-12)
    np.testing.assert_allclose(deformation_field(points, 0.4, 3.0), -deformation_field(points, 2.6, 3.0),
                               atol=1e-12)


def test_named_fields():
    field = VelocityField.named("rotation", {"omega": 2.0})
    assert field.kind is FieldKind.ROTATION
    np.testing.assert_allclose(field(np.array([[1.0, 0.0, 0.0]]), 0.0), [[0.0, 2.0, 0.0]])
    with pytest.raises(ValueError):
        VelocityField.named("spiral")


def test_custom_field_expression():
    field = VelocityField.named("custom", expression="1; 0; z * t")
    points = np.array([[0.0, 0.0, 2.0], [5.0, 5.0, -1.0]])
    np.testing.assert_allclose(field(points, 3.0), [[1.0, 0.0, 6.0], [1.0, 0.0, -3.0]])
    with pytest.raises(ValueError):
        VelocityField.named("custom", expression="1; 2")
    with pytest.raises(ValueError):
        VelocityField.named("custom")


def test_translation_moves_every_vertex(cube):
    field = VelocityField.named("translation", {"velocity": (1.0, 0.0, 0.0)})
    moved = advect(cube, field, 0.0, 2.0, 0.5)
    np.testing.assert_allclose(_vertices(moved), _vertices(cube) + [2.0, 0.0, 0.0])
    assert mesh_volume(moved) == pytest.approx(1.0)


def test_zero_field_and_trivial_elements(cube):
    still = VelocityField.named("custom", expression="0; 0; 0")
    np.testing.assert_array_equal(_vertices(advect(cube, still, 0.0, 1.0, 0.1)), _vertices(cube))
    assert advect(BOTTOM, still, 0.0, 1.0, 0.1) is BOTTOM
    with pytest.raises(ValueError):
        advect(cube, still, 0.0, 1.0, 0.0)


def test_advect_detects_blow_up(cube):
    explosive = VelocityField.named("custom", expression="x * x * 1e300; 0; 0")
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(BlowUp):
            advect(cube, explosive, 0.0, 1.0, 0.5)


def test_regularize_splits_long_edges():
    tetra = TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
                    [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])
    result = regularize_mesh(tetra, 1.0, 0.1)
    _, lengths = result.edge_lengths()
    assert lengths.max() <= 1.0 + 1e-12
    assert len(result.faces) > 4
    assert result.is_closed()
    assert signed_volume(result) == pytest.approx(1 / 6)


def test_regularize_warns_when_rounds_run_out(capsys):
    tetra = TriMesh([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
                    [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])
    result = regularize_mesh(tetra, 0.1, 0.1, max_rounds=1, console=Console())
    assert result.is_closed()
    assert "edges still longer than h_L=0.1 after 1 rounds" in capsys.readouterr().err


def test_regularize_collapses_short_edges():
    ico = icosphere(level=0)
    surgery = SurgeryMesh(ico)
    a, b = map(int, ico.faces[0][:2])
    m = surgery.split(a, b)
    surgery.points[m] = surgery.points[a] + 0.02 * (surgery.points[b] - surgery.points[a])
    pinched = surgery.to_trimesh()
    assert len(pinched.vertices) == 13

    result = regularize_mesh(pinched, 1.2, 0.1)
    assert len(result.vertices) == 12
    assert len(result.faces) == 20
    assert result.is_closed()
    _, lengths = result.edge_lengths()
    assert lengths.min() >= 0.12


def test_regular_mesh_is_left_alone():
    sphere = icosphere(level=1)
    assert regularize_mesh(sphere, 1.0, 0.1) is sphere
    assert improve_mesh(sphere, 1.0, np.deg2rad(15.0)) is sphere


def test_flip_replaces_a_long_diagonal():
    quad = TriMesh([(0, 0, 0), (4, 0, 0), (2, 0.5, 0), (2, -0.5, 0)], [(0, 1, 2), (1, 0, 3)])
    before = min_angle(quad)
    surgery = SurgeryMesh(quad)
    assert surgery.flip(0, 1)
    flipped = surgery.to_trimesh()
    assert min_angle(flipped) > before
    assert not surgery.has_edge(0, 1)
    assert surgery.has_edge(2, 3)
    np.testing.assert_allclose(flipped.face_normals()[:, 2], [1.0, 1.0])


def test_sliver_reports_unreached_quality():
    sliver = TriMesh([(0, 0, 0), (1, 0, 0), (0.5, 0.01, 0), (0.5, 0.005, 0.5)],
                     [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])
    with pytest.raises(QualityUnreached) as info:
        improve_mesh(sliver, 0.01, np.deg2rad(15.0), iterations=2)
    assert info.value.stats["iterations"] == 2
    assert len(info.value.result.faces) == 4
    assert info.value.stats["max_displacement"] <= 0.001 + 1e-12


def test_element_remeshing_keeps_a_fine_shell(shell):
    lengths = np.concatenate([s.mesh.edge_lengths()[1] for s in shell.surfaces()])
    h_L = 1.01 * lengths.max()
    params = MarsParams(h_L, r_tiny=0.5 * lengths.min() / h_L)
    regular = improve_quality(regularize_edges(shell, params), params)
    assert topology(regular).line() == topology(shell).line()
    for before, after in zip(shell.surfaces(), regular.surfaces()):
        np.testing.assert_array_equal(after.mesh.vertices, before.mesh.vertices)
        assert after.is_positive == before.is_positive


def test_element_quality_failure_carries_the_element():
    sliver = TriMesh([(0, 0, 0), (1, 0, 0), (0.5, 0.01, 0), (0.5, 0.005, 0.5)],
                     [(0, 2, 1), (0, 1, 3), (0, 3, 2), (1, 2, 3)])
    g = element(("sliver", sliver))
    with pytest.raises(QualityUnreached) as info:
        improve_quality(g, MarsParams(0.01), iterations=2)
    assert info.value.result.surfaces()[0].name == "sliver"
    assert info.value.stats["iterations"] == 2


def test_local_solution_of_an_aligned_cube(cube, tol, rng):
    cells = local_solutions(cube, 1.0, tol, rng)
    assert list(cells) == [(0, 0, 0)]
    assert mesh_volume(cells[(0, 0, 0)]) == pytest.approx(1.0)


def test_local_solution_inside_one_cell(tol, rng):
    g = element(("ball", icosphere((0.5, 0.5, 0.5), 0.3, 1)))
    cells = local_solutions(g, 1.0, tol, rng)
    assert list(cells) == [(0, 0, 0)]
    assert mesh_volume(cells[(0, 0, 0)]) == pytest.approx(mesh_volume(g))
    with pytest.raises(ValueError):
        local_solutions(BOTTOM, 1.0, tol, rng)


@pytest.mark.slow
def test_local_solutions_add_up(offset_cube, tol, rng):
    cells = local_solutions(offset_cube, 1.0, tol, rng)
    assert len(cells) == 8
    assert sum(mesh_volume(c) for c in cells.values()) == pytest.approx(1.0)


def test_track_a_translated_cube(cube, rng):
    field = VelocityField.named("translation", {"velocity": (1.0, 0.0, 0.0)})
    params = MarsParams.from_degrees(2.0, dt=0.5)
    states, history = track(cube, field, params, [0.0, 1.0], rng, progress=False)
    assert sorted(states) == [0.0, 1.0]
    np.testing.assert_allclose(_vertices(states[1.0]), _vertices(cube) + [1.0, 0.0, 0.0])
    assert history["time"].tolist() == [0.0, 1.0]
    assert history["volume"].tolist() == pytest.approx([1.0, 1.0])
    assert history["components"].tolist() == [1, 1]
    assert history["min_angle_deg"].min() == pytest.approx(45.0)


def test_track_records_voxel_topology(shell, rng):
    field = VelocityField.named("translation", {"velocity": (0.0, 0.0, 1.0)})
    params = MarsParams(2.0, dt=1.0)
    _, history = track(shell, field, params, [0.0, 1.0], rng, voxel_resolution=32, progress=False)
    assert history["holes"].tolist() == ["1", "1"]
    assert history["voxel_holes"].tolist() == ["1", "1"]
