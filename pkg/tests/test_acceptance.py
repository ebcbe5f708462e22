"""Fine-mesh scenes run end to end; deselect with -m "not slow"."""
import numpy as np
import pytest

from boolean_algebra.operations import complement, difference, join, meet, symmetric_difference
from brep.surface import GluedSurface
from brep.topology import topology
from cutting.cutting import cut
from cutting.intersections import detect_intersections
from data_preparation.fixtures import offset_balls, tangent_ellipsoids, torus_with_pinching_balls
from data_preparation.shapes import icosphere
from geometry.mesh import signed_volume
from tracking.fields import VelocityField
from tracking.mars import MarsParams, track
from verify.measures import hausdorff, mesh_volume
from verify.oracle import Law, pointwise_law_check

from conftest import element

pytestmark = pytest.mark.slow


def test_tangent_ellipsoids_split_into_two_lenses(tol):
    objects = tangent_ellipsoids()["tangent_ellipsoids"]
    surfaces = [GluedSurface.from_oriented_mesh(mesh, id=k, name=name) for k, (name, mesh) in enumerate(objects)]
    isect = detect_intersections(surfaces, tol)
    assert len(isect.curves) == 1 and isect.curves[0].closed
    seg = cut(surfaces, isect, tol)
    assert len(seg.patches) == 4

    g = element(*objects)
    lenses = complement(complement(g, tol), tol)
    assert topology(lenses).line() == "components=2 holes=0,0"
    expected = signed_volume(objects[0][1]) + signed_volume(objects[1][1])
    assert mesh_volume(lenses) == pytest.approx(expected, rel=1e-9)


def test_torus_minus_pinching_balls(tol, rng):
    scene = torus_with_pinching_balls()
    torus = element(*scene["pinching_torus"])
    balls = element(*scene["pinching_balls"])
    pieces = meet(torus, balls, tol, rng)
    assert len(pieces.atoms) == 2
    assert all(s.is_positive for s in pieces.surfaces())
    assert topology(pieces).line() == "components=2 holes=0,0"
    removed = sum(-signed_volume(mesh) for _, mesh in scene["pinching_balls"])
    assert mesh_volume(pieces) == pytest.approx(mesh_volume(torus) - removed, rel=1e-6)


def test_lens_of_two_balls(tol, rng):
    a = element(("a", icosphere(radius=1.0, level=4)))
    b = element(("b", icosphere((1.0, 0.0, 0.0), 1.0, level=4)))
    lens = meet(a, b, tol, rng)
    assert mesh_volume(lens) == pytest.approx(5 * np.pi / 12, rel=0.02)
    both = join(a, b, tol, rng)
    assert mesh_volume(both) == pytest.approx(mesh_volume(a) + mesh_volume(b) - mesh_volume(lens), rel=1e-6)


def test_complement_twice_returns_the_shell(shell, tol, rng):
    back = complement(complement(shell, tol, rng), tol, rng)
    assert topology(back).line() == "components=1 holes=1"
    assert mesh_volume(back) == pytest.approx(mesh_volume(shell))
    assert hausdorff(back.surfaces()[0], shell.surfaces()[0], rng=rng) < 1e-9


@pytest.mark.parametrize("operation, law", [
    (meet, Law.MEET),
    (join, Law.JOIN),
    (difference, Law.DIFFERENCE),
    (symmetric_difference, Law.SYMMETRIC_DIFFERENCE),
])
def test_oracle_on_offset_balls(operation, law, tol, rng):
    scene = offset_balls(level=2)
    a = element(*scene["ball_a"])
    b = element(*scene["ball_b"])
    result = operation(a, b, tol, rng)
    report = pointwise_law_check(result, a, b, law, n=5000, rng=rng, tol=tol)
    assert report.passed()


DEFORMATION_CHECKPOINTS = [0.0, 0.375, 0.75, 1.5, 2.25, 3.0]


def _deformed_ball(h_L, checkpoints, rng):
    g = element(("ball", icosphere((0.35, 0.35, 0.35), 0.15, level=2)))
    field = VelocityField.named("deformation", period=3.0)
    params = MarsParams.from_degrees(h_L, r_tiny=0.1, alpha_deg=15.0)
    states, history = track(g, field, params, checkpoints, rng, voxel_resolution=48, progress=False)
    return g, states, history


def test_deformation_keeps_a_ball_in_one_piece(rng):
    g, states, history = _deformed_ball(1 / 32, DEFORMATION_CHECKPOINTS, rng)
    assert history["time"].tolist() == DEFORMATION_CHECKPOINTS
    assert history["components"].tolist() == [1] * 6
    assert history["holes"].tolist() == ["0"] * 6
    assert history["voxel_components"].iloc[-1] == 1
    assert history["volume"].iloc[-1] == pytest.approx(history["volume"].iloc[0], rel=0.1)
    assert hausdorff(g.surfaces()[0], states[3.0].surfaces()[0], rng=rng) < 0.05


def test_deformation_error_shrinks_with_the_mesh(rng):
    errors = []
    for h_L in (1 / 16, 1 / 32):
        g, states, _ = _deformed_ball(h_L, [0.0, 3.0], rng)
        errors.append(hausdorff(g.surfaces()[0], states[3.0].surfaces()[0], rng=rng))
    assert errors[1] * 3.0 <= errors[0]
