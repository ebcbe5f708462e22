"""Desk-scale scenes for tests and the `fixtures` sub-command.

Every scene is a mapping from a file stem to the (name, mesh) objects of one
OBJ file. Negative surfaces are wound inward, as on disk.
"""
import datetime
from pathlib import Path

import numpy as np

from configs.config import Configuration
from data_preparation.shapes import box, ellipsoid, icosphere, sphere_of_revolution, torus
from dataset.obj_io import ObjDocument, write_obj
from tools.console import Console


def nested_spheres(level=2):
    return {"nested_spheres": [
        ("outer", icosphere(radius=3.0, level=level)),
        ("middle", icosphere(radius=2.0, level=level).flipped()),
        ("inner", icosphere(radius=1.0, level=level)),
    ]}


def shell(level=2):
    return {"shell": [
        ("outer", icosphere(radius=2.0, level=level)),
        ("inner", icosphere(radius=1.0, level=level).flipped()),
    ]}


def tangent_ellipsoids(n_theta=24, n_phi=32):
    """An ellipsoid with a flatter one removed; the two touch along the equator."""
    return {"tangent_ellipsoids": [
        ("outer", ellipsoid(radii=(2.0, 2.0, 1.0), n_theta=n_theta, n_phi=n_phi)),
        ("inner", ellipsoid(radii=(2.0, 2.0, 0.5), n_theta=n_theta, n_phi=n_phi).flipped()),
    ]}


def torus_with_pinching_balls(major=2.0, minor=0.5, n_major=48, n_minor=16, n_theta=16):
    """A solid torus, and the outside of two balls that fill the tube at opposite meridians.

    Each ball has the tube radius and is revolved about the core tangent so
    its equator coincides with a meridian ring of the torus.
    """
    if n_major % 2 or n_theta % 2:
        raise ValueError("n_major and n_theta must be even")
    balls = [
        ("ball0", sphere_of_revolution((major, 0.0, 0.0), minor, n_theta, n_minor,
                                       axis=(0.0, -1.0, 0.0), reference=(1.0, 0.0, 0.0)).flipped()),
        ("ball1", sphere_of_revolution((-major, 0.0, 0.0), minor, n_theta, n_minor,
                                       axis=(0.0, 1.0, 0.0), reference=(-1.0, 0.0, 0.0)).flipped()),
    ]
    return {
        "pinching_torus": [("torus", torus(major=major, minor=minor, n_major=n_major, n_minor=n_minor))],
        "pinching_balls": balls,
    }


def hasse_scene(level=2):
    """Two components: a ball with two cavities and a ball with one."""
    return {"hasse_scene": [
        ("big", icosphere(radius=3.0, level=level)),
        ("cavity0", icosphere((-1.3, 0.0, 0.0), 0.8, level).flipped()),
        ("cavity1", icosphere((1.3, 0.0, 0.0), 0.8, level).flipped()),
        ("small", icosphere((7.0, 0.0, 0.0), 1.5, level)),
        ("cavity2", icosphere((7.0, 0.0, 0.0), 0.6, level).flipped()),
    ]}


def offset_balls(level=2):
    return {
        "ball_a": [("ball_a", icosphere(radius=1.0, level=level))],
        "ball_b": [("ball_b", icosphere((1.0, 0.0, 0.0), 1.0, level))],
    }


def offset_cubes():
    return {
        "cube_a": [("cube_a", box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0)))],
        "cube_b": [("cube_b", box((0.5, 0.25, 0.125), (1.5, 1.25, 1.125)))],
    }


def all_scenes(subdivision=2, n_theta=24, n_phi=32):
    scenes = {}
    scenes.update(nested_spheres(subdivision))
    scenes.update(shell(subdivision))
    scenes.update(tangent_ellipsoids(n_theta, n_phi))
    scenes.update(torus_with_pinching_balls())
    scenes.update(hasse_scene(subdivision))
    scenes.update(offset_balls(subdivision))
    scenes.update(offset_cubes())
    return scenes


def prepare_fixtures(config_path=None, output_path=None):
    config = Configuration(config_path, output_path=output_path)
    time_stamp = datetime.datetime.now().strftime("%Y%m%d_%H%M%S")
    output_folder = Path(output_path if output_path else "fixtures") / f"fixtures_{time_stamp}"
    console = Console(output_folder)
    console.info("Fixture preparation started at", datetime.datetime.now())

    scenes = all_scenes(config.fixtures.subdivision, config.fixtures.n_theta, config.fixtures.n_phi)
    for stem, objects in scenes.items():
        path = output_folder / f"{stem}.obj"
        write_obj(ObjDocument.from_meshes(objects), path)
        triangles = int(np.sum([len(mesh.faces) for _, mesh in objects]))
        console.info(f"{stem}: {len(objects)} objects, {triangles} triangles -> {path}")

    config.write(output_folder / "config.yaml")
    console.info("Fixtures written to", output_folder)
    return output_folder
