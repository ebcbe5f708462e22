import numpy as np
import pytest

from data_preparation.shapes import box, icosphere
from dataset.obj_io import spadopag_from_meshes
from geometry.primitives import Tolerance
from tools.utils import make_rng


@pytest.fixture
def tol():
    return Tolerance(1e-9)


@pytest.fixture
def rng():
    return make_rng(0)


def element(*named_meshes, tol=None, check=False):
    """G-space element from (name, mesh) pairs, negatives wound inward."""
    g, _ = spadopag_from_meshes(named_meshes, tol or Tolerance(1e-9), make_rng(0), check=check)
    return g


@pytest.fixture
def cube():
    return element(("cube", box()))


@pytest.fixture
def offset_cube():
    return element(("cube_b", box((0.5, 0.25, 0.125), (1.5, 1.25, 1.125))))


@pytest.fixture
def shell():
    return element(("outer", icosphere(radius=2.0, level=1)),
                   ("inner", icosphere(radius=1.0, level=1).flipped()))


@pytest.fixture
def ball():
    return element(("ball", icosphere(radius=1.0, level=2)))


def unit_square_patches():
    """Top face of the unit cube and two ways to continue it across the edge x = 1."""
    top = np.array([(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)], dtype=float)
    wall = np.array([(1, 1, 1), (1, 0, 1), (1, 0, 0), (1, 1, 0)], dtype=float)
    flat = np.array([(1, 1, 1), (1, 0, 1), (2, 0, 1), (2, 1, 1)], dtype=float)
    return top, wall, flat
