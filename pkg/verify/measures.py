"""Independent measures of a result: volume, Hausdorff distance, voxel topology."""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from brep.surface import GElement, GluedSurface
from brep.topology import TopologyReport
from geometry.distance import distance_to_triangles
from geometry.mesh import TriMesh, signed_volume
from geometry.primitives import bounding_box, triangle_areas
from membership.voxels import region_mask, voxel_grid
from tools.errors import InfiniteVolume

DEFAULT_RESOLUTION = 64


def mesh_volume(g: GElement) -> float:
    """Volume of ρ(g) by the divergence theorem, atom by atom."""
    if g.is_bottom:
        return 0.0
    if g.is_top:
        raise InfiniteVolume("the whole space has infinite volume")
    total = 0.0
    for k, atom in enumerate(g.atoms):
        if atom.is_negative_type:
            raise InfiniteVolume(f"atom {k} is unbounded")
        total += signed_volume(atom.positive.mesh)
        total -= sum(signed_volume(n.mesh) for n in atom.negatives)
    return total


def _triangles(mesh):
    if isinstance(mesh, GluedSurface):
        mesh = mesh.mesh
    if isinstance(mesh, TriMesh):
        return mesh.triangles
    return np.asarray(mesh, dtype=float).reshape(-1, 3, 3)


def sample_surface(triangles, n, rng):
    """`n` points uniform over the area of `triangles`."""
    areas = triangle_areas(triangles)
    picks = rng.choice(len(triangles), size=n, p=areas / areas.sum())
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    t = triangles[picks]
    return ((1 - r1)[:, None] * t[:, 0] + (r1 * (1 - r2))[:, None] * t[:, 1]
            + (r1 * r2)[:, None] * t[:, 2])


def hausdorff(a, b, n=2000, rng=None) -> float:
    """Symmetric Hausdorff distance estimated from `n` area-uniform samples per side."""
    rng = rng if rng is not None else np.random.default_rng(0)
    ta = _triangles(a)
    tb = _triangles(b)
    forward = distance_to_triangles(sample_surface(ta, n, rng), tb).max()
    backward = distance_to_triangles(sample_surface(tb, n, rng), ta).max()
    return float(max(forward, backward))


def _holes(component, structure):
    """Cavities: pieces of the component's complement that do not reach the grid border."""
    outside, count = ndimage.label(~component, structure=structure)
    border = np.zeros_like(component)
    border[[0, -1], :, :] = True
    border[:, [0, -1], :] = True
    border[:, :, [0, -1]] = True
    touching = set(np.unique(outside[border & (outside > 0)]).tolist())
    return sum(1 for label in range(1, count + 1) if label not in touching)


def voxel_topology(g: GElement, resolution=DEFAULT_RESOLUTION, rng=None) -> TopologyReport:
    """Components and holes of ρ(g) by 6-connected flood fill on a voxel grid."""
    if g.is_bottom:
        return TopologyReport(0, [])
    if g.is_top:
        return TopologyReport(1, [0])
    lo, hi = bounding_box(s.mesh.vertices for s in g.surfaces())
    grid = voxel_grid(lo, hi, resolution)
    mask = region_mask(g, grid, rng)
    structure = ndimage.generate_binary_structure(3, 1)
    labels, count = ndimage.label(mask, structure=structure)
    holes = [_holes(labels == label, structure) for label in range(1, count + 1)]
    return TopologyReport(count, sorted(holes))
