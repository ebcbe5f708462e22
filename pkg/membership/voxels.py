"""Column-scanline rasterisation of bounded complements onto a voxel grid."""
from __future__ import annotations

import numpy as np

from brep.surface import GElement
from geometry.mesh import TriMesh

JITTER_ATTEMPTS = 8
BARY_EPS = 1e-12


def voxel_grid(lo, hi, resolution, inflation=0.1):
    """Voxel-centre coordinates over [lo, hi] inflated by `inflation` of the extent per side."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    extent = np.maximum(hi - lo, 1e-12)
    lo = lo - inflation * extent
    hi = hi + inflation * extent
    step = (hi - lo) / resolution
    return tuple(lo[axis] + step[axis] * (np.arange(resolution) + 0.5) for axis in range(3))


def _column_crossings(triangles, x, y):
    """z of every crossing of the vertical line through (x, y); None if it grazes an edge."""
    a, b, c = triangles[:, 0], triangles[:, 1], triangles[:, 2]
    det = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1])
    flat = np.abs(det) < BARY_EPS * np.maximum(1.0, np.abs(det).max())
    safe = np.where(flat, 1.0, det)
    u = ((x - a[:, 0]) * (c[:, 1] - a[:, 1]) - (c[:, 0] - a[:, 0]) * (y - a[:, 1])) / safe
    v = ((b[:, 0] - a[:, 0]) * (y - a[:, 1]) - (x - a[:, 0]) * (b[:, 1] - a[:, 1])) / safe
    w = 1.0 - u - v
    bary = np.stack([w, u, v], axis=1)
    inside = ~flat & np.all(bary >= 0.0, axis=1)
    if np.any(~flat & np.all(bary > -BARY_EPS, axis=1) & (np.min(np.abs(bary), axis=1) < BARY_EPS)):
        return None
    z = (bary[inside] * triangles[inside][:, :, 2]).sum(axis=1)
    if len(z) % 2:
        return None
    return np.sort(z)


def inside_mask_grid(mesh: TriMesh, grid, rng=None):
    """Boolean (nx, ny, nz) mask of voxel centres in the bounded complement of `mesh`."""
    xs, ys, zs = (np.asarray(axis, dtype=float) for axis in grid)
    triangles = mesh.triangles
    mask = np.zeros((len(xs), len(ys), len(zs)), dtype=bool)
    lo = triangles.min(axis=1)
    hi = triangles.max(axis=1)
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
    rng = rng if rng is not None else np.random.default_rng(0)

    ix = np.flatnonzero((xs >= lo[:, 0].min()) & (xs <= hi[:, 0].max()))
    iy = np.flatnonzero((ys >= lo[:, 1].min()) & (ys <= hi[:, 1].max()))
    for i in ix:
        column_band = (lo[:, 0] <= xs[i] + dx) & (hi[:, 0] >= xs[i] - dx)
        band = triangles[column_band]
        band_lo = lo[column_band]
        band_hi = hi[column_band]
        for j in iy:
            near = (band_lo[:, 1] <= ys[j] + dy) & (band_hi[:, 1] >= ys[j] - dy)
            if not np.any(near):
                continue
            candidates = band[near]
            crossings = _column_crossings(candidates, xs[i], ys[j])
            attempt = 0
            while crossings is None and attempt < JITTER_ATTEMPTS:
                # nudge the column inside its voxel
                jitter = (rng.random(2) - 0.5) * 1e-3 * np.array([dx, dy])
                crossings = _column_crossings(candidates, xs[i] + jitter[0], ys[j] + jitter[1])
                attempt += 1
            if crossings is None or len(crossings) == 0:
                continue
            mask[i, j] = np.searchsorted(crossings, zs) % 2 == 1
    return mask


def region_mask(g: GElement, grid, rng=None):
    """Voxel centres inside ρ(g): per atom the intersection of internal complements, then the union."""
    shape = tuple(len(axis) for axis in grid)
    if g.is_bottom:
        return np.zeros(shape, dtype=bool)
    if g.is_top:
        return np.ones(shape, dtype=bool)
    region = np.zeros(shape, dtype=bool)
    for atom in g.atoms:
        region |= atom_mask(atom, grid, rng)
    return region


def atom_mask(atom, grid, rng=None):
    shape = tuple(len(axis) for axis in grid)
    mask = np.ones(shape, dtype=bool)
    for surface in atom.surfaces:
        inside = inside_mask_grid(surface.mesh, grid, rng)
        mask &= inside if surface.is_positive else ~inside
    return mask
