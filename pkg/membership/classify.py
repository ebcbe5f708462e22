"""Point classification by randomized ray crossing.

A point lies in a surface's bounded complement iff a ray from it crosses the
surface an odd number of times. A cast is discarded when the ray passes
within ε of a mesh edge or vertex, or runs ε-coplanar with a facet; a fresh
random direction is drawn until a clean cast happens or the budget is spent.
"""
from __future__ import annotations

from enum import IntEnum

import numpy as np

from brep.surface import GElement, GluedSurface
from geometry.distance import point_triangle_distance
from geometry.mesh import TriMesh
from geometry.primitives import Tolerance
from tools.errors import RetryExhausted

DEFAULT_RAY_BUDGET = 64
PARALLEL_EPS = 1e-9
CHUNK = 256


class PointClass(IntEnum):
    OUTSIDE = 0
    INSIDE = 1
    ON_BOUNDARY = 2


def random_direction(rng):
    while True:
        v = rng.standard_normal(3)
        n = np.linalg.norm(v)
        if n > 1e-12:
            return v / n


class _RayTable:
    """Per-triangle quantities reused by every cast against one mesh."""

    def __init__(self, triangles):
        t = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
        self.a = t[:, 0]
        self.e1 = t[:, 1] - t[:, 0]
        self.e2 = t[:, 2] - t[:, 0]
        cross = np.cross(self.e1, self.e2)
        twice_area = np.linalg.norm(cross, axis=1)
        self.normal = cross / twice_area[:, None]
        # altitudes onto the edges opposite a, b, c
        self.altitude = np.stack([
            twice_area / np.linalg.norm(t[:, 2] - t[:, 1], axis=1),
            twice_area / np.linalg.norm(t[:, 0] - t[:, 2], axis=1),
            twice_area / np.linalg.norm(t[:, 1] - t[:, 0], axis=1),
        ], axis=1)

    def cast(self, points, direction, tol):
        """Crossing parity per point, with -1 marking a degenerate cast."""
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        d = np.asarray(direction, dtype=float)
        pvec = np.cross(d, self.e2)
        det = np.einsum("ij,ij->i", self.e1, pvec)
        parallel = np.abs(self.normal @ d) < PARALLEL_EPS
        safe_det = np.where(parallel, 1.0, det)

        tvec = points[:, None, :] - self.a[None, :, :]
        plane_gap = np.abs(np.einsum("kij,ij->ki", tvec, self.normal))
        coplanar = parallel[None, :] & (plane_gap < tol.eps)

        u = np.einsum("kij,ij->ki", tvec, pvec) / safe_det
        qvec = np.cross(tvec, self.e1[None, :, :])
        v = (qvec @ d) / safe_det
        t = np.einsum("kij,ij->ki", qvec, self.e2) / safe_det
        bary = np.stack([1.0 - u - v, u, v], axis=2)
        edge_distance = bary * self.altitude[None, :, :]

        ahead = (t > 0.0) & ~parallel[None, :]
        inside = np.all(edge_distance >= 0.0, axis=2)
        grazing = (np.min(np.abs(edge_distance), axis=2) < tol.eps) & np.all(edge_distance > -tol.eps, axis=2)
        hits = ahead & inside
        degenerate = np.any(ahead & grazing, axis=1) | np.any(coplanar, axis=1)
        parity = (np.count_nonzero(hits, axis=1) % 2).astype(np.int64)
        parity[degenerate] = -1
        return parity


def _triangles(s):
    if isinstance(s, GluedSurface):
        return s.mesh.triangles
    if isinstance(s, TriMesh):
        return s.triangles
    return np.asarray(s, dtype=float).reshape(-1, 3, 3)


def ray_parity(q, s, direction, tol: Tolerance):
    """One cast: 1 for odd crossings, 0 for even, None when degenerate."""
    parity = _RayTable(_triangles(s)).cast(q, direction, tol)[0]
    return None if parity < 0 else int(parity)


def ray_crossing_inside(q, s, rng, tol: Tolerance, budget=DEFAULT_RAY_BUDGET, first_direction=None) -> bool:
    """True iff `q` lies in the bounded complement of `s`."""
    table = _RayTable(_triangles(s))
    q = np.asarray(q, dtype=float).reshape(1, 3)
    for attempt in range(budget):
        if attempt == 0 and first_direction is not None:
            direction = np.asarray(first_direction, dtype=float)
            direction = direction / np.linalg.norm(direction)
        else:
            direction = random_direction(rng)
        parity = table.cast(q, direction, tol)[0]
        if parity >= 0:
            return bool(parity)
    raise RetryExhausted(f"no clean ray from {q[0]} after {budget} casts")


def inside_bounded(points, s, rng, tol: Tolerance, budget=DEFAULT_RAY_BUDGET):
    """Vectorised `ray_crossing_inside`: one shared direction per round, re-rolled for degenerate points."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    table = _RayTable(_triangles(s))
    result = np.full(len(points), -1, dtype=np.int64)
    pending = np.arange(len(points))
    chunk = max(1, min(CHUNK, 400_000 // max(len(table.a), 1)))
    for _ in range(budget):
        if len(pending) == 0:
            break
        direction = random_direction(rng)
        for start in range(0, len(pending), chunk):
            block = pending[start:start + chunk]
            result[block] = table.cast(points[block], direction, tol)
        pending = np.flatnonzero(result < 0)
    if len(pending):
        raise RetryExhausted(f"{len(pending)} points without a clean ray after {budget} rounds")
    return result.astype(bool)


def near_surface(points, s, radius, chunk=CHUNK):
    """Mask of points within `radius` of `s` (exact distance over box-filtered candidates)."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    triangles = _triangles(s)
    lo = triangles.min(axis=1)
    hi = triangles.max(axis=1)
    mask = np.zeros(len(points), dtype=bool)
    for start in range(0, len(points), chunk):
        block = points[start:start + chunk]
        overlap = np.all(lo[None] <= block[:, None] + radius, axis=2) & np.all(hi[None] >= block[:, None] - radius, axis=2)
        rows, cols = np.nonzero(overlap)
        if len(rows) == 0:
            continue
        d = point_triangle_distance(block[rows], triangles[cols])
        close = rows[d < radius]
        mask[start + np.unique(close)] = True
    return mask


def distance_to_surface(q, s: GluedSurface, radius):
    """Exact distance from `q` to `s` if below `radius`, else inf (octree candidates)."""
    q = np.asarray(q, dtype=float)
    ids = s.octree.query_point(q, radius)
    if len(ids) == 0:
        return np.inf
    d = float(point_triangle_distance(q, s.mesh.triangles[ids]).min())
    return d if d < radius else np.inf


def _internal(inside, surface):
    # int(S): bounded complement when positive, unbounded when negative
    return inside if surface.is_positive else ~inside


def classify_point(q, g: GElement, rng, tol: Tolerance, budget=DEFAULT_RAY_BUDGET) -> PointClass:
    if g.is_bottom:
        return PointClass.OUTSIDE
    if g.is_top:
        return PointClass.INSIDE
    q = np.asarray(q, dtype=float)
    surfaces = g.surfaces()
    for surface in surfaces:
        if np.isfinite(distance_to_surface(q, surface, tol.eps)):
            return PointClass.ON_BOUNDARY
    for atom in g.atoms:
        if all(ray_crossing_inside(q, s, rng, tol, budget) == s.is_positive for s in atom.surfaces):
            return PointClass.INSIDE
    return PointClass.OUTSIDE


def classify_points(points, g: GElement, rng, tol: Tolerance, budget=DEFAULT_RAY_BUDGET):
    """PointClass codes (int array) for every row of `points`."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if g.is_bottom:
        return np.full(len(points), int(PointClass.OUTSIDE))
    if g.is_top:
        return np.full(len(points), int(PointClass.INSIDE))
    on_boundary = np.zeros(len(points), dtype=bool)
    for surface in g.surfaces():
        on_boundary |= near_surface(points, surface, tol.eps)
    free = np.flatnonzero(~on_boundary)
    inside_any = np.zeros(len(free), dtype=bool)
    for atom in g.atoms:
        in_atom = np.ones(len(free), dtype=bool)
        for surface in atom.surfaces:
            in_atom &= _internal(inside_bounded(points[free], surface, rng, tol, budget), surface)
        inside_any |= in_atom
    result = np.full(len(points), int(PointClass.ON_BOUNDARY))
    result[free] = np.where(inside_any, int(PointClass.INSIDE), int(PointClass.OUTSIDE))
    return result
