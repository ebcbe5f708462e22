"""Exact point–triangle distances (vectorised Voronoi-region test)."""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree


def closest_points(points, triangles):
    """Closest point of triangle k to point k; `points` (k, 3) and `triangles` (k, 3, 3) broadcast."""
    p = np.asarray(points, dtype=float)
    t = np.asarray(triangles, dtype=float)
    a, b, c = t[..., 0, :], t[..., 1, :], t[..., 2, :]
    p, a, b, c = np.broadcast_arrays(p, a, b, c)
    shape = p.shape[:-1]
    p, a, b, c = (x.reshape(-1, 3) for x in (p, a, b, c))

    ab = b - a
    ac = c - a
    ap = p - a
    d1 = np.einsum("ij,ij->i", ab, ap)
    d2 = np.einsum("ij,ij->i", ac, ap)
    bp = p - b
    d3 = np.einsum("ij,ij->i", ab, bp)
    d4 = np.einsum("ij,ij->i", ac, bp)
    cp = p - c
    d5 = np.einsum("ij,ij->i", ab, cp)
    d6 = np.einsum("ij,ij->i", ac, cp)

    va = d3 * d6 - d5 * d4
    vb = d5 * d2 - d1 * d6
    vc = d1 * d4 - d3 * d2

    with np.errstate(divide="ignore", invalid="ignore"):
        denom = va + vb + vc
        v = vb / denom
        w = vc / denom
        result = a + ab * v[:, None] + ac * w[:, None]

        # edge regions
        in_bc = (va <= 0) & ((d4 - d3) >= 0) & ((d5 - d6) >= 0)
        w_bc = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        result[in_bc] = (b + (c - b) * w_bc[:, None])[in_bc]

        in_ac = (vb <= 0) & (d2 >= 0) & (d6 <= 0)
        w_ac = d2 / (d2 - d6)
        result[in_ac] = (a + ac * w_ac[:, None])[in_ac]

        in_ab = (vc <= 0) & (d1 >= 0) & (d3 <= 0)
        v_ab = d1 / (d1 - d3)
        result[in_ab] = (a + ab * v_ab[:, None])[in_ab]

    # vertex regions
    in_c = (d6 >= 0) & (d5 <= d6)
    result[in_c] = c[in_c]
    in_b = (d3 >= 0) & (d4 <= d3)
    result[in_b] = b[in_b]
    in_a = (d1 <= 0) & (d2 <= 0)
    result[in_a] = a[in_a]
    return result.reshape(shape + (3,))


def point_triangle_distance(points, triangles):
    """Distance from point k to triangle k (both broadcast against each other)."""
    points = np.asarray(points, dtype=float)
    return np.linalg.norm(closest_points(points, triangles) - points, axis=-1)


def distance_to_triangles(points, triangles, chunk=2048):
    """Unsigned distance from each point to the nearest of `triangles`."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    triangles = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
    if len(triangles) == 0:
        return np.full(len(points), np.inf)
    centroids = triangles.mean(axis=1)
    reach = float(np.max(np.linalg.norm(triangles - centroids[:, None, :], axis=2)))
    tree = cKDTree(centroids)

    # the triangle of the nearest centroid gives an upper bound; only triangles
    # whose centroid lies within bound + reach can beat it
    _, nearest = tree.query(points)
    bound = point_triangle_distance(points, triangles[nearest])
    result = bound.copy()
    for start in range(0, len(points), chunk):
        block = slice(start, start + chunk)
        neighbours = tree.query_ball_point(points[block], bound[block] + reach)
        for offset, ids in enumerate(neighbours):
            if len(ids) > 1:
                k = start + offset
                result[k] = point_triangle_distance(points[k], triangles[ids]).min()
    return result
