"""ε-tolerant geometric primitives.

Two points are the same point when their distance is smaller than ε; every
other tolerance in the package (area floor, parallel test, plane side) is
derived from that single length.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Tuple

import numpy as np
import numpy.typing as npt
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from tools.errors import DegenerateInput

Point3 = npt.NDArray[np.float64]

DEFAULT_EPSILON_SCALE = 1e-9


@dataclass(frozen=True)
class Tolerance:
    eps: float

    def __post_init__(self):
        if not np.isfinite(self.eps) or self.eps <= 0:
            raise ValueError(f"tolerance must be a positive length, got {self.eps}")

    @property
    def area_floor(self):
        return self.eps * self.eps


def default_tolerance(points, scale=DEFAULT_EPSILON_SCALE):
    """ε = scale × bounding-box diagonal of `points` (any (n, 3) array)."""
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(points) == 0:
        return Tolerance(scale)
    diagonal = float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))
    return Tolerance(scale * diagonal if diagonal > 0 else scale)


def as_point(values) -> Point3:
    point = np.asarray(values, dtype=float).reshape(3)
    if not np.all(np.isfinite(point)):
        raise ValueError(f"point coordinates must be finite, got {point}")
    return point


def eps_eq(p, q, tol: Tolerance) -> bool:
    return bool(np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float)) < tol.eps)


def is_parallel(u, v, tol: Tolerance) -> bool:
    # |u×v| < ε|u||v|
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return bool(np.linalg.norm(np.cross(u, v)) < tol.eps * np.linalg.norm(u) * np.linalg.norm(v))


@dataclass(frozen=True, eq=False)
class Triangle:
    """Counter-clockwise vertices; the right-hand rule gives the normal."""
    a: Point3
    b: Point3
    c: Point3

    @classmethod
    def from_array(cls, corners):
        corners = np.asarray(corners, dtype=float).reshape(3, 3)
        return cls(as_point(corners[0]), as_point(corners[1]), as_point(corners[2]))

    def as_array(self):
        return np.array([self.a, self.b, self.c], dtype=float)

    @property
    def area_vector(self):
        return 0.5 * np.cross(self.b - self.a, self.c - self.a)

    @property
    def area(self):
        return float(np.linalg.norm(self.area_vector))

    @property
    def normal(self):
        vector = self.area_vector
        return vector / np.linalg.norm(vector)

    def is_degenerate(self, tol: Tolerance):
        return self.area < tol.area_floor

    def check(self, tol: Tolerance):
        if self.is_degenerate(tol):
            raise DegenerateInput(f"triangle area {self.area:.3e} below floor {tol.area_floor:.3e}")
        return self


@dataclass(frozen=True, eq=False)
class PolyCurve:
    vertices: np.ndarray
    closed: bool = False
    provenance: Tuple = field(default=(), compare=False)

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        vertices.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)

    def __len__(self):
        return len(self.vertices)

    def segments(self):
        """(k, 2, 3) array of consecutive vertex pairs, closing edge included."""
        pts = self.vertices
        if self.closed:
            pts = np.vstack([pts, pts[:1]])
        return np.stack([pts[:-1], pts[1:]], axis=1)

    def length(self):
        return float(np.linalg.norm(np.diff(self.segments(), axis=1), axis=2).sum())

    def check(self, tol: Tolerance):
        steps = np.linalg.norm(np.diff(self.segments(), axis=1)[:, 0], axis=1)
        if np.any(steps < tol.eps):
            raise DegenerateInput("consecutive curve vertices are ε-equal")
        return self


def triangle_area_vectors(triangles):
    triangles = np.asarray(triangles, dtype=float)
    return 0.5 * np.cross(triangles[:, 1] - triangles[:, 0], triangles[:, 2] - triangles[:, 0])


def triangle_areas(triangles):
    return np.linalg.norm(triangle_area_vectors(triangles), axis=1)


def triangle_normals(triangles):
    vectors = triangle_area_vectors(triangles)
    lengths = np.linalg.norm(vectors, axis=1)
    lengths[lengths == 0] = 1.0
    return vectors / lengths[:, None]


def snap_vertices(points, tol: Tolerance):
    """Merge points closer than ε.

    Clusters are the connected components of the "closer than ε" graph; each
    cluster is represented by its lexicographically smallest member.
    Returns `(unique_points, inverse)` with `unique_points[inverse] ≈ points`;
    unique points keep the order of their representatives' first appearance.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    n = len(points)
    if n == 0:
        return points.copy(), np.zeros(0, dtype=int)
    pairs = cKDTree(points).query_pairs(r=tol.eps, output_type="ndarray")
    if len(pairs) == 0:
        return points.copy(), np.arange(n)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)

    # lexicographic minimum of each cluster
    order = np.lexsort((points[:, 2], points[:, 1], points[:, 0]))
    representative = {}
    for index in order:
        representative.setdefault(labels[index], index)

    first_seen = {}
    unique_rows = []
    inverse = np.empty(n, dtype=int)
    for index in range(n):
        label = labels[index]
        if label not in first_seen:
            first_seen[label] = len(unique_rows)
            unique_rows.append(representative[label])
        inverse[index] = first_seen[label]
    return points[np.asarray(unique_rows)].copy(), inverse


def bounding_box(point_sets: Iterable):
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)
    for points in point_sets:
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        if len(points):
            lo = np.minimum(lo, points.min(axis=0))
            hi = np.maximum(hi, points.max(axis=0))
    return lo, hi
