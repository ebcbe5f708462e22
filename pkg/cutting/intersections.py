"""Detection of all pairwise and self intersections among glued surfaces."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from cutting.octree import DEFAULT_LEAF_CAP, DEFAULT_MAX_DEPTH, build_octree, candidate_pairs
from geometry.distance import point_triangle_distance
from geometry.intersection import IntersectionKind, tri_tri_intersect
from geometry.primitives import PolyCurve, Tolerance, snap_vertices

# (surface id, triangle id) on each side of a contact
TriangleRef = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class IntersectionRecord:
    kind: IntersectionKind
    geometry: np.ndarray
    first: TriangleRef
    second: TriangleRef

    @property
    def surfaces(self):
        return tuple(sorted({self.first[0], self.second[0]}))


@dataclass(frozen=True, eq=False)
class IntersectionSet:
    curves: List[PolyCurve]
    isolated_points: np.ndarray
    records: List[IntersectionRecord]
    surface_ids: Tuple[int, ...] = ()
    by_triangle: Dict[TriangleRef, List[np.ndarray]] = field(default_factory=dict)

    def __bool__(self):
        return bool(self.curves)

    @property
    def is_empty(self):
        return not self.curves and len(self.isolated_points) == 0

    def segments_of(self, surface_id, triangle_id):
        return self.by_triangle.get((surface_id, triangle_id), [])

    def triangles_of(self, surface_id):
        return sorted(t for s, t in self.by_triangle if s == surface_id)


def _surface_arrays(surfaces):
    triangles = []
    owner = []
    local = []
    faces = []
    for surface in surfaces:
        mesh = surface.mesh if hasattr(surface, "mesh") else surface
        triangles.append(mesh.triangles)
        owner.append(np.full(len(mesh.faces), surface.id if hasattr(surface, "id") else len(owner)))
        local.append(np.arange(len(mesh.faces)))
        faces.append(mesh.faces)
    return (np.concatenate(triangles), np.concatenate(owner), np.concatenate(local),
            np.concatenate(faces))


def _filter_pairs(pairs, triangles, owner, faces, tol):
    i, j = pairs[:, 0], pairs[:, 1]
    # neighbours on one surface touch only along their shared edge or vertex
    same = owner[i] == owner[j]
    shares = np.zeros(len(pairs), dtype=bool)
    for a in range(3):
        for b in range(3):
            shares |= faces[i, a] == faces[j, b]
    keep = ~(same & shares)

    lo_i, hi_i = triangles[i].min(axis=1), triangles[i].max(axis=1)
    lo_j, hi_j = triangles[j].min(axis=1), triangles[j].max(axis=1)
    keep &= np.all(lo_i <= hi_j + tol.eps, axis=1) & np.all(lo_j <= hi_i + tol.eps, axis=1)

    # all three vertices strictly on one side of the other plane
    for first, second in ((i, j), (j, i)):
        t2 = triangles[second]
        normal = np.cross(t2[:, 1] - t2[:, 0], t2[:, 2] - t2[:, 0])
        normal /= np.linalg.norm(normal, axis=1)[:, None]
        d = np.einsum("ikj,ij->ik", triangles[first] - t2[:, :1, :], normal)
        keep &= ~(np.all(d > tol.eps, axis=1) | np.all(d < -tol.eps, axis=1))
    return pairs[keep]


def chain_segments(segments, tol: Tolerance, provenance=None):
    """Chain segments into maximal polylines by ε-endpoint matching.

    Points where three or more segments meet end every incident curve.
    Returns a list of `PolyCurve`.
    """
    segments = np.asarray(segments, dtype=float).reshape(-1, 2, 3)
    if len(segments) == 0:
        return []
    points, inverse = snap_vertices(segments.reshape(-1, 3), tol)
    ends = inverse.reshape(-1, 2)
    provenance = provenance if provenance is not None else [()] * len(segments)

    edges = {}
    for k, (a, b) in enumerate(ends):
        if a == b:
            continue
        key = (min(a, b), max(a, b))
        edges.setdefault(key, set()).update(provenance[k])
    neighbours = defaultdict(list)
    for a, b in sorted(edges):
        neighbours[a].append(b)
        neighbours[b].append(a)

    used = set()
    curves = []

    def walk(start, nxt):
        path = [start]
        sources = set()
        prev, cur = start, nxt
        while True:
            key = (min(prev, cur), max(prev, cur))
            used.add(key)
            sources |= edges[key]
            if cur == start:
                return path, True, sources
            path.append(cur)
            if len(neighbours[cur]) != 2:
                return path, False, sources
            a, b = neighbours[cur]
            step = b if a == prev else a
            if (min(cur, step), max(cur, step)) in used:
                return path, False, sources
            prev, cur = cur, step

    # open chains first, from every endpoint or junction
    for vertex in sorted(neighbours):
        if len(neighbours[vertex]) == 2:
            continue
        for nxt in neighbours[vertex]:
            if (min(vertex, nxt), max(vertex, nxt)) in used:
                continue
            path, closed, sources = walk(vertex, nxt)
            curves.append(PolyCurve(points[path], closed=closed, provenance=tuple(sorted(sources))))
    # what remains are cycles
    for a, b in sorted(edges):
        if (a, b) in used:
            continue
        path, closed, sources = walk(a, b)
        curves.append(PolyCurve(points[path], closed=closed, provenance=tuple(sorted(sources))))
    return curves


def _isolated(points, segments, tol):
    if len(points) == 0:
        return np.zeros((0, 3))
    unique, _ = snap_vertices(points, tol)
    if len(segments) == 0:
        return unique
    keep = []
    for point in unique:
        a, b = segments[:, 0], segments[:, 1]
        ab = b - a
        t = np.clip(np.einsum("ij,ij->i", point - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
        if np.min(np.linalg.norm(a + ab * t[:, None] - point, axis=1)) >= tol.eps:
            keep.append(point)
    return np.array(keep).reshape(-1, 3)


def detect_intersections(surfaces, tol: Tolerance, leaf_cap=DEFAULT_LEAF_CAP,
                         max_depth=DEFAULT_MAX_DEPTH) -> IntersectionSet:
    """All contacts between and within `surfaces` (objects with `id` and `mesh`)."""
    surfaces = list(surfaces)
    ids = tuple(s.id if hasattr(s, "id") else k for k, s in enumerate(surfaces))
    if not surfaces:
        return IntersectionSet([], np.zeros((0, 3)), [], ids)
    triangles, owner, local, faces = _surface_arrays(surfaces)
    tree = build_octree(triangles, leaf_cap=leaf_cap, max_depth=max_depth, tol=tol)
    pairs = _filter_pairs(candidate_pairs(tree), triangles, owner, faces, tol)

    records = []
    for i, j in pairs:
        hit = tri_tri_intersect(triangles[i], triangles[j], tol)
        if not hit:
            continue
        first = (int(owner[i]), int(local[i]))
        second = (int(owner[j]), int(local[j]))
        records.append(IntersectionRecord(hit.kind, hit.geometry, first, second))
    # deterministic order for chaining
    records.sort(key=lambda r: (r.first, r.second))

    by_triangle = defaultdict(list)
    segments = []
    provenance = []
    points = []
    for record in records:
        if record.kind is IntersectionKind.POINT:
            points.append(record.geometry[0])
            continue
        geometry = np.asarray(record.geometry)
        if record.kind is IntersectionKind.SEGMENT:
            pieces = geometry[None, :, :]
        else:
            pieces = np.stack([geometry, np.roll(geometry, -1, axis=0)], axis=1)
        for piece in pieces:
            segments.append(piece)
            provenance.append(record.surfaces)
            by_triangle[record.first].append(piece)
            by_triangle[record.second].append(piece)

    segments = np.array(segments).reshape(-1, 2, 3)
    curves = chain_segments(segments, tol, [(p,) for p in provenance])
    isolated = _isolated(np.array(points).reshape(-1, 3), segments, tol)
    return IntersectionSet(curves, isolated, records, ids, dict(by_triangle))


def max_deviation(isect: IntersectionSet, surfaces):
    """Largest distance from an intersection vertex to the surfaces it came from."""
    lookup = {s.id: s.mesh for s in surfaces}
    worst = 0.0
    for record in isect.records:
        for surface_id, triangle_id in (record.first, record.second):
            corners = lookup[surface_id].triangles[triangle_id]
            d = point_triangle_distance(np.asarray(record.geometry), corners[None, :, :])
            worst = max(worst, float(np.max(d)))
    return worst
