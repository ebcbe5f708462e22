"""Constrained retriangulation of a single triangle.

The triangle is mapped to a local 2D frame, its boundary is split at every
point lying on it, constraint segments are split at their mutual crossings,
and Shewchuk's Triangle triangulates the resulting planar straight-line graph.
Input points keep their exact 3D coordinates; points created by the splitting
are lifted back onto the triangle's plane.
"""
from __future__ import annotations

import numpy as np
import triangle

from geometry.primitives import PolyCurve, Tolerance, Triangle
from tools.errors import ConstraintOutsideTriangle, DegenerateGeometry

BOUNDARY_MARKER = 1
CONSTRAINT_MARKER = 2


class _Frame:
    def __init__(self, corners):
        self.origin = corners[0]
        self.e1 = (corners[1] - corners[0]) / np.linalg.norm(corners[1] - corners[0])
        normal = np.cross(corners[1] - corners[0], corners[2] - corners[0])
        self.normal = normal / np.linalg.norm(normal)
        self.e2 = np.cross(self.normal, self.e1)

    def project(self, points):
        rel = np.asarray(points, dtype=float).reshape(-1, 3) - self.origin
        return np.stack([rel @ self.e1, rel @ self.e2], axis=1)

    def lift(self, uv):
        uv = np.asarray(uv, dtype=float).reshape(-1, 2)
        return self.origin + uv[:, :1] * self.e1 + uv[:, 1:] * self.e2

    def height(self, points):
        return (np.asarray(points, dtype=float).reshape(-1, 3) - self.origin) @ self.normal


class _PointSet:
    """ε-deduplicating point list holding both 3D and 2D coordinates."""

    def __init__(self, frame, tol):
        self.frame = frame
        self.tol = tol
        self.xyz = []
        self.uv = []

    def add(self, xyz, uv=None):
        if uv is None:
            uv = self.frame.project(xyz)[0]
        for index, other in enumerate(self.xyz):
            if np.linalg.norm(other - xyz) < self.tol.eps:
                return index
        self.xyz.append(np.asarray(xyz, dtype=float))
        self.uv.append(np.asarray(uv, dtype=float))
        return len(self.xyz) - 1

    def __len__(self):
        return len(self.xyz)


def _point_segment_parameter(p, a, b):
    ab = b - a
    t = float(np.dot(p - a, ab) / np.dot(ab, ab))
    return t, float(np.linalg.norm(a + t * ab - p))


def _segment_crossing(a, b, c, d):
    """Proper 2D crossing parameters (s on ab, t on cd), or None."""
    r = b - a
    s = d - c
    denom = r[0] * s[1] - r[1] * s[0]
    if denom == 0.0:
        return None
    qp = c - a
    u = (qp[0] * s[1] - qp[1] * s[0]) / denom
    v = (qp[0] * r[1] - qp[1] * r[0]) / denom
    return u, v


def _edge_distances(uv, corners_uv):
    """Signed in-plane distances of points to the three edges (positive inside)."""
    distances = []
    for i in range(3):
        a = corners_uv[i]
        b = corners_uv[(i + 1) % 3]
        edge = b - a
        inward = np.array([-edge[1], edge[0]]) / np.linalg.norm(edge)
        distances.append((uv - a) @ inward)
    return np.stack(distances, axis=1)


def _split_constraints(points, segments, tol):
    """Split constraint segments at points lying on them and at mutual crossings."""
    changed = True
    while changed:
        changed = False
        # points on segments
        for k, (i, j) in enumerate(segments):
            a3, b3 = points.xyz[i], points.xyz[j]
            for m in range(len(points)):
                if m in (i, j):
                    continue
                t, dist = _point_segment_parameter(points.xyz[m], a3, b3)
                if dist < tol.eps and 0.0 < t < 1.0:
                    segments[k:k + 1] = [(i, m), (m, j)]
                    changed = True
                    break
            if changed:
                break
        if changed:
            continue
        # proper crossings
        for k in range(len(segments)):
            i, j = segments[k]
            for l in range(k + 1, len(segments)):
                c, d = segments[l]
                if len({i, j, c, d}) < 4:
                    continue
                hit = _segment_crossing(points.uv[i], points.uv[j], points.uv[c], points.uv[d])
                if hit is None:
                    continue
                u, v = hit
                if 0.0 < u < 1.0 and 0.0 < v < 1.0:
                    uv = points.uv[i] + u * (points.uv[j] - points.uv[i])
                    m = points.add(points.frame.lift(uv)[0], uv)
                    if m in (i, j, c, d):
                        continue
                    segments[l:l + 1] = [(c, m), (m, d)]
                    segments[k:k + 1] = [(i, m), (m, j)]
                    changed = True
                    break
            if changed:
                break
    unique = {tuple(sorted(s)) for s in segments if s[0] != s[1]}
    return sorted(unique)


def triangulate_with_constraints(corners, segments, tol: Tolerance, boundary_points=()):
    """Triangulate `corners` so that every constraint segment becomes a union of edges.

    `segments` is an (m, 2, 3) array; `boundary_points` are extra points known
    to lie on the triangle's edges (so that neighbours stay conforming).
    Returns `(points, faces, cut_edges)`: 3D points, index triples wound like
    the input, and the index pairs of output edges that lie on constraints.
    """
    corners = np.asarray(corners, dtype=float).reshape(3, 3)
    Triangle.from_array(corners).check(tol)
    segments = np.asarray(segments, dtype=float).reshape(-1, 2, 3)
    frame = _Frame(corners)
    corners_uv = frame.project(corners)
    points = _PointSet(frame, tol)
    for corner in corners:
        points.add(corner)

    def admit(xyz):
        if abs(frame.height(xyz)[0]) >= tol.eps:
            raise ConstraintOutsideTriangle(f"point {xyz} is {frame.height(xyz)[0]:.3e} off the triangle plane")
        uv = frame.project(xyz)[0]
        distances = _edge_distances(uv[None, :], corners_uv)[0]
        if np.any(distances <= -tol.eps):
            raise ConstraintOutsideTriangle(f"point {xyz} lies outside the triangle")
        # pull near-edge points onto the edge in the plane so the PSLG stays valid
        for i in np.flatnonzero(np.abs(distances) < tol.eps):
            a = corners_uv[i]
            b = corners_uv[(i + 1) % 3]
            t = np.dot(uv - a, b - a) / np.dot(b - a, b - a)
            uv = a + np.clip(t, 0.0, 1.0) * (b - a)
        return points.add(np.asarray(xyz, dtype=float), uv)

    constraint_ids = []
    for a, b in segments:
        i, j = admit(a), admit(b)
        if i != j:
            constraint_ids.append((i, j))
    for p in np.asarray(boundary_points, dtype=float).reshape(-1, 3):
        uv = frame.project(p)[0]
        if np.min(np.abs(_edge_distances(uv[None, :], corners_uv)[0])) < tol.eps:
            admit(p)

    constraint_ids = _split_constraints(points, constraint_ids, tol)

    # boundary sub-edges
    uv_all = np.array(points.uv)
    edge_dist = _edge_distances(uv_all, corners_uv)
    boundary = []
    for i in range(3):
        a = corners_uv[i]
        b = corners_uv[(i + 1) % 3]
        on_edge = np.flatnonzero(np.abs(edge_dist[:, i]) < tol.eps)
        t = (uv_all[on_edge] - a) @ (b - a) / np.dot(b - a, b - a)
        ordered = on_edge[np.argsort(t, kind="stable")]
        boundary.extend(tuple(sorted((int(p), int(q)))) for p, q in zip(ordered[:-1], ordered[1:]))
    boundary_set = set(boundary)

    cut_edges = [s for s in constraint_ids if s in boundary_set]
    interior = [s for s in constraint_ids if s not in boundary_set]

    if not interior and len(points) == 3:
        return corners.copy(), np.array([[0, 1, 2]]), np.array(cut_edges, dtype=int).reshape(-1, 2)

    pslg_segments = np.array(boundary + interior, dtype=np.int32)
    markers = np.array([BOUNDARY_MARKER] * len(boundary) + [CONSTRAINT_MARKER] * len(interior),
                       dtype=np.int32).reshape(-1, 1)
    result = triangle.triangulate(
        {"vertices": uv_all, "segments": pslg_segments, "segment_markers": markers}, "pQ"
    )

    out_uv = result["vertices"]
    xyz = np.array(points.xyz)
    if len(out_uv) > len(xyz):
        xyz = np.vstack([xyz, frame.lift(out_uv[len(xyz):])])
    faces = np.asarray(result["triangles"], dtype=np.int64).reshape(-1, 3)

    # keep the source winding
    normals = np.cross(xyz[faces[:, 1]] - xyz[faces[:, 0]], xyz[faces[:, 2]] - xyz[faces[:, 0]])
    flip = normals @ frame.normal < 0
    faces[flip] = faces[flip][:, ::-1]
    areas = 0.5 * np.linalg.norm(normals, axis=1)
    if np.any(areas < tol.area_floor):
        raise DegenerateGeometry(
            f"retriangulation left a face of area {areas.min():.3e} below the floor {tol.area_floor:.3e}; "
            f"the constraints come closer than the tolerance resolves")

    out_segments = np.asarray(result.get("segments", np.zeros((0, 2))), dtype=np.int64).reshape(-1, 2)
    out_markers = np.asarray(result.get("segment_markers", np.zeros((0, 1))), dtype=np.int64).reshape(-1)
    constrained = out_segments[out_markers == CONSTRAINT_MARKER]
    cut = np.vstack([np.array(cut_edges, dtype=np.int64).reshape(-1, 2), constrained])
    return xyz, faces, cut


def retriangulate(t, constraints, tol: Tolerance):
    """Partition `t` into triangles whose edges contain every constraint segment."""
    corners = t.as_array() if isinstance(t, Triangle) else np.asarray(t, dtype=float).reshape(3, 3)
    segments = []
    for constraint in constraints:
        if isinstance(constraint, PolyCurve):
            segments.extend(constraint.segments())
        else:
            segments.extend(np.asarray(constraint, dtype=float).reshape(-1, 2, 3))
    points, faces, _ = triangulate_with_constraints(corners, np.array(segments).reshape(-1, 2, 3), tol)
    return [Triangle.from_array(points[face]) for face in faces]
