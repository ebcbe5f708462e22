"""ε-classified triangle–triangle intersection.

The transversal case intersects each triangle with the other's plane and
overlaps the two sections along the common line; the coplanar case clips one
triangle against the other. Signed distances below ε are snapped to zero so
that shared edges and shared vertices come out as segments and points.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from geometry.primitives import Tolerance, Triangle


class IntersectionKind(Enum):
    NONE = "none"
    POINT = "point"
    SEGMENT = "segment"
    COPLANAR = "coplanar"


@dataclass(frozen=True, eq=False)
class TriTriIntersection:
    kind: IntersectionKind
    geometry: np.ndarray

    def __post_init__(self):
        geometry = np.asarray(self.geometry, dtype=float).reshape(-1, 3)
        geometry.setflags(write=False)
        object.__setattr__(self, "geometry", geometry)

    def __bool__(self):
        return self.kind is not IntersectionKind.NONE


_NO_INTERSECTION = TriTriIntersection(IntersectionKind.NONE, np.zeros((0, 3)))


def _as_corners(t):
    if isinstance(t, Triangle):
        return t.as_array()
    return np.asarray(t, dtype=float).reshape(3, 3)


def _plane(corners):
    normal = np.cross(corners[1] - corners[0], corners[2] - corners[0])
    length = np.linalg.norm(normal)
    return normal / length, length


def _signed_distances(corners, normal, origin, tol):
    d = (corners - origin) @ normal
    d[np.abs(d) < tol.eps] = 0.0
    return d


def _canonical_crossing(p, q, dp, dq):
    # same edge, same plane -> bit-identical point whichever triangle asks
    if tuple(q) < tuple(p):
        p, q, dp, dq = q, p, dq, dp
    return p + (q - p) * (dp / (dp - dq))


def _plane_section(corners, d):
    """Points of a triangle lying on the other plane (vertices or edge crossings)."""
    points = [corners[i] for i in range(3) if d[i] == 0.0]
    for i in range(3):
        j = (i + 1) % 3
        if d[i] * d[j] < 0.0:
            points.append(_canonical_crossing(corners[i], corners[j], d[i], d[j]))
    return np.array(points).reshape(-1, 3)


def _dedupe(points, tol):
    kept = []
    for point in points:
        if all(np.linalg.norm(point - other) >= tol.eps for other in kept):
            kept.append(point)
    return np.array(kept).reshape(-1, 3)


def _clip_polygon(polygon, corners, normal, tol):
    """Sutherland–Hodgman against the three inward edge planes of `corners`."""
    for i in range(3):
        a = corners[i]
        b = corners[(i + 1) % 3]
        inward = np.cross(normal, b - a)
        inward /= np.linalg.norm(inward)
        if len(polygon) == 0:
            break
        side = (polygon - a) @ inward
        side[np.abs(side) < tol.eps] = 0.0
        clipped = []
        for k in range(len(polygon)):
            p, q = polygon[k], polygon[(k + 1) % len(polygon)]
            sp, sq = side[k], side[(k + 1) % len(polygon)]
            if sp >= 0.0:
                clipped.append(p)
            if sp * sq < 0.0:
                clipped.append(_canonical_crossing(p, q, sp, sq))
        polygon = np.array(clipped).reshape(-1, 3)
    return polygon


def _coplanar(c1, c2, normal, tol):
    loop = _dedupe(_clip_polygon(c1.copy(), c2, normal, tol), tol)
    if len(loop) == 0:
        return _NO_INTERSECTION
    if len(loop) == 1:
        return TriTriIntersection(IntersectionKind.POINT, loop)
    # collapse a zero-area overlap onto its extreme points
    area = 0.5 * np.linalg.norm(sum(np.cross(loop[k], loop[(k + 1) % len(loop)]) for k in range(len(loop))))
    if len(loop) == 2 or area < tol.area_floor:
        direction = loop[-1] - loop[0]
        if np.linalg.norm(direction) < tol.eps:
            direction = loop[1] - loop[0]
        s = loop @ direction
        segment = np.array([loop[np.argmin(s)], loop[np.argmax(s)]])
        if np.linalg.norm(segment[1] - segment[0]) < tol.eps:
            return TriTriIntersection(IntersectionKind.POINT, segment[:1])
        return TriTriIntersection(IntersectionKind.SEGMENT, segment)
    return TriTriIntersection(IntersectionKind.COPLANAR, loop)


def tri_tri_intersect(t1, t2, tol: Tolerance) -> TriTriIntersection:
    c1 = _as_corners(t1)
    c2 = _as_corners(t2)
    Triangle.from_array(c1).check(tol)
    Triangle.from_array(c2).check(tol)
    n1, _ = _plane(c1)
    n2, _ = _plane(c2)

    d1 = _signed_distances(c1, n2, c2[0], tol)
    if np.all(d1 > 0) or np.all(d1 < 0):
        return _NO_INTERSECTION
    d2 = _signed_distances(c2, n1, c1[0], tol)
    if np.all(d2 > 0) or np.all(d2 < 0):
        return _NO_INTERSECTION

    if np.all(d1 == 0.0) or np.all(d2 == 0.0):
        return _coplanar(c1, c2, n2, tol)

    s1 = _plane_section(c1, d1)
    s2 = _plane_section(c2, d2)
    if len(s1) == 0 or len(s2) == 0:
        return _NO_INTERSECTION

    line = np.cross(n1, n2)
    line /= np.linalg.norm(line)
    # orient along the lexicographically larger of ±line so t1/t2 order does not matter
    if tuple(-line) > tuple(line):
        line = -line
    p1 = s1 @ line
    p2 = s2 @ line
    lo1, hi1 = np.argmin(p1), np.argmax(p1)
    lo2, hi2 = np.argmin(p2), np.argmax(p2)

    start = s1[lo1] if p1[lo1] >= p2[lo2] else s2[lo2]
    end = s1[hi1] if p1[hi1] <= p2[hi2] else s2[hi2]
    overlap = min(p1[hi1], p2[hi2]) - max(p1[lo1], p2[lo2])
    if overlap < -tol.eps:
        return _NO_INTERSECTION
    if overlap < tol.eps or np.linalg.norm(end - start) < tol.eps:
        return TriTriIntersection(IntersectionKind.POINT, start[None, :])
    return TriTriIntersection(IntersectionKind.SEGMENT, np.array([start, end]))
