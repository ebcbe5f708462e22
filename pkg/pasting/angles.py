"""Directed angles between surface patches and the minimal-angle mate choice."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from geometry.primitives import PolyCurve, Tolerance, triangle_normals
from tools.errors import AmbiguousTie, NoCandidate, ParallelDegeneracy

DEFAULT_ANGULAR_EPS = 1e-7


@dataclass(frozen=True, order=True)
class DirectedAngle:
    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta < 2.0 * np.pi:
            raise ValueError(f"directed angle must lie in (0, 2π), got {self.theta}")

    def __float__(self):
        return self.theta


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def directed_angle(nA, nB, rp, tol: Tolerance) -> DirectedAngle:
    """Angle swept inside the internal side from the patch with normal nA to the one with nB.

    `rp` is the unit tangent of the shared curve, directed as the boundary of
    the first patch.
    """
    nA, nB, rp = _unit(nA), _unit(nB), _unit(rp)
    alpha = float(np.arccos(np.clip(nA @ nB, -1.0, 1.0)))
    cross = np.cross(nA, nB)
    if np.linalg.norm(cross) < tol.eps:
        if nA @ nB > 0:
            return DirectedAngle(np.pi)
        raise ParallelDegeneracy("patches fold back onto each other (opposite normals)")
    if cross @ rp > 0:
        return DirectedAngle(np.pi - alpha)
    return DirectedAngle(np.pi + alpha)


def incident_normal(vertices, faces, p, q, tol: Tolerance):
    """Normal of the first face carrying the directed edge p -> q, or None."""
    triangles = np.asarray(vertices, dtype=float)[np.asarray(faces)]
    for k in range(3):
        start = np.linalg.norm(triangles[:, k] - p, axis=1) < tol.eps
        end = np.linalg.norm(triangles[:, (k + 1) % 3] - q, axis=1) < tol.eps
        hits = np.flatnonzero(start & end)
        if len(hits):
            return triangle_normals(triangles[hits[:1]])[0]
    return None


def _curve_segments(gamma):
    if isinstance(gamma, PolyCurve):
        return gamma.segments()
    return np.asarray(gamma, dtype=float).reshape(-1, 2, 3)


def select_mate(beta, gamma, candidates, tol: Tolerance, angular_eps=DEFAULT_ANGULAR_EPS, blockers=()):
    """The candidate patch reached from `beta` across `gamma` by the smallest directed angle.

    `gamma` is part of beta's boundary (a `PolyCurve` or an (m, 2, 3) array of
    directed segments); every candidate must carry it in the opposite direction.
    `blockers` carry it in beta's direction. Sweeping from beta through its
    internal side, each blocker opens a nested region that the next candidate
    closes; the first candidate met outside every nested region is the mate.
    The angle is sampled at the longest segment all candidates share.
    """
    candidates = list(candidates)
    if not candidates:
        raise NoCandidate(f"no patch continues {beta.label()} across its boundary")
    blockers = list(blockers)
    if len(candidates) == 1 and not blockers:
        return candidates[0]

    segments = _curve_segments(gamma)
    order = np.argsort(-np.linalg.norm(segments[:, 1] - segments[:, 0], axis=1), kind="stable")
    for index in order:
        p, q = segments[index]
        nA = incident_normal(beta.vertices, beta.faces, p, q, tol)
        if nA is None:
            continue
        normals = [incident_normal(c.vertices, c.faces, q, p, tol) for c in candidates]
        if any(n is None for n in normals):
            continue
        rp = q - p
        sweep = [(directed_angle(nA, nB, rp, tol).theta, k) for k, nB in enumerate(normals)]
        for blocker in blockers:
            nC = incident_normal(blocker.vertices, blocker.faces, p, q, tol)
            if nC is None:
                continue
            try:
                sweep.append((directed_angle(nA, -nC, rp, tol).theta, None))
            except ParallelDegeneracy:
                # lies on beta itself
                continue
        sweep.sort(key=lambda entry: entry[0])
        return candidates[_first_unnested(sweep, beta, angular_eps)]
    raise NoCandidate(f"no boundary segment of {beta.label()} is shared by every candidate")


def _first_unnested(sweep, beta, angular_eps):
    depth = 0
    for position, (theta, k) in enumerate(sweep):
        if k is None:
            depth += 1
            continue
        if depth:
            depth -= 1
            continue
        neighbours = sweep[max(position - 1, 0):position] + sweep[position + 1:position + 2]
        if any(abs(other - theta) < angular_eps for other, _ in neighbours):
            raise AmbiguousTie(f"two patches leave {beta.label()} at the same angle {theta:.9f}")
        return k
    raise NoCandidate(f"every patch across the boundary of {beta.label()} closes a nested region")
