"""Inclusion of glued surfaces, the Hasse diagram and the grouping into atoms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

import networkx as nx
import numpy as np

from brep.surface import AtomSpadopag, GluedSurface, RealizableSpadopag
from geometry.primitives import Tolerance, triangle_areas, triangle_normals
from membership.classify import DEFAULT_RAY_BUDGET, distance_to_surface, ray_crossing_inside
from tools.errors import NotFound, NotRealizable, RetryExhausted, WitnessOnBoundary

WITNESS_ATTEMPTS = 16


def _first_hit(origin, direction, triangles, skip):
    """Smallest positive ray parameter over `triangles` (except index `skip`), or inf."""
    a = triangles[:, 0]
    e1 = triangles[:, 1] - a
    e2 = triangles[:, 2] - a
    pvec = np.cross(direction, e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    valid = np.abs(det) > 1e-300
    det = np.where(valid, det, 1.0)
    tvec = origin - a
    u = np.einsum("ij,ij->i", tvec, pvec) / det
    qvec = np.cross(tvec, e1)
    v = (qvec @ direction) / det
    t = np.einsum("ij,ij->i", qvec, e2) / det
    hit = valid & (u >= 0) & (v >= 0) & (u + v <= 1) & (t > 0)
    hit[skip] = False
    return float(t[hit].min()) if np.any(hit) else np.inf


def interior_witness(s: GluedSurface, rng, tol: Tolerance, attempts=WITNESS_ATTEMPTS,
                     budget=DEFAULT_RAY_BUDGET):
    """A point strictly inside the bounded complement of `s`, farther than ε from it.

    Starts at the centroid of the largest facet and walks inward half way to
    the next crossing; later attempts pick facets at random, area-weighted.
    """
    triangles = s.mesh.triangles
    areas = triangle_areas(triangles)
    normals = triangle_normals(triangles)
    weights = areas / areas.sum()
    for attempt in range(attempts):
        facet = int(np.argmax(areas)) if attempt == 0 else int(rng.choice(len(areas), p=weights))
        origin = triangles[facet].mean(axis=0)
        inward = -normals[facet]
        reach = _first_hit(origin, inward, triangles, facet)
        if not np.isfinite(reach):
            continue
        witness = origin + 0.5 * reach * inward
        if np.isfinite(distance_to_surface(witness, s, tol.eps)):
            continue
        try:
            if ray_crossing_inside(witness, s, rng, tol, budget):
                return witness
        except RetryExhausted:
            continue
    raise NotFound(f"no interior point of {s.label()} after {attempts} attempts")


def _box_inside(inner, outer, tol):
    lo_i, hi_i = inner.bounds()
    lo_o, hi_o = outer.bounds()
    return bool(np.all(lo_i >= lo_o - tol.eps) and np.all(hi_i <= hi_o + tol.eps))


def includes(sk: GluedSurface, sl: GluedSurface, tol: Tolerance, rng, budget=DEFAULT_RAY_BUDGET,
             attempts=WITNESS_ATTEMPTS) -> bool:
    """True iff the bounded complement of `sl` lies inside that of `sk`."""
    if sk is sl or not _box_inside(sl, sk, tol):
        return False
    for _ in range(attempts):
        witness = interior_witness(sl, rng, tol, budget=budget)
        if np.isfinite(distance_to_surface(witness, sk, tol.eps)):
            continue
        return ray_crossing_inside(witness, sk, rng, tol, budget)
    raise WitnessOnBoundary(f"every witness of {sl.label()} lies on {sk.label()}")


def includes_matrix(surfaces, tol: Tolerance, rng, budget=DEFAULT_RAY_BUDGET):
    """Boolean matrix M with M[k, l] = includes(surfaces[k], surfaces[l])."""
    n = len(surfaces)
    matrix = np.zeros((n, n), dtype=bool)
    for k in range(n):
        for l in range(n):
            if k != l:
                matrix[k, l] = includes(surfaces[k], surfaces[l], tol, rng, budget)
    return matrix


@dataclass
class HasseDiagram:
    """Covering relation of the inclusion order; an edge k -> l means S_k covers S_l."""
    graph: nx.DiGraph
    surfaces: Dict[int, GluedSurface]

    @property
    def nodes(self) -> List[int]:
        return sorted(self.graph.nodes)

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self.graph.edges)

    def children(self, k):
        return sorted(self.graph.successors(k))

    def parents(self, l):
        return sorted(self.graph.predecessors(l))

    def label(self, k):
        surface = self.surfaces[k]
        return f"{surface.label()}{surface.orientation.tag}"


def hasse(surfaces, tol: Tolerance, rng, budget=DEFAULT_RAY_BUDGET) -> HasseDiagram:
    surfaces = list(surfaces)
    matrix = includes_matrix(surfaces, tol, rng, budget)
    order = nx.DiGraph()
    order.add_nodes_from(s.id for s in surfaces)
    for k, l in zip(*np.nonzero(matrix)):
        order.add_edge(surfaces[k].id, surfaces[l].id)
    if not nx.is_directed_acyclic_graph(order):
        raise NotRealizable("inclusion between surfaces is cyclic (coincident surfaces)")
    reduced = nx.transitive_reduction(order)
    reduced.add_nodes_from(order.nodes)
    return HasseDiagram(reduced, {s.id: s for s in surfaces})


def decompose_atoms(surfaces, tol: Tolerance, rng, budget=DEFAULT_RAY_BUDGET) -> RealizableSpadopag:
    """Group almost disjoint surfaces into atoms.

    Each positive surface takes the negatives it immediately covers; the
    negatives no surface covers form the single unbounded atom.
    """
    surfaces = sorted(surfaces, key=lambda s: s.id)
    if len({s.id for s in surfaces}) != len(surfaces):
        raise ValueError("surface ids must be unique")
    diagram = hasse(surfaces, tol, rng, budget)
    violations = []
    for surface in surfaces:
        parents = diagram.parents(surface.id)
        if len(parents) > 1:
            violations.append(f"{diagram.label(surface.id)} is covered by several surfaces")
            continue
        if parents and diagram.surfaces[parents[0]].is_positive == surface.is_positive:
            violations.append(f"{diagram.label(surface.id)} is covered by {diagram.label(parents[0])} "
                              f"of the same orientation")

    unbounded = [s for s in surfaces if not s.is_positive and not diagram.parents(s.id)]
    if unbounded:
        for s in surfaces:
            if s.is_positive and not diagram.parents(s.id):
                violations.append(f"{diagram.label(s.id)} lies in the unbounded atom")
    if violations:
        raise NotRealizable(violations)

    atoms = []
    for surface in surfaces:
        if not surface.is_positive:
            continue
        holes = [diagram.surfaces[c] for c in diagram.children(surface.id)
                 if not diagram.surfaces[c].is_positive]
        atoms.append(AtomSpadopag((surface, *holes)))
    if unbounded:
        atoms.append(AtomSpadopag(tuple(unbounded)))
    return RealizableSpadopag(tuple(atoms))
