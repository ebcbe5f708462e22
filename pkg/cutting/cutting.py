"""The cutting map: segment glued surfaces at their intersections into patches.

Every triangle crossed by an intersection segment is retriangulated so that
the segments become mesh edges. Points where a segment ends on a mesh edge
are shared with the neighbouring triangle so the refined mesh stays
conforming. Faces are then merged across every edge that is not a cut edge;
each merged group is one surface patch.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import List

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from brep.surface import GElement, GluedSurface, Orientation, RealizableSpadopag
from cutting.intersections import IntersectionSet
from geometry.mesh import TriMesh
from geometry.primitives import PolyCurve, Tolerance, snap_vertices, triangle_areas, triangle_normals
from geometry.retriangulation import triangulate_with_constraints
from tools.errors import InconsistentProvenance


@dataclass(frozen=True, eq=False)
class SurfacePatch:
    """Connected piece of a glued surface, faces in effective winding."""
    vertices: np.ndarray
    faces: np.ndarray
    source: int
    orientation: Orientation
    index: int = 0

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float).reshape(-1, 3)
        faces = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        vertices.setflags(write=False)
        faces.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)

    def __len__(self):
        return len(self.faces)

    @property
    def triangles(self):
        return self.vertices[self.faces]

    @property
    def mesh(self):
        return TriMesh(self.vertices, self.faces)

    def area(self):
        return float(triangle_areas(self.triangles).sum())

    def normals(self):
        return triangle_normals(self.triangles)

    def half_edges(self):
        f = self.faces
        return np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])

    def boundary_half_edges(self):
        """Directed edges (a, b) whose reverse (b, a) is not an edge of the patch."""
        half = self.half_edges()
        present = set(map(tuple, half.tolist()))
        keep = [k for k, (a, b) in enumerate(half.tolist()) if (b, a) not in present]
        return half[keep]

    def is_closed(self):
        return len(self.boundary_half_edges()) == 0

    def boundary_loops(self):
        """Closed boundary curves, directed by the right-hand rule about the patch normal."""
        successors = defaultdict(list)
        for a, b in self.boundary_half_edges().tolist():
            successors[a].append(b)
        loops = []
        for start in sorted(successors):
            while successors[start]:
                path = [start]
                current = successors[start].pop(0)
                while current != start:
                    path.append(current)
                    if not successors[current]:
                        break
                    current = successors[current].pop(0)
                loops.append(PolyCurve(self.vertices[path], closed=current == start,
                                       provenance=(self.source,)))
        return loops

    def reversed(self):
        return replace(self, faces=self.faces[:, ::-1], orientation=self.orientation.reversed())

    def sample_points(self, count=8):
        """Centroids of the `count` largest triangles, largest first."""
        triangles = self.triangles
        order = np.argsort(-triangle_areas(triangles), kind="stable")[:count]
        return triangles[order].mean(axis=1)

    def label(self):
        return f"S{self.source}.P{self.index}"


@dataclass(frozen=True, eq=False)
class SegmentedSpadopag:
    patches: List[SurfacePatch] = field(default_factory=list)
    closed_surfaces: List[GluedSurface] = field(default_factory=list)

    def __len__(self):
        return len(self.patches) + len(self.closed_surfaces)

    def reversed(self):
        """Every patch and closed surface with its orientation reversed."""
        return SegmentedSpadopag([p.reversed() for p in self.patches],
                                 [s.reversed() for s in self.closed_surfaces])

    def merged(self, other: "SegmentedSpadopag"):
        return SegmentedSpadopag(list(self.patches) + list(other.patches),
                                 list(self.closed_surfaces) + list(other.closed_surfaces))


def _surfaces_of(g):
    if isinstance(g, GElement):
        return g.surfaces()
    if isinstance(g, RealizableSpadopag):
        return g.surfaces()
    return list(g)


def _check_provenance(surfaces, isect: IntersectionSet):
    known = set(isect.surface_ids)
    sizes = {s.id: len(s.mesh.faces) for s in surfaces}
    if known:
        missing = sorted(set(sizes) - known)
        if missing:
            raise InconsistentProvenance(f"intersections were not computed over surfaces {missing}")
    for surface_id, triangle_id in isect.by_triangle:
        if known and surface_id not in known:
            raise InconsistentProvenance(f"intersection references unknown surface {surface_id}")
        if surface_id in sizes and not 0 <= triangle_id < sizes[surface_id]:
            raise InconsistentProvenance(
                f"intersection references triangle {triangle_id} of surface {surface_id} "
                f"which has {sizes[surface_id]} triangles")


def _edge_registry(mesh: TriMesh, segments_by_triangle, tol: Tolerance):
    """Points lying inside mesh edges, keyed by the undirected edge."""
    registry = defaultdict(list)
    for triangle_id, segments in segments_by_triangle.items():
        face = mesh.faces[triangle_id]
        ends = np.asarray(segments, dtype=float).reshape(-1, 3)
        for k in range(3):
            a, b = int(face[k]), int(face[(k + 1) % 3])
            pa, pb = mesh.vertices[a], mesh.vertices[b]
            ab = pb - pa
            t = (ends - pa) @ ab / (ab @ ab)
            distance = np.linalg.norm(pa + t[:, None] * ab - ends, axis=1)
            inner = (distance < tol.eps) & (np.linalg.norm(ends - pa, axis=1) >= tol.eps) \
                & (np.linalg.norm(ends - pb, axis=1) >= tol.eps) & (t > 0.0) & (t < 1.0)
            if np.any(inner):
                registry[(min(a, b), max(a, b))].extend(ends[inner])
    return registry


def refine_surface(surface: GluedSurface, segments_by_triangle, tol: Tolerance):
    """Retriangulate `surface.mesh` so every segment is a union of edges.

    Returns `(mesh, cut_edges)`: the refined outward-wound mesh and an (m, 2)
    array of its undirected cut edges.
    """
    mesh = surface.mesh
    registry = _edge_registry(mesh, segments_by_triangle, tol)
    touched = set(segments_by_triangle)
    for a, b in registry:
        shared = np.flatnonzero(np.any(mesh.faces == a, axis=1) & np.any(mesh.faces == b, axis=1))
        touched.update(int(t) for t in shared)

    vertices = [mesh.vertices]
    faces = []
    cuts = []
    offset = len(mesh.vertices)
    untouched = np.ones(len(mesh.faces), dtype=bool)
    for triangle_id in sorted(touched):
        untouched[triangle_id] = False
        face = mesh.faces[triangle_id]
        boundary = []
        for k in range(3):
            a, b = int(face[k]), int(face[(k + 1) % 3])
            boundary.extend(registry.get((min(a, b), max(a, b)), []))
        segments = np.asarray(segments_by_triangle.get(triangle_id, []), dtype=float).reshape(-1, 2, 3)
        xyz, local_faces, local_cuts = triangulate_with_constraints(
            mesh.vertices[face], segments, tol, boundary_points=np.asarray(boundary).reshape(-1, 3))
        # local ids 0, 1, 2 are the corners
        index = np.concatenate([face, offset + np.arange(len(xyz) - 3)])
        vertices.append(xyz[3:])
        offset += len(xyz) - 3
        faces.append(index[local_faces])
        cuts.append(index[np.asarray(local_cuts, dtype=np.int64).reshape(-1, 2)])
    faces.insert(0, mesh.faces[untouched])

    all_vertices = np.concatenate(vertices)
    snapped, inverse = snap_vertices(all_vertices, tol)
    all_faces = inverse[np.concatenate(faces)]
    valid = (all_faces[:, 0] != all_faces[:, 1]) & (all_faces[:, 1] != all_faces[:, 2]) \
        & (all_faces[:, 2] != all_faces[:, 0])
    cut_edges = inverse[np.concatenate(cuts)] if cuts else np.zeros((0, 2), dtype=np.int64)
    cut_edges = np.unique(np.sort(cut_edges.reshape(-1, 2), axis=1), axis=0)
    cut_edges = cut_edges[cut_edges[:, 0] != cut_edges[:, 1]]
    return TriMesh(snapped, all_faces[valid]), cut_edges


def face_components(faces, cut_edges, n_vertices):
    """Label faces by connectivity across edges that are not cut edges."""
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    n_faces = len(faces)
    if n_faces == 0:
        return 0, np.zeros(0, dtype=np.int64)
    half = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    owner = np.tile(np.arange(n_faces), 3)
    undirected = np.sort(half, axis=1)
    key = undirected[:, 0] * n_vertices + undirected[:, 1]
    cut_edges = np.asarray(cut_edges, dtype=np.int64).reshape(-1, 2)
    cut_keys = np.sort(cut_edges, axis=1)
    is_cut = np.isin(key, cut_keys[:, 0] * n_vertices + cut_keys[:, 1])

    order = np.argsort(key, kind="stable")
    key_sorted = key[order]
    join = (key_sorted[1:] == key_sorted[:-1]) & ~is_cut[order][1:]
    rows = owner[order][:-1][join]
    cols = owner[order][1:][join]
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n_faces, n_faces))
    return connected_components(graph, directed=False)


def split_into_patches(surface: GluedSurface, mesh: TriMesh, cut_edges):
    """Patches of `mesh` (outward winding) separated along `cut_edges`."""
    count, labels = face_components(mesh.faces, cut_edges, len(mesh.vertices))
    faces = mesh.faces if surface.is_positive else mesh.faces[:, ::-1]
    patches = []
    for label in range(count):
        component = faces[labels == label]
        used, inverse = np.unique(component.ravel(), return_inverse=True)
        patches.append(SurfacePatch(mesh.vertices[used], inverse.reshape(-1, 3),
                                    surface.id, surface.orientation, label))
    return patches


def cut(g, isect: IntersectionSet, tol: Tolerance) -> SegmentedSpadopag:
    """Segment every surface of `g` along the curves of `isect`.

    `g` may be a `GElement`, a `RealizableSpadopag` or a list of surfaces.
    Isolated contact points do not cut.
    """
    surfaces = _surfaces_of(g)
    _check_provenance(surfaces, isect)
    patches = []
    closed = []
    for surface in surfaces:
        segments_by_triangle = {
            triangle_id: isect.segments_of(surface.id, triangle_id)
            for triangle_id in isect.triangles_of(surface.id)
        }
        if not segments_by_triangle:
            closed.append(surface)
            continue
        mesh, cut_edges = refine_surface(surface, segments_by_triangle, tol)
        pieces = split_into_patches(surface, mesh, cut_edges)
        open_pieces = [p for p in pieces if not p.is_closed()]
        if not open_pieces:
            # the curves did not separate anything
            closed.append(surface)
            continue
        for piece in pieces:
            if piece.is_closed():
                outward = piece.mesh if surface.is_positive else piece.mesh.flipped()
                closed.append(GluedSurface(outward, surface.orientation, surface.id, surface.name))
            else:
                patches.append(replace(piece, index=len([p for p in patches if p.source == surface.id])))
    return SegmentedSpadopag(patches, closed)
