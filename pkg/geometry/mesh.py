"""Indexed triangle meshes."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from geometry.primitives import (
    Tolerance,
    Triangle,
    snap_vertices,
    triangle_area_vectors,
    triangle_areas,
    triangle_normals,
)
from tools.errors import NotClosed


@dataclass(frozen=True, eq=False)
class TriMesh:
    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float).reshape(-1, 3)
        faces = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        vertices.setflags(write=False)
        faces.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "faces", faces)

    @classmethod
    def from_triangles(cls, triangles, tol: Tolerance):
        triangles = np.asarray(
            [t.as_array() if isinstance(t, Triangle) else t for t in triangles], dtype=float
        ).reshape(-1, 3, 3)
        vertices, inverse = snap_vertices(triangles.reshape(-1, 3), tol)
        return cls(vertices, inverse.reshape(-1, 3))

    def __len__(self):
        return len(self.faces)

    @property
    def triangles(self):
        return self.vertices[self.faces]

    def triangle(self, index):
        return Triangle.from_array(self.vertices[self.faces[index]])

    def face_normals(self):
        return triangle_normals(self.triangles)

    def face_areas(self):
        return triangle_areas(self.triangles)

    def area(self):
        return float(self.face_areas().sum())

    def bounds(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def flipped(self):
        return TriMesh(self.vertices, self.faces[:, ::-1])

    def translated(self, offset):
        return TriMesh(self.vertices + np.asarray(offset, dtype=float), self.faces)

    def compacted(self):
        """Drop unreferenced vertices and renumber."""
        used, inverse = np.unique(self.faces.ravel(), return_inverse=True)
        return TriMesh(self.vertices[used], inverse.reshape(-1, 3))

    def half_edges(self):
        f = self.faces
        return np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])

    def unpaired_edges(self):
        """Directed edges lacking exactly one opposite partner."""
        directed = Counter(map(tuple, self.half_edges().tolist()))
        bad = []
        for (a, b), count in directed.items():
            if count != 1 or directed.get((b, a), 0) != 1:
                bad.append((a, b))
        return sorted(bad)

    def is_closed(self):
        return len(self.faces) > 0 and not self.unpaired_edges()

    def check_closed(self, name="mesh"):
        bad = self.unpaired_edges()
        if bad or len(self.faces) == 0:
            raise NotClosed(name, bad)
        return self

    def closure_residual(self):
        """|Σ area vectors| / Σ areas; zero for any closed surface."""
        vectors = triangle_area_vectors(self.triangles)
        total = np.linalg.norm(vectors, axis=1).sum()
        return float(np.linalg.norm(vectors.sum(axis=0)) / total) if total > 0 else 0.0

    def edge_lengths(self):
        edges = np.unique(np.sort(self.half_edges(), axis=1), axis=0)
        return edges, np.linalg.norm(self.vertices[edges[:, 0]] - self.vertices[edges[:, 1]], axis=1)


def signed_volume(tris) -> float:
    """(1/6) Σ det(a, b, c) over a closed triangulation.

    Accepts a `TriMesh` or a list of `Triangle`; positive iff the windings
    point away from the bounded complement.
    """
    if isinstance(tris, TriMesh):
        mesh = tris
    else:
        triangles = np.asarray([t.as_array() if isinstance(t, Triangle) else t for t in tris],
                               dtype=float).reshape(-1, 3, 3)
        # exact coordinate matching: a closed input shares its vertices bit for bit
        vertices, inverse = np.unique(triangles.reshape(-1, 3), axis=0, return_inverse=True)
        mesh = TriMesh(vertices, inverse.reshape(-1, 3))
    mesh.check_closed()
    t = mesh.triangles
    return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)


def mesh_volume_unchecked(mesh: TriMesh) -> float:
    t = mesh.triangles
    return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)
