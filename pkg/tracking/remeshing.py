"""Mesh surgery for interface tracking: edge split, collapse and flip, tangential smoothing."""
from __future__ import annotations

from collections import defaultdict

import numpy as np

from brep.surface import GElement
from geometry.mesh import TriMesh
from tools.errors import CannotRegularize, QualityUnreached

FLIP_FLATNESS = np.cos(np.deg2rad(20.0))
SMOOTHING_RELAXATION = 0.5
MAX_REGULARIZE_ROUNDS = 32
DEFAULT_QUALITY_ITERATIONS = 50


def triangle_angles(triangles):
    """(n, 3) interior angles in radians."""
    triangles = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
    angles = []
    for k in range(3):
        p = triangles[:, k]
        u = triangles[:, (k + 1) % 3] - p
        v = triangles[:, (k + 2) % 3] - p
        cos = np.einsum("ij,ij->i", u, v) / (np.linalg.norm(u, axis=1) * np.linalg.norm(v, axis=1))
        angles.append(np.arccos(np.clip(cos, -1.0, 1.0)))
    return np.stack(angles, axis=1)


def min_angle(mesh: TriMesh):
    return float(triangle_angles(mesh.triangles).min()) if len(mesh.faces) else np.pi / 3


class SurgeryMesh:
    """Mutable triangle mesh with vertex-to-face incidence, for local connectivity edits."""

    def __init__(self, mesh: TriMesh):
        self.points = [np.array(p, dtype=float) for p in mesh.vertices]
        self.faces = [list(map(int, f)) for f in mesh.faces]
        self.alive = [True] * len(self.faces)
        self.vertex_faces = defaultdict(set)
        for k, face in enumerate(self.faces):
            for v in face:
                self.vertex_faces[v].add(k)
        self.dead = set()

    def vertex_count(self):
        return len(self.points) - len(self.dead)

    def _add_face(self, face):
        self.faces.append(list(face))
        self.alive.append(True)
        k = len(self.faces) - 1
        for v in face:
            self.vertex_faces[v].add(k)
        return k

    def _remove_face(self, k):
        self.alive[k] = False
        for v in self.faces[k]:
            self.vertex_faces[v].discard(k)

    def edge_faces(self, a, b):
        return sorted(self.vertex_faces[a] & self.vertex_faces[b])

    def has_edge(self, a, b):
        return bool(self.vertex_faces[a] & self.vertex_faces[b])

    def neighbours(self, v):
        ring = set()
        for k in self.vertex_faces[v]:
            ring.update(self.faces[k])
        ring.discard(v)
        return ring

    def edges(self):
        found = set()
        for k, face in enumerate(self.faces):
            if self.alive[k]:
                for i in range(3):
                    a, b = face[i], face[(i + 1) % 3]
                    found.add((min(a, b), max(a, b)))
        return sorted(found)

    def length(self, a, b):
        return float(np.linalg.norm(self.points[a] - self.points[b]))

    def _normal(self, face, moved=None):
        p = [moved.get(v, self.points[v]) if moved else self.points[v] for v in face]
        return np.cross(p[1] - p[0], p[2] - p[0])

    def _directed(self, k, a, b):
        """(x, y, c): face k as x -> y -> c with {x, y} = {a, b}."""
        face = self.faces[k]
        i = face.index(a)
        if face[(i + 1) % 3] == b:
            return a, b, face[(i + 2) % 3]
        return b, a, face[(i + 1) % 3]

    def split(self, a, b):
        """Insert the midpoint of edge (a, b); returns the new vertex id."""
        m = len(self.points)
        self.points.append(0.5 * (self.points[a] + self.points[b]))
        for k in self.edge_faces(a, b):
            x, y, c = self._directed(k, a, b)
            self._remove_face(k)
            self._add_face([x, m, c])
            self._add_face([m, y, c])
        return m

    def collapse(self, a, b):
        """Merge b into a at the edge midpoint; False when the collapse is not safe."""
        if self.vertex_count() <= 4:
            return False
        shared = self.edge_faces(a, b)
        if len(shared) != 2:
            return False
        opposite = {self._directed(k, a, b)[2] for k in shared}
        if self.neighbours(a) & self.neighbours(b) != opposite:
            return False
        mid = 0.5 * (self.points[a] + self.points[b])
        for k in (self.vertex_faces[a] | self.vertex_faces[b]) - set(shared):
            face = self.faces[k]
            before = self._normal(face)
            after = self._normal([a if v == b else v for v in face], {a: mid})
            if np.linalg.norm(after) <= 0.0 or before @ after <= 0.0:
                return False

        for k in shared:
            self._remove_face(k)
        for k in list(self.vertex_faces[b]):
            self.faces[k] = [a if v == b else v for v in self.faces[k]]
            self.vertex_faces[a].add(k)
        self.vertex_faces[b].clear()
        self.points[a] = mid
        self.dead.add(b)
        return True

    def flip(self, a, b, flatness=FLIP_FLATNESS):
        """Replace diagonal (a, b) by the opposite one if that raises the smaller min angle."""
        shared = self.edge_faces(a, b)
        if len(shared) != 2:
            return False
        x, y, c = self._directed(shared[0], a, b)
        _, _, d = self._directed(shared[1], a, b)
        if c == d or self.has_edge(c, d):
            return False
        n1 = self._normal([x, y, c])
        n2 = self._normal([y, x, d])
        if n1 @ n2 < flatness * np.linalg.norm(n1) * np.linalg.norm(n2):
            return False
        new_faces = [[x, d, c], [d, y, c]]
        old = triangle_angles(np.array([[self.points[v] for v in f] for f in ([x, y, c], [y, x, d])])).min()
        new = triangle_angles(np.array([[self.points[v] for v in f] for f in new_faces])).min()
        if new <= old:
            return False
        reference = n1 + n2
        if any(self._normal(f) @ reference <= 0 for f in new_faces):
            return False
        for k in shared:
            self._remove_face(k)
        for face in new_faces:
            self._add_face(face)
        return True

    def vertex_normal(self, v):
        normal = sum((self._normal(self.faces[k]) for k in self.vertex_faces[v]), np.zeros(3))
        length = np.linalg.norm(normal)
        return normal / length if length > 0 else normal

    def to_trimesh(self):
        faces = [f for f, alive in zip(self.faces, self.alive) if alive]
        return TriMesh(np.array(self.points), np.array(faces, dtype=np.int64).reshape(-1, 3)).compacted()


def regularize_mesh(mesh: TriMesh, h_L, r_tiny, max_rounds=MAX_REGULARIZE_ROUNDS, console=None) -> TriMesh:
    """Split edges longer than h_L and collapse those shorter than r_tiny * h_L."""
    lower = r_tiny * h_L
    _, lengths = mesh.edge_lengths()
    if len(lengths) and lengths.max() <= h_L and lengths.min() >= lower:
        return mesh

    surgery = SurgeryMesh(mesh)
    for _ in range(max_rounds):
        changed = False
        edges = surgery.edges()
        for a, b in sorted(edges, key=lambda e: -surgery.length(*e)):
            if surgery.has_edge(a, b) and surgery.length(a, b) > h_L:
                surgery.split(a, b)
                changed = True
        for a, b in sorted(surgery.edges(), key=lambda e: surgery.length(*e)):
            if a in surgery.dead or b in surgery.dead:
                continue
            if surgery.has_edge(a, b) and surgery.length(a, b) < lower and surgery.collapse(a, b):
                changed = True
        if not changed:
            break

    result = surgery.to_trimesh()
    _, lengths = result.edge_lengths()
    if console is not None and np.any(lengths > h_L):
        console.warning(f"{int(np.count_nonzero(lengths > h_L))} edges still longer than h_L={h_L:g} "
                        f"after {max_rounds} rounds (longest {lengths.max():.4g})")
    if np.any(lengths < lower):
        raise CannotRegularize(
            f"{int(np.count_nonzero(lengths < lower))} short edges cannot be collapsed without pinching",
            result=result)
    return result


def _smooth(surgery: SurgeryMesh, moved, cap):
    for v in range(len(surgery.points)):
        if v in surgery.dead or not surgery.vertex_faces[v]:
            continue
        ring = surgery.neighbours(v)
        centroid = np.mean([surgery.points[u] for u in ring], axis=0)
        normal = surgery.vertex_normal(v)
        delta = SMOOTHING_RELAXATION * (centroid - surgery.points[v])
        delta -= (delta @ normal) * normal
        room = cap - moved[v]
        step = np.linalg.norm(delta)
        if room <= 0 or step == 0:
            continue
        if step > room:
            delta *= room / step
            step = room
        surgery.points[v] = surgery.points[v] + delta
        moved[v] += step


def improve_mesh(mesh: TriMesh, h_L, alpha, iterations=DEFAULT_QUALITY_ITERATIONS) -> TriMesh:
    """Flip edges and smooth tangentially until every angle exceeds `alpha`."""
    if min_angle(mesh) > alpha:
        return mesh
    surgery = SurgeryMesh(mesh)
    moved = defaultdict(float)
    cap = h_L / 10.0
    current = mesh
    for iteration in range(1, iterations + 1):
        for a, b in surgery.edges():
            surgery.flip(a, b)
        _smooth(surgery, moved, cap)
        current = surgery.to_trimesh()
        if min_angle(current) > alpha:
            return current
    raise QualityUnreached(
        f"min angle {np.degrees(min_angle(current)):.2f} deg after {iterations} iterations",
        result=current,
        stats={"iterations": iterations, "min_angle": min_angle(current),
               "max_displacement": max(moved.values(), default=0.0)})


def regularize_edges(g: GElement, params, console=None) -> GElement:
    failures = []

    def fix(mesh):
        try:
            return regularize_mesh(mesh, params.h_L, params.r_tiny, console=console)
        except CannotRegularize as error:
            failures.append(error)
            return error.result

    result = g.map_meshes(fix)
    if failures:
        raise CannotRegularize(str(failures[0]), result=result)
    return result


def improve_quality(g: GElement, params, iterations=DEFAULT_QUALITY_ITERATIONS) -> GElement:
    failures = []

    def fix(mesh):
        try:
            return improve_mesh(mesh, params.h_L, params.alpha, iterations)
        except QualityUnreached as error:
            failures.append(error)
            return error.result

    result = g.map_meshes(fix)
    if failures:
        raise QualityUnreached(str(failures[0]), result=result, stats=failures[0].stats)
    return result
