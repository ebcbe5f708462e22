"""The pasting map and the dividing map.

Patches are glued greedily: starting from the first available patch, the
closure grows by the minimal-angle mate across its first unpaired boundary
edge until no boundary is left. Patches that carry the edge in the same
direction as the closure count as nested regions during the angular sweep,
so crossing closed surfaces glue into their union and their intersection. A closure that touches or crosses itself is
divided: segmented at its self-intersections, reversed, glued again and
reversed back.
"""
from __future__ import annotations

from collections import Counter, defaultdict

import numpy as np

from brep.inclusion import decompose_atoms
from brep.surface import GluedSurface, Orientation, RealizableSpadopag
from cutting.cutting import SegmentedSpadopag, SurfacePatch, refine_surface, split_into_patches
from cutting.intersections import detect_intersections
from geometry.mesh import TriMesh
from geometry.primitives import Tolerance, snap_vertices
from pasting.angles import DEFAULT_ANGULAR_EPS, select_mate
from tools.errors import GluingStuck, NoCandidate
from tools.utils import make_rng

MAX_DIVIDE_DEPTH = 4


class _PatchPool:
    """All patch vertices snapped into one pool so shared curves share vertex ids."""

    def __init__(self, patches, tol: Tolerance):
        self.patches = sorted(patches, key=lambda p: (p.source, p.index))
        stacked = np.concatenate([p.vertices for p in self.patches])
        self.vertices, inverse = snap_vertices(stacked, tol)
        offsets = np.cumsum([0] + [len(p.vertices) for p in self.patches])
        self.faces = []
        self.local = []
        self.owners = defaultdict(list)
        self._signatures = {}
        for k, patch in enumerate(self.patches):
            faces = inverse[offsets[k] + patch.faces]
            keep = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 2] != faces[:, 0])
            faces = faces[keep]
            self.faces.append(faces)
            used, local = np.unique(faces.ravel(), return_inverse=True)
            self.local.append(SurfacePatch(self.vertices[used], local.reshape(-1, 3),
                                           patch.source, patch.orientation, patch.index))
            for a, b in np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]]).tolist():
                if k not in self.owners[(a, b)]:
                    self.owners[(a, b)].append(k)

    def __len__(self):
        return len(self.patches)

    def half_edges(self, k):
        f = self.faces[k]
        return [tuple(e) for e in np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]).tolist()]

    def signature(self, k):
        """Order-free key of patch k's faces; equal keys mean coincident patches."""
        if k not in self._signatures:
            rolled = [tuple(np.roll(face, -int(np.argmin(face))).tolist()) for face in self.faces[k]]
            self._signatures[k] = frozenset(rolled)
        return self._signatures[k]


def _unpaired(counts):
    return [e for e, c in counts.items() if c > counts.get((e[1], e[0]), 0)]


def _is_self_intersecting(mesh: TriMesh, tol: Tolerance, check_geometric=True):
    directed = Counter(map(tuple, mesh.half_edges().tolist()))
    if any(c > 1 for c in directed.values()):
        return True
    undirected = Counter(tuple(sorted(e)) for e in directed.elements())
    if any(c > 2 for c in undirected.values()):
        return True
    if not check_geometric:
        return False
    isect = detect_intersections([GluedSurface(mesh, Orientation.POSITIVE, 0)], tol)
    return bool(isect.curves)


def _nonmanifold_edges(mesh: TriMesh):
    edges = np.sort(mesh.half_edges(), axis=1)
    unique, counts = np.unique(edges, axis=0, return_counts=True)
    return unique[counts > 2]


def _distinct(pool: _PatchPool, owners, available, skip=()):
    """One patch per exact-coincident group, preferring one still available."""
    chosen = {}
    for k in owners:
        if k in skip:
            continue
        signature = pool.signature(k)
        if signature not in chosen or (chosen[signature] not in available and k in available):
            chosen[signature] = k
    return list(chosen.values())


def _grow_closure(pool: _PatchPool, seed, available, tol, angular_eps):
    closure = [seed]
    counts = Counter(pool.half_edges(seed))
    while True:
        unpaired = _unpaired(counts)
        if not unpaired:
            return closure
        a, b = unpaired[0]
        candidates = _distinct(pool, pool.owners.get((b, a), []), available)
        if not any(k in available for k in candidates):
            raise NoCandidate(f"edge ({a},{b}) of {pool.local[closure[0]].label()} has no mate")

        owner = next(k for k in closure if k in pool.owners.get((a, b), []))
        own_signature = pool.signature(owner)
        blockers = [k for k in _distinct(pool, pool.owners.get((a, b), []), available, skip=closure)
                    if pool.signature(k) != own_signature]
        shared = [
            (x, y) for x, y in unpaired
            if owner in pool.owners.get((x, y), []) and all(c in pool.owners.get((y, x), []) for c in candidates)
        ]
        gamma = pool.vertices[np.array(shared)]
        by_patch = {id(pool.local[k]): k for k in candidates}
        mate = select_mate(pool.local[owner], gamma, [pool.local[k] for k in candidates], tol, angular_eps,
                           blockers=[pool.local[k] for k in blockers])
        chosen = by_patch[id(mate)]
        if chosen not in available:
            raise NoCandidate(f"edge ({a},{b}) of {pool.local[closure[0]].label()} leads to a used patch")
        closure.append(chosen)
        available.remove(chosen)
        counts.update(pool.half_edges(chosen))


def glue_surfaces(seg: SegmentedSpadopag, tol: Tolerance, angular_eps=DEFAULT_ANGULAR_EPS,
                  check_geometric=True, depth=0):
    """Closed surfaces of `seg` plus every glued closure, divided where needed."""
    surfaces = list(seg.closed_surfaces)
    if not seg.patches:
        return surfaces
    pool = _PatchPool(seg.patches, tol)
    available = list(range(len(pool)))
    while available:
        seed = available.pop(0)
        try:
            closure = _grow_closure(pool, seed, available, tol, angular_eps)
        except NoCandidate as error:
            raise GluingStuck(str(error)) from error
        faces = np.concatenate([pool.faces[k] for k in closure])
        mesh = TriMesh(pool.vertices, faces).compacted()
        if _is_self_intersecting(mesh, tol, check_geometric):
            if depth >= MAX_DIVIDE_DEPTH:
                raise GluingStuck("closure still self-intersecting after repeated division")
            surfaces.extend(divide(mesh, tol, angular_eps=angular_eps,
                                   check_geometric=check_geometric, depth=depth + 1))
        else:
            surfaces.append(GluedSurface.from_oriented_mesh(mesh))
    return surfaces


def paste(seg: SegmentedSpadopag, tol: Tolerance, rng=None, angular_eps=DEFAULT_ANGULAR_EPS,
          check_geometric=True) -> RealizableSpadopag:
    """Glue the patches of `seg` back into glued surfaces and group them into atoms."""
    surfaces = glue_surfaces(seg, tol, angular_eps, check_geometric)
    surfaces = [s.with_id(k) for k, s in enumerate(surfaces)]
    if not surfaces:
        return RealizableSpadopag(())
    rng = rng if rng is not None else make_rng(0)
    return decompose_atoms(surfaces, tol, rng)


def divide(c, tol: Tolerance, angular_eps=DEFAULT_ANGULAR_EPS, check_geometric=True, depth=1):
    """Split a self-intersecting closed surface into glued surfaces.

    `c` is a `GluedSurface` or a `TriMesh` in effective winding. The pieces
    are reversed before gluing and reversed back afterwards.
    """
    mesh = c.effective_mesh if isinstance(c, GluedSurface) else c
    work = GluedSurface(mesh, Orientation.POSITIVE, 0)
    isect = detect_intersections([work], tol)
    segments = {t: isect.segments_of(0, t) for t in isect.triangles_of(0)}
    refined, cut_edges = refine_surface(work, segments, tol)
    cut_edges = np.vstack([cut_edges, _nonmanifold_edges(refined)])
    pieces = split_into_patches(work, refined, cut_edges)

    patches = []
    closed = []
    for piece in pieces:
        if piece.is_closed():
            closed.append(GluedSurface.from_oriented_mesh(piece.mesh))
        else:
            patches.append(piece)
    if not patches and len(closed) == 1:
        return closed
    reversed_seg = SegmentedSpadopag(patches, closed).reversed()
    glued = glue_surfaces(reversed_seg, tol, angular_eps, check_geometric, depth)
    return [s.reversed() for s in glued]
