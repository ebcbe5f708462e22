"""Adaptive octree over triangle bounding boxes (broad phase).

A cell splits into eight children while it holds more than `leaf_cap`
triangles and `max_depth` is not reached. Children are then merged back
bottom-up whenever the split does not reduce the number of candidate pairs,
which is what happens around triangles that straddle many cells.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from geometry.primitives import Tolerance

DEFAULT_LEAF_CAP = 16
DEFAULT_MAX_DEPTH = 12


def _pair_count(n):
    return n * (n - 1) // 2


@dataclass
class OctreeCell:
    lo: np.ndarray
    hi: np.ndarray
    depth: int
    ids: np.ndarray
    children: Optional[List["OctreeCell"]] = field(default=None)

    @property
    def is_leaf(self):
        return self.children is None

    def leaves(self):
        if self.is_leaf:
            yield self
            return
        for child in self.children:
            yield from child.leaves()

    def pair_load(self):
        return sum(_pair_count(len(leaf.ids)) for leaf in self.leaves())


class Octree:
    def __init__(self, root, boxes, leaf_cap, max_depth):
        self.root = root
        self.boxes = boxes
        self.leaf_cap = leaf_cap
        self.max_depth = max_depth

    def __len__(self):
        return len(self.boxes)

    def leaves(self):
        return list(self.root.leaves())

    def depth(self):
        return max(leaf.depth for leaf in self.leaves())

    def query_box(self, lo, hi):
        """Ids of triangles whose bounding box meets the box [lo, hi]."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        found = []
        stack = [self.root]
        while stack:
            cell = stack.pop()
            if np.any(hi < cell.lo) or np.any(lo > cell.hi):
                continue
            if cell.is_leaf:
                found.append(cell.ids)
            else:
                stack.extend(cell.children)
        if not found:
            return np.zeros(0, dtype=np.int64)
        ids = np.unique(np.concatenate(found))
        boxes = self.boxes[ids]
        hit = np.all(boxes[:, 0] <= hi, axis=1) & np.all(boxes[:, 1] >= lo, axis=1)
        return ids[hit]

    def query_point(self, point, radius):
        point = np.asarray(point, dtype=float)
        return self.query_box(point - radius, point + radius)


def triangle_boxes(triangles, tol: Optional[Tolerance] = None):
    triangles = np.asarray(triangles, dtype=float).reshape(-1, 3, 3)
    pad = tol.eps if tol is not None else 0.0
    return np.stack([triangles.min(axis=1) - pad, triangles.max(axis=1) + pad], axis=1)


def _overlapping(boxes, lo, hi):
    return np.all(boxes[:, 0] <= hi, axis=1) & np.all(boxes[:, 1] >= lo, axis=1)


def _split(cell, boxes, leaf_cap, max_depth):
    if len(cell.ids) <= leaf_cap or cell.depth >= max_depth:
        return
    mid = 0.5 * (cell.lo + cell.hi)
    children = []
    for octant in range(8):
        bits = np.array([(octant >> axis) & 1 for axis in range(3)], dtype=bool)
        lo = np.where(bits, mid, cell.lo)
        hi = np.where(bits, cell.hi, mid)
        ids = cell.ids[_overlapping(boxes[cell.ids], lo, hi)]
        if len(ids):
            children.append(OctreeCell(lo, hi, cell.depth + 1, ids))
    # a child holding every id cannot shrink any pair list
    if any(len(child.ids) == len(cell.ids) for child in children):
        return
    for child in children:
        _split(child, boxes, leaf_cap, max_depth)
    cell.children = children
    if cell.pair_load() >= _pair_count(len(cell.ids)):
        cell.children = None


def build_octree(tris, leaf_cap=DEFAULT_LEAF_CAP, max_depth=DEFAULT_MAX_DEPTH,
                 tol: Optional[Tolerance] = None) -> Octree:
    """Octree over an (n, 3, 3) triangle array (or a `TriMesh`)."""
    if hasattr(tris, "triangles"):
        tris = tris.triangles
    boxes = triangle_boxes(tris, tol)
    if len(boxes) == 0:
        raise ValueError("cannot build an octree over an empty triangle set")
    lo = boxes[:, 0].min(axis=0)
    hi = boxes[:, 1].max(axis=0)
    pad = tol.eps if tol is not None else 0.0
    # cubic root cell
    half = 0.5 * float(np.max(hi - lo)) + pad
    center = 0.5 * (lo + hi)
    root = OctreeCell(center - half, center + half, 0, np.arange(len(boxes)))
    _split(root, boxes, leaf_cap, max_depth)
    return Octree(root, boxes, leaf_cap, max_depth)


def candidate_pairs(oct: Octree) -> np.ndarray:
    """Sorted unique (i, j), i < j, of ids sharing a leaf; shape (m, 2)."""
    blocks = []
    for leaf in oct.leaves():
        ids = leaf.ids
        if len(ids) < 2:
            continue
        i, j = np.triu_indices(len(ids), k=1)
        pairs = np.stack([ids[i], ids[j]], axis=1)
        blocks.append(np.sort(pairs, axis=1))
    if not blocks:
        return np.zeros((0, 2), dtype=np.int64)
    return np.unique(np.concatenate(blocks), axis=0)
