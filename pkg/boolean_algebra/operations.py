"""Complement, meet, join and the derived operations on the G-space.

Every operation goes through the same pipeline: detect the intersections,
cut the operands into patches, keep the patches that bound the result and
paste them back into a realizable spadopag.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import List

import numpy as np

from brep.surface import BOTTOM, TOP, GElement
from cutting.cutting import SegmentedSpadopag, SurfacePatch, cut
from cutting.intersections import detect_intersections
from cutting.octree import DEFAULT_LEAF_CAP, DEFAULT_MAX_DEPTH
from geometry.distance import distance_to_triangles
from geometry.primitives import Tolerance, triangle_areas, triangle_normals
from membership.classify import DEFAULT_RAY_BUDGET, PointClass, classify_points
from pasting.angles import DEFAULT_ANGULAR_EPS
from pasting.pasting import paste
from tools.utils import make_rng

SAMPLES_PER_PATCH = 8


@dataclass(frozen=True)
class BooleanSettings:
    leaf_cap: int = DEFAULT_LEAF_CAP
    max_depth: int = DEFAULT_MAX_DEPTH
    angular_eps: float = DEFAULT_ANGULAR_EPS
    check_geometric: bool = True
    ray_budget: int = DEFAULT_RAY_BUDGET
    samples_per_patch: int = SAMPLES_PER_PATCH


class Provenance(Enum):
    FIRST = "first"
    SECOND = "second"
    COINCIDENT = "coincident"


@dataclass
class MeetSelection:
    """Patches and closed surfaces that bound the meet."""
    kept_patches: List[SurfacePatch] = field(default_factory=list)
    provenance: List[Provenance] = field(default_factory=list)
    closed_surfaces: list = field(default_factory=list)

    def __len__(self):
        return len(self.kept_patches) + len(self.closed_surfaces)

    def keep(self, patch, provenance):
        self.kept_patches.append(patch)
        self.provenance.append(provenance)

    def as_segmented(self):
        return SegmentedSpadopag(list(self.kept_patches), list(self.closed_surfaces))


def _settings(settings):
    return settings if settings is not None else BooleanSettings()


def _same_structure(g1: GElement, g2: GElement, flipped: bool):
    s1 = g1.surfaces()
    s2 = g2.surfaces()
    if len(s1) != len(s2):
        return False
    unmatched = list(s2)
    for first in s1:
        target = first.reversed() if flipped else first
        match = next((s for s in unmatched if target.same_as(s)), None)
        if match is None:
            return False
        unmatched.remove(match)
    return True


def _side(points, other: GElement, rng, tol, settings):
    """First decisive class of `points` against ρ(other); ON_BOUNDARY if none is."""
    classes = classify_points(points, other, rng, tol, settings.ray_budget)
    decisive = classes[classes != int(PointClass.ON_BOUNDARY)]
    return PointClass(int(decisive[0])) if len(decisive) else PointClass.ON_BOUNDARY


def _surface_samples(surface, count):
    triangles = surface.effective_mesh.triangles
    order = np.argsort(-triangle_areas(triangles), kind="stable")[:count]
    return triangles[order].mean(axis=1)


def _coincident_partner(patch: SurfacePatch, others, tol):
    """Index of the patch in `others` that `patch` lies on, and whether normals agree."""
    samples = patch.sample_points(SAMPLES_PER_PATCH)
    probe = patch.triangles[np.argmax(triangle_areas(patch.triangles))]
    probe_normal = triangle_normals(probe[None])[0]
    for index, other in enumerate(others):
        if np.max(distance_to_triangles(samples, other.triangles)) >= tol.eps:
            continue
        centroid = probe.mean(axis=0)
        nearest = np.argmin(np.linalg.norm(other.triangles.mean(axis=1) - centroid, axis=1))
        same = float(triangle_normals(other.triangles[nearest][None])[0] @ probe_normal) > 0
        return index, same
    return None, False


def select_meet(seg1: SegmentedSpadopag, seg2: SegmentedSpadopag, g1: GElement, g2: GElement,
                rng, tol: Tolerance, settings=None) -> MeetSelection:
    """Patches of each operand inside the other, coincident pairs kept once if equally oriented."""
    settings = _settings(settings)
    selection = MeetSelection()
    consumed = set()
    for patch in seg1.patches:
        side = _side(patch.sample_points(settings.samples_per_patch), g2, rng, tol, settings)
        if side is PointClass.INSIDE:
            selection.keep(patch, Provenance.FIRST)
        elif side is PointClass.ON_BOUNDARY:
            index, same = _coincident_partner(patch, seg2.patches, tol)
            if index is not None:
                consumed.add(index)
                if same:
                    selection.keep(patch, Provenance.COINCIDENT)
    for index, patch in enumerate(seg2.patches):
        if index in consumed:
            continue
        side = _side(patch.sample_points(settings.samples_per_patch), g1, rng, tol, settings)
        if side is PointClass.INSIDE:
            selection.keep(patch, Provenance.SECOND)
    for surfaces, other in ((seg1.closed_surfaces, g2), (seg2.closed_surfaces, g1)):
        for surface in surfaces:
            side = _side(_surface_samples(surface, settings.samples_per_patch), other, rng, tol, settings)
            if side is PointClass.INSIDE:
                selection.closed_surfaces.append(surface)
    return selection


def meet(g1: GElement, g2: GElement, tol: Tolerance, rng=None, settings=None) -> GElement:
    """ρ(g1) ∩ ρ(g2) as a G-space element."""
    settings = _settings(settings)
    if g1.is_bottom or g2.is_bottom:
        return BOTTOM
    if g2.is_top:
        return g1
    if g1.is_top:
        return g2
    if _same_structure(g1, g2, flipped=False):
        return g1
    if _same_structure(g1, g2, flipped=True):
        return BOTTOM
    rng = rng if rng is not None else make_rng(0)

    first = g1.spadopag.relabeled(0)
    second = g2.spadopag.relabeled(len(first.surfaces()))
    h1 = GElement.of(first)
    h2 = GElement.of(second)
    isect = detect_intersections(first.surfaces() + second.surfaces(), tol,
                                 settings.leaf_cap, settings.max_depth)
    seg1 = cut(first, isect, tol)
    seg2 = cut(second, isect, tol)
    selection = select_meet(seg1, seg2, h1, h2, rng, tol, settings)
    if len(selection) == 0:
        return BOTTOM
    result = paste(selection.as_segmented(), tol, rng, settings.angular_eps, settings.check_geometric)
    return GElement.of(result)


def complement(g: GElement, tol: Tolerance, rng=None, settings=None) -> GElement:
    """Cut at the improper intersections, reverse every piece, paste."""
    settings = _settings(settings)
    if g.is_bottom:
        return TOP
    if g.is_top:
        return BOTTOM
    rng = rng if rng is not None else make_rng(0)
    spadopag = g.spadopag.relabeled(0)
    isect = detect_intersections(spadopag.surfaces(), tol, settings.leaf_cap, settings.max_depth)
    seg = cut(spadopag, isect, tol).reversed()
    result = paste(seg, tol, rng, settings.angular_eps, settings.check_geometric)
    return GElement.of(result)


def join(g1: GElement, g2: GElement, tol: Tolerance, rng=None, settings=None) -> GElement:
    rng = rng if rng is not None else make_rng(0)
    return complement(
        meet(complement(g1, tol, rng, settings), complement(g2, tol, rng, settings), tol, rng, settings),
        tol, rng, settings)


def difference(g1: GElement, g2: GElement, tol: Tolerance, rng=None, settings=None) -> GElement:
    rng = rng if rng is not None else make_rng(0)
    return meet(g1, complement(g2, tol, rng, settings), tol, rng, settings)


def symmetric_difference(g1: GElement, g2: GElement, tol: Tolerance, rng=None, settings=None) -> GElement:
    rng = rng if rng is not None else make_rng(0)
    return join(difference(g1, g2, tol, rng, settings), difference(g2, g1, tol, rng, settings),
                tol, rng, settings)
