"""Structural and geometric checks of a G-space element.

Violations are returned as readable strings; an empty list means valid.
Connectedness and overlap of atom regions are checked on a voxel grid and
are therefore approximate.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np
from scipy import ndimage

from brep.inclusion import includes
from brep.surface import GElement
from geometry.mesh import mesh_volume_unchecked
from geometry.primitives import Tolerance, bounding_box
from membership.voxels import atom_mask, voxel_grid
from tools.errors import NotFound, WitnessOnBoundary
from tools.utils import make_rng

DEFAULT_RESOLUTION = 64
CLOSURE_TOLERANCE = 1e-9


def _safe_includes(sk, sl, tol, rng):
    try:
        return includes(sk, sl, tol, rng)
    except (NotFound, WitnessOnBoundary):
        return None


def validate(g: GElement, tol: Tolerance, rng=None, resolution=DEFAULT_RESOLUTION,
             check_regions=True):
    """List of violated realizability conditions of `g`."""
    if not g.is_spadopag:
        return []
    rng = rng if rng is not None else make_rng(0)
    violations = []

    surfaces = g.surfaces()
    for surface in surfaces:
        if not surface.mesh.is_closed():
            violations.append(f"surface {surface.label()} is not closed")
        elif surface.mesh.closure_residual() > CLOSURE_TOLERANCE:
            violations.append(f"surface {surface.label()} fails the closure check")
        elif mesh_volume_unchecked(surface.mesh) <= 0:
            violations.append(f"surface {surface.label()} is not stored with outward winding")
    if violations:
        return violations

    unbounded = 0
    for k, atom in enumerate(g.atoms):
        if len(atom) == 0:
            violations.append(f"atom {k} has no surfaces")
            continue
        if len(atom.positives) > 1:
            violations.append(f"atom {k}: multiple positive surfaces")
        if atom.is_negative_type:
            unbounded += 1
        for first, second in combinations(atom.negatives, 2):
            if _safe_includes(first, second, tol, rng) or _safe_includes(second, first, tol, rng):
                violations.append(f"atom {k}: negatives {first.label()} and {second.label()} are comparable")
        positive = atom.positive
        if positive is not None:
            for negative in atom.negatives:
                if not _safe_includes(positive, negative, tol, rng):
                    violations.append(f"atom {k}: negative {negative.label()} is not inside "
                                      f"positive {positive.label()}")
    if unbounded > 1:
        violations.append(f"{unbounded} atoms without a positive surface (at most one allowed)")

    if check_regions and not violations:
        violations.extend(_region_violations(g, rng, resolution))
    return violations


def _region_violations(g: GElement, rng, resolution):
    lo, hi = bounding_box(s.mesh.vertices for s in g.surfaces())
    grid = voxel_grid(lo, hi, resolution)
    masks = [atom_mask(atom, grid, rng) for atom in g.atoms]
    violations = []
    for k, mask in enumerate(masks):
        _, count = ndimage.label(mask)
        if count > 1:
            violations.append(f"atom {k}: region is disconnected ({count} pieces on a "
                              f"{resolution}^3 voxel grid, approximate)")
    for i, j in combinations(range(len(masks)), 2):
        if np.any(masks[i] & masks[j]):
            violations.append(f"atoms {i} and {j}: atom interiors intersect")
    return violations
