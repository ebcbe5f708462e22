"""Glued surfaces, atoms, realizable spadopags and the G-space element.

Meshes are stored with outward winding; the orientation is a separate flag.
The *effective* winding (outward for a positive surface, inward for a
negative one) makes every facet normal point away from the surface's
internal complement, which is what cutting and pasting operate on.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from cutting.octree import build_octree
from geometry.mesh import TriMesh, signed_volume
from geometry.primitives import bounding_box


class Orientation(Enum):
    POSITIVE = 1
    NEGATIVE = -1

    @property
    def sign(self):
        return self.value

    def reversed(self):
        return Orientation.NEGATIVE if self is Orientation.POSITIVE else Orientation.POSITIVE

    @property
    def tag(self):
        return "+" if self is Orientation.POSITIVE else "-"


@dataclass(frozen=True, eq=False)
class GluedSurface:
    mesh: TriMesh
    orientation: Orientation = Orientation.POSITIVE
    id: int = 0
    name: Optional[str] = None

    @classmethod
    def from_oriented_mesh(cls, mesh: TriMesh, id=0, name=None):
        """Orientation from the sign of the enclosed volume of `mesh`'s winding."""
        volume = signed_volume(mesh)
        if volume > 0:
            return cls(mesh, Orientation.POSITIVE, id, name)
        return cls(mesh.flipped(), Orientation.NEGATIVE, id, name)

    @property
    def is_positive(self):
        return self.orientation is Orientation.POSITIVE

    @property
    def effective_mesh(self):
        return self.mesh if self.is_positive else self.mesh.flipped()

    @cached_property
    def octree(self):
        return build_octree(self.mesh.triangles)

    @cached_property
    def bounded_volume(self):
        return signed_volume(self.mesh)

    def reversed(self):
        return replace(self, orientation=self.orientation.reversed())

    def with_id(self, id, name=None):
        return replace(self, id=id, name=name if name is not None else self.name)

    def bounds(self):
        return self.mesh.bounds()

    def label(self):
        return self.name if self.name else f"S{self.id}"

    def same_as(self, other: "GluedSurface"):
        """Bit-identical geometry and orientation."""
        return (self.orientation is other.orientation
                and self.mesh.vertices.shape == other.mesh.vertices.shape
                and self.mesh.faces.shape == other.mesh.faces.shape
                and np.array_equal(self.mesh.vertices, other.mesh.vertices)
                and np.array_equal(self.mesh.faces, other.mesh.faces))


@dataclass(frozen=True, eq=False)
class AtomSpadopag:
    surfaces: Tuple[GluedSurface, ...]

    def __post_init__(self):
        object.__setattr__(self, "surfaces", tuple(self.surfaces))

    @property
    def positives(self):
        return tuple(s for s in self.surfaces if s.is_positive)

    @property
    def negatives(self):
        return tuple(s for s in self.surfaces if not s.is_positive)

    @property
    def positive(self):
        positives = self.positives
        return positives[0] if positives else None

    @property
    def is_negative_type(self):
        """True for the unbounded kind of atom (no positive surface)."""
        return not self.positives

    def __len__(self):
        return len(self.surfaces)


@dataclass(frozen=True, eq=False)
class RealizableSpadopag:
    atoms: Tuple[AtomSpadopag, ...]

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))

    def surfaces(self):
        return [surface for atom in self.atoms for surface in atom.surfaces]

    def bounds(self):
        return bounding_box(s.mesh.vertices for s in self.surfaces())

    def relabeled(self, start=0):
        """Copy with surface ids start, start+1, ... in atom order."""
        atoms = []
        next_id = start
        for atom in self.atoms:
            surfaces = []
            for surface in atom.surfaces:
                surfaces.append(surface.with_id(next_id))
                next_id += 1
            atoms.append(AtomSpadopag(tuple(surfaces)))
        return RealizableSpadopag(tuple(atoms))

    def named(self):
        """Copy whose surfaces carry the on-disk names atomK_pos / atomK_negJ."""
        atoms = []
        for k, atom in enumerate(self.atoms):
            surfaces = []
            negatives = 0
            for surface in atom.surfaces:
                if surface.is_positive:
                    name = f"atom{k}_pos"
                else:
                    name = f"atom{k}_neg{negatives}"
                    negatives += 1
                surfaces.append(replace(surface, name=name))
            atoms.append(AtomSpadopag(tuple(surfaces)))
        return RealizableSpadopag(tuple(atoms))


class GElementKind(Enum):
    BOTTOM = "bottom"
    TOP = "top"
    SPADOPAG = "spadopag"


@dataclass(frozen=True, eq=False)
class GElement:
    kind: GElementKind
    spadopag: Optional[RealizableSpadopag] = None

    def __post_init__(self):
        if (self.kind is GElementKind.SPADOPAG) != (self.spadopag is not None):
            raise ValueError("only the spadopag variant carries a spadopag")

    @classmethod
    def of(cls, spadopag: RealizableSpadopag):
        if not spadopag.atoms:
            return BOTTOM
        return cls(GElementKind.SPADOPAG, spadopag)

    @classmethod
    def from_surfaces(cls, *atoms):
        """Convenience: each argument is one atom's list of surfaces."""
        return cls.of(RealizableSpadopag(tuple(AtomSpadopag(tuple(a)) for a in atoms)).relabeled())

    @property
    def is_bottom(self):
        return self.kind is GElementKind.BOTTOM

    @property
    def is_top(self):
        return self.kind is GElementKind.TOP

    @property
    def is_spadopag(self):
        return self.kind is GElementKind.SPADOPAG

    @property
    def atoms(self):
        return self.spadopag.atoms if self.spadopag is not None else ()

    def surfaces(self):
        return self.spadopag.surfaces() if self.spadopag is not None else []

    def map_meshes(self, fn):
        """Same structure with every surface mesh replaced by `fn(mesh)`."""
        if self.spadopag is None:
            return self
        atoms = tuple(
            AtomSpadopag(tuple(replace(s, mesh=fn(s.mesh)) for s in atom.surfaces))
            for atom in self.atoms
        )
        return GElement(GElementKind.SPADOPAG, RealizableSpadopag(atoms))

    def describe(self):
        if self.is_bottom:
            return "0"
        if self.is_top:
            return "1"
        parts = []
        for atom in self.atoms:
            parts.append("{" + ",".join(f"{s.label()}{s.orientation.tag}" for s in atom.surfaces) + "}")
        return " ".join(parts)


BOTTOM = GElement(GElementKind.BOTTOM)
TOP = GElement(GElementKind.TOP)
