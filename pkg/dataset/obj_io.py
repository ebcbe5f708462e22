"""Wavefront OBJ documents holding a whole spadopag, and Hasse diagrams as DOT.

Only `v`, `f` and `o` records are read; polygons are fan-triangulated and
normals, texture coordinates, groups and materials are ignored. A surface's
orientation is carried by its winding on disk: outward for positive
surfaces, inward for negative ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from brep.inclusion import decompose_atoms, hasse
from brep.surface import BOTTOM, TOP, GElement, GluedSurface
from brep.validation import validate
from geometry.mesh import TriMesh
from geometry.primitives import Tolerance, default_tolerance
from tools.errors import CannotSerialize, NotRealizable, ParseError
from tools.utils import make_rng

EMPTY_SENTINEL = "@empty"
FULL_SENTINEL = "@full"
HEADER = "# yinset:"


@dataclass
class ObjDocument:
    vertices: np.ndarray
    objects: List[Tuple[str, np.ndarray]] = field(default_factory=list)  # (name, 0-based faces)
    sentinel: Optional[str] = None

    def meshes(self):
        """(name, TriMesh) per object, each with its own compacted vertex list."""
        return [(name, TriMesh(self.vertices, faces).compacted()) for name, faces in self.objects]

    @classmethod
    def from_meshes(cls, named_meshes):
        vertices = []
        objects = []
        offset = 0
        for name, mesh in named_meshes:
            vertices.append(mesh.vertices)
            objects.append((name, mesh.faces + offset))
            offset += len(mesh.vertices)
        stacked = np.concatenate(vertices) if vertices else np.zeros((0, 3))
        return cls(stacked, objects)

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 3)), [], "empty")

    @classmethod
    def full(cls):
        return cls(np.zeros((0, 3)), [], "full")


def _index(token, n_vertices, line_no):
    try:
        value = int(token.split("/")[0])
    except ValueError:
        raise ParseError(f"line {line_no}: bad vertex reference {token!r}") from None
    index = value - 1 if value > 0 else n_vertices + value
    if value == 0 or not 0 <= index < n_vertices:
        raise ParseError(f"line {line_no}: vertex reference {value} out of range")
    return index


def parse_obj(text: str) -> ObjDocument:
    vertices = []
    objects = []
    current_name = None
    current_faces = []
    sentinel = None

    def close_object():
        if current_faces:
            name = current_name if current_name else f"object{len(objects)}"
            objects.append((name, np.array(current_faces, dtype=np.int64)))

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(HEADER):
                sentinel = line[len(HEADER):].strip() or None
            continue
        record, *rest = line.split()
        if record == "v":
            if len(rest) < 3:
                raise ParseError(f"line {line_no}: vertex needs three coordinates")
            try:
                vertices.append([float(x) for x in rest[:3]])
            except ValueError:
                raise ParseError(f"line {line_no}: bad vertex {line!r}") from None
        elif record == "f":
            if len(rest) < 3:
                raise ParseError(f"line {line_no}: face needs at least three vertices")
            ids = [_index(token, len(vertices), line_no) for token in rest]
            for k in range(1, len(ids) - 1):
                current_faces.append((ids[0], ids[k], ids[k + 1]))
        elif record == "o":
            close_object()
            current_name = " ".join(rest) or None
            current_faces = []

    close_object()
    if sentinel not in (None, "empty", "full"):
        raise ParseError(f"unknown header '{HEADER} {sentinel}'")
    if sentinel is not None and objects:
        raise ParseError(f"'{HEADER} {sentinel}' file must not contain objects")
    return ObjDocument(np.array(vertices, dtype=float).reshape(-1, 3), objects, sentinel)


def read_obj(path) -> ObjDocument:
    with open(path, "r") as obj_file:
        return parse_obj(obj_file.read())


def format_obj(document: ObjDocument) -> str:
    if document.sentinel is not None:
        return f"{HEADER} {document.sentinel}\n"
    lines = []
    offset = 1
    for name, faces in document.objects:
        used, local = np.unique(faces, return_inverse=True)
        lines.append(f"o {name}")
        lines.extend(f"v {x!r} {y!r} {z!r}" for x, y, z in document.vertices[used].tolist())
        lines.extend(f"f {a} {b} {c}" for a, b, c in (local.reshape(-1, 3) + offset).tolist())
        offset += len(used)
    return "\n".join(lines) + "\n"


def write_obj(document: ObjDocument, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_obj(document))


def spadopag_from_meshes(named_meshes, tol: Optional[Tolerance] = None, rng=None, check=True,
                         resolution=64) -> Tuple[GElement, Tolerance]:
    """Orient, nest and group closed meshes into a G-space element.

    Orientation comes from the sign of each mesh's enclosed volume; the
    inclusion order and the atoms are then computed. Returns the element and
    the tolerance used.
    """
    rng = rng if rng is not None else make_rng(0)
    named_meshes = list(named_meshes)
    if tol is None:
        tol = default_tolerance(np.concatenate([m.vertices for _, m in named_meshes]))
    surfaces = []
    for k, (name, mesh) in enumerate(named_meshes):
        mesh.check_closed(name)
        surfaces.append(GluedSurface.from_oriented_mesh(mesh, id=k, name=name))
    g = GElement.of(decompose_atoms(surfaces, tol, rng))
    if check:
        violations = validate(g, tol, rng, resolution)
        if violations:
            raise NotRealizable(violations)
    return g, tol


def read_spadopag(path, tol: Optional[Tolerance] = None, rng=None, check=True, resolution=64):
    """Element stored in `path`; the sentinels @empty / @full give 0 and 1.

    Returns `(element, tolerance)`; the tolerance is derived from the file's
    bounding box when none is given.
    """
    if str(path) == EMPTY_SENTINEL:
        return BOTTOM, tol
    if str(path) == FULL_SENTINEL:
        return TOP, tol
    document = read_obj(path)
    if document.sentinel == "empty":
        return BOTTOM, tol
    if document.sentinel == "full":
        return TOP, tol
    if not document.objects:
        raise ParseError(f"{path}: no faces")
    return spadopag_from_meshes(document.meshes(), tol, rng, check, resolution)


def oriented_meshes(g: GElement):
    """(name, mesh) per surface with the on-disk names and windings."""
    if not g.is_spadopag:
        raise CannotSerialize(f"{g.describe()} has no surfaces")
    return [(surface.name, surface.effective_mesh) for surface in g.spadopag.named().surfaces()]


def write_spadopag(g: GElement, path, allow_sentinel=True):
    """Write `g`; 0 and 1 become a sentinel header when `allow_sentinel`."""
    if g.is_bottom or g.is_top:
        if not allow_sentinel:
            raise CannotSerialize(f"{'empty' if g.is_bottom else 'full'} set has no surfaces to write")
        write_obj(ObjDocument.empty() if g.is_bottom else ObjDocument.full(), path)
        return
    write_obj(ObjDocument.from_meshes(oriented_meshes(g)), path)


def format_hasse_dot(g: GElement, tol: Tolerance, rng=None) -> str:
    rng = rng if rng is not None else make_rng(0)
    lines = ["digraph hasse {", "  node [shape=circle];"]
    if g.is_spadopag:
        named = GElement.of(g.spadopag.named().relabeled())
        diagram = hasse(named.surfaces(), tol, rng)
        for node in diagram.nodes:
            surface = diagram.surfaces[node]
            style = "filled" if surface.is_positive else "solid"
            lines.append(f'  "{surface.label()}" [style={style}];')
        for parent, child in diagram.edges:
            lines.append(f'  "{diagram.surfaces[parent].label()}" -> "{diagram.surfaces[child].label()}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_hasse_dot(g: GElement, path, tol: Tolerance, rng=None):
    """Cover relations as a DOT digraph, includer -> included; positive nodes filled."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_hasse_dot(g, tol, rng))
