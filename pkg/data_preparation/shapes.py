"""Closed, outward-wound triangle meshes of simple solids."""
import numpy as np

from geometry.mesh import TriMesh
def _outward(vertices, faces, center):
    # only valid for star-shaped meshes around `center`
    tris = vertices[faces]
    normals = np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0])
    inward = np.einsum("ij,ij->i", normals, tris.mean(axis=1) - center) < 0
    faces = faces.copy()
    faces[inward] = faces[inward][:, ::-1]
    return faces


def icosphere(center=(0.0, 0.0, 0.0), radius=1.0, level=2) -> TriMesh:
    """Subdivided icosahedron projected onto the sphere; 20 * 4**level faces."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    vertices = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    vertices = [np.asarray(v, dtype=float) / np.linalg.norm(v) for v in vertices]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(level):
        midpoints = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in midpoints:
                m = vertices[a] + vertices[b]
                vertices.append(m / np.linalg.norm(m))
                midpoints[key] = len(vertices) - 1
            return midpoints[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined

    unit = np.array(vertices)
    faces = _outward(unit, np.array(faces, dtype=np.int64), np.zeros(3))
    return TriMesh(np.asarray(center, dtype=float) + radius * unit, faces)


def box(lo=(0.0, 0.0, 0.0), hi=(1.0, 1.0, 1.0)) -> TriMesh:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(hi <= lo):
        raise ValueError(f"empty box {lo} .. {hi}")
    corners = np.array([[hi[k] if (i >> k) & 1 else lo[k] for k in range(3)] for i in range(8)])
    faces = np.array([
        (0, 2, 1), (1, 2, 3),  # z = lo
        (4, 5, 6), (5, 7, 6),  # z = hi
        (0, 1, 4), (1, 5, 4),  # y = lo
        (2, 6, 3), (3, 6, 7),  # y = hi
        (0, 4, 2), (2, 4, 6),  # x = lo
        (1, 3, 5), (3, 7, 5),  # x = hi
    ], dtype=np.int64)
    return TriMesh(corners, faces)


def _frame(axis, reference=None):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    if reference is None:
        reference = (1.0, 0.0, 0.0) if abs(axis[0]) < 0.9 else (0.0, 1.0, 0.0)
    e1 = np.asarray(reference, dtype=float)
    e1 = e1 - (e1 @ axis) * axis
    e1 = e1 / np.linalg.norm(e1)
    return e1, np.cross(axis, e1), axis


def surface_of_revolution(profile, n_phi=32, axis=(0.0, 0.0, 1.0), center=(0.0, 0.0, 0.0),
                          reference=None) -> TriMesh:
    """Revolve a (radius, height) profile about `axis`.

    The profile runs from the lower pole to the upper pole, both with radius
    zero; every interior sample needs a positive radius. Ring vertex k sits at
    azimuth 2*pi*k/n_phi measured from `reference` in the (e1, axis x e1)
    plane, so two shapes revolved with the same frame share rings exactly.
    """
    profile = np.asarray(profile, dtype=float)
    if len(profile) < 3 or profile[0, 0] != 0.0 or profile[-1, 0] != 0.0:
        raise ValueError("a closed profile starts and ends on the axis")
    if np.any(profile[1:-1, 0] <= 0.0):
        raise ValueError("interior profile samples need a positive radius")
    e1, e2, a = _frame(axis, reference)
    center = np.asarray(center, dtype=float)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    ring_directions = np.outer(np.cos(phi), e1) + np.outer(np.sin(phi), e2)

    vertices = [center + profile[0, 1] * a]
    for r, h in profile[1:-1]:
        vertices.extend(center + h * a + r * ring_directions)
    vertices.append(center + profile[-1, 1] * a)
    top = len(vertices) - 1
    n_rings = len(profile) - 2

    def ring(i, k):
        return 1 + i * n_phi + k % n_phi

    faces = []
    for k in range(n_phi):
        faces.append((0, ring(0, k + 1), ring(0, k)))
        faces.append((top, ring(n_rings - 1, k), ring(n_rings - 1, k + 1)))
        for i in range(n_rings - 1):
            faces.append((ring(i, k), ring(i, k + 1), ring(i + 1, k + 1)))
            faces.append((ring(i, k), ring(i + 1, k + 1), ring(i + 1, k)))
    return TriMesh(np.array(vertices), np.array(faces, dtype=np.int64))


def ellipsoid(center=(0.0, 0.0, 0.0), radii=(1.0, 1.0, 1.0), n_theta=24, n_phi=32) -> TriMesh:
    """Axis-aligned ellipsoid; an even `n_theta` puts a ring on the equator z = center_z."""
    theta = np.linspace(-np.pi / 2, np.pi / 2, n_theta + 1)
    profile = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    profile[0, 0] = profile[-1, 0] = 0.0
    unit = surface_of_revolution(profile, n_phi)
    return TriMesh(np.asarray(center, dtype=float) + unit.vertices * np.asarray(radii, dtype=float),
                   unit.faces)


def sphere_of_revolution(center, radius, n_theta=24, n_phi=32, axis=(0.0, 0.0, 1.0), reference=None):
    theta = np.linspace(-np.pi / 2, np.pi / 2, n_theta + 1)
    profile = np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)
    profile[0, 0] = profile[-1, 0] = 0.0
    return surface_of_revolution(profile, n_phi, axis, center, reference)


def torus(center=(0.0, 0.0, 0.0), major=1.0, minor=0.25, n_major=48, n_minor=16,
          axis=(0.0, 0.0, 1.0)) -> TriMesh:
    """Vertex (i, j) at angle 2*pi*i/n_major around `axis` and 2*pi*j/n_minor around the tube."""
    if minor >= major:
        raise ValueError("a ring torus needs minor < major")
    e1, e2, a = _frame(axis)
    u = 2.0 * np.pi * np.arange(n_major) / n_major
    v = 2.0 * np.pi * np.arange(n_minor) / n_minor
    radial = np.outer(np.cos(u), e1) + np.outer(np.sin(u), e2)
    center = np.asarray(center, dtype=float)
    vertices = np.array([center + (major + minor * np.cos(vj)) * radial[i] + minor * np.sin(vj) * a
                         for i in range(n_major) for vj in v])

    def index(i, j):
        return (i % n_major) * n_minor + j % n_minor

    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            faces.append((index(i, j), index(i + 1, j), index(i + 1, j + 1)))
            faces.append((index(i, j), index(i + 1, j + 1), index(i, j + 1)))
    return TriMesh(vertices, np.array(faces, dtype=np.int64))
