"""Linear interface tracking of Yin sets.

One step maps the vertices through the flow, keeps edge lengths within
[r_tiny * h_L, h_L] and the interior angles above alpha. On request the
tracked region is intersected with the cells of a fixed grid.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from boolean_algebra.operations import meet
from brep.surface import GElement, GluedSurface
from brep.topology import topology
from data_preparation.shapes import box
from geometry.mesh import TriMesh
from geometry.primitives import Tolerance, bounding_box
from membership.classify import PointClass, classify_point
from tools.errors import BlowUp, CannotRegularize, InfiniteVolume, QualityUnreached
from tracking.remeshing import DEFAULT_QUALITY_ITERATIONS, improve_quality, min_angle, regularize_edges
from verify.measures import mesh_volume, voxel_topology


@dataclass(frozen=True)
class MarsParams:
    h_L: float
    r_tiny: float = 0.1
    alpha: float = np.deg2rad(15.0)
    dt: Optional[float] = None

    def __post_init__(self):
        if self.h_L <= 0:
            raise ValueError(f"h_L must be positive, got {self.h_L}")
        if not 0.0 < self.r_tiny < 1.0:
            raise ValueError(f"r_tiny must lie in (0, 1), got {self.r_tiny}")
        if not 0.0 < self.alpha < np.pi / 3:
            raise ValueError(f"alpha must lie in (0, pi/3), got {self.alpha}")
        if self.dt is not None and self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @classmethod
    def from_degrees(cls, h_L, r_tiny=0.1, alpha_deg=15.0, dt=None):
        return cls(h_L, r_tiny, float(np.deg2rad(alpha_deg)), dt)

    @property
    def time_step(self):
        return self.dt if self.dt is not None else self.h_L


def _rk4(x, u, t, step):
    k1 = u(x, t)
    k2 = u(x + 0.5 * step * k1, t + 0.5 * step)
    k3 = u(x + 0.5 * step * k2, t + 0.5 * step)
    k4 = u(x + step * k3, t + step)
    return x + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def advect(g: GElement, u, t0, t1, dt) -> GElement:
    """Move every vertex along the flow of `u` from t0 to t1 with classical RK4."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not g.is_spadopag or t1 == t0:
        return g
    n_steps = max(1, math.ceil(abs(t1 - t0) / dt - 1e-12))
    step = (t1 - t0) / n_steps

    def flow(mesh):
        x = mesh.vertices.copy()
        t = t0
        for _ in range(n_steps):
            x = _rk4(x, u, t, step)
            t += step
        if not np.all(np.isfinite(x)):
            raise BlowUp(f"non-finite coordinates after advecting to t={t1}")
        return TriMesh(x, mesh.faces)

    result = g.map_meshes(flow)
    for surface in result.surfaces():
        surface.mesh.check_closed(surface.label())
    return result


def _cell_box(index, h):
    lo = np.asarray(index, dtype=float) * h
    return lo, lo + h


def local_solutions(g: GElement, h, tol: Tolerance, rng, settings=None):
    """meet(g, cell) for every grid cell of size h meeting g's bounding box.

    Cells no triangle reaches are classified by their center: inside cells map
    to themselves, outside cells are omitted, as are empty meets.
    """
    if not g.is_spadopag:
        raise ValueError("local solutions need a spadopag with a bounded boundary")
    surfaces = g.surfaces()
    lo, hi = bounding_box(s.mesh.vertices for s in surfaces)
    first = np.floor(lo / h).astype(int)
    last = np.ceil(hi / h).astype(int) - 1
    last = np.maximum(last, first)
    triangles = np.concatenate([s.mesh.triangles for s in surfaces])
    tri_lo = triangles.min(axis=1)
    tri_hi = triangles.max(axis=1)

    solutions = {}
    ranges = [range(first[k], last[k] + 1) for k in range(3)]
    for index in itertools.product(*ranges):
        cell_lo, cell_hi = _cell_box(index, h)
        shrunk_lo = cell_lo + tol.eps
        shrunk_hi = cell_hi - tol.eps
        touched = np.any(np.all(tri_lo <= shrunk_hi, axis=1) & np.all(tri_hi >= shrunk_lo, axis=1))
        cell = GElement.from_surfaces([GluedSurface(box(cell_lo, cell_hi))])
        if not touched:
            if classify_point(0.5 * (cell_lo + cell_hi), g, rng, tol) is PointClass.INSIDE:
                solutions[tuple(index)] = cell
            continue
        local = meet(g, cell, tol, rng, settings)
        if not local.is_bottom:
            solutions[tuple(index)] = local
    return solutions


def _record(g: GElement, time, voxel_resolution, rng):
    try:
        volume = mesh_volume(g)
    except InfiniteVolume:
        volume = float("nan")
    report = topology(g)
    row = {
        "time": time,
        "volume": volume,
        "triangles": sum(len(s.mesh.faces) for s in g.surfaces()),
        "min_angle_deg": float(np.degrees(min(min_angle(s.mesh) for s in g.surfaces()))),
        "components": report.components,
        "holes": ",".join(map(str, report.holes_per_component)),
    }
    if voxel_resolution:
        voxels = voxel_topology(g, voxel_resolution, rng)
        row["voxel_components"] = voxels.components
        row["voxel_holes"] = ",".join(map(str, voxels.holes_per_component))
    return row


def track(g: GElement, field, params: MarsParams, checkpoints, rng, console=None,
          quality_iterations=DEFAULT_QUALITY_ITERATIONS, voxel_resolution=None, progress=True):
    """Advance `g` through every checkpoint time; returns (states, history).

    `states` maps each checkpoint time to the tracked element, `history` is
    a table with one row per checkpoint.
    """
    times = sorted(float(t) for t in checkpoints)
    dt = params.time_step
    total = sum(max(1, math.ceil((b - a) / dt - 1e-12)) for a, b in zip(times[:-1], times[1:]) if b > a)
    states = {times[0]: g}
    rows = [_record(g, times[0], voxel_resolution, rng)]
    current = g
    bar = tqdm(total=total, desc="tracking", disable=not progress)
    for start, stop in zip(times[:-1], times[1:]):
        if stop <= start:
            continue
        n_steps = max(1, math.ceil((stop - start) / dt - 1e-12))
        step = (stop - start) / n_steps
        for k in range(n_steps):
            t = start + k * step
            current = advect(current, field, t, t + step, step)
            try:
                current = regularize_edges(current, params, console)
            except CannotRegularize as error:
                if console is not None:
                    console.warning(f"t={t + step:.4f}: {error}")
                current = error.result
            try:
                current = improve_quality(current, params, quality_iterations)
            except QualityUnreached as error:
                if console is not None:
                    console.warning(f"t={t + step:.4f}: {error}")
                current = error.result
            bar.update(1)
        states[stop] = current
        rows.append(_record(current, stop, voxel_resolution, rng))
        if console is not None:
            console.info(f"checkpoint t={stop:g}: {rows[-1]['triangles']} triangles, "
                         f"topology {topology(current).line()}")
    bar.close()
    return states, pd.DataFrame(rows)
