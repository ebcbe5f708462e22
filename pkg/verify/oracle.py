"""Monte-Carlo membership oracle for the Boolean laws."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np
from tqdm import tqdm

from brep.surface import GElement
from geometry.distance import distance_to_triangles
from geometry.primitives import Tolerance, bounding_box
from membership.classify import DEFAULT_RAY_BUDGET, PointClass, classify_points, near_surface

DEFAULT_SAMPLES = 10_000
BOX_INFLATION = 0.1
FAR_FIELD_FACTOR = 10.0
BATCH = 1000


class Law(Enum):
    MEET = "meet"
    JOIN = "join"
    COMPLEMENT = "complement"
    DIFFERENCE = "difference"
    SYMMETRIC_DIFFERENCE = "symmetric_difference"

    def expected(self, lhs, rhs):
        if self is Law.MEET:
            return lhs & rhs
        if self is Law.JOIN:
            return lhs | rhs
        if self is Law.COMPLEMENT:
            return ~lhs
        if self is Law.DIFFERENCE:
            return lhs & ~rhs
        return lhs ^ rhs


@dataclass
class OracleReport:
    samples: int
    agreements: int
    disagreements: int
    boundary_excluded: int
    max_disagreement_distance: float = 0.0
    far_field_checked: int = 0
    far_field_agreements: int = 0

    @property
    def agreement_ratio(self):
        decided = self.agreements + self.disagreements
        return self.agreements / decided if decided else 1.0

    def passed(self, threshold=0.999):
        return self.agreement_ratio >= threshold and self.far_field_agreements == self.far_field_checked

    def as_dict(self):
        fields = asdict(self)
        fields["agreement_ratio"] = self.agreement_ratio
        return fields

    def lines(self):
        return [f"{key}={value}" for key, value in self.as_dict().items()]


def _operands(result, lhs, rhs):
    return [g for g in (result, lhs, rhs) if g is not None]


def sampling_box(elements, inflation=BOX_INFLATION):
    surfaces = [s for g in elements for s in g.surfaces()]
    if not surfaces:
        return -np.ones(3), np.ones(3)
    lo, hi = bounding_box(s.mesh.vertices for s in surfaces)
    pad = inflation * (hi - lo)
    return lo - pad, hi + pad


def _unbounded(g: GElement):
    return g.is_top or any(atom.is_negative_type for atom in g.atoms)


def _inside(points, g, rng, tol, budget):
    return classify_points(points, g, rng, tol, budget) == int(PointClass.INSIDE)


def pointwise_law_check(result: GElement, lhs: GElement, rhs, law: Law, n=DEFAULT_SAMPLES, band=None,
                        rng=None, tol: Tolerance = None, budget=DEFAULT_RAY_BUDGET,
                        far_field_factor=FAR_FIELD_FACTOR, progress=False) -> OracleReport:
    """Agreement of ρ(result) with the law applied to ρ(lhs) and ρ(rhs) at random points.

    Points within `band` (default 3ε) of any operand surface are excluded.
    """
    operands = _operands(result, lhs, rhs)
    band = band if band is not None else 3.0 * tol.eps
    lo, hi = sampling_box(operands)
    points = rng.uniform(lo, hi, size=(n, 3))

    near = np.zeros(n, dtype=bool)
    surfaces = [s for g in operands for s in g.surfaces()]
    for surface in surfaces:
        near |= near_surface(points, surface, band)
    kept = points[~near]

    wrong = np.zeros(len(kept), dtype=bool)
    for start in tqdm(range(0, len(kept), BATCH), desc="oracle", disable=not progress):
        batch = kept[start:start + BATCH]
        got = _inside(batch, result, rng, tol, budget)
        want = law.expected(_inside(batch, lhs, rng, tol, budget),
                            _inside(batch, rhs, rng, tol, budget) if rhs is not None else np.zeros(len(batch), bool))
        wrong[start:start + BATCH] = got != want
    max_distance = 0.0
    if np.any(wrong) and surfaces:
        triangles = np.concatenate([s.mesh.triangles for s in surfaces])
        max_distance = float(distance_to_triangles(kept[wrong], triangles).max())

    report = OracleReport(n, int(np.count_nonzero(~wrong)), int(np.count_nonzero(wrong)),
                          int(np.count_nonzero(near)), max_distance)
    if any(_unbounded(g) for g in operands):
        center = 0.5 * (lo + hi)
        reach = far_field_factor * float(np.linalg.norm(hi - lo))
        far_points = center + reach * np.vstack([np.eye(3), -np.eye(3)])
        got = _inside(far_points, result, rng, tol, budget)
        want = law.expected(_inside(far_points, lhs, rng, tol, budget),
                            _inside(far_points, rhs, rng, tol, budget) if rhs is not None else np.zeros(6, bool))
        report.far_field_checked = len(far_points)
        report.far_field_agreements = int(np.count_nonzero(got == want))
    return report
