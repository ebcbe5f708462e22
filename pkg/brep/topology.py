"""Component and hole counts read off the boundary representation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

from brep.surface import GElement


@dataclass(frozen=True)
class TopologyReport:
    components: int
    holes_per_component: List[int] = field(default_factory=list)

    def line(self):
        return f"components={self.components} holes={','.join(map(str, self.holes_per_component))}"

    def sorted(self):
        return TopologyReport(self.components, sorted(self.holes_per_component))


def topology(g: GElement) -> TopologyReport:
    """One component per atom; the holes of a component are its atom's negatives."""
    if g.is_bottom:
        return TopologyReport(0, [])
    if g.is_top:
        return TopologyReport(1, [0])
    return TopologyReport(len(g.atoms), [len(atom.negatives) for atom in g.atoms])
