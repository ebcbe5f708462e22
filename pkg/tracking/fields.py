"""Velocity fields for interface advection."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

SAFE_NAMES = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "arctan2", "sinh", "cosh", "tanh", "pi")
}


class FieldKind(Enum):
    TRANSLATION = "translation"
    ROTATION = "rotation"
    DEFORMATION = "deformation"
    CUSTOM = "custom"


def deformation_field(x, t, T):
    """The periodic 3D deformation test; the flow reverses at t = T/2."""
    x = np.asarray(x, dtype=float)
    px, py, pz = (np.pi * x[..., k] for k in range(3))
    c = np.cos(np.pi * t / T)
    u = 2.0 * np.sin(px) ** 2 * np.sin(2 * py) * np.sin(2 * pz) * c
    v = -np.sin(2 * px) * np.sin(py) ** 2 * np.sin(2 * pz) * c
    w = -np.sin(2 * px) * np.sin(2 * py) * np.sin(pz) ** 2 * c
    return np.stack([u, v, w], axis=-1)


@dataclass(frozen=True)
class VelocityField:
    kind: FieldKind
    params: dict = field(default_factory=dict)
    period: float = 3.0
    expression: Optional[str] = None

    def __post_init__(self):
        if self.kind is FieldKind.CUSTOM:
            if not self.expression:
                raise ValueError("a custom field needs an expression 'u; v; w'")
            parts = [part.strip() for part in self.expression.split(";")]
            if len(parts) != 3:
                raise ValueError(f"expected three components separated by ';', got {self.expression!r}")
            object.__setattr__(self, "_compiled", [compile(p, "<velocity>", "eval") for p in parts])

    @classmethod
    def named(cls, name, params=None, period=3.0, expression=None):
        return cls(FieldKind(name), dict(params or {}), period, expression)

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        if self.kind is FieldKind.DEFORMATION:
            return deformation_field(x, t, self.period)
        if self.kind is FieldKind.TRANSLATION:
            velocity = np.asarray(self.params.get("velocity", (1.0, 0.0, 0.0)), dtype=float)
            return np.broadcast_to(velocity, x.shape).copy()
        if self.kind is FieldKind.ROTATION:
            omega = float(self.params.get("omega", 1.0))
            center = np.asarray(self.params.get("center", (0.0, 0.0, 0.0)), dtype=float)
            axis = np.asarray(self.params.get("axis", (0.0, 0.0, 1.0)), dtype=float)
            axis = axis / np.linalg.norm(axis)
            return omega * np.cross(axis, x - center)
        names = dict(SAFE_NAMES, x=x[..., 0], y=x[..., 1], z=x[..., 2], t=t)
        components = [np.broadcast_to(eval(code, {"__builtins__": {}}, names), x.shape[:-1])
                      for code in self._compiled]
        return np.stack(components, axis=-1).astype(float)
