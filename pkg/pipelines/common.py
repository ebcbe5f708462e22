"""Shared set-up of the command-line pipelines: configuration, ε, seed, operands."""
from __future__ import annotations

import numpy as np

from boolean_algebra.operations import BooleanSettings
from configs.config import Configuration
from dataset.obj_io import EMPTY_SENTINEL, FULL_SENTINEL, read_obj, spadopag_from_meshes
from brep.surface import BOTTOM, TOP
from geometry.primitives import Tolerance, default_tolerance
from tools.console import Console
from tools.errors import ParseError
from tools.utils import make_rng


class Session:
    """Configuration, console, generator and tolerance of one command run."""

    def __init__(self, config_path=None, output_path=None, epsilon=None, seed=None, log_path=None):
        self.config = Configuration(config_path, output_path=output_path)
        self.console = Console(log_path)
        self.seed = int(seed) if seed is not None else int(self.config.base.seed)
        self.rng = make_rng(self.seed)
        self.epsilon = self.config.epsilon_override(epsilon)
        self.tol = None

    @property
    def settings(self):
        config = self.config
        return BooleanSettings(
            leaf_cap=config.octree.leaf_cap,
            max_depth=config.octree.max_depth,
            angular_eps=config.pasting.angular_eps,
            check_geometric=config.pasting.check_geometric_self_intersections,
            ray_budget=config.membership.ray_budget,
        )

    def resolve_tolerance(self, documents):
        if self.epsilon is not None:
            self.tol = Tolerance(self.epsilon)
            return self.tol
        points = [d.vertices for d in documents if d is not None and len(d.vertices)]
        if not points:
            self.tol = Tolerance(self.config.base.epsilon_scale)
        else:
            self.tol = default_tolerance(np.concatenate(points), self.config.base.epsilon_scale)
        return self.tol

    def load(self, *paths):
        """Elements stored in `paths`, all read with one tolerance derived from their union."""
        documents = []
        for path in paths:
            if str(path) in (EMPTY_SENTINEL, FULL_SENTINEL):
                documents.append(None)
            else:
                documents.append(read_obj(path))
        tol = self.resolve_tolerance(documents)
        self.console.info(f"epsilon={tol.eps:.3e} seed={self.seed}")

        elements = []
        for path, document in zip(paths, documents):
            if document is None:
                elements.append(BOTTOM if str(path) == EMPTY_SENTINEL else TOP)
            elif document.sentinel is not None:
                elements.append(BOTTOM if document.sentinel == "empty" else TOP)
            elif not document.objects:
                raise ParseError(f"{path}: no faces")
            else:
                g, _ = spadopag_from_meshes(document.meshes(), tol, self.rng,
                                            check=self.config.base.validate_on_load,
                                            resolution=self.config.base.voxel_resolution)
                self.console.info(f"{path}: {g.describe()}")
                elements.append(g)
        return elements
