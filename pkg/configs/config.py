import os
import yaml
from pathlib import Path


DEFAULT_CONFIG = Path(__file__).resolve().parent / "config.yaml"
EPSILON_ENV = "YINSET_EPSILON"


class BaseConfig:
    def __init__(self, epsilon=None, epsilon_scale=1e-9, seed=0, validate_on_load=True,
                 voxel_resolution=64):
        self.epsilon = epsilon
        self.epsilon_scale = epsilon_scale
        self.seed = seed
        self.validate_on_load = validate_on_load
        self.voxel_resolution = voxel_resolution


class OctreeConfig:
    def __init__(self, leaf_cap=16, max_depth=12):
        self.leaf_cap = leaf_cap
        self.max_depth = max_depth


class PastingConfig:
    def __init__(self, angular_eps=1e-7, check_geometric_self_intersections=True):
        self.angular_eps = angular_eps
        self.check_geometric_self_intersections = check_geometric_self_intersections


class MembershipConfig:
    def __init__(self, ray_budget=64):
        self.ray_budget = ray_budget


class OracleConfig:
    def __init__(self, samples=10000, band_factor=3.0, box_inflation=0.1, far_field_factor=10.0,
                 hausdorff_samples=2000):
        self.samples = samples
        self.band_factor = band_factor
        self.box_inflation = box_inflation
        self.far_field_factor = far_field_factor
        self.hausdorff_samples = hausdorff_samples


class TrackingConfig:
    def __init__(self, field='deformation', expression=None, params=None, period=3.0, h_L=1 / 32,
                 r_tiny=0.1, alpha_deg=15.0, dt=None, checkpoints=None, quality_iterations=50,
                 control_volume=None):
        self.field = field
        self.expression = expression
        self.params = params or {}
        self.period = period
        self.h_L = h_L
        self.r_tiny = r_tiny
        self.alpha_deg = alpha_deg
        self.dt = dt
        self.checkpoints = checkpoints if checkpoints is not None else [
            f * period for f in (0.0, 0.125, 0.25, 0.5, 0.75, 1.0)]
        self.quality_iterations = quality_iterations
        self.control_volume = control_volume


class FixturesConfig:
    def __init__(self, subdivision=3, n_theta=24, n_phi=32):
        self.subdivision = subdivision
        self.n_theta = n_theta
        self.n_phi = n_phi


class Configuration:
    def __init__(self, config_file_path=None, input_path=None, output_path=None):
        if config_file_path is None:
            config_file_path = DEFAULT_CONFIG
        with open(config_file_path, "r") as config_file:
            config_data = yaml.safe_load(config_file) or {}

        self.input_path = input_path
        self.output_path = output_path
        self.base = BaseConfig(**config_data.get('base', {}))
        self.octree = OctreeConfig(**config_data.get('octree', {}))
        self.pasting = PastingConfig(**config_data.get('pasting', {}))
        self.membership = MembershipConfig(**config_data.get('membership', {}))
        self.oracle = OracleConfig(**config_data.get('oracle', {}))
        self.tracking = TrackingConfig(**config_data.get('tracking', {}))
        self.fixtures = FixturesConfig(**config_data.get('fixtures', {}))

    def epsilon_override(self, cli_epsilon=None):
        # flag > environment > file; None means "derive from the inputs"
        if cli_epsilon is not None:
            return float(cli_epsilon)
        env_value = os.environ.get(EPSILON_ENV)
        if env_value:
            return float(env_value)
        if self.base.epsilon is not None:
            return float(self.base.epsilon)
        return None

    def write(self, filename):
        filename = Path(filename)
        if not filename.parent.exists():
            filename.parent.mkdir(parents=True)
        with filename.open("w") as file_handler:
            yaml.dump(
                self, file_handler, allow_unicode=True, default_flow_style=False
            )
