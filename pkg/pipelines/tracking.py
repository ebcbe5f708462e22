import datetime
from pathlib import Path

from brep.surface import GElement
from dataset.obj_io import write_spadopag
from pipelines.common import Session
from tracking.fields import VelocityField
from tracking.mars import MarsParams, local_solutions, track
from tools.utils import memory_usage, plot_tracking_history


def _apply_overrides(tracking, overrides):
    for key, value in overrides.items():
        if value is not None:
            setattr(tracking, key, value)


def run_tracking(path, output_path, config_path=None, epsilon=None, seed=None, **overrides):
    """Track the element in `path` through the configured flow.

    `overrides` replace entries of the `tracking` configuration section
    (field, period, h_L, r_tiny, alpha_deg, dt, checkpoints, control_volume).
    """
    output_folder = Path(output_path) / ("tracking_" + datetime.datetime.now().strftime("%Y%m%d%H%M%S"))
    session = Session(config_path, output_path=output_path, epsilon=epsilon, seed=seed,
                      log_path=output_folder)
    console = session.console
    tracking = session.config.tracking
    _apply_overrides(tracking, overrides)
    console.info("Tracking started at", datetime.datetime.now())

    g, = session.load(path)
    if not g.is_spadopag:
        console.error("Nothing to track in", path)
        return 1
    field = VelocityField.named(tracking.field, tracking.params, tracking.period, tracking.expression)
    params = MarsParams.from_degrees(tracking.h_L, tracking.r_tiny, tracking.alpha_deg, tracking.dt)
    console.info(f"field={tracking.field} T={tracking.period} h_L={params.h_L} r_tiny={params.r_tiny} "
                 f"alpha={tracking.alpha_deg} dt={params.time_step}")

    states, history = track(g, field, params, tracking.checkpoints, session.rng, console,
                            tracking.quality_iterations, session.config.base.voxel_resolution)

    for time, state in states.items():
        write_spadopag(state, output_folder / f"checkpoint_t{time:.4f}.obj")
    history.to_csv(output_folder / "history.csv", index=False)
    plot_tracking_history(history, output_folder / "history.png")
    session.config.write(output_folder / "config.yaml")
    for line in history.to_string(index=False).splitlines():
        console.info(line)

    if tracking.control_volume:
        final = states[max(states)]
        _write_local(final, tracking.control_volume, output_folder / "local", session)
    console.info(memory_usage())
    return 0


def _write_local(g: GElement, h, folder, session):
    solutions = local_solutions(g, h, session.tol, session.rng, session.settings)
    for (i, j, k), local in sorted(solutions.items()):
        write_spadopag(local, Path(folder) / f"cell_{i}_{j}_{k}.obj")
    session.console.info(f"{len(solutions)} non-empty cells of size {h} written to {folder}")
    return solutions


def run_local(path, h, output_path, config_path=None, epsilon=None, seed=None):
    session = Session(config_path, epsilon=epsilon, seed=seed)
    g, = session.load(path)
    solutions = _write_local(g, float(h), output_path, session)
    session.console.report(cells=len(solutions))
    return 0
