"""Read-only inspection of a stored element: topology, validity, Hasse diagram."""
from brep.topology import topology
from brep.validation import validate
from dataset.obj_io import read_obj, spadopag_from_meshes, write_hasse_dot
from pipelines.common import Session
from tools.errors import NotClosed, NotRealizable


def run_topology(path, config_path=None, epsilon=None, seed=None):
    session = Session(config_path, epsilon=epsilon, seed=seed)
    g, = session.load(path)
    session.console.report_lines([topology(g).line()])
    return 0


def run_validate(path, config_path=None, epsilon=None, seed=None):
    """0 when the file holds a realizable spadopag, 1 with the violations otherwise."""
    session = Session(config_path, epsilon=epsilon, seed=seed)
    console = session.console
    document = read_obj(path)
    tol = session.resolve_tolerance([document])
    if document.sentinel is not None:
        console.report(valid=True, surfaces=0)
        return 0
    try:
        g, _ = spadopag_from_meshes(document.meshes(), tol, session.rng, check=False)
    except (NotClosed, NotRealizable) as error:
        console.report(valid=False, surfaces=len(document.objects))
        return console.fail(error)

    violations = validate(g, tol, session.rng, session.config.base.voxel_resolution)
    if violations:
        console.report(valid=False, surfaces=len(g.surfaces()))
        return console.fail(NotRealizable(violations))
    console.report(valid=True, surfaces=len(g.surfaces()), atoms=len(g.atoms))
    return 0


def run_hasse(path, output, config_path=None, epsilon=None, seed=None):
    session = Session(config_path, epsilon=epsilon, seed=seed)
    g, = session.load(path)
    write_hasse_dot(g, output, session.tol, session.rng)
    session.console.info(f"Hasse diagram written to {output}")
    return 0
