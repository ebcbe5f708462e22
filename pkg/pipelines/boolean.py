import time

from boolean_algebra.operations import complement, difference, join, meet, symmetric_difference
from brep.topology import topology
from dataset.obj_io import write_spadopag
from pipelines.common import Session
from tools.utils import memory_usage

BINARY = {
    "meet": meet,
    "join": join,
    "diff": difference,
    "xor": symmetric_difference,
}


def run_boolean(operation, inputs, output, config_path=None, epsilon=None, seed=None):
    session = Session(config_path, epsilon=epsilon, seed=seed)
    console = session.console
    console.info(f"{operation} started")

    operands = session.load(*inputs)
    start = time.perf_counter()
    if operation == "complement":
        result = complement(operands[0], session.tol, session.rng, session.settings)
    else:
        result = BINARY[operation](operands[0], operands[1], session.tol, session.rng, session.settings)
    elapsed = time.perf_counter() - start

    write_spadopag(result, output)
    console.info(f"{operation} finished in {elapsed:.2f} s: {result.describe()} -> {output}")
    console.info(memory_usage())
    console.report_lines([topology(result).line()])
    return 0
