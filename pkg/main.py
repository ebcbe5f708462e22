import argparse
import sys

from data_preparation.fixtures import prepare_fixtures
from pipelines.boolean import run_boolean
from pipelines.inspection import run_hasse, run_topology, run_validate
from pipelines.oracle import run_oracle
from pipelines.tracking import run_local, run_tracking
from tools.errors import YinSetError


def add_arguments(obj):
    obj.add_argument(
        "-c",
        "--configuration_file",
        type=str,
        default=None,
        help="Path to the configuration file 'config.yaml' (defaults to configs/config.yaml)",
    )
    obj.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="Geometric tolerance; overrides YINSET_EPSILON and the configuration.",
    )
    obj.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Seed of every randomized step.",
    )


def add_output(obj, help_text="Output .obj file."):
    obj.add_argument("-o", "--output", required=True, type=str, help=help_text)


def _checkpoints(text):
    return [float(value) for value in text.split(",") if value.strip()]


def main(args=None):

    parser = argparse.ArgumentParser(description="Boolean operations on 3D Yin sets")
    subparsers = parser.add_subparsers()

    for name, help_text in (("meet", "Intersection of two regions"),
                            ("join", "Union of two regions"),
                            ("diff", "Difference A minus B"),
                            ("xor", "Symmetric difference")):
        parser_binary = subparsers.add_parser(name, help=help_text)
        parser_binary.add_argument("a", type=str)
        parser_binary.add_argument("b", type=str)
        add_output(parser_binary)
        add_arguments(parser_binary)
        parser_binary.set_defaults(func=call_boolean, operation=name)

    # complement
    parser_complement = subparsers.add_parser("complement", help="Complement of a region")
    parser_complement.add_argument("a", type=str)
    add_output(parser_complement)
    add_arguments(parser_complement)
    parser_complement.set_defaults(func=call_complement)

    # topology
    parser_topology = subparsers.add_parser("topology", help="Components and holes of a region")
    parser_topology.add_argument("a", type=str)
    add_arguments(parser_topology)
    parser_topology.set_defaults(func=call_topology)

    # validate
    parser_validate = subparsers.add_parser("validate", help="Check that a file holds a valid region")
    parser_validate.add_argument("a", type=str)
    add_arguments(parser_validate)
    parser_validate.set_defaults(func=call_validate)

    # hasse
    parser_hasse = subparsers.add_parser("hasse", help="Inclusion Hasse diagram as DOT")
    parser_hasse.add_argument("a", type=str)
    add_output(parser_hasse, "Output .dot file.")
    add_arguments(parser_hasse)
    parser_hasse.set_defaults(func=call_hasse)

    # tracking
    parser_track = subparsers.add_parser("track", help="Track a region through a velocity field")
    parser_track.add_argument("a", type=str)
    parser_track.add_argument("--field", type=str, default=None,
                              help="deformation, translation, rotation or custom")
    parser_track.add_argument("--expression", type=str, default=None,
                              help="Custom field 'u; v; w' in x, y, z, t")
    parser_track.add_argument("--T", dest="period", type=float, default=None)
    parser_track.add_argument("--hL", dest="h_L", type=float, default=None)
    parser_track.add_argument("--rtiny", dest="r_tiny", type=float, default=None)
    parser_track.add_argument("--alpha", dest="alpha_deg", type=float, default=None,
                              help="Minimum interior angle in degrees")
    parser_track.add_argument("--dt", type=float, default=None)
    parser_track.add_argument("--checkpoints", type=_checkpoints, default=None,
                              help="Comma separated checkpoint times")
    parser_track.add_argument("--control-volume", dest="control_volume", type=float, default=None,
                              help="Also intersect the final state with a grid of this spacing")
    add_output(parser_track, "Output folder.")
    add_arguments(parser_track)
    parser_track.set_defaults(func=call_track)

    # oracle
    parser_oracle = subparsers.add_parser("oracle", help="Pointwise check of a stored result")
    parser_oracle.add_argument("--op", required=True,
                               choices=["meet", "join", "complement", "diff", "xor"])
    parser_oracle.add_argument("inputs", nargs="+", type=str,
                               help="A B RESULT (A RESULT for the complement)")
    parser_oracle.add_argument("-n", "--samples", type=int, default=None)
    parser_oracle.add_argument("--csv", type=str, default=None, help="Write the report to a CSV file")
    add_arguments(parser_oracle)
    parser_oracle.set_defaults(func=call_oracle)

    # local solutions
    parser_local = subparsers.add_parser("local", help="Meet a region with every cell of a grid")
    parser_local.add_argument("a", type=str)
    parser_local.add_argument("--h", type=float, required=True, help="Grid spacing")
    add_output(parser_local, "Output folder.")
    add_arguments(parser_local)
    parser_local.set_defaults(func=call_local)

    # fixtures
    parser_fixtures = subparsers.add_parser("fixtures", help="Write the desk-scale test scenes")
    add_output(parser_fixtures, "Output folder.")
    add_arguments(parser_fixtures)
    parser_fixtures.set_defaults(func=call_fixtures)

    if len(sys.argv) == 1 and args is None:
        # Show help if no args provided
        parser.print_help(sys.stderr)
        sys.exit(2)
    args = parser.parse_args(args)
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 2
    try:
        return args.func(args)
    except YinSetError as error:
        print(f"error: {error.kind}: {error}", file=sys.stderr)
        return error.exit_code
    except OSError as error:
        print(f"error: {type(error).__name__}: {error}", file=sys.stderr)
        return 2
    except Exception as error:  # noqa: BLE001
        print(f"error: {type(error).__name__}: {error}", file=sys.stderr)
        return 3


def _common(args):
    return dict(config_path=args.configuration_file, epsilon=args.epsilon, seed=args.seed)


def call_boolean(args):
    return run_boolean(args.operation, [args.a, args.b], args.output, **_common(args))


def call_complement(args):
    return run_boolean("complement", [args.a], args.output, **_common(args))


def call_topology(args):
    return run_topology(args.a, **_common(args))


def call_validate(args):
    return run_validate(args.a, **_common(args))


def call_hasse(args):
    return run_hasse(args.a, args.output, **_common(args))


def call_track(args):
    overrides = dict(field=args.field, expression=args.expression, period=args.period, h_L=args.h_L,
                     r_tiny=args.r_tiny, alpha_deg=args.alpha_deg, dt=args.dt,
                     checkpoints=args.checkpoints, control_volume=args.control_volume)
    return run_tracking(args.a, args.output, **_common(args), **overrides)


def call_oracle(args):
    expected = 2 if args.op == "complement" else 3
    if len(args.inputs) != expected:
        print(f"error: ParseError: oracle --op {args.op} takes {expected} files", file=sys.stderr)
        return 2
    return run_oracle(args.op, args.inputs, args.samples, csv_path=args.csv, **_common(args))


def call_local(args):
    return run_local(args.a, args.h, args.output, **_common(args))


def call_fixtures(args):
    prepare_fixtures(args.configuration_file, args.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
