import argparse

from commands.common import add_input_arguments, parse_point
from commands.output import to_json
from services.core import reconstruct, reconstruction_state
from services.ingest_utils import load_model


def register(subparsers) -> None:
    parser = subparsers.add_parser("reconstruct", help="fill the play board at a given point")
    add_input_arguments(parser)
    parser.add_argument("--at", required=True, help="comma-separated point, normalized onto the simplex")
    parser.set_defaults(handler=cmd_reconstruct)


def cmd_reconstruct(args: argparse.Namespace) -> int:
    model, _ = load_model(args.input, args.format)
    point = parse_point(args.at, model)
    state = reconstruction_state(model, point)
    print(to_json({
        "p": list(point.x),
        "tau0": state.tau0,
        "tau": state.tau,
        "reconstruction": reconstruct(model, point, state.tau0),
        "deviation": state.deviation,
        "sse": state.sse,
    }))
    return 0
