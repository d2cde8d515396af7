import argparse

from commands.common import add_input_arguments
from services.ingest_utils import load_model
from services.regularity import covering_graph


def register(subparsers) -> None:
    parser = subparsers.add_parser("graph", help="print the covering graph in DOT")
    add_input_arguments(parser)
    parser.set_defaults(handler=cmd_graph)


def cmd_graph(args: argparse.Namespace) -> int:
    model, _ = load_model(args.input, args.format)
    print(covering_graph(model).to_dot(), end="")
    return 0
