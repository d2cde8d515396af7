import argparse
import sys

from commands import COMMANDS
from logging_config import setup_logging
from services.error_handler import handle_cli_exception

VERSION = "1.0.0"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weaver",
        description="Maximum-likelihood estimation for generalized counting data",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    # Setup structured logging
    level = {0: None, 1: "INFO"}.get(args.verbose, "DEBUG")
    setup_logging(level)

    try:
        return args.handler(args)
    except Exception as e:
        return handle_cli_exception(e, command=args.command)


if __name__ == "__main__":
    sys.exit(main())
