import argparse
import logging

from commands.common import add_input_arguments, add_solver_arguments, regularity_or_cap, solver_options
from commands.output import to_csv, to_json, to_table
from logging_config import StructuredLogger
from models.report_models import RunReport
from services.decorators import PhaseTimer
from services.ingest_utils import load_model
from services.solver_registry import get_solver

logger = logging.getLogger(__name__)
events = StructuredLogger(__name__)

EXIT_CODES = {"converged": 0, "diverged_with_best": 2, "iteration_cap": 3}


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="compute the maximum-likelihood point")
    add_input_arguments(parser)
    add_solver_arguments(parser)
    parser.add_argument("--out", choices=["json", "csv", "table"], default="json")
    parser.set_defaults(handler=cmd_solve)


def cmd_solve(args: argparse.Namespace) -> int:
    timer = PhaseTimer()
    opts = solver_options(args)
    with timer.phase("ingest"):
        model, digest = load_model(args.input, args.format)
    with timer.phase("regularity"):
        verdict = regularity_or_cap(model)
    if verdict.status == "irregular":
        logger.warning("Kernel is not uniformly regular; the supremum may sit on the boundary")

    with timer.phase("solve"):
        solution = get_solver(args.solver)(model, opts)

    report = RunReport(
        solution=solution,
        regularity=verdict,
        timings=tuple(timer.timings.items()),
        input_digest=digest,
    )
    document = report.to_document()
    if args.out == "json":
        print(to_json(document))
    elif args.out == "csv":
        print(to_csv(document, model), end="")
    else:
        print(to_table(model, solution), end="")

    events.info(
        "run finished",
        command="solve",
        input_digest=report.input_digest,
        timings_ms=dict(report.timings),
        engines=solution.engines,
    )
    return EXIT_CODES[solution.status]
