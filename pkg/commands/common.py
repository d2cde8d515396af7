import argparse
import logging

import pydantic

from models.algebra_models import RegularityVerdict
from models.count_models import CountModel, SimplexPoint
from models.solver_models import SolverOptions
from services.error_handler import SizeCapError, ValidationError
from services.ingest_utils import INPUT_FORMATS
from services.regularity import check_uniform_regularity

logger = logging.getLogger(__name__)


def add_input_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", help="input file")
    parser.add_argument(
        "--format",
        choices=sorted(INPUT_FORMATS),
        default="expr",
        help="input file format (default: expr)",
    )


def add_solver_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--solver",
        choices=["alliance", "weaver", "greedy", "mm", "newton"],
        default="alliance",
    )
    parser.add_argument("--tol", type=float, default=None, help="sse tolerance")
    parser.add_argument("--max-iter", type=int, default=None, dest="max_iter")


def solver_options(args: argparse.Namespace) -> SolverOptions:
    overrides = {}
    if args.tol is not None:
        overrides["sse_tolerance"] = args.tol
    if args.max_iter is not None:
        overrides["max_iterations"] = args.max_iter
    try:
        return SolverOptions(**overrides)
    except pydantic.ValidationError as e:
        raise ValidationError(f"bad solver options: {e.errors()[0]['msg']}")


def parse_point(text: str, model: CountModel) -> SimplexPoint:
    try:
        values = [float(part) for part in text.replace(";", ",").split(",") if part.strip()]
    except ValueError:
        raise ValidationError(f"cannot read point '{text}'")
    if len(values) != model.n:
        raise ValidationError(f"point has {len(values)} coordinates, model has {model.n} ions")
    return SimplexPoint(x=tuple(values))


def regularity_or_cap(model: CountModel) -> RegularityVerdict:
    try:
        return check_uniform_regularity(model)
    except SizeCapError as e:
        logger.warning(f"Regularity not checked: {e.message}")
        negative = sum(1 for _, count in model.kernel_terms() if count < 0)
        return RegularityVerdict(status="size_cap", negative_terms=negative)
