import argparse

from commands.common import add_input_arguments
from commands.output import to_json
from models.algebra_models import pattern_bits
from services.error_handler import SizeCapError
from services.ingest_utils import load_model
from services.regularity import check_uniform_regularity

EXIT_CODES = {"regular": 0, "irregular": 4, "size_cap": 5}


def register(subparsers) -> None:
    parser = subparsers.add_parser("check", help="test the kernel for uniform regularity")
    add_input_arguments(parser)
    parser.add_argument("--cap", type=int, default=None, help="maximum number of negative terms to enumerate")
    parser.set_defaults(handler=cmd_check)


def cmd_check(args: argparse.Namespace) -> int:
    model, _ = load_model(args.input, args.format)
    try:
        verdict = check_uniform_regularity(model, cap=args.cap)
    except SizeCapError as e:
        print(to_json({"status": "size_cap", "reason": e.message}))
        return EXIT_CODES["size_cap"]

    print(to_json({
        "status": verdict.status,
        "negative_terms": verdict.negative_terms,
        "unions_checked": verdict.unions_checked,
        "witness": pattern_bits(verdict.witness) if verdict.witness else None,
        "witness_count": verdict.witness_count,
        "covered_sum": verdict.covered_sum,
        "violations": verdict.violations,
    }))
    return EXIT_CODES[verdict.status]
