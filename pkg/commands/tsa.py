import argparse

import numpy as np

from commands.common import add_input_arguments, add_solver_arguments, solver_options
from commands.output import to_json
from models.algebra_models import pattern_bits
from services.algebra import co_thickness, total_thickness
from services.ingest_utils import load_model
from services.slicing import build_tsa, tsa_residual, tsa_slices
from services.solver_registry import get_solver


def register(subparsers) -> None:
    parser = subparsers.add_parser("tsa", help="slicing diagnostics at the solved point")
    add_input_arguments(parser)
    add_solver_arguments(parser)
    parser.set_defaults(handler=cmd_tsa)


def cmd_tsa(args: argparse.Namespace) -> int:
    model, _ = load_model(args.input, args.format)
    solution = get_solver(args.solver)(model, solver_options(args))
    p = solution.p.values
    tau0, tau = solution.thickness.tau0, solution.thickness.tau_vec

    residual = tsa_residual(build_tsa(model), p, tau0, tau)
    slices = tsa_slices(model, p, tau0, tau)
    print(to_json({
        "p": p,
        "tau0": tau0,
        "tau": tau,
        "status": solution.status,
        "residual": residual,
        "residual_norm": float(np.linalg.norm(residual)),
        "slices": [
            {
                "fragments": [[pattern_bits(f.pattern), f.count] for f in piece.fragments],
                "co_thickness": co_thickness(piece, p),
            }
            for piece in slices
        ],
        "total_thickness": total_thickness(slices, p),
    }))
    return 0
