from typing import Callable, Dict

from services.baseline_solvers import mm_solve, newton_solve
from services.error_handler import ValidationError
from services.weaver_service import alliance, greedy_weaver, weaver

SOLVERS: Dict[str, Callable] = {
    "alliance": alliance,
    "weaver": weaver,
    "greedy": greedy_weaver,
    "greedy_weaver": greedy_weaver,
    "mm": mm_solve,
    "newton": newton_solve,
}


def get_solver(name: str) -> Callable:
    try:
        return SOLVERS[name]
    except KeyError:
        raise ValidationError(f"unknown solver '{name}'; choose one of {', '.join(sorted(SOLVERS))}")
