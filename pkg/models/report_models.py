from typing import Any, Dict, Optional, Tuple

from pydantic import Field

from models.algebra_models import RegularityVerdict
from models.count_models import FrozenModel
from models.solver_models import Solution


class RunReport(FrozenModel):
    """Everything one ``solve`` invocation produced.

    ``timings`` and ``input_digest`` go to the diagnostic stream only, so
    ``to_document`` is identical across runs on identical input.
    """

    solution: Solution
    regularity: Optional[RegularityVerdict] = None
    timings: Tuple[Tuple[str, float], ...] = ()
    input_digest: str = Field(default="", max_length=64)

    def to_document(self) -> Dict[str, Any]:
        solution = self.solution
        return {
            "p": list(solution.p.x),
            "tau0": solution.thickness.tau0,
            "tau": list(solution.thickness.tau),
            "sse": solution.sse,
            "iterations": solution.iterations,
            "solver": solution.solver,
            "status": solution.status,
            "regularity": self.regularity.status if self.regularity else None,
        }
