from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.count_models import FrozenModel, HessianBlock, SimplexPoint, ThicknessProfile
from services import config
from services.error_handler import ValidationError

SolverTag = Literal["weaver", "greedy_weaver", "alliance", "mm", "newton", "grid_oracle"]
SolveStatus = Literal["converged", "iteration_cap", "diverged_with_best"]


class SolverOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    sse_tolerance: float = Field(default_factory=lambda: config.DEFAULT_SSE_TOLERANCE, gt=0)
    max_iterations: int = Field(default_factory=lambda: config.DEFAULT_MAX_ITERATIONS, ge=1)
    perturbation_factor: float = Field(default=1.05, gt=1.0)
    bookkeeping: bool = True
    divergence_window: int = Field(default=25, ge=1)
    step_tolerance: float = Field(default=1e-12, gt=0)


class Solution(FrozenModel):
    p: SimplexPoint
    thickness: ThicknessProfile
    sse: float = Field(ge=0)
    sse_trace: Tuple[float, ...]
    iterations: int = Field(ge=0)
    solver: SolverTag
    status: SolveStatus
    tolerance: float
    engines: Tuple[str, ...] = ()
    hessian: Optional[HessianBlock] = None

    @model_validator(mode="after")
    def _check_bookkeeping(self):
        if len(self.sse_trace) != self.iterations:
            raise ValidationError("sse trace length must equal the iteration count")
        if self.status == "converged" and self.sse > self.tolerance:
            raise ValidationError("a converged solution must meet its sse tolerance")
        return self

    @property
    def converged(self) -> bool:
        return self.status == "converged"
