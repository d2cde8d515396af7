from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from models.count_models import CountModel, FrozenModel
from services.error_handler import ValidationError


class AstFactor(FrozenModel):
    ions: Tuple[int, ...]
    exponent: float


class ExpressionAst(FrozenModel):
    """Parsed kernel: registered ion names and merged (ion set, exponent) factors."""

    ions: Tuple[str, ...]
    factors: Tuple[AstFactor, ...]

    @model_validator(mode="after")
    def _check_factors(self):
        for factor in self.factors:
            if not factor.ions or factor.exponent == 0:
                raise ValidationError("factors need a non-empty ion set and a non-zero exponent")
            if any(i < 0 or i >= len(self.ions) for i in factor.ions):
                raise ValidationError("factor refers to an unregistered ion")
        return self

    def terms(self) -> List[Tuple[Tuple[int, ...], float]]:
        n = len(self.ions)
        return [
            (tuple(int(i in factor.ions) for i in range(n)), factor.exponent)
            for factor in self.factors
        ]


class MatchRecord(FrozenModel):
    player_i: str
    player_j: str
    score_i: float
    score_j: float

    @model_validator(mode="after")
    def _check_match(self):
        if not self.player_i or not self.player_j:
            raise ValidationError("match players need identifiers")
        if self.player_i == self.player_j:
            raise ValidationError(f"player {self.player_i} cannot play themselves")
        if self.score_i < 0 or self.score_j < 0:
            raise ValidationError("scores must be non-negative")
        if self.score_i == 0 and self.score_j == 0:
            raise ValidationError(f"match {self.player_i}-{self.player_j} has no points")
        return self

    @property
    def total(self) -> float:
        return self.score_i + self.score_j


class ModelDocument(BaseModel):
    """Structured export of a CountModel; delta is row-major, one row per ion."""

    model_config = ConfigDict(frozen=True)

    n: int
    ions: Tuple[str, ...]
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    delta: Tuple[Tuple[int, ...], ...]

    @field_validator("n")
    @classmethod
    def _check_n(cls, value):
        if value < 2:
            raise ValidationError("a model document needs n >= 2")
        return value

    @classmethod
    def from_model(cls, model: CountModel) -> "ModelDocument":
        return cls(n=model.n, ions=model.ions, a=model.a, b=model.b, delta=model.delta)

    def to_model(self) -> CountModel:
        if len(self.ions) != self.n:
            raise ValidationError("document n does not match its ion list")
        return CountModel(ions=self.ions, a=self.a, b=self.b, delta=self.delta)
