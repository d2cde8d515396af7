from typing import Tuple

import numpy as np

from models.count_models import CountModel, FrozenModel
from services.error_handler import ValidationError


class TsaSystem(FrozenModel):
    """Polynomial system of the trivial slicing algorithm.

    Unknowns are laid out as (p: n, tau0: 1, tau: q); residual rows are the q
    unionic rows, then the n ionic rows, then the simplex row.
    """

    model: CountModel

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def q(self) -> int:
        return self.model.q

    @property
    def unknowns(self) -> int:
        return self.n + self.q + 1

    @property
    def residual_dimension(self) -> int:
        return self.q + self.n + 1

    def split(self, vector) -> Tuple[np.ndarray, float, np.ndarray]:
        vector = np.asarray(vector, dtype=float).ravel()
        if vector.size != self.unknowns:
            raise ValidationError(f"expected {self.unknowns} unknowns, got {vector.size}")
        return vector[: self.n], float(vector[self.n]), vector[self.n + 1:]


class ProbeReport(FrozenModel):
    models_tried: int
    failures: Tuple[CountModel, ...] = ()

    @property
    def failure_rate(self) -> float:
        return len(self.failures) / self.models_tried if self.models_tried else 0.0
