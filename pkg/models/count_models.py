from functools import cached_property
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from services.config import SIMPLEX_TOLERANCE
from services.error_handler import ValidationError

Pattern = Tuple[int, ...]


def _read_only(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


class FrozenModel(BaseModel):
    """Immutable model compared and hashed on its fields only.

    Cached numpy views live in ``__dict__`` next to the fields, so the
    default pydantic equality (which compares ``__dict__``) cannot be used.
    """

    model_config = ConfigDict(frozen=True)

    def _key(self) -> tuple:
        return tuple(getattr(self, name) for name in type(self).model_fields)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


def default_ion_names(n: int) -> Tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


class CountModel(FrozenModel):
    """Canonical likelihood kernel (a, b, Δ) over ``n`` ions.

    ``delta`` is stored row-major: one row of ``q`` bits per ion.
    """

    ions: Tuple[str, ...]
    a: Tuple[float, ...]
    b: Tuple[float, ...] = ()
    delta: Tuple[Pattern, ...]

    @model_validator(mode="after")
    def _check_canonical(self):
        n = len(self.a)
        q = len(self.b)
        if n < 2:
            raise ValidationError(f"a model needs at least 2 ions, got {n}")
        if len(self.ions) != n or len(set(self.ions)) != n:
            raise ValidationError("ion names must be unique and match the ionic counts")
        if len(self.delta) != n or any(len(row) != q for row in self.delta):
            raise ValidationError(f"pattern matrix must be {n}x{q}")
        if any(bit not in (0, 1) for row in self.delta for bit in row):
            raise ValidationError("pattern matrix entries must be bits")

        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValidationError("counts must be finite")
        if np.any(a < 0):
            raise ValidationError("ionic counts must be non-negative")
        if np.any(b == 0):
            raise ValidationError("unionic counts must be non-zero")

        if q:
            column_sizes = np.asarray(self.delta, dtype=int).sum(axis=0)
            if np.any(column_sizes < 2):
                raise ValidationError("every pattern needs at least two ions")
            present = (a > 0) | np.asarray(self.delta, dtype=int).any(axis=1)
        else:
            present = a > 0
        if not np.all(present):
            missing = [self.ions[i] for i in np.flatnonzero(~present)]
            raise ValidationError(f"ions absent from every term: {', '.join(missing)}")
        return self

    @classmethod
    def from_arrays(cls, a, b, delta, ions: Optional[Sequence[str]] = None) -> "CountModel":
        a = np.asarray(a, dtype=float).ravel()
        b = np.asarray(b, dtype=float).ravel()
        delta = np.asarray(delta, dtype=int).reshape(a.size, b.size)
        return cls(
            ions=tuple(ions) if ions is not None else default_ion_names(a.size),
            a=tuple(float(v) for v in a),
            b=tuple(float(v) for v in b),
            delta=tuple(tuple(int(bit) for bit in row) for row in delta),
        )

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    @cached_property
    def a_vec(self) -> np.ndarray:
        return _read_only(np.asarray(self.a, dtype=float))

    @cached_property
    def b_vec(self) -> np.ndarray:
        return _read_only(np.asarray(self.b, dtype=float))

    @cached_property
    def delta_matrix(self) -> np.ndarray:
        return _read_only(np.asarray(self.delta, dtype=float).reshape(self.n, self.q))

    @cached_property
    def complement(self) -> np.ndarray:
        """``1 - Δ``: ion i is outside pattern j."""
        return _read_only(1.0 - self.delta_matrix)

    def pattern(self, j: int) -> Pattern:
        return tuple(row[j] for row in self.delta)

    def kernel_terms(self) -> Iterator[Tuple[Pattern, float]]:
        """Every non-zero term as (pattern, count), ionic terms first."""
        for i, count in enumerate(self.a):
            if count != 0:
                yield tuple(int(k == i) for k in range(self.n)), count
        for j, count in enumerate(self.b):
            yield self.pattern(j), count

    def scaled(self, k: float) -> "CountModel":
        # model_copy would carry the cached arrays over
        return CountModel(
            ions=self.ions,
            a=tuple(v * k for v in self.a),
            b=tuple(v * k for v in self.b),
            delta=self.delta,
        )

    def total_absolute_count(self) -> float:
        return float(np.abs(self.a_vec).sum() + np.abs(self.b_vec).sum())


class SimplexPoint(FrozenModel):
    """Strictly positive point of the simplex; renormalized on construction."""

    x: Tuple[float, ...]

    @field_validator("x", mode="before")
    @classmethod
    def _normalize(cls, value):
        values = np.asarray(value, dtype=float).ravel()
        if values.size < 2:
            raise ValidationError("a simplex point needs at least 2 coordinates")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise ValidationError("simplex coordinates must be finite and positive")
        values = values / values.sum()
        if abs(values.sum() - 1.0) > SIMPLEX_TOLERANCE:
            values = values / values.sum()
        return tuple(float(v) for v in values)

    @classmethod
    def from_array(cls, values) -> "SimplexPoint":
        return cls(x=values)

    @classmethod
    def uniform(cls, n: int) -> "SimplexPoint":
        return cls(x=np.full(n, 1.0 / n))

    @cached_property
    def values(self) -> np.ndarray:
        return _read_only(np.asarray(self.x, dtype=float))

    @property
    def n(self) -> int:
        return len(self.x)


class ThicknessProfile(FrozenModel):
    tau0: float
    tau: Tuple[float, ...]
    evaluated_at: SimplexPoint

    @cached_property
    def tau_vec(self) -> np.ndarray:
        return _read_only(np.asarray(self.tau, dtype=float))


class HessianBlock(FrozenModel):
    """Hessian of the log-likelihood in the chart x_{-n} = (x_1..x_{n-1})."""

    matrix: Tuple[Tuple[float, ...], ...]
    psi: Tuple[Tuple[float, ...], ...]

    @classmethod
    def from_arrays(cls, matrix: np.ndarray, psi: np.ndarray) -> "HessianBlock":
        return cls(
            matrix=tuple(tuple(float(v) for v in row) for row in matrix),
            psi=tuple(tuple(float(v) for v in row) for row in psi),
        )

    @cached_property
    def H(self) -> np.ndarray:
        return _read_only(np.asarray(self.matrix, dtype=float))

    @cached_property
    def Psi(self) -> np.ndarray:
        return _read_only(np.asarray(self.psi, dtype=float))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.H)
