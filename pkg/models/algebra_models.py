from typing import Iterable, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import field_validator, model_validator

from models.count_models import CountModel, FrozenModel, Pattern
from services.error_handler import ValidationError

RefinementVerdict = Literal["refines", "splits", "no"]
RegularityStatus = Literal["regular", "irregular", "size_cap"]


def pattern_bits(pattern: Pattern) -> str:
    return "".join(str(bit) for bit in pattern)


def pattern_mask(pattern: Pattern) -> int:
    """Bit i of the mask is ion i."""
    return sum(1 << i for i, bit in enumerate(pattern) if bit)


class OrderOneFragment(FrozenModel):
    """A single power (δᵀx)^ρ."""

    pattern: Pattern
    count: float

    @field_validator("pattern")
    @classmethod
    def _check_pattern(cls, value):
        if any(bit not in (0, 1) for bit in value) or not any(value):
            raise ValidationError(f"fragment pattern {value} must be a non-zero bit vector")
        return value

    @field_validator("count")
    @classmethod
    def _check_count(cls, value):
        if value == 0 or not np.isfinite(value):
            raise ValidationError("fragment count must be finite and non-zero")
        return value

    @classmethod
    def from_ions(cls, ions: Iterable[int], count: float, n: int) -> "OrderOneFragment":
        members = set(ions)
        return cls(pattern=tuple(int(i in members) for i in range(n)), count=count)

    @property
    def n(self) -> int:
        return len(self.pattern)

    @property
    def mask(self) -> int:
        return pattern_mask(self.pattern)

    @property
    def size(self) -> int:
        return sum(self.pattern)

    @property
    def is_exhaustive(self) -> bool:
        return all(self.pattern)

    @property
    def bits(self) -> str:
        return pattern_bits(self.pattern)


class ProductOfFragments(FrozenModel):
    n: int
    fragments: Tuple[OrderOneFragment, ...] = ()

    @model_validator(mode="after")
    def _check_lengths(self):
        if any(fragment.n != self.n for fragment in self.fragments):
            raise ValidationError(f"every fragment pattern must have length {self.n}")
        return self

    @classmethod
    def from_terms(cls, n: int, terms: Sequence[Tuple[Iterable[int], float]]) -> "ProductOfFragments":
        """Build from (ion indices, count) pairs with 0-based indices."""
        return cls(n=n, fragments=tuple(OrderOneFragment.from_ions(ions, count, n) for ions, count in terms))

    @classmethod
    def from_model(cls, model: CountModel) -> "ProductOfFragments":
        return cls(
            n=model.n,
            fragments=tuple(OrderOneFragment(pattern=p, count=c) for p, c in model.kernel_terms()),
        )

    @property
    def order(self) -> int:
        return len(self.fragments)

    def pattern_sum(self) -> np.ndarray:
        if not self.fragments:
            return np.zeros(self.n, dtype=int)
        return np.asarray([f.pattern for f in self.fragments], dtype=int).sum(axis=0)

    def total_count(self) -> float:
        return float(sum(f.count for f in self.fragments))

    def pattern_set(self) -> frozenset:
        return frozenset(f.pattern for f in self.fragments)

    def collected(self) -> "ProductOfFragments":
        """Equal patterns merged in order of first appearance; cancelled ones dropped."""
        merged = {}
        for fragment in self.fragments:
            merged[fragment.pattern] = merged.get(fragment.pattern, 0.0) + fragment.count
        return ProductOfFragments(
            n=self.n,
            fragments=tuple(
                OrderOneFragment(pattern=p, count=c) for p, c in merged.items() if c != 0
            ),
        )


class CoveringGraph(FrozenModel):
    """Collected patterns with summed counts and their immediate-cover arrows."""

    nodes: Tuple[Tuple[Pattern, float], ...]
    edges: Tuple[Tuple[Pattern, Pattern], ...]

    def weight(self, pattern: Pattern) -> float:
        return dict(self.nodes)[pattern]

    def in_degree(self, pattern: Pattern) -> int:
        return sum(1 for _, head in self.edges if head == pattern)

    def to_dot(self) -> str:
        lines = ["digraph {"]
        for pattern, count in self.nodes:
            weight = int(count) if float(count).is_integer() else repr(float(count))
            lines.append(f'  "{pattern_bits(pattern)}" [w={weight}];')
        for tail, head in self.edges:
            lines.append(f'  "{pattern_bits(tail)}" -> "{pattern_bits(head)}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


class RegularityVerdict(FrozenModel):
    status: RegularityStatus
    negative_terms: int
    unions_checked: int = 0
    witness: Optional[Pattern] = None
    witness_count: Optional[float] = None
    covered_sum: Optional[float] = None
    violations: int = 0

    @property
    def is_regular(self) -> bool:
        return self.status == "regular"
