"""Random model generators for property suites and scale checks."""
import itertools
import logging
from typing import List, Optional, Tuple

import numpy as np

from models.count_models import CountModel, Pattern
from services.error_handler import ValidationError

logger = logging.getLogger(__name__)


def composite_patterns(n: int, include_exhaustive: bool = False) -> List[Pattern]:
    """Every pattern with at least two ions, in lexicographic order."""
    upper = n if include_exhaustive else n - 1
    patterns = []
    for size in range(2, upper + 1):
        for members in itertools.combinations(range(n), size):
            patterns.append(tuple(int(i in members) for i in range(n)))
    return patterns


def _draw_patterns(rng: np.random.Generator, n: int, q: int) -> np.ndarray:
    candidates = composite_patterns(n)
    if q > len(candidates):
        raise ValidationError(f"only {len(candidates)} distinct composite patterns exist for n={n}")
    chosen = rng.choice(len(candidates), size=q, replace=False)
    if q == 0:
        return np.zeros((n, 0), dtype=int)
    return np.asarray([candidates[k] for k in chosen], dtype=int).T


def eigen_grid_model(
    p_star,
    q: int,
    rng: np.random.Generator,
    tau_range: Tuple[float, float] = (1.0, 5.0),
    tau0: Optional[float] = None,
) -> CountModel:
    """Positive-count model whose reconstruction is exact at p_star.

    Counts are b_j = τ_j δ_jᵀp* and a_i = p*_i(τ₀ + Σ_{δ_ij=0} τ_j), so p* is
    the maximum-likelihood point.
    """
    p_star = np.asarray(p_star, dtype=float)
    p_star = p_star / p_star.sum()
    n = p_star.size
    delta = _draw_patterns(rng, n, q)
    tau = rng.uniform(*tau_range, size=q)
    tau0 = rng.uniform(*tau_range) if tau0 is None else tau0

    b = tau * (delta.T @ p_star)
    a = p_star * (tau0 + (1 - delta) @ tau)
    return CountModel.from_arrays(a, b, delta)


def random_count_model(
    rng: np.random.Generator,
    max_ions: int = 5,
    max_terms: int = 6,
    ionic_range: Tuple[float, float] = (1.0, 100.0),
    unionic_range: Tuple[float, float] = (-20.0, 100.0),
) -> CountModel:
    n = int(rng.integers(2, max_ions + 1))
    available = len(composite_patterns(n))
    q = int(rng.integers(0, min(max_terms, available) + 1))
    delta = _draw_patterns(rng, n, q)
    a = rng.uniform(*ionic_range, size=n)
    b = rng.uniform(*unionic_range, size=q)
    b = np.where(b == 0, 1.0, b)
    return CountModel.from_arrays(a, b, delta)


def random_regular_model(rng: np.random.Generator, max_tries: int = 1000, **kwargs) -> CountModel:
    """Draw random models until one passes the uniform-regularity criterion."""
    from services.regularity import check_uniform_regularity

    for _ in range(max_tries):
        model = random_count_model(rng, **kwargs)
        if check_uniform_regularity(model).is_regular:
            return model
    raise ValidationError(f"no uniformly regular model found in {max_tries} draws")
