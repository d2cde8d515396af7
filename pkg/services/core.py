"""Thickness, reconstruction and likelihood arithmetic on a CountModel.

Every function here is pure. Points may be given as ``SimplexPoint`` or
as plain arrays; arrays are used as-is, which gives the unnormalized
evaluation variant (thickness at ``c*x`` is thickness at ``x`` over ``c``).
"""
import logging
from typing import Dict, Iterable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from models.count_models import CountModel, HessianBlock, SimplexPoint, ThicknessProfile
from services.config import SINGULAR_THRESHOLD, ZERO_COORDINATE_FILL
from services.error_handler import SingularEvaluationError, ValidationError

logger = logging.getLogger(__name__)

PointLike = Union[SimplexPoint, Sequence[float], np.ndarray]


def coordinates(x: PointLike) -> np.ndarray:
    if isinstance(x, SimplexPoint):
        return x.values
    return np.asarray(x, dtype=float).ravel()


def _positive(model: CountModel, x: PointLike) -> np.ndarray:
    values = coordinates(x)
    if values.size != model.n:
        raise ValidationError(f"point has {values.size} coordinates, model has {model.n} ions")
    if np.any(values <= 0):
        raise SingularEvaluationError("point has a non-positive coordinate")
    return values


def canonicalize(
    raw_terms: Iterable[Tuple[Sequence[int], float]],
    ions: Optional[Sequence[str]] = None,
) -> CountModel:
    """Collect raw (pattern, count) terms into the canonical (a, b, Δ) form.

    Equal patterns are merged in order of first appearance, cancelled terms
    are dropped and single-ion patterns are folded into the ionic counts.
    """
    merged: Dict[Tuple[int, ...], float] = {}
    magnitude: Dict[Tuple[int, ...], float] = {}
    n = None

    for bits, count in raw_terms:
        key = tuple(int(bit) for bit in bits)
        if n is None:
            n = len(key)
        if len(key) != n:
            raise ValidationError(f"pattern {key} has length {len(key)}, expected {n}")
        if any(bit not in (0, 1) for bit in key):
            raise ValidationError(f"pattern {key} is not a bit vector")
        if not any(key):
            raise ValidationError("a term has an all-zero pattern")
        count = float(count)
        if not np.isfinite(count):
            raise ValidationError(f"count for pattern {key} is not finite")
        merged[key] = merged.get(key, 0.0) + count
        magnitude[key] = magnitude.get(key, 0.0) + abs(count)

    if n is None:
        raise ValidationError("no terms to canonicalize")

    a = np.zeros(n)
    patterns, counts = [], []
    for key, count in merged.items():
        if abs(count) <= 1e-12 * magnitude[key]:
            logger.info(f"Dropping cancelled term {key}")
            continue
        if sum(key) == 1:
            a[key.index(1)] += count
        else:
            patterns.append(key)
            counts.append(count)

    delta = np.asarray(patterns, dtype=int).T if patterns else np.zeros((n, 0), dtype=int)
    return CountModel.from_arrays(a, counts, delta, ions)


def initial_point(model: CountModel) -> np.ndarray:
    """a/Σa with zero coordinates lifted to 1e-6, renormalized."""
    a = model.a_vec
    total = a.sum()
    x = a / total if total > 0 else np.full(model.n, 1.0 / model.n)
    if np.any(x <= 0):
        logger.info("Perturbing zero ionic coordinates of the initial point")
        x = np.where(x > 0, x, ZERO_COORDINATE_FILL)
        x = x / x.sum()
    return x


def linear_forms(model: CountModel, x: PointLike) -> np.ndarray:
    """δ_jᵀx for every pattern."""
    values = coordinates(x)
    forms = model.delta_matrix.T @ values
    if np.any(np.abs(forms) < SINGULAR_THRESHOLD):
        raise SingularEvaluationError("a pattern has (numerically) zero probability mass")
    return forms


def thickness(model: CountModel, x: PointLike) -> np.ndarray:
    return model.b_vec / linear_forms(model, x)


def _eta(model: CountModel, values: np.ndarray, tau: np.ndarray) -> np.ndarray:
    # diag(x)(1 - Δ)τ
    return values * (model.complement @ tau)


def tau0_star(model: CountModel, x: PointLike) -> float:
    """Ionic co-thickness minimizing the sse at x."""
    values = coordinates(x)
    eta = _eta(model, values, thickness(model, x))
    return float(values @ (model.a_vec - eta) / (values @ values))


def reconstruct(model: CountModel, x: PointLike, tau0: float) -> np.ndarray:
    values = coordinates(x)
    return values * (tau0 + model.complement @ thickness(model, x))


def deviation(model: CountModel, x: PointLike, tau0: float) -> np.ndarray:
    return reconstruct(model, x, tau0) - model.a_vec


def sse(model: CountModel, x: PointLike, tau0: float) -> float:
    d = deviation(model, x, tau0)
    return float(d @ d)


def quadratic_coeffs(model: CountModel, x: PointLike) -> Tuple[float, float, float]:
    """(a(x), b(x), c(x)) with sse(τ₀) = a τ₀² + b τ₀ + c."""
    values = coordinates(x)
    residual = _eta(model, values, thickness(model, x)) - model.a_vec
    return (
        float(values @ values),
        float(2.0 * values @ residual),
        float(residual @ residual),
    )


class ReconstructionState(NamedTuple):
    tau: np.ndarray
    tau0: float
    deviation: np.ndarray
    sse: float


def reconstruction_state(model: CountModel, x: PointLike) -> ReconstructionState:
    """Thicknesses, τ₀*, d and sse at x from a single thickness evaluation."""
    values = coordinates(x)
    tau = thickness(model, values)
    eta = _eta(model, values, tau)
    tau0 = float(values @ (model.a_vec - eta) / (values @ values))
    d = values * tau0 + eta - model.a_vec
    return ReconstructionState(tau, tau0, d, float(d @ d))


def thickness_profile(model: CountModel, x: PointLike) -> ThicknessProfile:
    point = x if isinstance(x, SimplexPoint) else SimplexPoint.from_array(x)
    return ThicknessProfile(
        tau0=tau0_star(model, point),
        tau=tuple(float(t) for t in thickness(model, point)),
        evaluated_at=point,
    )


def log_likelihood(model: CountModel, x: PointLike) -> float:
    """Σ a_i ln x_i + Σ b_j ln(δ_jᵀx), normalizing constant dropped."""
    values = _positive(model, x)
    forms = linear_forms(model, values)
    return float(model.a_vec @ np.log(values) + model.b_vec @ np.log(forms))


def score(model: CountModel, x: PointLike) -> np.ndarray:
    """Gradient of the log-likelihood in the chart x_{-n}."""
    values = _positive(model, x)
    gradient = model.a_vec / values + model.delta_matrix @ (model.b_vec / linear_forms(model, values))
    return gradient[:-1] - gradient[-1]


def hessian(model: CountModel, x: PointLike) -> HessianBlock:
    values = _positive(model, x)
    forms = linear_forms(model, values)
    a = model.a_vec

    # δ_ij - δ_nj for i < n
    shifted = model.delta_matrix[:-1, :] - model.delta_matrix[-1, :]
    psi = (shifted * (model.b_vec / forms ** 2)) @ shifted.T

    size = model.n - 1
    matrix = (
        -np.diag(a[:-1] / values[:-1] ** 2)
        - (a[-1] / values[-1] ** 2) * np.ones((size, size))
        - psi
    )
    return HessianBlock.from_arrays(matrix, psi)
