import logging
from typing import List

import numpy as np

from logging_config import StructuredLogger
from models.algebra_models import OrderOneFragment, ProductOfFragments
from models.count_models import CountModel
from models.slicing_models import ProbeReport, TsaSystem
from models.solver_models import SolverOptions
from services.error_handler import AppError, ValidationError
from services.synthetic_data import random_regular_model

logger = logging.getLogger(__name__)
events = StructuredLogger(__name__)


def build_tsa(model: CountModel) -> TsaSystem:
    return TsaSystem(model=model)


def tsa_residual(sys: TsaSystem, p, tau0: float, tau) -> np.ndarray:
    """Count minus reconstruction for every row; zero iff (p, τ₀, τ) is an eigenreconstruction."""
    model = sys.model
    p = np.asarray(p, dtype=float).ravel()
    tau = np.asarray(tau, dtype=float).ravel()
    if p.size != model.n or tau.size != model.q:
        raise ValidationError("unknowns do not match the system layout")

    unionic = model.b_vec - tau * (model.delta_matrix.T @ p)
    ionic = model.a_vec - p * (tau0 + model.complement @ tau)
    return np.concatenate([unionic, ionic, [1.0 - p.sum()]])


def dual_point(model: CountModel, tau0: float, tau) -> np.ndarray:
    """p from the ion block given the thicknesses, normalized."""
    denominator = tau0 + model.complement @ np.asarray(tau, dtype=float)
    if np.any(denominator <= 0) or np.any(model.a_vec <= 0):
        raise ValidationError("thicknesses do not determine a positive point")
    p = model.a_vec / denominator
    return p / p.sum()


def tsa_slices(model: CountModel, p, tau0: float, tau) -> List[ProductOfFragments]:
    """The ionic slice e₀ and, per pattern, the composite slice e_j completed with ions."""
    p = np.asarray(p, dtype=float).ravel()
    tau = np.asarray(tau, dtype=float).ravel()
    n = model.n

    def ion(i: int, count: float) -> OrderOneFragment:
        return OrderOneFragment.from_ions([i], count, n)

    if tau0 == 0 or np.any(p <= 0) or np.any(tau == 0):
        raise ValidationError("slices need a positive point and non-zero thicknesses")

    slices = [ProductOfFragments(n=n, fragments=tuple(ion(i, tau0 * p[i]) for i in range(n)))]
    for j in range(model.q):
        pattern = model.pattern(j)
        fragments = [OrderOneFragment(pattern=pattern, count=tau[j] * float(np.dot(pattern, p)))]
        fragments += [ion(i, tau[j] * p[i]) for i in range(n) if not pattern[i]]
        slices.append(ProductOfFragments(n=n, fragments=tuple(fragments)))
    return slices


def fc_probe(count: int, rng: np.random.Generator, opts: SolverOptions = None, threshold: float = 1e-12) -> ProbeReport:
    """Solve random uniformly-regular positive models; record those with no eigenestimate found."""
    from services.weaver_service import alliance

    opts = opts or SolverOptions()
    failures = []
    for _ in range(count):
        model = random_regular_model(rng, unionic_range=(1.0, 100.0))
        try:
            solution = alliance(model, opts)
            found = solution.sse <= threshold
        except AppError as e:
            logger.info(f"Probe solve raised {type(e).__name__}: {e.message}")
            found = False
        if not found:
            failures.append(model)
            events.warning("no eigenestimate found", a=model.a, b=model.b, delta=model.delta)
    return ProbeReport(models_tried=count, failures=tuple(failures))
