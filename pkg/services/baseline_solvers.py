import logging
from typing import Iterator, List, Optional

import numpy as np
from scipy.optimize import bisect

from models.count_models import CountModel, SimplexPoint
from models.solver_models import Solution, SolverOptions
from services.core import (
    PointLike,
    hessian,
    linear_forms,
    reconstruction_state,
    score,
)
from services.decorators import log_performance
from services.error_handler import (
    DivergenceError,
    SingularEvaluationError,
    SingularHessianError,
    SizeCapError,
    ValidationError,
)
from services.weaver_service import RunRecord, build_solution, start_point

logger = logging.getLogger(__name__)

MAX_GRID_IONS = 4
MAX_GRID_RESOLUTION = 200
MAX_STEP_HALVINGS = 60
HESSIAN_CONDITION_LIMIT = 1e14


def _stalled(engine: str, x, sse: float, trace) -> RunRecord:
    # a stalled step is not convergence: converged always means sse <= tolerance
    logger.info(f"{engine} stopped moving at sse={sse:.3e} above tolerance")
    return RunRecord(x, sse, trace, "diverged_with_best", engine)


class BaselineSolvers:
    """Classical baselines: MM fixed point, Newton-Raphson, exhaustive lattice search"""

    # ------------------------------------------------------------------
    # MM fixed point
    # ------------------------------------------------------------------
    @staticmethod
    def _normalizer(a: np.ndarray, subtracted: np.ndarray) -> float:
        """λ with Σ a_i / (λ - s_i) = 1, bracketed above max s_i."""
        top = float(np.max(subtracted))
        total = float(a.sum())
        low = top + 1e-12 * max(1.0, abs(top), total)
        high = top + total

        def excess(lam):
            return float(np.sum(a / (lam - subtracted)) - 1.0)

        f_low, f_high = excess(low), excess(high)
        if not (np.isfinite(f_low) and np.isfinite(f_high)) or f_low <= 0 or f_high > 0:
            raise DivergenceError("MM normalizer could not be bracketed")
        return bisect(excess, low, high, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)

    def run_mm(self, model: CountModel, opts: SolverOptions, init: Optional[PointLike] = None) -> RunRecord:
        a = model.a_vec
        if np.any(a <= 0):
            raise ValidationError("MM requires every ionic count to be positive")

        x = start_point(model, init)
        trace: List[float] = []
        best_x, best_sse = x, np.inf
        step = np.inf

        try:
            for _ in range(opts.max_iterations):
                state = reconstruction_state(model, x)
                trace.append(state.sse)
                if state.sse < best_sse or not opts.bookkeeping:
                    best_x, best_sse = x, state.sse
                if state.sse <= opts.sse_tolerance:
                    return RunRecord(x, state.sse, trace, "converged", "mm")
                if step <= opts.step_tolerance:
                    return _stalled("mm", best_x, best_sse, trace)

                subtracted = model.delta_matrix @ (model.b_vec / linear_forms(model, x))
                lam = self._normalizer(a, subtracted)
                updated = a / (lam - subtracted)
                updated = updated / updated.sum()
                step = float(np.max(np.abs(updated - x)))
                x = updated
        except (DivergenceError, SingularEvaluationError) as e:
            logger.info(f"MM diverged: {e}")
            if not trace:
                raise
            return RunRecord(best_x, best_sse, trace, "diverged_with_best", "mm")

        return RunRecord(best_x, best_sse, trace, "iteration_cap", "mm")

    @log_performance
    def mm_solve(self, model: CountModel, opts: SolverOptions = None, init: Optional[PointLike] = None) -> Solution:
        opts = opts or SolverOptions()
        record = self.run_mm(model, opts, init)
        return build_solution(model, [record], record, "mm", opts)

    # ------------------------------------------------------------------
    # Newton-Raphson in the chart x_{-n}
    # ------------------------------------------------------------------
    @staticmethod
    def _newton_direction(model: CountModel, x: np.ndarray) -> np.ndarray:
        block = hessian(model, x)
        gradient = score(model, x)
        if np.linalg.cond(block.H) > HESSIAN_CONDITION_LIMIT:
            raise SingularHessianError("Hessian is numerically singular")
        try:
            step = np.linalg.solve(block.H, -gradient)
        except np.linalg.LinAlgError as e:
            raise SingularHessianError(f"Hessian solve failed: {e}")
        # the last coordinate absorbs the chart step
        return np.append(step, -step.sum())

    def run_newton(self, model: CountModel, opts: SolverOptions, init: Optional[PointLike] = None) -> RunRecord:
        x = start_point(model, init)
        trace: List[float] = []
        best_x, best_sse = x, np.inf
        step = np.inf

        for _ in range(opts.max_iterations):
            state = reconstruction_state(model, x)
            trace.append(state.sse)
            if state.sse < best_sse or not opts.bookkeeping:
                best_x, best_sse = x, state.sse
            if state.sse <= opts.sse_tolerance:
                return RunRecord(x, state.sse, trace, "converged", "newton")
            if step <= opts.step_tolerance:
                return _stalled("newton", best_x, best_sse, trace)

            direction = self._newton_direction(model, x)
            t = 1.0
            for _ in range(MAX_STEP_HALVINGS):
                if np.all(x + t * direction > 0):
                    break
                t *= 0.5
            else:
                return RunRecord(best_x, best_sse, trace, "diverged_with_best", "newton")

            updated = x + t * direction
            updated = updated / updated.sum()
            step = float(np.max(np.abs(updated - x)))
            x = updated

        return RunRecord(best_x, best_sse, trace, "iteration_cap", "newton")

    @log_performance
    def newton_solve(self, model: CountModel, opts: SolverOptions = None, init: Optional[PointLike] = None) -> Solution:
        """Newton iterations; the Solution carries the Hessian at the final point."""
        opts = opts or SolverOptions()
        record = self.run_newton(model, opts, init)
        return build_solution(model, [record], record, "newton", opts, hessian=hessian(model, record.x))

    # ------------------------------------------------------------------
    # Exhaustive lattice oracle
    # ------------------------------------------------------------------
    @staticmethod
    def _lattice_chunks(n: int, total: int) -> Iterator[np.ndarray]:
        """Interior compositions of ``total`` into ``n`` positive parts, in chunks."""
        if n == 2:
            first = np.arange(1, total)
            yield np.column_stack([first, total - first])
        elif n == 3:
            i, j = np.meshgrid(np.arange(1, total), np.arange(1, total), indexing="ij")
            keep = i + j < total
            i, j = i[keep], j[keep]
            yield np.column_stack([i, j, total - i - j])
        else:
            for first in range(1, total - n + 2):
                for chunk in BaselineSolvers._lattice_chunks(n - 1, total - first):
                    yield np.column_stack([np.full(len(chunk), first), chunk])

    @log_performance
    def grid_oracle(self, model: CountModel, resolution: int) -> SimplexPoint:
        """Lattice point with the largest log-likelihood; a test oracle."""
        if model.n > MAX_GRID_IONS:
            raise SizeCapError(f"grid oracle supports at most {MAX_GRID_IONS} ions, got {model.n}")
        if resolution > MAX_GRID_RESOLUTION:
            raise SizeCapError(f"grid resolution is capped at {MAX_GRID_RESOLUTION}, got {resolution}")
        if resolution < model.n:
            raise ValidationError("grid resolution must be at least the number of ions")

        best_value, best_point = -np.inf, None
        for chunk in self._lattice_chunks(model.n, resolution):
            if not len(chunk):
                continue
            points = chunk / resolution
            with np.errstate(divide="ignore", invalid="ignore"):
                values = np.log(points) @ model.a_vec + np.log(points @ model.delta_matrix) @ model.b_vec
            values = np.where(np.isfinite(values), values, -np.inf)
            k = int(np.argmax(values))
            if values[k] > best_value:
                best_value, best_point = values[k], points[k]

        if best_point is None:
            raise ValidationError("no lattice point has a finite likelihood")
        logger.debug(f"grid oracle best log-likelihood {best_value:.6f} at {best_point}")
        return SimplexPoint.from_array(best_point)


# Global instance
baseline_solvers = BaselineSolvers()

mm_solve = baseline_solvers.mm_solve
newton_solve = baseline_solvers.newton_solve
grid_oracle = baseline_solvers.grid_oracle
