import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from logging_config import StructuredLogger
from models.count_models import CountModel, SimplexPoint
from models.solver_models import Solution, SolverOptions, SolverTag, SolveStatus
from services.core import (
    PointLike,
    coordinates,
    initial_point,
    reconstruction_state,
    thickness_profile,
)
from services.decorators import log_performance
from services.error_handler import AppError, DivergenceError, SingularEvaluationError, ValidationError
from services.task_queue import background_queue

logger = logging.getLogger(__name__)
events = StructuredLogger(__name__)


class RunRecord(NamedTuple):
    """Outcome of one engine run before it is turned into a Solution"""
    x: np.ndarray
    sse: float
    trace: List[float]
    status: SolveStatus
    engine: str


def build_solution(
    model: CountModel,
    records: Sequence[RunRecord],
    final: RunRecord,
    solver: SolverTag,
    opts: SolverOptions,
    hessian=None,
) -> Solution:
    trace = [value for record in records for value in record.trace]
    point = SimplexPoint.from_array(final.x)
    solution = Solution(
        p=point,
        thickness=thickness_profile(model, point),
        sse=final.sse,
        sse_trace=tuple(trace),
        iterations=len(trace),
        solver=solver,
        status=final.status,
        tolerance=opts.sse_tolerance,
        engines=tuple(record.engine for record in records),
        hessian=hessian,
    )
    events.info(
        "solve finished",
        solver=solver,
        status=solution.status,
        iterations=solution.iterations,
        sse=solution.sse,
    )
    return solution


def start_point(model: CountModel, init: Optional[PointLike]) -> np.ndarray:
    if init is None:
        return initial_point(model)
    values = np.array(coordinates(init), dtype=float)
    if values.size != model.n or np.any(values <= 0):
        raise ValidationError("initial point must be strictly positive with one coordinate per ion")
    return values / values.sum()


class WeaverService:
    """Derivative-free engines driving the reconstruction error to zero"""

    # ------------------------------------------------------------------
    # Weaver: dual fixed-point update
    # ------------------------------------------------------------------
    def run_weaver(self, model: CountModel, opts: SolverOptions, init: Optional[PointLike] = None) -> RunRecord:
        """Iterate x <- a / ((1 - Δ)τ(x) + τ₀(x)); raise DivergenceError when it goes astray."""
        x = start_point(model, init)
        a = model.a_vec
        trace: List[float] = []
        best_x, best_sse = x, np.inf
        previous = np.inf
        growth = 0

        def diverge(reason: str):
            events.debug("weaver diverged", reason=reason, iterations=len(trace))
            best = RunRecord(best_x, best_sse, trace, "diverged_with_best", "weaver")
            raise DivergenceError(f"Weaver diverged: {reason}", best_x=best_x, partial=best)

        for _ in range(opts.max_iterations):
            try:
                state = reconstruction_state(model, x)
            except SingularEvaluationError as e:
                diverge(str(e))

            current = state.sse
            if not np.isfinite(current):
                diverge("sse is not finite")
            trace.append(current)
            if current < best_sse or not opts.bookkeeping:
                best_x, best_sse = x, current

            if current <= opts.sse_tolerance:
                return RunRecord(x, current, trace, "converged", "weaver")

            growth = growth + 1 if current > previous else 0
            if growth >= opts.divergence_window:
                diverge(f"sse grew for {growth} consecutive iterations")
            previous = current

            denominator = model.complement @ state.tau + state.tau0
            if np.any(denominator <= 0):
                diverge("update denominator changed sign")
            updated = a / denominator
            if not np.all(np.isfinite(updated)) or np.any(updated <= 0):
                diverge("a coordinate became non-positive")
            x = updated / updated.sum()

        return RunRecord(best_x, best_sse, trace, "iteration_cap", "weaver")

    @log_performance
    def weaver(self, model: CountModel, opts: SolverOptions = None, init: Optional[PointLike] = None) -> Solution:
        opts = opts or SolverOptions()
        try:
            record = self.run_weaver(model, opts, init)
        except DivergenceError as e:
            record = e.partial
        if not record.trace:
            raise DivergenceError("Weaver could not evaluate its starting point")
        return build_solution(model, [record], record, "weaver", opts)

    # ------------------------------------------------------------------
    # Greedy Weaver: one coordinate per iteration via a fitted parabola
    # ------------------------------------------------------------------
    @staticmethod
    def _renormalize(values: np.ndarray) -> np.ndarray:
        total = values.sum()
        if not np.isfinite(total) or total <= 0:
            raise SingularEvaluationError("greedy step left the simplex")
        return values / total

    @staticmethod
    def _parabola_root(u2: float, u3: float, v1: float, v2: float, v3: float, factor: float) -> float:
        """Zero of the parabola through (0, v1), (u2, v2), (u3, v3)."""
        den = u2 * u2 * u3 - u2 * u3 * u3
        root = np.nan
        if den != 0 and np.isfinite(den):
            alpha = (u3 * (v2 - v1) - u2 * (v3 - v1)) / den
            beta = (-u3 * u3 * (v2 - v1) + u2 * u2 * (v3 - v1)) / den
            gamma = v1
            span = max(u2, u3)
            if abs(alpha) * span * span <= 1e-14 * (abs(beta) * span + abs(gamma)):
                root = -gamma / beta if beta != 0 else np.nan
            else:
                disc = beta * beta - 4.0 * alpha * gamma
                if disc < 0:
                    root = -beta / (2.0 * alpha)
                else:
                    root = (-beta + np.sqrt(disc)) / (2.0 * alpha)
                    if root <= 0:
                        root = (-beta - np.sqrt(disc)) / (2.0 * alpha)
        if not np.isfinite(root) or root <= 0:
            # over-reconstructed coordinates shrink, under-reconstructed grow
            root = u2 * (0.5 if v2 > 0 else factor)
        return float(root)

    def _greedy_step(self, model: CountModel, x: np.ndarray, d: np.ndarray, factor: float) -> np.ndarray:
        i = int(np.argmax(np.abs(d)))

        # perturb to learn the relationship; d is invariant under rescaling x
        trial = x.copy()
        trial[i] = factor * x[i]
        v3 = reconstruction_state(model, self._renormalize(trial)).deviation[i]

        root = self._parabola_root(x[i], trial[i], -model.a_vec[i], d[i], v3, factor)
        updated = x.copy()
        updated[i] = root
        return self._renormalize(updated)

    def run_greedy(self, model: CountModel, opts: SolverOptions, init: Optional[PointLike] = None) -> RunRecord:
        x = start_point(model, init)
        trace: List[float] = []
        best_x, best_sse = x, np.inf

        try:
            for _ in range(opts.max_iterations):
                state = reconstruction_state(model, x)
                if not np.isfinite(state.sse):
                    raise SingularEvaluationError("sse is not finite")
                trace.append(state.sse)
                if state.sse < best_sse or not opts.bookkeeping:
                    best_x, best_sse = x, state.sse
                if state.sse <= opts.sse_tolerance:
                    return RunRecord(x, state.sse, trace, "converged", "greedy_weaver")
                x = self._greedy_step(model, x, state.deviation, opts.perturbation_factor)
        except SingularEvaluationError as e:
            events.debug("greedy weaver left the interior", reason=str(e), iterations=len(trace))
            return RunRecord(best_x, best_sse, trace, "diverged_with_best", "greedy_weaver")

        return RunRecord(best_x, best_sse, trace, "iteration_cap", "greedy_weaver")

    @log_performance
    def greedy_weaver(self, model: CountModel, opts: SolverOptions = None, init: Optional[PointLike] = None) -> Solution:
        opts = opts or SolverOptions()
        record = self.run_greedy(model, opts, init)
        if not record.trace:
            raise DivergenceError("Greedy Weaver could not evaluate its starting point")
        return build_solution(model, [record], record, "greedy_weaver", opts)

    # ------------------------------------------------------------------
    # Alliance: Weaver first, Greedy Weaver from Weaver's best point
    # ------------------------------------------------------------------
    @log_performance
    def alliance(self, model: CountModel, opts: SolverOptions = None, init: Optional[PointLike] = None) -> Solution:
        opts = opts or SolverOptions()
        try:
            record = self.run_weaver(model, opts, init)
            return build_solution(model, [record], record, "alliance", opts)
        except DivergenceError as e:
            first = e.partial
            logger.info(f"Falling back to Greedy Weaver: {e.message}")

        restart = first.x if first.trace else init
        second = self.run_greedy(model, opts, restart)
        records = [first, second]

        if second.status == "converged":
            return build_solution(model, records, second, "alliance", opts)

        candidates = [record for record in records if record.trace]
        if not candidates:
            raise DivergenceError("neither engine could evaluate a point")
        best = min(candidates, key=lambda record: record.sse)
        best = best._replace(status="diverged_with_best")
        return build_solution(model, records, best, "alliance", opts)

    # ------------------------------------------------------------------
    # Multi-start
    # ------------------------------------------------------------------
    def multistart(
        self,
        model: CountModel,
        starts: Sequence[PointLike],
        opts: SolverOptions = None,
        solver: str = "alliance",
    ) -> Solution:
        """Independent solves from several starts on the worker pool; best sse wins."""
        from services.solver_registry import get_solver

        opts = opts or SolverOptions()
        engine = get_solver(solver)
        outcomes = background_queue.map(lambda start: engine(model, opts, start), starts)

        solutions = []
        for outcome in outcomes:
            if outcome["status"] == "completed":
                solutions.append(outcome["result"])
            elif isinstance(outcome.get("error"), AppError):
                logger.info(f"Start discarded: {outcome['error']}")
            else:
                raise outcome.get("error") or RuntimeError("multistart task vanished")
        if not solutions:
            raise DivergenceError("every start failed")

        converged = [s for s in solutions if s.converged]
        return min(converged or solutions, key=lambda s: s.sse)


# Global instance
weaver_service = WeaverService()

weaver = weaver_service.weaver
greedy_weaver = weaver_service.greedy_weaver
alliance = weaver_service.alliance
multistart = weaver_service.multistart
