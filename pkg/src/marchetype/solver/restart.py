"""Restarted PDHG: the two-loop scheme with normalized-duality-gap restarts.

The inner loop runs PDHG steps and keeps uniform running averages. At gap
evaluations the averaged point is tested for termination and for the restart
condition

    ρ_{‖z̄ − z^{n,0}‖∞}(z̄) <= 0.5 · ρ_{‖z^{n,0} − z^{n−1,0}‖∞}(z^{n,0})

or a restart is forced once the inner loop reaches ``max_inner``.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Protocol

import numpy as np

from ..lp import StandardLP
from ..sparse import RescalingDiagonals, ruiz_rescale, spectral_norm_estimate
from .pdhg import KKTResiduals, SaddleState, kkt_residuals, normalized_duality_gap, pdhg_step
from .problem import SaddleProblem

logger = logging.getLogger(__name__)

RESTART_DECAY = 0.5


class SolverError(RuntimeError):
    """Raised when the solver cannot start (e.g. an unusable problem)."""

    pass


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    ITERATION_LIMIT = "iteration_limit"
    TIME_LIMIT = "time_limit"
    NUMERICAL_FAILURE = "numerical_failure"


class RestartReason(Enum):
    INITIAL = "initial"
    GAP = "gap"
    MAX_INNER = "max_inner"


@dataclass
class SolverConfig:
    """Configuration for restarted PDHG.

    Attributes:
        tolerance: ε for all three relative KKT residuals.
        max_outer: Cap on outer loops (restarts + 1).
        max_inner: Forced-restart length; None means max(4·(W+L), 256).
        max_total_iterations: Cap on PDHG steps across all loops.
        step_safety: η = τ = step_safety / ‖G‖₂ estimate.
        rescale: Run Ruiz equilibration first.
        power_iterations: Power-iteration count for the norm estimate.
        seed: Seed of the power-iteration start vector.
        restart: False runs plain PDHG with one never-restarted average.
        log_every: Emit a progress log line every this many iterations.
        time_limit: Wall-clock cap in seconds.
        check_current_iterate: Also accept the current iterate at a gap
            evaluation when it satisfies the tolerance.
    """

    tolerance: float = 1e-6
    max_outer: int = 100_000
    max_inner: int | None = None
    max_total_iterations: int = 1_000_000
    step_safety: float = 0.9
    rescale: bool = True
    power_iterations: int = 100
    seed: int = 0
    restart: bool = True
    log_every: int | None = None
    time_limit: float | None = None
    check_current_iterate: bool = True

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.step_safety < 1:
            raise ValueError("step_safety must lie in (0, 1)")
        if self.max_outer < 1 or self.max_total_iterations < 1:
            raise ValueError("max_outer and max_total_iterations must be at least 1")
        if self.max_inner is not None and self.max_inner < 1:
            raise ValueError("max_inner must be at least 1")
        if self.power_iterations < 1:
            raise ValueError("power_iterations must be at least 1")
        if self.log_every is not None and self.log_every < 1:
            raise ValueError("log_every must be at least 1")
        if self.time_limit is not None and not self.time_limit > 0:
            raise ValueError("time_limit must be positive")

    def inner_limit(self, n_primal: int, n_dual: int) -> int:
        if self.max_inner is not None:
            return self.max_inner
        return max(4 * (n_primal + n_dual), 256)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tolerance": self.tolerance,
            "max_outer": self.max_outer,
            "max_inner": self.max_inner,
            "max_total_iterations": self.max_total_iterations,
            "step_safety": self.step_safety,
            "rescale": self.rescale,
            "power_iterations": self.power_iterations,
            "seed": self.seed,
            "restart": self.restart,
            "log_every": self.log_every,
            "time_limit": self.time_limit,
            "check_current_iterate": self.check_current_iterate,
        }


@dataclass
class SolveReport:
    """Outcome of a solve, in the caller's (unscaled) coordinates."""

    status: SolveStatus
    primal: np.ndarray
    dual: np.ndarray
    objective: float
    primal_residual: float
    dual_residual: float
    relative_gap: float
    iterations: int
    restarts: int
    per_restart_gap: list[float] = field(default_factory=list)
    restart_reasons: list[RestartReason] = field(default_factory=list)
    wall_time: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        """Solution JSON. Carries no timing."""
        return {
            "status": self.status.value,
            "objective": self.objective,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "relative_gap": self.relative_gap,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "per_restart_gap": self.per_restart_gap,
            "restart_reasons": [r.value for r in self.restart_reasons],
            "primal": self.primal.tolist(),
            "dual": self.dual.tolist(),
        }


class SolveObserver(Protocol):
    """Receives gap evaluations and restarts as they happen."""

    def on_evaluation(self, total_iter: int, outer: int, inner: int, residuals: KKTResiduals,
                      rho: float, objective: float, elapsed_s: float) -> None: ...

    def on_restart(self, outer: int, inner: int, reason: RestartReason, gap: float) -> None: ...


@dataclass
class LoopResult:
    """What the two-loop runner hands back (in the runner's coordinates)."""

    status: SolveStatus
    x: np.ndarray
    y: np.ndarray
    residuals: KKTResiduals
    iterations: int
    restarts: int
    per_restart_gap: list[float]
    restart_reasons: list[RestartReason]
    trajectory: list[tuple[int, np.ndarray, np.ndarray]] = field(default_factory=list)


Evaluator = Callable[[np.ndarray, np.ndarray], tuple[KKTResiduals, float]]


def _next_evaluation(t: int) -> int:
    return t + max(1, math.ceil(t / 8))


def _finite(state: SaddleState) -> bool:
    return bool(np.all(np.isfinite(state.x)) and np.all(np.isfinite(state.y)))


class RestartedPDHG:
    """The two-loop runner, independent of where the saddle problem came from.

    ``evaluate(x, y)`` returns the residuals used for termination and the
    objective to report; for LPs it maps back to unscaled coordinates first.
    """

    def __init__(
        self,
        problem: SaddleProblem,
        eta: float,
        tau: float,
        config: SolverConfig,
        evaluate: Evaluator,
        observer: SolveObserver | None = None,
        record_trajectory: bool = False,
    ) -> None:
        if eta <= 0 or tau <= 0:
            raise ValueError("step sizes must be positive")
        self.problem = problem
        self.eta = eta
        self.tau = tau
        self.config = config
        self.evaluate = evaluate
        self.observer = observer
        self.record_trajectory = record_trajectory
        self.max_inner = config.inner_limit(problem.n_primal, problem.n_dual)

    def _gap(self, x: np.ndarray, y: np.ndarray, r: float) -> float:
        return normalized_duality_gap(self.problem, x, y, r)

    def run(self, x0: np.ndarray, y0: np.ndarray) -> LoopResult:
        config = self.config
        start = time.perf_counter()
        state = SaddleState.start(x0, y0)

        r0 = max(1.0, float(np.max(np.abs(np.concatenate((state.x, state.y))), initial=0.0)))
        reference = self._gap(state.x, state.y, r0)
        gaps = [reference]
        reasons = [RestartReason.INITIAL]
        trajectory: list[tuple[int, np.ndarray, np.ndarray]] = []

        total = 0
        restarts = 0
        next_eval = 1
        last_finite = state

        def finish(status: SolveStatus, x: np.ndarray, y: np.ndarray,
                   res: KKTResiduals) -> LoopResult:
            return LoopResult(status, x, y, res, total, restarts, gaps, reasons, trajectory)

        initial, _ = self.evaluate(state.x, state.y)
        if initial.within(config.tolerance):
            return finish(SolveStatus.OPTIMAL, state.x, state.y, initial)

        while True:
            state = pdhg_step(state, self.problem, self.eta, self.tau)
            total += 1
            t = state.inner_count
            if not _finite(state):
                logger.warning("non-finite iterate at iteration %d", total)
                res, _ = self.evaluate(last_finite.x_avg, last_finite.y_avg)
                return finish(SolveStatus.NUMERICAL_FAILURE, last_finite.x_avg,
                              last_finite.y_avg, res)
            last_finite = state
            if self.record_trajectory:
                trajectory.append((state.outer_count, state.x_avg, state.y_avg))

            if config.log_every and total % config.log_every == 0:
                logger.info("iteration %d (outer %d, inner %d), last gap %.3e",
                            total, state.outer_count, t, reference)

            out_of_iterations = total >= config.max_total_iterations
            out_of_time = (config.time_limit is not None
                           and time.perf_counter() - start >= config.time_limit)
            at_cap = config.restart and t >= self.max_inner
            if t < next_eval and not (out_of_iterations or out_of_time or at_cap):
                continue
            next_eval = _next_evaluation(t)

            residuals, objective = self.evaluate(state.x_avg, state.y_avg)
            radius = state.distance_from_anchor()
            rho = self._gap(state.x_avg, state.y_avg, radius) if radius > 0 else math.nan
            if self.observer is not None:
                self.observer.on_evaluation(total, state.outer_count, t, residuals, rho,
                                            objective, time.perf_counter() - start)
            if residuals.within(config.tolerance):
                return finish(SolveStatus.OPTIMAL, state.x_avg, state.y_avg, residuals)
            if config.check_current_iterate:
                current, _ = self.evaluate(state.x, state.y)
                if current.within(config.tolerance):
                    return finish(SolveStatus.OPTIMAL, state.x, state.y, current)

            if out_of_iterations or out_of_time:
                status = (SolveStatus.ITERATION_LIMIT if out_of_iterations
                          else SolveStatus.TIME_LIMIT)
                return finish(status, state.x_avg, state.y_avg, residuals)

            if not config.restart:
                continue
            reason = None
            if radius > 0 and rho <= RESTART_DECAY * reference:
                reason = RestartReason.GAP
            elif at_cap:
                reason = RestartReason.MAX_INNER
            if reason is None:
                continue
            if state.outer_count + 1 >= config.max_outer:
                return finish(SolveStatus.ITERATION_LIMIT, state.x_avg, state.y_avg, residuals)

            # Reference for the next outer loop: ρ at the new anchor with
            # radius equal to the distance travelled from the old one.
            if radius > 0:
                reference = rho if reason is RestartReason.GAP else self._gap(
                    state.x_avg, state.y_avg, radius)
            state = state.restarted(radius, reference)
            restarts += 1
            next_eval = 1
            gaps.append(reference)
            reasons.append(reason)
            if self.observer is not None:
                self.observer.on_restart(state.outer_count, t, reason, reference)
            logger.debug("restart %d (%s) after %d inner iterations, gap %.3e",
                         restarts, reason.value, t, reference)


def step_size(norm_estimate: float, safety: float) -> float:
    """η = τ = safety / ‖G‖; a zero matrix gets unit steps."""
    return safety / norm_estimate if norm_estimate > 0 else 1.0


def solve(lp: StandardLP, config: SolverConfig | None = None,
          observer: SolveObserver | None = None) -> SolveReport:
    """Solve ``min p·x s.t. Gx <= h, lower <= x <= upper`` with restarted PDHG.

    With rescaling on, the equilibrated problem is solved and the iterates are
    mapped back before residuals are evaluated, so reported residuals always
    refer to the original LP.

    Raises:
        SolverError: If the variable box has an infinite side.
    """
    config = config or SolverConfig()
    if not (np.all(np.isfinite(lp.var_lower)) and np.all(np.isfinite(lp.var_upper))):
        raise SolverError("restarted PDHG needs finite variable bounds")
    started = time.perf_counter()

    original = SaddleProblem.from_lp(lp)
    if config.rescale:
        _, diagonals = ruiz_rescale(lp.constraints)
    else:
        diagonals = RescalingDiagonals.identity(lp.n_rows, lp.n_vars)
    problem = original.rescaled(diagonals)

    norm = spectral_norm_estimate(problem.matrix, config.power_iterations, config.seed)
    step = step_size(norm, config.step_safety)
    logger.debug("solve: W=%d L=%d nnz=%d ‖G‖≈%.4g step=%.4g",
                 lp.n_vars, lp.n_rows, lp.constraints.nnz, norm, step)

    def evaluate(x_scaled: np.ndarray, y_scaled: np.ndarray) -> tuple[KKTResiduals, float]:
        x = diagonals.unscale_primal(x_scaled)
        y = diagonals.unscale_dual(y_scaled)
        return kkt_residuals(original, x, y), lp.objective_value(x)

    x0 = problem.project_x(np.zeros(lp.n_vars))
    y0 = np.zeros(lp.n_rows)
    runner = RestartedPDHG(problem, step, step, config, evaluate, observer)
    result = runner.run(x0, y0)

    x = original.project_x(diagonals.unscale_primal(result.x))
    y = np.maximum(diagonals.unscale_dual(result.y), 0.0)
    return SolveReport(
        status=result.status,
        primal=x,
        dual=y,
        objective=lp.objective_value(x),
        primal_residual=result.residuals.primal,
        dual_residual=result.residuals.dual,
        relative_gap=result.residuals.relative_gap,
        iterations=result.iterations,
        restarts=result.restarts,
        per_restart_gap=result.per_restart_gap,
        restart_reasons=result.restart_reasons,
        wall_time=time.perf_counter() - started,
    )
