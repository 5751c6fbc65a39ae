"""Tests for restarted PDHG."""

import numpy as np
import pytest
from scipy.optimize import linprog

from marchetype.datagen import GenConfig, default_constraint_menu, generate_instance
from marchetype.lp import StandardLP
from marchetype.solver import (
    KKTResiduals,
    RestartReason,
    SolverConfig,
    SolverError,
    SolveStatus,
    solve,
    step_size,
)
from marchetype.sparse import SparseMatrix
from marchetype.targeting import compile_ipwc


def small_targeting_lp(seed: int, n_customers: int = 30) -> StandardLP:
    config = GenConfig(n_customers=n_customers, n_actions=3, zip_depth=3, branching=(2, 2),
                       seed=seed)
    instance = generate_instance(config)
    return compile_ipwc(instance, default_constraint_menu(instance, config.hierarchy()))


def highs_objective(lp: StandardLP) -> float:
    result = linprog(lp.objective, A_ub=lp.constraints.to_dense(), b_ub=lp.rhs,
                     bounds=list(zip(lp.var_lower, lp.var_upper)), method="highs")
    assert result.status == 0
    return float(result.fun)


class RecordingObserver:
    def __init__(self) -> None:
        self.evaluations: list[tuple[int, int, int, KKTResiduals]] = []
        self.restarts: list[tuple[int, int, RestartReason, float]] = []

    def on_evaluation(self, total_iter, outer, inner, residuals, rho, objective,
                      elapsed_s) -> None:
        self.evaluations.append((total_iter, outer, inner, residuals))

    def on_restart(self, outer, inner, reason, gap) -> None:
        self.restarts.append((outer, inner, reason, gap))


class TestSolverConfig:
    """Tests for SolverConfig validation."""

    def test_defaults(self) -> None:
        config = SolverConfig()

        assert config.tolerance == 1e-6
        assert config.step_safety == 0.9
        assert config.inner_limit(10, 5) == 256
        assert config.inner_limit(100, 50) == 600

    def test_explicit_max_inner(self) -> None:
        assert SolverConfig(max_inner=7).inner_limit(100, 100) == 7

    @pytest.mark.parametrize("kwargs", [
        {"tolerance": 0.0},
        {"step_safety": 1.0},
        {"max_total_iterations": 0},
        {"max_inner": 0},
        {"time_limit": -1.0},
    ])
    def test_invalid(self, kwargs) -> None:
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_step_size(self) -> None:
        assert step_size(2.0, 0.9) == pytest.approx(0.45)
        assert step_size(0.0, 0.9) == 1.0


class TestSolve:
    """Tests for the solve entry point."""

    def test_trivial_lp(self, trivial_lp: StandardLP) -> None:
        report = solve(trivial_lp)

        assert report.status is SolveStatus.OPTIMAL
        assert report.objective == pytest.approx(-5.0, abs=1e-5)
        assert report.primal[0] == pytest.approx(1.0, abs=1e-5)
        assert report.restart_reasons[0] is RestartReason.INITIAL

    def test_knapsack(self, knapsack: StandardLP) -> None:
        report = solve(knapsack, SolverConfig(tolerance=1e-8))

        assert report.status is SolveStatus.OPTIMAL
        np.testing.assert_allclose(report.primal, [1.0, 0.0], atol=1e-6)
        # Any y in [2, 3] prices the optimum.
        assert 2.0 - 1e-5 <= report.dual[0] <= 3.0 + 1e-5

    def test_no_constraints(self) -> None:
        lp = StandardLP(
            objective=np.array([1.0, -1.0]),
            constraints=SparseMatrix(0, 2, np.zeros(1, dtype=np.int64), np.zeros(0, dtype=int),
                                     np.zeros(0)),
            rhs=np.zeros(0),
            var_lower=np.zeros(2),
            var_upper=np.ones(2),
        )
        report = solve(lp)

        assert report.status is SolveStatus.OPTIMAL
        assert report.objective == pytest.approx(-1.0)

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_reference_optimum(self, seed: int) -> None:
        lp = small_targeting_lp(seed)
        report = solve(lp, SolverConfig(tolerance=1e-8))

        assert report.status is SolveStatus.OPTIMAL
        expected = highs_objective(lp)
        assert report.objective == pytest.approx(expected, rel=1e-5, abs=1e-6)

    def test_without_rescaling(self) -> None:
        lp = small_targeting_lp(4, n_customers=16)
        report = solve(lp, SolverConfig(tolerance=1e-7, rescale=False))

        assert report.status is SolveStatus.OPTIMAL
        assert report.objective == pytest.approx(highs_objective(lp), rel=1e-4, abs=1e-5)

    def test_deterministic(self) -> None:
        lp = small_targeting_lp(3, n_customers=16)
        first = solve(lp)
        second = solve(lp)

        np.testing.assert_array_equal(first.primal, second.primal)
        np.testing.assert_array_equal(first.dual, second.dual)
        assert first.to_dict() == second.to_dict()

    def test_iteration_limit(self) -> None:
        report = solve(small_targeting_lp(0), SolverConfig(max_total_iterations=3))

        assert report.status is SolveStatus.ITERATION_LIMIT
        assert report.iterations == 3
        assert report.primal.shape == (90,)

    def test_time_limit(self) -> None:
        report = solve(small_targeting_lp(0), SolverConfig(time_limit=1e-9))

        assert report.status is SolveStatus.TIME_LIMIT

    def test_infinite_bounds_rejected(self) -> None:
        lp = StandardLP(
            objective=np.ones(1),
            constraints=SparseMatrix.identity(1),
            rhs=np.ones(1),
            var_lower=np.zeros(1),
            var_upper=np.array([np.inf]),
        )

        with pytest.raises(SolverError, match="finite"):
            solve(lp)

    def test_observer_sees_evaluations_and_restarts(self) -> None:
        observer = RecordingObserver()
        report = solve(small_targeting_lp(1), SolverConfig(tolerance=1e-7), observer=observer)

        assert observer.evaluations
        assert len(observer.restarts) == report.restarts
        assert len(report.per_restart_gap) == report.restarts + 1
        totals = [e[0] for e in observer.evaluations]
        assert totals == sorted(totals)
        for _, _, reason, _ in observer.restarts:
            assert reason in (RestartReason.GAP, RestartReason.MAX_INNER)

    def test_forced_restarts(self) -> None:
        observer = RecordingObserver()
        solve(small_targeting_lp(2), SolverConfig(max_inner=5, max_total_iterations=200),
              observer=observer)

        assert observer.restarts
        assert all(inner <= 5 for _, inner, _, _ in observer.restarts)

    def test_report_to_dict_has_no_timing(self, trivial_lp: StandardLP) -> None:
        data = solve(trivial_lp).to_dict()

        assert "wall_time" not in data
        assert data["status"] == "optimal"
        assert data["restart_reasons"][0] == "initial"
