"""Tests for the PDHG step, dual objective, duality gap and KKT residuals."""

import numpy as np
import pytest

from marchetype.solver import (
    KKTResiduals,
    SaddleProblem,
    SaddleState,
    dual_objective,
    kkt_residuals,
    normalized_duality_gap,
    pdhg_step,
    project_dual,
    project_primal,
)
from marchetype.sparse import RescalingDiagonals, SparseMatrix, csr_from_triplets


def bilinear(box: float = 100.0) -> SaddleProblem:
    """min_x max_y x·y on [-box, box]^2."""
    return SaddleProblem(
        objective=np.zeros(1),
        matrix=SparseMatrix.identity(1),
        rhs=np.zeros(1),
        x_lower=np.array([-box]),
        x_upper=np.array([box]),
        y_lower=np.array([-box]),
        y_upper=np.array([box]),
    )


class TestProjections:
    """Tests for the box projections."""

    def test_project_primal(self) -> None:
        assert project_primal(np.array([-0.5, 0.3, 2.0])).tolist() == [0.0, 0.3, 1.0]

    def test_project_primal_keeps_feasible(self) -> None:
        v = np.array([0.0, 0.25, 1.0])

        np.testing.assert_array_equal(project_primal(v), v)

    def test_project_dual(self) -> None:
        assert project_dual(np.array([-1.0, 0.0, 2.0])).tolist() == [0.0, 0.0, 2.0]

    @pytest.mark.parametrize("project", [project_primal, project_dual])
    def test_idempotent(self, project) -> None:
        v = np.random.default_rng(0).normal(scale=3.0, size=50)

        np.testing.assert_array_equal(project(project(v)), project(v))


class TestSaddleProblem:
    """Tests for SaddleProblem construction."""

    def test_from_lp(self, knapsack) -> None:
        problem = SaddleProblem.from_lp(knapsack)

        assert problem.n_primal == 2
        assert problem.n_dual == 1
        assert problem.y_lower.tolist() == [0.0]
        assert np.isinf(problem.y_upper).all()

    def test_lagrangian(self, knapsack) -> None:
        problem = SaddleProblem.from_lp(knapsack)

        # -3 + 2·(1 - 1)
        assert problem.lagrangian(np.array([1.0, 0.0]), np.array([2.0])) == -3.0

    def test_rescaled_preserves_lagrangian(self, knapsack) -> None:
        problem = SaddleProblem.from_lp(knapsack)
        d = RescalingDiagonals(np.array([2.0]), np.array([0.5, 4.0]))
        scaled = problem.rescaled(d)
        x = np.array([0.3, 0.6])
        y = np.array([1.5])

        assert scaled.lagrangian(d.scale_primal(x), d.scale_dual(y)) == pytest.approx(
            problem.lagrangian(x, y)
        )
        np.testing.assert_allclose(scaled.x_upper, [2.0, 0.25])

    def test_empty_box_rejected(self) -> None:
        with pytest.raises(ValueError, match="empty box"):
            SaddleProblem(np.zeros(1), SparseMatrix.identity(1), np.zeros(1), np.ones(1),
                          np.zeros(1), np.zeros(1), np.ones(1))


class TestPdhgStep:
    """Tests for one PDHG update."""

    def test_hand_computed_step(self) -> None:
        state = SaddleState.start(np.array([5.0]), np.array([5.0]))
        new = pdhg_step(state, bilinear(), 0.2, 0.2)

        # x = 5 - 0.2·5 = 4;  y = 5 + 0.2·(2·4 - 5) = 5.6
        assert new.x[0] == pytest.approx(4.0)
        assert new.y[0] == pytest.approx(5.6)
        assert new.inner_count == 1
        assert new.x_avg[0] == pytest.approx(4.0)

    def test_running_average(self) -> None:
        state = SaddleState.start(np.array([5.0]), np.array([5.0]))
        first = pdhg_step(state, bilinear(), 0.2, 0.2)
        second = pdhg_step(first, bilinear(), 0.2, 0.2)

        assert second.x_avg[0] == pytest.approx((first.x[0] + second.x[0]) / 2)
        assert second.y_avg[0] == pytest.approx((first.y[0] + second.y[0]) / 2)

    def test_zero_matrix_reaches_zero(self) -> None:
        problem = SaddleProblem(
            objective=np.ones(2),
            matrix=csr_from_triplets(1, 2, []),
            rhs=np.zeros(1),
            x_lower=np.zeros(2),
            x_upper=np.ones(2),
            y_lower=np.zeros(1),
            y_upper=np.full(1, np.inf),
        )
        state = SaddleState.start(np.ones(2), np.zeros(1))

        assert pdhg_step(state, problem, 1.0, 1.0).x.tolist() == [0.0, 0.0]

    def test_dual_stays_non_negative(self, knapsack) -> None:
        state = SaddleState.start(np.zeros(2), np.zeros(1))
        new = pdhg_step(state, knapsack, 0.5, 0.5)

        assert new.y.min() >= 0.0
        assert new.x.min() >= 0.0
        assert new.x.max() <= 1.0

    def test_rejects_non_positive_step(self, knapsack) -> None:
        state = SaddleState.start(np.zeros(2), np.zeros(1))

        with pytest.raises(ValueError):
            pdhg_step(state, knapsack, 0.0, 0.5)

    def test_restarted_moves_anchor(self) -> None:
        state = pdhg_step(SaddleState.start(np.array([5.0]), np.array([5.0])), bilinear(),
                          0.2, 0.2)
        restarted = state.restarted(distance=1.0, gap=2.0)

        assert restarted.outer_count == 1
        assert restarted.inner_count == 0
        np.testing.assert_array_equal(restarted.anchor_x, state.x_avg)
        assert restarted.distance_from_anchor() == 0.0

    @pytest.mark.parametrize(
        ("which", "x_star", "y_star"),
        [("knapsack", [1.0, 0.0], [2.5]), ("fractional", [1.0, 0.5], [1.0])],
    )
    def test_near_saddle_is_almost_fixed(self, request, which, x_star, y_star) -> None:
        """KKT residuals below 1e-9 mean one step moves the point by at most 1e-8."""
        lp = request.getfixturevalue(which)
        problem = SaddleProblem.from_lp(lp)
        eta = 0.9 / np.linalg.norm(lp.constraints.to_dense(), 2)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = problem.project_x(np.array(x_star) + rng.uniform(-1e-11, 1e-11, 2))
            y = problem.project_y(np.array(y_star) + rng.uniform(-1e-11, 1e-11, 1))
            assert kkt_residuals(lp, x, y).within(1e-9)

            new = pdhg_step(SaddleState.start(x, y), problem, eta, eta)
            moved = max(np.abs(new.x - x).max(), np.abs(new.y - y).max())
            assert moved <= 1e-8


class TestDualObjective:
    """Tests for dual_objective."""

    def test_at_origin(self, knapsack) -> None:
        assert dual_objective(knapsack, np.zeros(1)) == -5.0

    def test_weak_duality(self, knapsack) -> None:
        for y in (0.0, 1.0, 2.5, 4.0):
            assert dual_objective(knapsack, np.array([y])) <= -3.0 + 1e-12

    def test_optimal_dual(self, knapsack) -> None:
        # y = 3 prices out x1 exactly: D = -3 + min(0, 0) + min(0, 1) = -3.
        assert dual_objective(knapsack, np.array([3.0])) == pytest.approx(-3.0)


class TestNormalizedDualityGap:
    """Tests for the normalized duality gap."""

    def test_bilinear_matches_grid_search(self) -> None:
        problem = bilinear()
        x, y, r = np.array([5.0]), np.array([5.0]), 1.0
        grid = np.linspace(-r, r, 2001)

        best_y = max(problem.lagrangian(x, y + dy) for dy in grid)
        best_x = min(problem.lagrangian(x + dx, y) for dx in grid)
        expected = (best_y - best_x) / r
        assert normalized_duality_gap(problem, x, y, r) == pytest.approx(expected, abs=1e-6)
        assert expected == pytest.approx(10.0)

    def test_zero_at_saddle(self, knapsack) -> None:
        x, y = np.array([1.0, 0.0]), np.array([3.0])

        assert normalized_duality_gap(knapsack, x, y, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_non_negative(self, knapsack) -> None:
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.random(2)
            y = rng.random(1) * 5
            assert normalized_duality_gap(knapsack, x, y, rng.random() + 0.1) >= 0.0

    def test_clipped_by_box(self, knapsack) -> None:
        # From x = 0 the ball of radius 10 is cut to the unit box.
        gap_small = normalized_duality_gap(knapsack, np.zeros(2), np.zeros(1), 10.0)

        assert gap_small == pytest.approx(5.0 / 10.0)

    def test_rejects_non_positive_radius(self, knapsack) -> None:
        with pytest.raises(ValueError, match="radius"):
            normalized_duality_gap(knapsack, np.zeros(2), np.zeros(1), 0.0)

    def test_nonincreasing_in_radius(self, knapsack, fractional) -> None:
        rng = np.random.default_rng(8)
        for lp in (knapsack, fractional) * 25:
            x = rng.random(2)
            y = rng.random(1) * 4
            r = float(rng.choice([1e-3, 0.05, 0.3, 1.0]))

            wide = normalized_duality_gap(lp, x, y, 2 * r)
            assert wide <= normalized_duality_gap(lp, x, y, r) + 1e-12

    def test_precise_next_to_large_saddle(self) -> None:
        """A tiny gap survives Lagrangian values of order 1e6."""
        problem = SaddleProblem(
            objective=np.array([-1e6]),
            matrix=SparseMatrix.identity(1),
            rhs=np.ones(1),
            x_lower=np.zeros(1),
            x_upper=np.full(1, 2.0),
            y_lower=np.zeros(1),
            y_upper=np.full(1, np.inf),
        )
        x = np.array([1.0 + 1e-9])

        gap = normalized_duality_gap(problem, x, np.array([1e6]), 1e-3)
        assert gap == pytest.approx(x[0] - 1.0, rel=1e-9)


class TestKKTResiduals:
    """Tests for kkt_residuals."""

    def test_trivial_lp_at_origin(self, trivial_lp) -> None:
        res = kkt_residuals(trivial_lp, np.zeros(1), np.zeros(1))

        assert res.primal == 0.0
        # ‖x − proj(x − (p + Gᵀy))‖∞ / (1 + ‖p‖∞) = 1/6
        assert res.dual == pytest.approx(1.0 / 6.0)
        assert res.relative_gap == pytest.approx(5.0 / 6.0)

    def test_optimal_point(self, knapsack) -> None:
        res = kkt_residuals(knapsack, np.array([1.0, 0.0]), np.array([3.0]))

        assert max(res) <= 1e-12
        assert res.within(1e-9)

    def test_infeasible_primal(self, knapsack) -> None:
        res = kkt_residuals(knapsack, np.array([1.0, 1.0]), np.array([3.0]))

        assert res.primal == pytest.approx(1.0 / 2.0)

    def test_within_uses_max(self) -> None:
        assert not KKTResiduals(1e-7, 1e-5, 0.0).within(1e-6)
        assert KKTResiduals(1e-7, 1e-7, 1e-7).within(1e-6)
