"""Tests for policy extraction and validation."""

import numpy as np
import pytest
from scipy.optimize import linprog

from marchetype.sparse import DimensionMismatchError
from marchetype.targeting import (
    ActionSimilarity,
    CompileError,
    ConstraintMenu,
    Policy,
    SegmentPair,
    TargetingInstance,
    VolumeBound,
    WeightedSimilarity,
    compile_interdependent,
    compile_ipwc,
    compile_spwc,
    extract_policy,
    synergy_pair_profits,
    validate_policy,
)


class TestExtractPolicy:
    """Tests for extract_policy."""

    def test_zero_primal(self, tiny_instance: TargetingInstance) -> None:
        lp = compile_ipwc(tiny_instance, ConstraintMenu())
        policy = extract_policy(lp, np.zeros(lp.n_vars), tiny_instance)

        assert policy.objective_value == 0.0
        assert not policy.assignment.any()

    def test_single_customer_optimum(self) -> None:
        instance = TargetingInstance(np.array([[5.0]]), np.array([0]), np.array([0]), np.ones(1))
        lp = compile_ipwc(instance, ConstraintMenu())
        policy = extract_policy(lp, np.array([1.0]), instance)

        assert policy.assignment.tolist() == [[1.0]]
        assert policy.objective_value == 5.0

    def test_objective_matches_direct_sum(self, tiny_instance: TargetingInstance) -> None:
        lp = compile_ipwc(tiny_instance, ConstraintMenu())
        x = np.random.default_rng(1).random(lp.n_vars)
        policy = extract_policy(lp, x, tiny_instance)

        direct = float((tiny_instance.profits * x.reshape(4, 2)).sum())
        assert policy.objective_value == pytest.approx(direct, abs=1e-9)

    def test_entries_are_clamped(self, tiny_instance: TargetingInstance) -> None:
        lp = compile_ipwc(tiny_instance, ConstraintMenu())
        x = np.full(lp.n_vars, 1.0 + 1e-9)
        x[0] = -1e-9

        policy = extract_policy(lp, x, tiny_instance)
        assert policy.assignment.min() == 0.0
        assert policy.assignment.max() == 1.0

    def test_segment_level(self, tiny_instance: TargetingInstance) -> None:
        lp = compile_spwc(tiny_instance, ConstraintMenu())
        policy = extract_policy(lp, np.array([1.0, 0.0, 0.0, 1.0]), tiny_instance)

        assert policy.segment_level
        assert policy.assignment.shape == (2, 2)
        assert policy.per_customer(tiny_instance)[3].tolist() == [0.0, 1.0]

    def test_interdependent(self, tiny_instance: TargetingInstance) -> None:
        q = synergy_pair_profits(tiny_instance.profits, 1.0)
        lp = compile_interdependent(tiny_instance, ConstraintMenu(), q)
        x = np.zeros(lp.n_vars)
        x[8] = 1.0  # y for customer 0
        x[12:14] = 1.0  # aux x for customer 0

        policy = extract_policy(lp, x, tiny_instance)
        assert policy.pair_assignment[0].tolist() == [1.0]
        assert policy.assignment[0].tolist() == [1.0, 1.0]
        assert policy.objective_value == pytest.approx(6.0)

    def test_wrong_length(self, tiny_instance: TargetingInstance) -> None:
        lp = compile_ipwc(tiny_instance, ConstraintMenu())

        with pytest.raises(DimensionMismatchError):
            extract_policy(lp, np.zeros(3), tiny_instance)


class TestValidatePolicy:
    """Tests for validate_policy."""

    def test_zero_policy_under_volume_floor(self, tiny_instance: TargetingInstance) -> None:
        menu = ConstraintMenu(volume1=(VolumeBound(0, 0, 1.0, 2.0), VolumeBound(1, 1, 0.0, 1.0)))
        policy = Policy(np.zeros((4, 2)), 0.0)

        report = validate_policy(policy, tiny_instance, menu)
        assert len(report) == 1
        assert report.by_family() == {"volume1": 1}
        assert report.worst().slack == pytest.approx(-1.0)

    def test_targeting_violations(self, tiny_instance: TargetingInstance) -> None:
        policy = Policy(np.ones((4, 2)), 0.0)

        report = validate_policy(policy, tiny_instance, ConstraintMenu())
        assert report.by_family() == {"targeting": 4}

    def test_box_violation(self, tiny_instance: TargetingInstance) -> None:
        assignment = np.zeros((4, 2))
        assignment[2, 1] = 1.5

        report = validate_policy(Policy(assignment, 0.0), tiny_instance, ConstraintMenu())
        assert report.by_family()["box"] == 1

    def test_similarity_violation(self, tiny_instance: TargetingInstance) -> None:
        assignment = np.zeros((4, 2))
        assignment[0, 0] = assignment[1, 0] = 1.0
        menu = ConstraintMenu(similarity1=(ActionSimilarity(0, 0, 1, 1.2),))

        report = validate_policy(Policy(assignment, 0.0), tiny_instance, menu)
        assert report.by_family() == {"similarity1": 1}

    def test_optimal_policy_is_feasible(self, tiny_instance: TargetingInstance) -> None:
        menu = ConstraintMenu(
            volume1=(VolumeBound(0, 0, 0.5, 1.5),),
            similarity1=(ActionSimilarity(0, 0, 1, 1.2), ActionSimilarity(0, 1, 0, 1.2)),
        )
        lp = compile_ipwc(tiny_instance, menu)
        result = linprog(lp.objective, A_ub=lp.constraints.to_dense(), b_ub=lp.rhs,
                         bounds=(0, 1), method="highs")
        policy = extract_policy(lp, np.clip(result.x, 0, 1), tiny_instance)

        assert validate_policy(policy, tiny_instance, menu, tolerance=1e-6).feasible
        assert policy.objective_value == pytest.approx(-result.fun)

    def test_empty_report(self) -> None:
        report = validate_policy(
            Policy(np.zeros((1, 1)), 0.0),
            TargetingInstance(np.ones((1, 1)), np.array([0]), np.array([0]), np.ones(1)),
            ConstraintMenu(),
        )

        assert report.feasible
        assert report.worst() is None

    @pytest.mark.parametrize(
        "menu",
        [
            ConstraintMenu(similarity1=(ActionSimilarity(0, 0, 1, 1.1),)),
            ConstraintMenu(similarity2=WeightedSimilarity((SegmentPair(1, 0, 1.1),),
                                                          np.ones((2, 1)))),
        ],
    )
    def test_empty_segment_in_similarity(self, menu: ConstraintMenu) -> None:
        instance = TargetingInstance(np.ones((2, 1)), np.array([0, 0]), np.array([0, 0]),
                                     np.ones(2), n_segments=2)

        with pytest.raises(CompileError, match="segment 1 is empty"):
            validate_policy(Policy(np.zeros((2, 1)), 0.0), instance, menu)

    def test_nan_assignment_is_reported(self, tiny_instance: TargetingInstance) -> None:
        assignment = np.zeros((4, 2))
        assignment[0, 0] = np.nan
        menu = ConstraintMenu(volume1=(VolumeBound(0, 0, 0.0, 2.0),), targeting_enabled=False)

        report = validate_policy(Policy(assignment, 0.0), tiny_instance, menu)
        assert not report.feasible
        assert report.by_family() == {"volume1": 2}
