"""Domain types of the targeting problem.

Segments are 0-based in code (the JSON formats use the same indices).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np


class TargetingError(ValueError):
    """Base class for targeting-model errors."""

    pass


class InstanceValidationError(TargetingError):
    """Raised when a TargetingInstance violates its invariants."""

    pass


class MenuValidationError(TargetingError):
    """Raised when a ConstraintMenu violates its invariants."""

    pass


@dataclass(frozen=True, eq=False)
class TargetingInstance:
    """Customers, actions, incremental profits and segment memberships.

    Attributes:
        profits: I x J incremental profit p_i^j (may be negative).
        constraint_segment_of: Segment k of each customer, used by the
            volume and similarity constraints.
        action_segment_of: Segment k* of each customer, used only by SPwC.
        max_actions: M_i, with 0 < M_i <= J.
    """

    profits: np.ndarray
    constraint_segment_of: np.ndarray
    action_segment_of: np.ndarray
    max_actions: np.ndarray
    n_segments: int = 0
    n_action_segments: int = 0

    def __post_init__(self) -> None:
        profits = np.asarray(self.profits, dtype=np.float64)
        if profits.ndim != 2:
            raise InstanceValidationError("profits must be an I x J matrix")
        n_customers, n_actions = profits.shape
        if n_customers < 1 or n_actions < 1:
            raise InstanceValidationError("an instance needs at least one customer and one action")
        if not np.all(np.isfinite(profits)):
            raise InstanceValidationError("profits must be finite")

        seg = np.asarray(self.constraint_segment_of, dtype=np.int64)
        act = np.asarray(self.action_segment_of, dtype=np.int64)
        caps = np.asarray(self.max_actions, dtype=np.float64)
        for name, arr in (("constraint_segment_of", seg), ("action_segment_of", act),
                          ("max_actions", caps)):
            if arr.shape != (n_customers,):
                raise InstanceValidationError(f"{name} must have one entry per customer")
        if seg.min() < 0 or act.min() < 0:
            raise InstanceValidationError("segment indices must be non-negative")
        if np.any(caps <= 0) or np.any(caps > n_actions):
            raise InstanceValidationError("max_actions must lie in (0, J]")

        n_segments = max(self.n_segments, int(seg.max()) + 1)
        n_action_segments = max(self.n_action_segments, int(act.max()) + 1)

        for arr in (profits, seg, act, caps):
            arr.flags.writeable = False
        object.__setattr__(self, "profits", profits)
        object.__setattr__(self, "constraint_segment_of", seg)
        object.__setattr__(self, "action_segment_of", act)
        object.__setattr__(self, "max_actions", caps)
        object.__setattr__(self, "n_segments", n_segments)
        object.__setattr__(self, "n_action_segments", n_action_segments)

    @property
    def n_customers(self) -> int:
        """I."""
        return int(self.profits.shape[0])

    @property
    def n_actions(self) -> int:
        """J."""
        return int(self.profits.shape[1])

    @property
    def segment_sizes(self) -> np.ndarray:
        """n_k for every constraint segment (zeros allowed)."""
        return np.bincount(self.constraint_segment_of, minlength=self.n_segments)

    @property
    def action_segment_sizes(self) -> np.ndarray:
        return np.bincount(self.action_segment_of, minlength=self.n_action_segments)

    def members(self, k: int) -> np.ndarray:
        """Customers of constraint segment k, ascending."""
        return np.flatnonzero(self.constraint_segment_of == k)

    def with_action_segments(self, action_segment_of: np.ndarray) -> TargetingInstance:
        """Same instance with a different k* segmentation."""
        return TargetingInstance(
            profits=self.profits,
            constraint_segment_of=self.constraint_segment_of,
            action_segment_of=np.asarray(action_segment_of),
            max_actions=self.max_actions,
            n_segments=self.n_segments,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_customers": self.n_customers,
            "n_actions": self.n_actions,
            "n_segments": self.n_segments,
            "profits": self.profits.tolist(),
            "constraint_segment": self.constraint_segment_of.tolist(),
            "action_segment": self.action_segment_of.tolist(),
            "max_actions": self.max_actions.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TargetingInstance:
        try:
            profits = np.asarray(data["profits"], dtype=np.float64)
            instance = cls(
                profits=profits,
                constraint_segment_of=np.asarray(data["constraint_segment"]),
                action_segment_of=np.asarray(
                    data.get("action_segment", np.arange(profits.shape[0]))
                ),
                max_actions=np.asarray(data["max_actions"]),
                n_segments=int(data.get("n_segments", 0)),
            )
        except (KeyError, TypeError) as e:
            raise InstanceValidationError(f"invalid instance JSON: {e}") from e
        if "n_customers" in data and int(data["n_customers"]) != instance.n_customers:
            raise InstanceValidationError("n_customers does not match the profits matrix")
        if "n_actions" in data and int(data["n_actions"]) != instance.n_actions:
            raise InstanceValidationError("n_actions does not match the profits matrix")
        return instance


@dataclass(frozen=True)
class VolumeBound:
    """a <= Σ_{i∈S_k} x_i^j <= b."""

    segment: int
    action: int
    lower: float
    upper: float


@dataclass(frozen=True, eq=False)
class WeightedVolume:
    """L_k <= Σ_{i∈S_k} Σ_j c_i^j x_i^j <= U_k for every k (U may be inf)."""

    lower: np.ndarray
    upper: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=np.float64))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=np.float64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))


@dataclass(frozen=True)
class ActionSimilarity:
    """(1/n_k1) Σ_{S_k1} x^j - ratio · (1/n_k2) Σ_{S_k2} x^j <= offset."""

    action: int
    segment1: int
    segment2: int
    ratio: float
    offset: float = 0.0


@dataclass(frozen=True)
class SegmentPair:
    segment1: int
    segment2: int
    ratio: float
    offset: float = 0.0


@dataclass(frozen=True, eq=False)
class WeightedSimilarity:
    """Similarity II: per pair, weighted per-capita outcome ratio bound with weights d_i^j."""

    pairs: tuple[SegmentPair, ...]
    weights: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(self.pairs))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))


@dataclass(frozen=True)
class ConstraintMenu:
    """Which constraint families are imposed, with their parameters.

    ``None`` or an empty list switches a family off.
    """

    volume1: tuple[VolumeBound, ...] = ()
    volume2: tuple[WeightedVolume, ...] = ()
    similarity1: tuple[ActionSimilarity, ...] = ()
    similarity2: tuple[WeightedSimilarity, ...] = ()
    targeting_enabled: bool = True

    def __post_init__(self) -> None:
        for name in ("volume1", "volume2", "similarity1", "similarity2"):
            value = getattr(self, name)
            if value is None:
                value = ()
            elif isinstance(value, (WeightedVolume, WeightedSimilarity)):
                value = (value,)
            object.__setattr__(self, name, tuple(value))

    def validate(self, instance: TargetingInstance) -> None:
        """Check the menu invariants against an instance.

        Raises:
            MenuValidationError: On the first violated invariant.
        """
        sizes = instance.segment_sizes
        K, J, I = instance.n_segments, instance.n_actions, instance.n_customers

        def check_segment(k: int, what: str) -> None:
            if not 0 <= k < K:
                raise MenuValidationError(f"{what}: segment {k} out of range [0, {K})")

        def check_action(j: int, what: str) -> None:
            if not 0 <= j < J:
                raise MenuValidationError(f"{what}: action {j} out of range [0, {J})")

        for v in self.volume1:
            check_segment(v.segment, "volume1")
            check_action(v.action, "volume1")
            if not (0 <= v.lower <= v.upper <= sizes[v.segment]):
                raise MenuValidationError(
                    f"volume1 (k={v.segment}, j={v.action}): need 0 <= a <= b <= n_k, "
                    f"got a={v.lower}, b={v.upper}, n_k={sizes[v.segment]}"
                )
        for vol in self.volume2:
            if vol.lower.shape != (K,) or vol.upper.shape != (K,):
                raise MenuValidationError("volume2 bounds need one entry per segment")
            if vol.weights.shape != (I, J):
                raise MenuValidationError("volume2 weights must be I x J")
            if np.any(np.isnan(vol.lower)) or np.any(np.isinf(vol.lower) & (vol.lower > 0)):
                raise MenuValidationError("volume2 lower bounds must be finite or -inf")
            finite = np.isfinite(vol.upper)
            if np.any(vol.lower[finite] > vol.upper[finite]):
                raise MenuValidationError("volume2 requires L_k <= U_k")
        for s in self.similarity1:
            check_segment(s.segment1, "similarity1")
            check_segment(s.segment2, "similarity1")
            check_action(s.action, "similarity1")
            if s.segment1 == s.segment2:
                raise MenuValidationError("similarity1 pairs need k1 != k2")
            if not s.ratio > 0:
                raise MenuValidationError("similarity1 ratios must be positive")
        for sim in self.similarity2:
            if sim.weights.shape != (I, J):
                raise MenuValidationError("similarity2 weights must be I x J")
            for pair in sim.pairs:
                check_segment(pair.segment1, "similarity2")
                check_segment(pair.segment2, "similarity2")
                if pair.segment1 == pair.segment2:
                    raise MenuValidationError("similarity2 pairs need k1 != k2")
                if not pair.ratio > 0:
                    raise MenuValidationError("similarity2 ratios must be positive")


@dataclass(frozen=True, eq=False)
class Policy:
    """Action probabilities per customer (IPwC) or per action segment (SPwC).

    Attributes:
        assignment: rows x J matrix with entries in [0, 1].
        objective_value: Incremental profit, positive orientation.
        segment_level: True when rows are action segments.
        single_assignment: z_i^j of the interdependent formulation, if any.
        pair_assignment: I x P pair probabilities y_i^{j1,j2}, pairs ordered
            lexicographically.
    """

    assignment: np.ndarray
    objective_value: float
    segment_level: bool = False
    single_assignment: np.ndarray | None = None
    pair_assignment: np.ndarray | None = None

    def per_customer(self, instance: TargetingInstance) -> np.ndarray:
        """Expand to the I x J customer-level probabilities."""
        if self.segment_level:
            return self.assignment[instance.action_segment_of]
        return self.assignment

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "segment_level": self.segment_level,
            "objective_value": self.objective_value,
            "assignment": self.assignment.tolist(),
        }
        if self.single_assignment is not None:
            data["single_assignment"] = self.single_assignment.tolist()
        if self.pair_assignment is not None:
            data["pair_assignment"] = self.pair_assignment.tolist()
        return data


def budget_constraint(costs: np.ndarray, budgets: np.ndarray) -> WeightedVolume:
    """Per-segment spend cap: 0 <= Σ_{i∈S_k} Σ_j cost_i^j x_i^j <= budget_k."""
    budgets = np.asarray(budgets, dtype=np.float64)
    return WeightedVolume(lower=np.zeros_like(budgets), upper=budgets, weights=costs)


def performance_constraint(revenues: np.ndarray, floors: np.ndarray) -> WeightedVolume:
    """Per-segment outcome floor with no upper bound."""
    floors = np.asarray(floors, dtype=np.float64)
    return WeightedVolume(lower=floors, upper=np.full_like(floors, np.inf), weights=revenues)


def symmetric_pairs(
    pairs: tuple[ActionSimilarity, ...] | tuple[SegmentPair, ...],
) -> tuple[Any, ...]:
    """Add the reversed ordering of every similarity pair.

    Works on both ActionSimilarity and SegmentPair entries; the reversed
    entry keeps the ratio and offset.
    """
    out: list[Any] = []
    for p in pairs:
        out.append(p)
        if isinstance(p, ActionSimilarity):
            out.append(ActionSimilarity(p.action, p.segment2, p.segment1, p.ratio, p.offset))
        else:
            out.append(SegmentPair(p.segment2, p.segment1, p.ratio, p.offset))
    return tuple(out)
