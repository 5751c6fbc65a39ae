"""Synthetic targeting instances with sparse-response profits."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..targeting import TargetingInstance
from .hierarchy import SegmentHierarchy

logger = logging.getLogger(__name__)

MAX_ASSIGNMENT_DRAWS = 1000


@dataclass
class GenConfig:
    """Generator settings.

    Attributes:
        n_customers: I.
        n_actions: J.
        zip_depth: Level that defines leaf segments (3, 4 or 5).
        branching: Fan-out per hierarchy level, from the number of states down.
        response_rate: Probability that a customer responds to an action.
        profit_mean_hit: Mean profit of a responder.
        profit_mean_miss: Mean profit of a non-responder (the mailing cost, negative).
        response_multipliers: Per-action factor on response_rate, cycled over J,
            so some actions are better on average.
        max_actions: M_i for every customer.
        profit_decimals: Round profits to this many decimals (2 = cents); None keeps
            the raw draws. Rounding never flips a sign.
        seed: Seed of the generator's random stream.
    """

    n_customers: int = 1000
    n_actions: int = 5
    zip_depth: int = 5
    branching: tuple[int, ...] = (2, 3, 4)
    response_rate: float = 0.03
    profit_mean_hit: float = 40.0
    profit_mean_miss: float = -0.6
    response_multipliers: tuple[float, ...] = field(default=(1.0, 0.9, 1.1, 0.8, 0.3))
    max_actions: int = 1
    profit_decimals: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_customers < 1:
            raise ValueError("n_customers must be at least 1")
        if self.n_actions < 1:
            raise ValueError("n_actions must be at least 1")
        if not 0 <= self.response_rate < 1:
            raise ValueError("response_rate must lie in [0, 1)")
        if self.profit_mean_hit <= 0:
            raise ValueError("profit_mean_hit must be positive")
        if self.profit_mean_miss >= 0:
            raise ValueError("profit_mean_miss must be negative")
        if not self.response_multipliers or any(m < 0 for m in self.response_multipliers):
            raise ValueError("response_multipliers must be non-negative")
        if np.any(self.action_response_rates() >= 1):
            raise ValueError("response_rate times a multiplier must stay below 1")
        if not 1 <= self.max_actions <= self.n_actions:
            raise ValueError("max_actions must lie in [1, n_actions]")
        if self.profit_decimals is not None and not 0 <= self.profit_decimals <= 6:
            raise ValueError("profit_decimals must lie in [0, 6]")
        self.branching = tuple(self.branching)
        self.response_multipliers = tuple(self.response_multipliers)
        # Builds and validates the tree.
        hierarchy = self.hierarchy()
        if hierarchy.n_segments > self.n_customers:
            raise ValueError(
                f"{self.n_customers} customers cannot fill {hierarchy.n_segments} segments"
            )

    def hierarchy(self) -> SegmentHierarchy:
        return SegmentHierarchy.build(self.zip_depth, tuple(self.branching))

    def action_response_rates(self) -> np.ndarray:
        multipliers = np.resize(np.asarray(self.response_multipliers, dtype=np.float64),
                                self.n_actions)
        return self.response_rate * multipliers

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_customers": self.n_customers,
            "n_actions": self.n_actions,
            "zip_depth": self.zip_depth,
            "branching": list(self.branching),
            "response_rate": self.response_rate,
            "profit_mean_hit": self.profit_mean_hit,
            "profit_mean_miss": self.profit_mean_miss,
            "response_multipliers": list(self.response_multipliers),
            "max_actions": self.max_actions,
            "profit_decimals": self.profit_decimals,
            "seed": self.seed,
        }


def draw_profits(config: GenConfig, rng: np.random.Generator) -> np.ndarray:
    """I x J profit mixture: exponential gains for responders, gamma costs otherwise."""
    shape = (config.n_customers, config.n_actions)
    hit = rng.random(shape) < config.action_response_rates()
    gains = rng.exponential(config.profit_mean_hit, size=shape)
    costs = -rng.gamma(4.0, -config.profit_mean_miss / 4.0, size=shape)
    profits = np.where(hit, gains, costs)
    if config.profit_decimals is None:
        return profits
    unit = 10.0 ** -config.profit_decimals
    rounded = np.round(profits, config.profit_decimals)
    return np.where(hit, np.maximum(rounded, unit), np.minimum(rounded, -unit))


def _assign_segments(n_customers: int, n_segments: int, rng: np.random.Generator) -> np.ndarray:
    for attempt in range(MAX_ASSIGNMENT_DRAWS):
        segment_of = rng.integers(0, n_segments, size=n_customers)
        if np.bincount(segment_of, minlength=n_segments).min() > 0:
            if attempt:
                logger.debug("segment assignment nonempty after %d redraws", attempt)
            return segment_of
    raise ValueError(f"could not fill {n_segments} segments with {n_customers} customers "
                     f"in {MAX_ASSIGNMENT_DRAWS} draws")


def generate_instance(config: GenConfig) -> TargetingInstance:
    """Deterministic instance for a fixed seed.

    Customers are spread uniformly over the leaf segments (redrawn until every
    segment is nonempty); the action segmentation defaults to the constraint
    segmentation.
    """
    rng = np.random.default_rng(config.seed)
    K = config.hierarchy().n_segments
    segment_of = _assign_segments(config.n_customers, K, rng)
    profits = draw_profits(config, rng)
    return TargetingInstance(
        profits=profits,
        constraint_segment_of=segment_of,
        action_segment_of=segment_of,
        max_actions=np.full(config.n_customers, float(config.max_actions)),
        n_segments=K,
    )


def subsample_instance(instance: TargetingInstance, fraction: float,
                       seed: int = 0) -> TargetingInstance:
    """Keep a fraction of the customers of every segment (at least one each).

    Kept customers stay in their original order; action segments are
    renumbered densely.
    """
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    for k in range(instance.n_segments):
        members = instance.members(k)
        if members.shape[0] == 0:
            continue
        n_keep = max(1, int(round(fraction * members.shape[0])))
        kept.append(rng.permutation(members)[:n_keep])
    keep = np.sort(np.concatenate(kept))
    _, action_segment_of = np.unique(instance.action_segment_of[keep], return_inverse=True)
    return TargetingInstance(
        profits=instance.profits[keep],
        constraint_segment_of=instance.constraint_segment_of[keep],
        action_segment_of=action_segment_of,
        max_actions=instance.max_actions[keep],
        n_segments=instance.n_segments,
    )
