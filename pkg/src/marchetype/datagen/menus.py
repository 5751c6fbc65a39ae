"""The default hierarchical constraint menu."""

from __future__ import annotations

import numpy as np

from ..targeting import (
    ActionSimilarity,
    ConstraintMenu,
    SegmentPair,
    TargetingInstance,
    VolumeBound,
    WeightedSimilarity,
    WeightedVolume,
)
from .hierarchy import SegmentHierarchy

VOLUME_LOWER_FRACTIONS = (0.3, 0.05, 0.05, 0.3, 0.05)
VOLUME_UPPER_FRACTIONS = (0.35, 0.1, 0.1, 0.35, 0.1)
OUTCOME_WEIGHTS = (0.3, 0.3, 0.2, 0.1, 0.1)
PERFORMANCE_SHARE = 0.7


def volume_fractions(n_actions: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-action (lower, upper) shares of n_k.

    The five-action ladder is cycled for other J and shrunk so the upper
    shares sum to at most one.
    """
    lower = np.resize(np.asarray(VOLUME_LOWER_FRACTIONS), n_actions)
    upper = np.resize(np.asarray(VOLUME_UPPER_FRACTIONS), n_actions)
    scale = min(1.0, 1.0 / upper.sum())
    return lower * scale, upper * scale


def default_constraint_menu(instance: TargetingInstance,
                            hierarchy: SegmentHierarchy) -> ConstraintMenu:
    """Volume I/II, Similarity I/II over unordered pairs (k1 < k2), and targeting.

    Similarity ratios follow the hierarchy ladder with zero offsets; Volume II
    is a lower-only floor of 70% of the segment's total upper share.

    Raises:
        ValueError: If the hierarchy and instance disagree on K.
    """
    K, J, I = instance.n_segments, instance.n_actions, instance.n_customers
    if hierarchy.n_segments != K:
        raise ValueError(f"hierarchy has {hierarchy.n_segments} segments, instance has {K}")
    sizes = instance.segment_sizes.astype(np.float64)
    lower, upper = volume_fractions(J)

    volume1 = tuple(
        VolumeBound(k, j, float(lower[j] * sizes[k]), float(upper[j] * sizes[k]))
        for k in range(K)
        for j in range(J)
    )
    volume2 = WeightedVolume(
        lower=PERFORMANCE_SHARE * sizes * upper.sum(),
        upper=np.full(K, np.inf),
        weights=np.ones((I, J)),
    )
    pairs = [(k1, k2) for k1 in range(K) for k2 in range(k1 + 1, K)]
    similarity1 = tuple(
        ActionSimilarity(j, k1, k2, hierarchy.similarity_ratio(k1, k2), 0.0)
        for k1, k2 in pairs
        for j in range(J)
    )
    weights = np.tile(np.resize(np.asarray(OUTCOME_WEIGHTS), J), (I, 1))
    similarity2 = WeightedSimilarity(
        pairs=tuple(SegmentPair(k1, k2, hierarchy.similarity_ratio(k1, k2), 0.0)
                    for k1, k2 in pairs),
        weights=weights,
    )
    return ConstraintMenu(
        volume1=volume1,
        volume2=(volume2,),
        similarity1=similarity1,
        similarity2=(similarity2,) if pairs else (),
        targeting_enabled=True,
    )
