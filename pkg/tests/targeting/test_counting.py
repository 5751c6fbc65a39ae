"""Tests for closed-form constraint counts."""

import numpy as np
import pytest

from marchetype.targeting import (
    ActionSimilarity,
    ConstraintMenu,
    MenuShape,
    SegmentPair,
    TargetingInstance,
    VolumeBound,
    WeightedSimilarity,
    WeightedVolume,
    compile_ipwc,
    constraint_count,
)


class TestConstraintCount:
    """Tests for constraint_count."""

    def test_full_ordered_menu(self) -> None:
        count = constraint_count(229, 5, 2_065_758)

        assert count.as_dict() == {
            "volume1": 2_290,
            "volume2": 458,
            "similarity1": 261_060,
            "similarity2": 52_212,
            "targeting": 2_065_758,
            "total": 2_381_778,
        }

    def test_hierarchical_menu(self) -> None:
        assert constraint_count(229, 5, 2_065_758, MenuShape.hierarchical()).total == 2_224_913

    def test_similarity1_for_eighteen_segments(self) -> None:
        assert constraint_count(18, 5, 100).similarity1 == 1_530

    def test_single_segment_has_no_similarity_rows(self) -> None:
        count = constraint_count(1, 5, 10)

        assert count.similarity1 == 0
        assert count.similarity2 == 0

    def test_disabled_families(self) -> None:
        shape = MenuShape(volume1=False, targeting=False)
        count = constraint_count(3, 2, 50, shape)

        assert count.volume1 == 0
        assert count.targeting == 0

    def test_invalid_volume2_sides(self) -> None:
        with pytest.raises(ValueError):
            MenuShape(volume2_sides=3)

    @pytest.mark.parametrize("K", range(1, 7))
    @pytest.mark.parametrize("J", range(1, 4))
    @pytest.mark.parametrize("shape", [MenuShape.full(), MenuShape.hierarchical()],
                             ids=["full", "hierarchical"])
    def test_matches_compiled_rows(self, K: int, J: int, shape: MenuShape) -> None:
        """The formula agrees with the compiler family by family."""
        rng = np.random.default_rng(2)
        I = 3 * K
        instance = TargetingInstance(rng.normal(size=(I, J)), np.arange(I) % K, np.arange(I),
                                     np.ones(I))
        weights = np.ones((I, J))
        if shape.unordered_pairs:
            pairs = [(a, b) for a in range(K) for b in range(a + 1, K)]
        else:
            pairs = [(a, b) for a in range(K) for b in range(K) if a != b]
        upper = np.full(K, np.inf) if shape.volume2_sides == 1 else np.full(K, 5.0)
        menu = ConstraintMenu(
            volume1=tuple(VolumeBound(k, j, 0.0, 1.0) for k in range(K) for j in range(J)),
            volume2=WeightedVolume(np.zeros(K), upper, weights),
            similarity1=tuple(ActionSimilarity(j, a, b, 1.2) for j in range(J) for a, b in pairs),
            similarity2=WeightedSimilarity(tuple(SegmentPair(a, b, 1.2) for a, b in pairs),
                                           weights),
        )

        lp = compile_ipwc(instance, menu)
        count = constraint_count(K, J, I, shape).as_dict()
        assert lp.n_rows == count.pop("total")
        assert lp.family_counts() == count
