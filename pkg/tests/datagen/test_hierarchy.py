"""Tests for the segment hierarchy."""

from pathlib import Path

import pytest

from marchetype.datagen import SIMILARITY_LADDER, SegmentHierarchy, load_hierarchy, save_hierarchy


class TestBuild:
    """Tests for SegmentHierarchy.build."""

    def test_five_digit_leaves(self) -> None:
        assert SegmentHierarchy.build(5, (2, 3, 4)).n_segments == 24

    def test_three_digit_leaves(self) -> None:
        hierarchy = SegmentHierarchy.build(3, (2, 2))

        assert hierarchy.n_segments == 4
        assert hierarchy.paths == ((0, 0), (0, 1), (1, 0), (1, 1))

    def test_missing_levels_have_fanout_one(self) -> None:
        assert SegmentHierarchy.build(4, (3,)).n_segments == 3

    @pytest.mark.parametrize(
        ("depth", "branching", "message"),
        [
            (6, (2,), "zip_depth"),
            (5, (2, 0), "positive"),
            (5, (1, 1, 11), "at most 10"),
            (5, (1, 1, 1, 1, 1), "at most"),
            (3, (40, 30), "1000"),
        ],
    )
    def test_invalid(self, depth: int, branching: tuple[int, ...], message: str) -> None:
        with pytest.raises(ValueError, match=message):
            SegmentHierarchy.build(depth, branching)


class TestSimilarity:
    """Tests for the tree distance and the ratio ladder."""

    def test_ladder_values(self) -> None:
        assert SIMILARITY_LADDER == {3: 1.1, 2: 1.2, 1: 1.3, 0: 1.4}

    def test_same_four_digit_prefix(self) -> None:
        hierarchy = SegmentHierarchy.build(5, (1, 1, 2, 2))

        assert hierarchy.tree_distance(0, 1) == 3
        assert hierarchy.similarity_ratio(0, 1) == 1.1

    def test_same_three_digit_prefix(self) -> None:
        hierarchy = SegmentHierarchy.build(5, (1, 1, 2, 2))

        assert hierarchy.similarity_ratio(0, 2) == 1.2

    def test_same_state(self) -> None:
        hierarchy = SegmentHierarchy.build(3, (2, 2))

        assert hierarchy.similarity_ratio(0, 1) == 1.3

    def test_different_states(self) -> None:
        hierarchy = SegmentHierarchy.build(3, (2, 2))

        assert hierarchy.similarity_ratio(1, 2) == 1.4


class TestLabels:
    """Tests for zip-style labels."""

    def test_three_digit(self) -> None:
        hierarchy = SegmentHierarchy.build(3, (2, 3))

        assert hierarchy.labels(5) == {"state": "S01", "zip3": "005"}

    def test_five_digit_extends_prefix(self) -> None:
        hierarchy = SegmentHierarchy.build(5, (1, 1, 2, 3))
        labels = hierarchy.labels(hierarchy.n_segments - 1)

        assert labels["zip4"] == labels["zip3"] + "1"
        assert labels["zip5"] == labels["zip4"] + "2"


class TestPersistence:
    """Tests for hierarchy JSON."""

    def test_save_and_load(self, tmp_path: Path) -> None:
        hierarchy = SegmentHierarchy.build(5, (2, 3, 4))
        path = tmp_path / "nested" / "hierarchy.json"

        save_hierarchy(hierarchy, path)

        assert load_hierarchy(path) == hierarchy

    def test_invalid_json(self) -> None:
        with pytest.raises(ValueError, match="invalid hierarchy"):
            SegmentHierarchy.from_dict({"zip_depth": 3})
