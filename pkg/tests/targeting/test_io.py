"""Tests for instance and menu files."""

import json
from pathlib import Path

import numpy as np
import pytest

from marchetype.targeting import (
    ActionSimilarity,
    ConstraintMenu,
    InstanceValidationError,
    MenuValidationError,
    SegmentPair,
    TargetingInstance,
    VolumeBound,
    WeightedSimilarity,
    WeightedVolume,
    load_instance,
    load_menu,
    load_pair_profits,
    menu_from_dict,
    menu_to_dict,
    save_instance,
    save_menu,
)


class TestInstanceFiles:
    """Tests for instance JSON."""

    def test_save_and_load(self, tiny_instance: TargetingInstance, tmp_path: Path) -> None:
        path = tmp_path / "out" / "instance.json"
        save_instance(tiny_instance, path)
        loaded = load_instance(path)

        np.testing.assert_array_equal(loaded.profits, tiny_instance.profits)
        assert json.loads(path.read_text())["n_segments"] == 2

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "instance.json"
        path.write_text("[")

        with pytest.raises(InstanceValidationError, match="invalid JSON"):
            load_instance(path)

    def test_missing_key(self, tmp_path: Path) -> None:
        path = tmp_path / "instance.json"
        path.write_text(json.dumps({"profits": [[1.0]]}))

        with pytest.raises(InstanceValidationError):
            load_instance(path)

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(OSError):
            load_instance(tmp_path / "nope.json")

    def test_pair_profits(self, tmp_path: Path) -> None:
        path = tmp_path / "q.json"
        path.write_text(json.dumps({"pair_profits": [[[0.0, 1.0], [1.0, 0.0]]]}))

        assert load_pair_profits(path).shape == (1, 2, 2)


class TestMenuFiles:
    """Tests for menu JSON."""

    def test_round_trip(self, tmp_path: Path) -> None:
        weights = np.ones((2, 1))
        menu = ConstraintMenu(
            volume1=(VolumeBound(0, 0, 0.0, 1.0),),
            volume2=WeightedVolume(np.array([1.0]), np.array([np.inf]), weights),
            similarity1=(ActionSimilarity(0, 0, 1, 1.1, 0.2),),
            similarity2=WeightedSimilarity((SegmentPair(0, 1, 1.3),), weights),
            targeting_enabled=False,
        )
        path = tmp_path / "menu.json"
        save_menu(menu, path)
        loaded = load_menu(path)

        assert loaded.volume1 == menu.volume1
        assert loaded.similarity1 == menu.similarity1
        assert loaded.similarity2[0].pairs == menu.similarity2[0].pairs
        assert np.isinf(loaded.volume2[0].upper[0])
        assert loaded.targeting_enabled is False
        assert '"inf"' in path.read_text()

    def test_single_object_family(self) -> None:
        data = {"volume2": {"lower": [0], "upper": ["inf"], "weights": [[1.0]]}}

        assert len(menu_from_dict(data).volume2) == 1

    def test_missing_families_default_empty(self) -> None:
        menu = menu_from_dict({})

        assert menu.volume1 == ()
        assert menu.targeting_enabled

    def test_bad_string_bound(self) -> None:
        data = {"volume2": [{"lower": ["lots"], "upper": [1], "weights": [[1.0]]}]}

        with pytest.raises(MenuValidationError, match="string bound"):
            menu_from_dict(data)

    def test_missing_field(self) -> None:
        with pytest.raises(MenuValidationError, match="invalid menu JSON"):
            menu_from_dict({"volume1": [{"segment": 0}]})

    def test_to_dict_is_json_safe(self) -> None:
        menu = ConstraintMenu(volume2=WeightedVolume(np.array([-np.inf]), np.array([np.inf]),
                                                     np.ones((1, 1))))

        json.dumps(menu_to_dict(menu), allow_nan=False)
