"""Synthetic instances, the segment hierarchy and the default menu."""

from .generator import GenConfig, draw_profits, generate_instance, subsample_instance
from .hierarchy import (
    SIMILARITY_LADDER,
    SegmentHierarchy,
    load_hierarchy,
    save_hierarchy,
)
from .menus import default_constraint_menu, volume_fractions

__all__ = [
    "SIMILARITY_LADDER",
    "GenConfig",
    "SegmentHierarchy",
    "default_constraint_menu",
    "draw_profits",
    "generate_instance",
    "load_hierarchy",
    "save_hierarchy",
    "subsample_instance",
    "volume_fractions",
]
