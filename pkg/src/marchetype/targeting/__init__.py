"""Targeting domain model, LP compilers, constraint counts and policy checks."""

from .compiler import (
    FAMILY_ORDER,
    CompileError,
    action_pairs,
    compile_interdependent,
    compile_ipwc,
    compile_spwc,
    segment_caps,
    synergy_pair_profits,
)
from .counting import ConstraintCount, MenuShape, constraint_count
from .io import (
    load_instance,
    load_menu,
    load_pair_profits,
    menu_from_dict,
    menu_to_dict,
    save_instance,
    save_menu,
)
from .models import (
    ActionSimilarity,
    ConstraintMenu,
    InstanceValidationError,
    MenuValidationError,
    Policy,
    SegmentPair,
    TargetingError,
    TargetingInstance,
    VolumeBound,
    WeightedSimilarity,
    WeightedVolume,
    budget_constraint,
    performance_constraint,
    symmetric_pairs,
)
from .policy import Violation, ViolationReport, extract_policy, validate_policy

__all__ = [
    "FAMILY_ORDER",
    "ActionSimilarity",
    "CompileError",
    "ConstraintCount",
    "ConstraintMenu",
    "InstanceValidationError",
    "MenuShape",
    "MenuValidationError",
    "Policy",
    "SegmentPair",
    "TargetingError",
    "TargetingInstance",
    "Violation",
    "ViolationReport",
    "VolumeBound",
    "WeightedSimilarity",
    "WeightedVolume",
    "action_pairs",
    "budget_constraint",
    "compile_interdependent",
    "compile_ipwc",
    "compile_spwc",
    "constraint_count",
    "extract_policy",
    "load_instance",
    "load_menu",
    "load_pair_profits",
    "menu_from_dict",
    "menu_to_dict",
    "performance_constraint",
    "save_instance",
    "save_menu",
    "segment_caps",
    "symmetric_pairs",
    "synergy_pair_profits",
    "validate_policy",
]
