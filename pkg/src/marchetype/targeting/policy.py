"""Turn LP solutions into policies and check policies against a menu."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..lp import StandardLP, VariableKind
from ..sparse import dense_vector
from .compiler import CompileError, action_pairs
from .models import ConstraintMenu, Policy, TargetingInstance

BOUND_TOLERANCE = 1e-6


def extract_policy(lp: StandardLP, primal: np.ndarray, instance: TargetingInstance) -> Policy:
    """Reshape a primal vector into a Policy using the LP's column labels.

    The objective is read from the unclamped primal; assignment entries are
    clamped to [0, 1].

    Raises:
        DimensionMismatchError: If primal does not have one entry per column.
    """
    x = dense_vector(primal, lp.n_vars, name="primal")
    objective_value = -lp.objective_value(x)
    clamped = np.clip(x, 0.0, 1.0)

    kinds = np.array([label.kind.value for label in lp.column_labels])
    owners = np.array([label.owner for label in lp.column_labels], dtype=np.int64)
    actions = np.array([label.action for label in lp.column_labels], dtype=np.int64)
    J = instance.n_actions

    def gather(kind: VariableKind, n_rows: int) -> np.ndarray:
        out = np.zeros((n_rows, J))
        mask = kinds == kind.value
        out[owners[mask], actions[mask]] = clamped[mask]
        return out

    if np.any(kinds == VariableKind.SEGMENT_ACTION.value):
        return Policy(gather(VariableKind.SEGMENT_ACTION, instance.n_action_segments),
                      objective_value, segment_level=True)

    if np.any(kinds == VariableKind.AUXILIARY.value):
        pairs = action_pairs(J)
        index = {pair: p for p, pair in enumerate(pairs)}
        pair_assignment = np.zeros((instance.n_customers, len(pairs)))
        for w in np.flatnonzero(kinds == VariableKind.ACTION_PAIR.value):
            label = lp.column_labels[w]
            pair_assignment[label.owner, index[(label.action, label.action2)]] = clamped[w]
        return Policy(
            gather(VariableKind.AUXILIARY, instance.n_customers),
            objective_value,
            single_assignment=gather(VariableKind.SINGLE_ACTION, instance.n_customers),
            pair_assignment=pair_assignment,
        )

    return Policy(gather(VariableKind.CUSTOMER_ACTION, instance.n_customers), objective_value)


@dataclass(frozen=True)
class Violation:
    """One violated constraint; ``slack`` = rhs − lhs, negative when violated."""

    family: str
    indices: tuple[int, ...]
    slack: float


@dataclass(frozen=True)
class ViolationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def by_family(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.violations:
            counts[v.family] = counts.get(v.family, 0) + 1
        return counts

    def worst(self) -> Violation | None:
        return min(self.violations, key=lambda v: v.slack, default=None)


def validate_policy(
    policy: Policy,
    instance: TargetingInstance,
    menu: ConstraintMenu,
    tolerance: float = 1e-6,
) -> ViolationReport:
    """Evaluate every constraint family straight from the menu.

    Works on the customer-level expansion of the policy, independently of any
    compiled matrix. The report is empty iff the policy is feasible within
    ``tolerance``.

    Raises:
        CompileError: If a similarity constraint references an empty segment.
    """
    x = policy.per_customer(instance)
    seg = instance.constraint_segment_of
    sizes = instance.segment_sizes
    K = instance.n_segments
    found: list[Violation] = []

    def check(family: str, indices: tuple[int, ...], lhs: float, rhs: float) -> None:
        slack = float(rhs - lhs)
        # NaN counts as violated.
        if not slack >= -tolerance:
            found.append(Violation(family, indices, slack))

    # Box.
    low = np.argwhere(policy.assignment < -tolerance)
    high = np.argwhere(policy.assignment > 1.0 + tolerance)
    for r, j in low:
        found.append(Violation("box", (int(r), int(j)), float(policy.assignment[r, j])))
    for r, j in high:
        found.append(Violation("box", (int(r), int(j)), float(1.0 - policy.assignment[r, j])))

    totals = np.zeros((K, instance.n_actions))
    np.add.at(totals, seg, x)
    for v in menu.volume1:
        total = totals[v.segment, v.action]
        check("volume1", (v.segment, v.action), total, v.upper)
        check("volume1", (v.segment, v.action), -total, -v.lower)

    for vol in menu.volume2:
        weighted = np.bincount(seg, weights=(vol.weights * x).sum(axis=1), minlength=K)
        for k in range(K):
            if np.isfinite(vol.upper[k]):
                check("volume2", (k,), weighted[k], vol.upper[k])
            if np.isfinite(vol.lower[k]):
                check("volume2", (k,), -weighted[k], -vol.lower[k])

    def require_members(family: str, *segments: int) -> None:
        for k in segments:
            if sizes[k] == 0:
                raise CompileError(f"{family}: segment {k} is empty, per-capita term undefined")

    with np.errstate(divide="ignore", invalid="ignore"):
        means = totals / sizes[:, None]
    for s in menu.similarity1:
        require_members("similarity1", s.segment1, s.segment2)
        lhs = means[s.segment1, s.action] - s.ratio * means[s.segment2, s.action]
        check("similarity1", (s.action, s.segment1, s.segment2), lhs, s.offset)

    for sim in menu.similarity2:
        weighted = np.bincount(seg, weights=(sim.weights * x).sum(axis=1), minlength=K)
        with np.errstate(divide="ignore", invalid="ignore"):
            per_capita = weighted / sizes
        for pair in sim.pairs:
            require_members("similarity2", pair.segment1, pair.segment2)
            lhs = per_capita[pair.segment1] - pair.ratio * per_capita[pair.segment2]
            check("similarity2", (pair.segment1, pair.segment2), lhs, pair.offset)

    if menu.targeting_enabled:
        if policy.pair_assignment is not None and policy.single_assignment is not None:
            load = policy.single_assignment.sum(axis=1) + policy.pair_assignment.sum(axis=1)
            caps = np.ones(instance.n_customers)
        else:
            load = x.sum(axis=1)
            caps = instance.max_actions
        for i in np.flatnonzero(load - caps > tolerance):
            found.append(Violation("targeting", (int(i),), float(caps[i] - load[i])))

    return ViolationReport(tuple(found))
