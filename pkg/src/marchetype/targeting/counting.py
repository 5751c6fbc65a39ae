"""Closed-form constraint counts per family."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MenuShape:
    """Which families are active and how similarity pairs are enumerated.

    Attributes:
        unordered_pairs: Similarity rows over k1 < k2 only, instead of all k1 != k2.
        volume2_sides: Rows per segment for Volume II (2 two-sided, 1 one-sided).
    """

    volume1: bool = True
    volume2: bool = True
    similarity1: bool = True
    similarity2: bool = True
    targeting: bool = True
    unordered_pairs: bool = False
    volume2_sides: int = 2

    def __post_init__(self) -> None:
        if self.volume2_sides not in (1, 2):
            raise ValueError("volume2_sides must be 1 or 2")

    @classmethod
    def full(cls) -> MenuShape:
        """Every family, ordered pairs, two-sided Volume II."""
        return cls()

    @classmethod
    def hierarchical(cls) -> MenuShape:
        """Lower-only Volume II and unordered similarity pairs."""
        return cls(unordered_pairs=True, volume2_sides=1)


@dataclass(frozen=True)
class ConstraintCount:
    volume1: int
    volume2: int
    similarity1: int
    similarity2: int
    targeting: int

    @property
    def total(self) -> int:
        return self.volume1 + self.volume2 + self.similarity1 + self.similarity2 + self.targeting

    def as_dict(self) -> dict[str, int]:
        return {
            "volume1": self.volume1,
            "volume2": self.volume2,
            "similarity1": self.similarity1,
            "similarity2": self.similarity2,
            "targeting": self.targeting,
            "total": self.total,
        }


def constraint_count(n_segments: int, n_actions: int, n_customers: int,
                     shape: MenuShape | None = None) -> ConstraintCount:
    """Rows per family for K segments, J actions and I customers.

    >>> constraint_count(229, 5, 2_065_758).total
    2381778
    """
    shape = shape or MenuShape.full()
    K, J, I = n_segments, n_actions, n_customers
    pairs = K * (K - 1) // 2 if shape.unordered_pairs else K * (K - 1)
    return ConstraintCount(
        volume1=2 * K * J if shape.volume1 else 0,
        volume2=shape.volume2_sides * K if shape.volume2 else 0,
        similarity1=pairs * J if shape.similarity1 else 0,
        similarity2=pairs if shape.similarity2 else 0,
        targeting=I if shape.targeting else 0,
    )
