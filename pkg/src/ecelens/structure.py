"""Local discovery of the outcome's direct causes.

Because the outcome is a model prediction it has no descendants, so its
parent set coincides with its parents-and-children set and can be found by
local constraint-based search: screen features by marginal dependence, then
try to separate each survivor from the outcome by conditioning on growing
subsets of the other survivors.  A feature is dropped at the first subset
that renders it independent and never reconsidered.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .dataset import BinaryDataset
from .independence import g2_test


@dataclass(frozen=True)
class ParentSet:
    """Discovered parent columns, in ascending column order."""

    parents: tuple[int, ...]
    p_threshold: float
    max_order: int

    def __contains__(self, col: int) -> bool:
        return col in self.parents

    def __iter__(self) -> Iterator[int]:
        return iter(self.parents)

    def __len__(self) -> int:
        return len(self.parents)


def discover_parents(
    ds: BinaryDataset, p_threshold: float = 0.01, max_order: int = 3
) -> ParentSet:
    """Find the outcome's parents by order-limited conditional independence search.

    Order 0 keeps only features marginally dependent on the outcome (a test
    skipped for sample-size reasons counts as dependence).  At each order
    s >= 1 every remaining candidate is tested against all size-s subsets of
    the other candidates, in lexicographic order; removals within an order
    are batched and applied before the next order starts, so results do not
    depend on iteration interleaving.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    features = ds.feature_indices
    if not features:
        raise ValueError("dataset has no feature columns")
    y = ds.outcome

    candidates: list[int] = []
    for x in features:
        res = g2_test(ds, x, y)
        if not res.performed or res.p_value < p_threshold:
            candidates.append(x)

    for order in range(1, max_order + 1):
        if len(candidates) - 1 < order:
            break
        removed: set[int] = set()
        for x in candidates:
            others = [c for c in candidates if c != x]
            for subset in combinations(others, order):
                res = g2_test(ds, x, y, subset)
                if res.performed and res.p_value >= p_threshold:
                    removed.add(x)
                    break
        if removed:
            candidates = [c for c in candidates if c not in removed]

    return ParentSet(tuple(candidates), p_threshold, max_order)
