"""Closed frequent conjunctions of (column, value) literals.

A combined variable is a conjunction of literals materialized as one derived
binary column: 1 on a row iff every literal holds there.  Mining is a
level-wise search over frequent literals with three constraints:

* support fraction strictly above the minimum,
* no two literals from the same attribute group,
* length between 2 and the configured maximum.

Only closed sets are emitted: a set absorbed by an equal-support superset
inside the same bounded, group-constrained lattice carries no information of
its own.  For asymmetric columns the value 0 never appears as a literal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import BinaryDataset, Literal


@dataclass(frozen=True)
class MiningParams:
    min_support: float = 0.05
    max_len: int = 3
    exclude_same_group: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.min_support < 1.0:
            raise ValueError("min_support must be in (0, 1)")
        if self.max_len < 2:
            raise ValueError("max_len must be >= 2")


@dataclass(frozen=True)
class CombinedVariable:
    """A conjunction of literals plus its materialized indicator column."""

    literals: tuple[Literal, ...]
    support: int
    bits: np.ndarray = field(compare=False, repr=False)

    @property
    def columns(self) -> frozenset[int]:
        return frozenset(lit.column for lit in self.literals)


def enumerate_literals(ds: BinaryDataset, params: MiningParams) -> list[Literal]:
    """Frequent literals in canonical (column, value) order.

    Both values are candidates for symmetric columns; asymmetric columns
    contribute only value 1.
    """
    threshold = params.min_support * ds.n_rows
    out: list[Literal] = []
    for col in ds.feature_indices:
        values = (0, 1) if ds.columns[col].symmetric else (1,)
        for value in values:
            if ds.mask(col, value).bit_count() > threshold:
                out.append(Literal(col, value))
    return out


def materialize(ds: BinaryDataset, literals: Sequence[Literal]) -> np.ndarray:
    """Row-wise AND of the literal indicators as a 0/1 vector."""
    cols = [lit.column for lit in literals]
    if len(set(cols)) != len(cols):
        raise ValueError("literals must reference pairwise distinct columns")
    if ds.outcome in cols:
        raise ValueError("literals must not reference the outcome column")
    out = np.ones(ds.n_rows, dtype=np.uint8)
    for lit in literals:
        out &= ds.columns[lit.column].bits == lit.value
    return out


def mine_closed_patterns(ds: BinaryDataset, params: MiningParams) -> list[CombinedVariable]:
    """All closed frequent literal sets of size 2..max_len, canonically ordered.

    Level-wise candidate generation with anti-monotone pruning; closedness is
    judged against one-literal extensions only, which is equivalent to
    checking all supersets inside the bounded lattice.
    """
    literals = enumerate_literals(ds, params)
    lit_masks = {lit: ds.mask(lit.column, lit.value) for lit in literals}
    groups = {lit: ds.columns[lit.column].group for lit in literals}
    threshold = params.min_support * ds.n_rows

    def compatible(a: Literal, b: Literal) -> bool:
        if params.exclude_same_group and groups[a] == groups[b]:
            return False
        return a.column != b.column

    # level 2 seeds
    level: dict[tuple[Literal, ...], int] = {}
    for i, a in enumerate(literals):
        mask_a = lit_masks[a]
        for b in literals[i + 1 :]:
            if not compatible(a, b):
                continue
            mask = mask_a & lit_masks[b]
            support = mask.bit_count()
            if support > threshold:
                level[(a, b)] = mask

    frequent: dict[tuple[Literal, ...], int] = dict(level)
    while level and len(next(iter(level))) < params.max_len:
        keys = sorted(level)
        known = set(keys)
        nxt: dict[tuple[Literal, ...], int] = {}
        for i, p in enumerate(keys):
            for q in keys[i + 1 :]:
                if p[:-1] != q[:-1]:
                    break  # sorted keys: shared prefixes are contiguous
                tail = q[-1]
                if not all(compatible(lit, tail) for lit in p):
                    continue
                candidate = p + (tail,)
                # anti-monotone prune: every (len-1)-subset must be frequent
                # (dropping the last element reproduces p, already known)
                if any(
                    candidate[:j] + candidate[j + 1 :] not in known
                    for j in range(len(candidate) - 1)
                ):
                    continue
                mask = level[p] & lit_masks[tail]
                support = mask.bit_count()
                if support > threshold:
                    nxt[candidate] = mask
        frequent.update(nxt)
        level = nxt

    closed: list[CombinedVariable] = []
    for key in sorted(frequent, key=lambda k: (len(k), k)):
        mask = frequent[key]
        support = mask.bit_count()
        if len(key) < params.max_len:
            key_groups = {groups[lit] for lit in key}
            absorbed = False
            for lit in literals:
                if params.exclude_same_group and groups[lit] in key_groups:
                    continue
                if lit.column in {k.column for k in key}:
                    continue
                if (mask & lit_masks[lit]).bit_count() == support:
                    absorbed = True
                    break
            if absorbed:
                continue
        closed.append(CombinedVariable(key, support, materialize(ds, key)))
    return closed
