"""Conditional independence testing and association scoring over binary columns.

The test statistic is the likelihood-ratio G^2 over 2x2 tables, one table per
value combination of the conditioning set, summed across non-empty strata and
referred to a chi-squared distribution with one degree of freedom per
contributing stratum.  Small samples are not tested at all: below ten rows
per potential table cell the result is flagged ``performed=False`` with
sentinel values that read as dependence, which keeps downstream edge removal
conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from scipy.stats import chi2

from .dataset import BinaryDataset, iter_strata

# minimum rows demanded per contingency-table cell before testing
_ROWS_PER_CELL = 10


@dataclass(frozen=True)
class CiTestResult:
    statistic: float
    dof: int
    p_value: float
    performed: bool


_SKIPPED = CiTestResult(statistic=0.0, dof=0, p_value=0.0, performed=False)


def _g2_over_strata(
    a1: int, a0: int, b1: int, b0: int, strata: Sequence[int] | list[int]
) -> tuple[float, int]:
    """G^2 statistic and degrees of freedom summed over non-empty strata.

    Zero cells contribute nothing (the x*ln(x) -> 0 limit); every stratum
    with at least one row contributes one degree of freedom.
    """
    g2 = 0.0
    dof = 0
    for mask in strata:
        n_s = mask.bit_count()
        if n_s == 0:
            continue
        ma1 = mask & a1
        ma0 = mask & a0
        o11 = (ma1 & b1).bit_count()
        o10 = (ma1 & b0).bit_count()
        o01 = (ma0 & b1).bit_count()
        o00 = (ma0 & b0).bit_count()
        r1 = o11 + o10
        r0 = o01 + o00
        c1 = o11 + o01
        c0 = o10 + o00
        for o, r, c in ((o11, r1, c1), (o10, r1, c0), (o01, r0, c1), (o00, r0, c0)):
            if o:
                g2 += 2.0 * o * math.log(o * n_s / (r * c))
        dof += 1
    return g2, dof


def _g2_masks(
    ds: BinaryDataset,
    a_masks: tuple[int, int],
    b_masks: tuple[int, int],
    cond_pairs: Sequence[tuple[int, int]],
) -> CiTestResult:
    cells = 4 * (2 ** len(cond_pairs))
    if ds.n_rows < _ROWS_PER_CELL * cells:
        return _SKIPPED
    strata = [mask for _, mask in iter_strata(ds.full_mask, cond_pairs)]
    g2, dof = _g2_over_strata(a_masks[0], a_masks[1], b_masks[0], b_masks[1], strata)
    return CiTestResult(statistic=g2, dof=dof, p_value=float(chi2.sf(g2, dof)), performed=True)


def g2_test(ds: BinaryDataset, a: int, b: int, cond: Sequence[int] = ()) -> CiTestResult:
    """Test column `a` against column `b` given the columns in `cond`."""
    cond = tuple(cond)
    if a == b:
        raise ValueError("cannot test a column against itself")
    if a in cond or b in cond:
        raise ValueError("conditioning set must not contain the tested columns")
    return _g2_masks(
        ds, ds.value_masks(a), ds.value_masks(b), [ds.value_masks(c) for c in cond]
    )


def association_strength(ds: BinaryDataset, a: int, b: int) -> float:
    """Marginal G^2 between two columns; larger means more associated.

    The raw statistic is used rather than the p-value so that orderings stay
    stable when p-values underflow to zero.
    """
    if a == b:
        raise ValueError("cannot score a column against itself")
    g2, _ = _g2_over_strata(*ds.value_masks(a), *ds.value_masks(b), [ds.full_mask])
    return g2


def _association_strength_masks(
    ds: BinaryDataset, a_masks: tuple[int, int], b_masks: tuple[int, int]
) -> float:
    g2, _ = _g2_over_strata(a_masks[0], a_masks[1], b_masks[0], b_masks[1], [ds.full_mask])
    return g2


def is_associated(ds: BinaryDataset, a: int, b: int, p_threshold: float) -> bool:
    """True iff the marginal test ran and rejected independence at `p_threshold`."""
    res = g2_test(ds, a, b)
    return res.performed and res.p_value < p_threshold


def _is_associated_masks(
    ds: BinaryDataset,
    a_masks: tuple[int, int],
    b_masks: tuple[int, int],
    p_threshold: float,
) -> bool:
    res = _g2_masks(ds, a_masks, b_masks, ())
    return res.performed and res.p_value < p_threshold
