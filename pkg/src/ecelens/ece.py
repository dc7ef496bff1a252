"""Stratified causal-effect estimators over the discovered parent set.

Every estimate here is a weighted difference of the two plug-in outcome
rates, one stratum per observed value combination of a conditioning set:

    value = sum_s w_s * (P(y | treat=1, s) - P(y | treat=0, s)) / sum_s w_s

with w_s the stratum frequency.  Strata where either treatment arm is empty
are skipped and the remaining weights renormalized; the skipped mass stays
visible on the estimate.  Summation runs in lexicographic stratum order so
results are reproducible to the bit.

A feature outside the discovered parent set is assigned effect exactly zero
without estimation; nothing is ever computed for it.

The extended parent set adds two member kinds mined from combined variables:
combined causes (conjunctions of non-parents with a non-negligible effect
conditioned on the parent set) and interactions (conjunctions containing a
parent whose effect magnitude beats their strongest component parent by more
than the noise margin).  Conditioning sets larger than ``cond_subset_size``
are truncated to the members most associated with the treatment.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .dataset import BinaryDataset, Literal, cond_prob_y, iter_strata
from .independence import _association_strength_masks, _is_associated_masks
from .patterns import CombinedVariable
from .structure import ParentSet

PARENT = "parent"
COMBINED_CAUSE = "combined_cause"
INTERACTION = "interaction"


@dataclass(frozen=True)
class EceParams:
    epsilon: float = 0.01
    cond_subset_size: int = 5
    assoc_p_threshold: float = 0.05

    def __post_init__(self) -> None:
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be > 0")
        if self.cond_subset_size < 1:
            raise ValueError("cond_subset_size must be >= 1")
        if not 0.0 < self.assoc_p_threshold < 1.0:
            raise ValueError("assoc_p_threshold must be in (0, 1)")


@dataclass(frozen=True)
class StratumDetail:
    values: tuple[int, ...]
    weight: float
    arm1: float | None
    arm0: float | None
    contributing: bool


@dataclass(frozen=True)
class EceEstimate:
    """Stratified effect value with per-stratum detail.

    ``value`` is 0.0 when no stratum contributes; ``defined`` distinguishes
    that case from a genuine zero.  ``conditioning`` records which members
    were actually conditioned on after truncation.
    """

    value: float
    strata: tuple[StratumDetail, ...] = ()
    skipped_weight: float = 0.0
    conditioning: tuple[str, ...] = ()

    @property
    def defined(self) -> bool:
        return any(s.contributing for s in self.strata)

    @property
    def n_skipped(self) -> int:
        return sum(1 for s in self.strata if not s.contributing)


def _stratified_effect(
    ds: BinaryDataset,
    treat_masks: tuple[int, int],
    cond_pairs: Sequence[tuple[int, int]],
    conditioning: tuple[str, ...] = (),
) -> EceEstimate:
    y1 = ds.mask(ds.outcome, 1)
    n = ds.n_rows
    treat1, treat0 = treat_masks
    num = 0.0
    den = 0.0
    skipped = 0.0
    details: list[StratumDetail] = []
    for values, mask in iter_strata(ds.full_mask, cond_pairs):
        weight = mask.bit_count() / n
        m1 = mask & treat1
        m0 = mask & treat0
        c1 = m1.bit_count()
        c0 = m0.bit_count()
        p1 = (m1 & y1).bit_count() / c1 if c1 else None
        p0 = (m0 & y1).bit_count() / c0 if c0 else None
        if p1 is None or p0 is None:
            skipped += weight
            details.append(StratumDetail(values, weight, p1, p0, False))
            continue
        num += weight * (p1 - p0)
        den += weight
        details.append(StratumDetail(values, weight, p1, p0, True))
    value = num / den if den > 0.0 else 0.0
    return EceEstimate(value, tuple(details), skipped, conditioning)


def stratum_ece(ds: BinaryDataset, xi: int, p_prime: Sequence[Literal]) -> float | None:
    """Outcome-rate difference between the two arms of `xi` at one stratum.

    `p_prime` is a collection of literals fixing the conditioning values.
    Returns None when either arm has no support there.
    """
    lits = tuple(p_prime)
    if any(lit.column == xi for lit in lits):
        raise ValueError("conditioning literals must not reference the treatment column")
    p1 = cond_prob_y(ds, lits + (Literal(xi, 1),))
    p0 = cond_prob_y(ds, lits + (Literal(xi, 0),))
    if p1 is None or p0 is None:
        return None
    return p1 - p0


def avg_ece(ds: BinaryDataset, xi: int, parents: ParentSet) -> EceEstimate:
    """Average effect of parent `xi`, stratified over the other parents."""
    if xi not in parents:
        raise ValueError(f"column {xi} is not in the discovered parent set")
    cond = [c for c in parents if c != xi]
    return _stratified_effect(
        ds,
        ds.value_masks(xi),
        [ds.value_masks(c) for c in cond],
        tuple(ds.name_of(c) for c in cond),
    )


def feature_effect(ds: BinaryDataset, xi: int, parents: ParentSet) -> EceEstimate:
    """Effect of any feature: the stratified estimate for parents, exactly 0 otherwise."""
    if xi in parents:
        return avg_ece(ds, xi, parents)
    return EceEstimate(0.0)


def classify_explanatory_causes(
    estimates: Mapping[int, EceEstimate], epsilon: float
) -> list[int]:
    """Parents whose average effect magnitude reaches `epsilon` (inclusive)."""
    return sorted(col for col, est in estimates.items() if abs(est.value) >= epsilon)


@dataclass
class EpaMember:
    """One extended-parent-set member: a parent column or a combined variable."""

    kind: str
    column: int | None = None
    pattern: CombinedVariable | None = None
    screen_effect: EceEstimate | None = None
    avg_eece: EceEstimate | None = None

    @property
    def columns(self) -> frozenset[int]:
        if self.column is not None:
            return frozenset((self.column,))
        assert self.pattern is not None
        return self.pattern.columns

    def sort_key(self) -> tuple:
        if self.column is not None:
            return (0, self.column)
        assert self.pattern is not None
        return (1, len(self.pattern.literals), self.pattern.literals)

    def value_masks(self, ds: BinaryDataset) -> tuple[int, int]:
        if self.column is not None:
            return ds.value_masks(self.column)
        assert self.pattern is not None
        mask = ds.full_mask
        for lit in self.pattern.literals:
            mask &= ds.mask(lit.column, lit.value)
        return mask, ds.full_mask ^ mask

    def indicator_at(self, instance: Sequence[int]) -> int:
        """Value of this member's binary indicator at a full feature assignment."""
        if self.column is not None:
            return int(instance[self.column])
        assert self.pattern is not None
        return int(all(instance[lit.column] == lit.value for lit in self.pattern.literals))

    def description(self, ds: BinaryDataset) -> str:
        if self.column is not None:
            return ds.name_of(self.column)
        assert self.pattern is not None
        names = ", ".join(ds.name_of(lit.column) for lit in self.pattern.literals)
        values = ", ".join(str(lit.value) for lit in self.pattern.literals)
        return f"{{{names}}}={{{values}}}"


@dataclass(frozen=True)
class ExtendedParentSet:
    members: tuple[EpaMember, ...]
    parents: ParentSet

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


def select_conditioning_subset(
    ds: BinaryDataset,
    target: EpaMember | int | CombinedVariable,
    eligible: Sequence[EpaMember],
    size: int,
) -> list[EpaMember]:
    """The `size` eligible members most associated with the target.

    Ties break toward canonical member order; when everything fits, the
    eligible list is returned unchanged.  Output keeps canonical order so
    stratification over the subset stays deterministic.
    """
    members = list(eligible)
    if len(members) <= size:
        return members
    target_masks = _as_masks(ds, target)
    strengths = [
        _association_strength_masks(ds, target_masks, m.value_masks(ds)) for m in members
    ]
    picked = sorted(range(len(members)), key=lambda i: (-strengths[i], i))[:size]
    return [members[i] for i in sorted(picked)]


def _as_masks(
    ds: BinaryDataset, target: EpaMember | int | CombinedVariable
) -> tuple[int, int]:
    if isinstance(target, EpaMember):
        return target.value_masks(ds)
    if isinstance(target, CombinedVariable):
        mask = ds.full_mask
        for lit in target.literals:
            mask &= ds.mask(lit.column, lit.value)
        return mask, ds.full_mask ^ mask
    return ds.value_masks(target)


def _parent_members(parents: Sequence[int]) -> list[EpaMember]:
    return [EpaMember(kind=PARENT, column=c) for c in parents]


def avg_ece_combined_cause(
    ds: BinaryDataset,
    w: CombinedVariable,
    parents: ParentSet,
    params: EceParams,
) -> tuple[EceEstimate, bool]:
    """Effect of a non-parent conjunction conditioned on the parent set.

    The boolean is the acceptance verdict: effect magnitude at least
    epsilon.  Conditioning truncates to the most associated parents when the
    parent set exceeds the subset budget.
    """
    if any(c in parents for c in w.columns):
        raise ValueError("a combined cause must consist of non-parents only")
    cond = select_conditioning_subset(
        ds, w, _parent_members(tuple(parents)), params.cond_subset_size
    )
    est = _stratified_effect(
        ds,
        _as_masks(ds, w),
        [m.value_masks(ds) for m in cond],
        tuple(m.description(ds) for m in cond),
    )
    return est, abs(est.value) >= params.epsilon


def classify_interaction(
    ds: BinaryDataset,
    w: CombinedVariable,
    parents: ParentSet,
    parent_estimates: Mapping[int, EceEstimate],
    params: EceParams,
) -> tuple[EceEstimate, bool]:
    """Effect of a parent-containing conjunction versus its strongest parent.

    Conditioning excludes the parents inside the conjunction.  The verdict
    demands a strict improvement of more than epsilon over the strongest
    component parent, which suppresses noise-level gains.
    """
    component_parents = sorted(c for c in w.columns if c in parents)
    if not component_parents:
        raise ValueError("an interaction must contain at least one parent")
    xj = max(component_parents, key=lambda c: (abs(parent_estimates[c].value), -c))
    cond_cols = [c for c in parents if c not in w.columns]
    cond = select_conditioning_subset(
        ds, w, _parent_members(cond_cols), params.cond_subset_size
    )
    est = _stratified_effect(
        ds,
        _as_masks(ds, w),
        [m.value_masks(ds) for m in cond],
        tuple(m.description(ds) for m in cond),
    )
    return est, abs(est.value) > abs(parent_estimates[xj].value) + params.epsilon


def build_epa(
    ds: BinaryDataset,
    parents: ParentSet,
    parent_estimates: Mapping[int, EceEstimate],
    mined: Sequence[CombinedVariable],
    params: EceParams,
) -> ExtendedParentSet:
    """Assemble the extended parent set from parents and mined conjunctions."""
    members: list[EpaMember] = []
    for col in classify_explanatory_causes(parent_estimates, params.epsilon):
        members.append(
            EpaMember(kind=PARENT, column=col, screen_effect=parent_estimates[col])
        )
    for cv in mined:
        if cv.columns.isdisjoint(parents.parents):
            est, ok = avg_ece_combined_cause(ds, cv, parents, params)
            if ok:
                members.append(
                    EpaMember(kind=COMBINED_CAUSE, pattern=cv, screen_effect=est)
                )
        else:
            est, ok = classify_interaction(ds, cv, parents, parent_estimates, params)
            if ok:
                members.append(EpaMember(kind=INTERACTION, pattern=cv, screen_effect=est))
    members.sort(key=EpaMember.sort_key)
    return ExtendedParentSet(tuple(members), parents)


def _conditioning_for(
    ds: BinaryDataset, member: EpaMember, epa: ExtendedParentSet, params: EceParams
) -> list[EpaMember]:
    member_masks = member.value_masks(ds)
    eligible = [
        m
        for m in epa.members
        if m is not member
        and m.columns.isdisjoint(member.columns)
        and _is_associated_masks(ds, member_masks, m.value_masks(ds), params.assoc_p_threshold)
    ]
    return select_conditioning_subset(ds, member, eligible, params.cond_subset_size)


def avg_eece(
    ds: BinaryDataset, member: EpaMember, epa: ExtendedParentSet, params: EceParams
) -> EceEstimate:
    """Average extended effect: condition on associated members that share no column.

    Members containing the treatment member, or any part of it, are never
    conditioned on; the rest are filtered by marginal association and
    truncated to the subset budget.
    """
    cond = _conditioning_for(ds, member, epa, params)
    return _stratified_effect(
        ds,
        member.value_masks(ds),
        [m.value_masks(ds) for m in cond],
        tuple(m.description(ds) for m in cond),
    )


def eece_local(
    ds: BinaryDataset,
    member: EpaMember,
    epa: ExtendedParentSet,
    instance: Sequence[int],
    params: EceParams,
) -> float | None:
    """Extended effect of `member` at one instance's conditioning values.

    The conditioning subset is the same one the average estimator would use;
    its members are pinned to their indicator values at the instance.
    Returns None when either treatment arm has no support in that stratum.
    """
    cond = _conditioning_for(ds, member, epa, params)
    stratum = ds.full_mask
    for m in cond:
        ones, zeros = m.value_masks(ds)
        stratum &= ones if m.indicator_at(instance) == 1 else zeros
    treat1, treat0 = member.value_masks(ds)
    y1 = ds.mask(ds.outcome, 1)
    m1 = stratum & treat1
    m0 = stratum & treat0
    c1 = m1.bit_count()
    c0 = m0.bit_count()
    if c1 == 0 or c0 == 0:
        return None
    return (m1 & y1).bit_count() / c1 - (m0 & y1).bit_count() / c0


def dedupe_members(ds: BinaryDataset, epa: ExtendedParentSet) -> ExtendedParentSet:
    """Drop redundant combined members after their effects are known.

    A combined member is redundant outright when its support equals one of
    its component literals' support (the conjunction adds nothing over that
    component).  Among members over the same base column set only the one
    with the largest effect magnitude survives; ties keep the canonically
    first.
    """
    for m in epa.members:
        if m.avg_eece is None:
            raise ValueError("dedupe requires avg_eece on every member")
    survivors: list[EpaMember] = []
    by_base: dict[frozenset[int], EpaMember] = {}
    for m in epa.members:
        if m.pattern is None:
            survivors.append(m)
            continue
        if any(
            ds.mask(lit.column, lit.value).bit_count() == m.pattern.support
            for lit in m.pattern.literals
        ):
            continue
        base = m.columns
        kept = by_base.get(base)
        if kept is None or abs(m.avg_eece.value) > abs(kept.avg_eece.value):
            by_base[base] = m
    survivors.extend(by_base.values())
    survivors.sort(key=EpaMember.sort_key)
    return replace(epa, members=tuple(survivors))
