"""Ground-truth machinery for verifying the engine: synthetic structural
causal models with explicit conditional probability tables, exact joint
enumeration, closed-form effect values, d-separation, and a deliberately
naive stratified estimator used as an equivalence oracle.

The model layout mirrors the problem setting: all variables are binary and
the outcome is a sink (no descendants), so its parent set is exactly what
the discovery module is supposed to recover.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dataset import BinaryDataset, Column
from .errors import CapacityError

_EXACT_JOINT_MAX_VARS = 20


@dataclass(frozen=True)
class SyntheticSCM:
    """DAG + conditional probability tables over binary variables.

    ``parents[v]`` lists v's parents in ascending index order; ``cpts[v]``
    has one entry per parent-value combination, indexed by sum(value_j << j)
    over the parents in that order, giving P(v=1 | combination).  The
    outcome variable has no children.
    """

    names: tuple[str, ...]
    parents: tuple[tuple[int, ...], ...]
    cpts: tuple[tuple[float, ...], ...]
    outcome: int
    seed: int = 0

    def __post_init__(self) -> None:
        p = len(self.names)
        if not (len(self.parents) == len(self.cpts) == p):
            raise ValueError("names, parents and cpts must align")
        for v, (pa, cpt) in enumerate(zip(self.parents, self.cpts)):
            if tuple(sorted(pa)) != tuple(pa):
                raise ValueError(f"parents of variable {v} must be sorted")
            if len(cpt) != 2 ** len(pa):
                raise ValueError(f"cpt of variable {v} has wrong size")
            if any(not 0.0 <= q <= 1.0 for q in cpt):
                raise ValueError(f"cpt of variable {v} has entries outside [0, 1]")
            if self.outcome in pa:
                raise ValueError("the outcome must have no children")
        self.topological_order()  # raises on cycles

    def topological_order(self) -> list[int]:
        indeg = {v: len(pa) for v, pa in enumerate(self.parents)}
        children: dict[int, list[int]] = {v: [] for v in range(len(self.names))}
        for v, pa in enumerate(self.parents):
            for u in pa:
                children[u].append(v)
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order: list[int] = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
            ready.sort()
        if len(order) != len(self.names):
            raise ValueError("the graph contains a directed cycle")
        return order

    def outcome_parents(self) -> tuple[int, ...]:
        return self.parents[self.outcome]


def _combo_index(values: Sequence[int], positions: Sequence[int]) -> int:
    return sum(int(values[p]) << j for j, p in enumerate(positions))


def sample(scm: SyntheticSCM, n: int) -> BinaryDataset:
    """Ancestral sampling in topological order; reproducible for a fixed seed."""
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(scm.seed)
    p = len(scm.names)
    data = np.zeros((n, p), dtype=np.uint8)
    for v in scm.topological_order():
        pa = scm.parents[v]
        cpt = np.asarray(scm.cpts[v])
        if pa:
            idx = np.zeros(n, dtype=np.int64)
            for j, u in enumerate(pa):
                idx += data[:, u].astype(np.int64) << j
            pv = cpt[idx]
        else:
            pv = np.full(n, cpt[0])
        data[:, v] = (rng.random(n) < pv).astype(np.uint8)
    columns = [
        Column(name=scm.names[v], group=scm.names[v], symmetric=True, bits=data[:, v])
        for v in range(p)
    ]
    return BinaryDataset(columns, scm.outcome)


def exact_joint(scm: SyntheticSCM) -> np.ndarray:
    """Probability of every configuration; index bit v carries variable v's value."""
    p = len(scm.names)
    if p > _EXACT_JOINT_MAX_VARS:
        raise CapacityError(f"exact joint supports at most {_EXACT_JOINT_MAX_VARS} variables")
    configs = np.arange(1 << p, dtype=np.int64)
    bits = (configs[:, None] >> np.arange(p)) & 1
    probs = np.ones(1 << p, dtype=float)
    for v in range(p):
        pa = scm.parents[v]
        cpt = np.asarray(scm.cpts[v])
        idx = np.zeros(1 << p, dtype=np.int64)
        for j, u in enumerate(pa):
            idx += bits[:, u] << j
        pv1 = cpt[idx]
        probs *= np.where(bits[:, v] == 1, pv1, 1.0 - pv1)
    return probs


def true_ece(scm: SyntheticSCM, xi: int, x_prime: Mapping[int, int] | Sequence[int]) -> float:
    """Effect of toggling `xi` with every other variable held at `x_prime`.

    Under full control of the system this is a direct lookup into the
    outcome's probability table; variables outside the outcome's parent set
    have exactly zero effect.
    """
    if xi == scm.outcome:
        raise ValueError("the treatment cannot be the outcome")
    pa = scm.outcome_parents()
    if xi not in pa:
        return 0.0
    values = dict(x_prime) if isinstance(x_prime, Mapping) else dict(enumerate(x_prime))
    cpt = scm.cpts[scm.outcome]

    def lookup(xi_value: int) -> float:
        combo = [xi_value if u == xi else int(values[u]) for u in pa]
        return cpt[sum(v << j for j, v in enumerate(combo))]

    return lookup(1) - lookup(0)


def true_avg_ece(scm: SyntheticSCM, xi: int) -> float:
    """Exact average effect of a parent, weighted by the true stratum marginals."""
    pa = scm.outcome_parents()
    if xi not in pa:
        raise ValueError(f"variable {xi} is not a parent of the outcome")
    others = tuple(u for u in pa if u != xi)
    joint = exact_joint(scm)
    p = len(scm.names)
    configs = np.arange(1 << p, dtype=np.int64)
    bits = (configs[:, None] >> np.arange(p)) & 1
    cpt = scm.cpts[scm.outcome]
    total = 0.0
    for combo in range(1 << len(others)):
        sel = np.ones(1 << p, dtype=bool)
        values: dict[int, int] = {}
        for j, u in enumerate(others):
            bit = (combo >> j) & 1
            values[u] = bit
            sel &= bits[:, u] == bit
        weight = float(joint[sel].sum())
        if weight == 0.0:
            continue
        hi = [1 if u == xi else values[u] for u in pa]
        lo = [0 if u == xi else values[u] for u in pa]
        d = cpt[sum(v << j for j, v in enumerate(hi))] - cpt[sum(v << j for j, v in enumerate(lo))]
        total += weight * d
    return total


def d_separated(
    parents: Sequence[Sequence[int]], a: int, b: int, s: Sequence[int] | set[int]
) -> bool:
    """Whether every path between `a` and `b` is blocked given `s` (reachability form).

    `parents` is the DAG given as each node's parent list.  A chain or fork
    is blocked when its middle node is conditioned on; a collider blocks
    unless it, or one of its descendants, is conditioned on.
    """
    cond = set(s)
    if a == b or a in cond or b in cond:
        raise ValueError("endpoints must be distinct and unconditioned")
    p = len(parents)
    children: list[list[int]] = [[] for _ in range(p)]
    for v in range(p):
        for u in parents[v]:
            children[u].append(v)

    # nodes with a conditioned descendant (or conditioned themselves) open colliders
    opens_collider = set(cond)
    frontier = list(cond)
    while frontier:
        v = frontier.pop()
        for u in parents[v]:
            if u not in opens_collider:
                opens_collider.add(u)
                frontier.append(u)

    # (node, came_from_child) states; start as if arriving from a child of `a`
    visited: set[tuple[int, bool]] = set()
    stack: list[tuple[int, bool]] = [(a, True)]
    while stack:
        node, from_child = stack.pop()
        if (node, from_child) in visited:
            continue
        visited.add((node, from_child))
        if node == b and node not in cond:
            return False
        if from_child:
            if node not in cond:
                for u in parents[node]:
                    stack.append((u, True))
                for c in children[node]:
                    stack.append((c, False))
        else:
            if node not in cond:
                for c in children[node]:
                    stack.append((c, False))
            if node in opens_collider:
                for u in parents[node]:
                    stack.append((u, True))
    return True


def brute_force_avg_ece(
    ds: BinaryDataset, xi: int, cond_vars: Sequence[int]
) -> float | None:
    """Naive row-scan stratified estimator used to cross-check the engine.

    Shares no code with the engine: strata are gathered with plain Python
    loops, iterated in sorted value order, and aggregated with the same
    skip-and-renormalize rule.  Returns None when every stratum is skipped.
    """
    cols = {c: [int(v) for v in ds.columns[c].bits] for c in cond_vars}
    treat = [int(v) for v in ds.columns[xi].bits]
    y = [int(v) for v in ds.columns[ds.outcome].bits]
    n = ds.n_rows

    groups: dict[tuple[int, ...], list[int]] = {}
    for r in range(n):
        key = tuple(cols[c][r] for c in cond_vars)
        groups.setdefault(key, []).append(r)

    num = 0.0
    den = 0.0
    for key in sorted(groups):
        rows = groups[key]
        weight = len(rows) / n
        arm1 = [r for r in rows if treat[r] == 1]
        arm0 = [r for r in rows if treat[r] == 0]
        if not arm1 or not arm0:
            continue
        p1 = sum(y[r] for r in arm1) / len(arm1)
        p0 = sum(y[r] for r in arm0) / len(arm0)
        num += weight * (p1 - p0)
        den += weight
    if den == 0.0:
        return None
    return num / den


def random_scm(
    n_nodes: int,
    n_parents: int,
    seed: int,
    cpt_bounds: tuple[float, float] = (0.1, 0.9),
    edge_prob: float = 0.25,
    min_parent_effect: float = 0.05,
    max_tries: int = 200,
) -> SyntheticSCM:
    """Random sink-outcome model whose parents all carry a detectable effect.

    Feature-to-feature edges appear independently with `edge_prob` (respecting
    a fixed topological order); the outcome's parents are a uniform draw of
    `n_parents` features.  Draws where any parent's exact average effect
    falls below `min_parent_effect` are rejected, so recovery failures in
    tests point at the engine rather than at a vanishing signal.
    """
    if n_parents >= n_nodes:
        raise ValueError("need n_parents < n_nodes")
    lo, hi = cpt_bounds
    rng = np.random.default_rng(seed)
    n_features = n_nodes - 1
    outcome = n_features
    names = tuple(f"X{i + 1}" for i in range(n_features)) + ("Y",)
    for _ in range(max_tries):
        parents: list[tuple[int, ...]] = []
        for v in range(n_features):
            pa = tuple(u for u in range(v) if rng.random() < edge_prob)
            parents.append(pa)
        y_parents = tuple(sorted(rng.choice(n_features, size=n_parents, replace=False).tolist()))
        parents.append(y_parents)
        cpts = tuple(
            tuple(rng.uniform(lo, hi, size=2 ** len(pa)).tolist()) for pa in parents
        )
        scm = SyntheticSCM(names, tuple(parents), cpts, outcome, seed=seed)
        if all(abs(true_avg_ece(scm, u)) >= min_parent_effect for u in y_parents):
            return scm
    raise RuntimeError(f"no acceptable model found in {max_tries} draws for seed {seed}")
