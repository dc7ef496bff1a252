from __future__ import annotations

import numpy as np
import pytest

from ecelens.structure import discover_parents
from ecelens.testkit import SyntheticSCM, sample

from oracles import make_dataset


def pure_noise_dataset(n=10_000, m=6, seed=0):
    rng = np.random.default_rng(seed)
    cols = {f"X{i}": rng.integers(0, 2, n).tolist() for i in range(m)}
    cols["Y"] = rng.integers(0, 2, n).tolist()
    return make_dataset(cols, outcome="Y")


class TestDiscovery:
    def test_pure_noise_gives_empty_set(self):
        # seeds where no feature slips the order-0 screen by chance alone
        for seed in (1, 2, 3):
            ds = pure_noise_dataset(seed=seed)
            assert discover_parents(ds).parents == ()

    def test_chain_keeps_only_the_direct_parent(self):
        # X1 -> X2 -> Y with probabilities well inside (0, 1)
        scm = SyntheticSCM(
            names=("X1", "X2", "Y"),
            parents=((), (0,), (1,)),
            cpts=((0.5,), (0.8, 0.2), (0.15, 0.85)),
            outcome=2,
            seed=101,
        )
        ds = sample(scm, 50_000)
        assert discover_parents(ds).parents == (1,)

    def test_copy_of_outcome_is_never_removed(self):
        rng = np.random.default_rng(21)
        n = 5000
        y = rng.integers(0, 2, n)
        cols = {
            "copy": y.tolist(),
            "noise1": rng.integers(0, 2, n).tolist(),
            "noise2": rng.integers(0, 2, n).tolist(),
            "Y": y.tolist(),
        }
        ds = make_dataset(cols, outcome="Y")
        for max_order in (0, 1, 2, 3):
            assert 0 in discover_parents(ds, max_order=max_order).parents

    def test_max_order_zero_is_marginal_screen(self):
        scm = SyntheticSCM(
            names=("X1", "X2", "Y"),
            parents=((), (0,), (1,)),
            cpts=((0.5,), (0.8, 0.2), (0.15, 0.85)),
            outcome=2,
            seed=31,
        )
        ds = sample(scm, 50_000)
        # marginally X1 is also dependent on Y through the chain
        assert discover_parents(ds, max_order=0).parents == (0, 1)

    def test_deterministic_and_permutation_invariant(self):
        scm = SyntheticSCM(
            names=("X1", "X2", "X3", "Y"),
            parents=((), (0,), (0,), (1, 2)),
            cpts=((0.4,), (0.7, 0.25), (0.3, 0.8), (0.1, 0.6, 0.45, 0.9)),
            outcome=3,
            seed=77,
        )
        ds = sample(scm, 20_000)
        first = discover_parents(ds)
        second = discover_parents(ds)
        assert first == second

        rng = np.random.default_rng(8)
        perm = rng.permutation(ds.n_rows)
        shuffled = make_dataset(
            {c.name: [int(c.bits[i]) for i in perm] for c in ds.columns}, outcome="Y"
        )
        assert discover_parents(shuffled).parents == first.parents

    def test_validation(self):
        ds = pure_noise_dataset(n=100, m=2)
        with pytest.raises(ValueError):
            discover_parents(ds, max_order=-1)
        only_outcome = make_dataset({"Y": [0, 1, 0, 1]}, outcome="Y")
        with pytest.raises(ValueError):
            discover_parents(only_outcome)

    def test_parent_set_container_protocol(self):
        ds = pure_noise_dataset(n=2000, m=3, seed=5)
        ps = discover_parents(ds)
        assert len(ps) == len(ps.parents)
        assert all(p in ps for p in ps.parents)
