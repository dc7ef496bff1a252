"""Acceptance gates for the whole engine.

Each test is one gate with its tolerance pinned; it prints a single
``[acceptance] <gate>: PASS`` line when it holds (run with ``-s`` to see the
lines as they happen).  The two census-data gates skip loudly when the
recoded CSV is not available; everything else is self-contained.
"""

from __future__ import annotations

import time

import numpy as np
import pytest

from ecelens.dataset import BinaryDataset, Column, load_csv, load_schema
from ecelens.ece import avg_ece, feature_effect, stratum_ece
from ecelens.cli import main as cli_main
from ecelens.dataset import Literal
from ecelens.patterns import MiningParams, mine_closed_patterns
from ecelens.report import RunConfig, _run_pipeline, run_global, run_local
from ecelens.structure import ParentSet, discover_parents
from ecelens.testkit import brute_force_avg_ece, d_separated, random_scm, sample, true_avg_ece
from ecelens.independence import g2_test

from conftest import ADULT_SKIP_MSG, adult_csv_path
from oracles import closed_patterns_exhaustive, make_dataset


def ok(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] {name}: PASS{suffix}")


# ---------------------------------------------------------------------------
# shared synthetic runs for the recovery / zero-effect gates

N_SCM_RUNS = 20
SCM_ROWS = 50_000


@pytest.fixture(scope="module")
def scm_runs():
    started = time.perf_counter()
    runs = []
    for i in range(N_SCM_RUNS):
        n_parents = (2, 3, 4)[i % 3]
        scm = random_scm(10, n_parents, seed=1000 + i)
        ds = sample(scm, SCM_ROWS)
        recovered = discover_parents(ds)
        runs.append((scm, ds, recovered))
    return runs, time.perf_counter() - started


def graph_truth_parents(scm) -> set[int]:
    """Ground-truth PC set of the outcome, derived from d-separation alone."""
    y = scm.outcome
    features = [v for v in range(len(scm.names)) if v != y]
    truth = set()
    for x in features:
        rest = [v for v in features if v != x]
        separable = False
        for mask in range(1 << len(rest)):
            s = {rest[i] for i in range(len(rest)) if (mask >> i) & 1}
            if d_separated(scm.parents, x, y, s):
                separable = True
                break
        if not separable:
            truth.add(x)
    return truth


class TestAcceptance:
    def test_c01_oracle_equivalence(self):
        started = time.perf_counter()
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(200):
            n = int(rng.integers(30, 2001))
            m = int(rng.integers(2, 9))
            cols = {f"X{i}": (rng.random(n) < rng.uniform(0.2, 0.8)).astype(np.uint8).tolist()
                    for i in range(m)}
            cols["Y"] = (rng.random(n) < 0.5).astype(np.uint8).tolist()
            ds = make_dataset(cols, outcome="Y")
            xi = int(rng.integers(0, m))
            others = [i for i in range(m) if i != xi]
            rng.shuffle(others)
            cond = sorted(others[: int(rng.integers(0, m))])
            engine = avg_ece(ds, xi, ParentSet(tuple(sorted([xi] + cond)), 0.01, 3))
            oracle = brute_force_avg_ece(ds, xi, cond)
            if oracle is None:
                assert not engine.defined
            else:
                assert engine.value == oracle  # bit-for-bit
            checked += 1
        elapsed = time.perf_counter() - started
        assert checked == 200
        assert elapsed < 30.0, f"took {elapsed:.1f}s, budget 30s"
        ok("oracle equivalence", f"200 datasets, {elapsed:.1f}s")

    def test_c02_parent_recovery_and_effect_consistency(self, scm_runs):
        scm_runs, setup_elapsed = scm_runs
        started = time.perf_counter()
        f1s = []
        errors = []
        for scm, ds, recovered in scm_runs:
            truth = graph_truth_parents(scm)
            assert truth == set(scm.outcome_parents())  # d-separation sanity
            found = set(recovered.parents)
            tp = len(found & truth)
            fp = len(found - truth)
            fn = len(truth - found)
            f1s.append(2 * tp / (2 * tp + fp + fn) if (tp + fp + fn) else 1.0)
            for u in found & truth:
                est = avg_ece(ds, u, recovered)
                errors.append(abs(est.value - true_avg_ece(scm, u)))
        mean_f1 = sum(f1s) / len(f1s)
        close = sum(1 for e in errors if e <= 0.03) / len(errors)
        elapsed = setup_elapsed + (time.perf_counter() - started)
        assert mean_f1 >= 0.90, f"mean F1 {mean_f1:.3f}"
        assert close >= 0.95, f"only {close:.1%} of effects within 0.03"
        assert elapsed < 300.0, f"took {elapsed:.1f}s, budget 300s"
        ok(
            "parent recovery and effect consistency",
            f"mean F1 {mean_f1:.3f}, {close:.1%} within 0.03, {elapsed:.1f}s incl. sampling",
        )

    def test_c03_zero_effect_for_non_parents(self, scm_runs):
        scm_runs, _ = scm_runs
        diagnostics = []
        for scm, ds, recovered in scm_runs:
            features = [v for v in range(len(scm.names)) if v != scm.outcome]
            for x in features:
                if x not in recovered.parents:
                    est = feature_effect(ds, x, recovered)
                    assert est.value == 0.0
                    assert est.strata == ()
            truth = set(scm.outcome_parents())
            for x in features:
                if x in truth:
                    continue
                # diagnostic stratified estimate, conditioning on the recovery
                widened = ParentSet(
                    tuple(sorted(set(recovered.parents) | {x})),
                    recovered.p_threshold,
                    recovered.max_order,
                )
                est = avg_ece(ds, x, widened)
                if est.defined:
                    diagnostics.append(abs(est.value))
        near_zero = sum(1 for v in diagnostics if v <= 0.05) / len(diagnostics)
        assert near_zero >= 0.95, f"only {near_zero:.1%} of non-parent estimates within 0.05"
        ok("zero effect for non-parents", f"{near_zero:.1%} of {len(diagnostics)} within 0.05")

    def test_c04_sign_antisymmetry_bitwise(self):
        rng = np.random.default_rng(99)
        checked = 0
        while checked < 100:
            n = int(rng.integers(40, 500))
            m = int(rng.integers(2, 6))
            cols = {f"X{i}": rng.integers(0, 2, n).tolist() for i in range(m)}
            cols["Y"] = rng.integers(0, 2, n).tolist()
            ds = make_dataset(cols, outcome="Y")
            xi = int(rng.integers(0, m))
            flipped = make_dataset(
                {k: ([1 - v for v in vals] if k == f"X{xi}" else vals)
                 for k, vals in cols.items()},
                outcome="Y",
            )
            others = [i for i in range(m) if i != xi]
            stratum = [Literal(c, int(rng.integers(0, 2)))
                       for c in others[: int(rng.integers(0, 3))]]
            a = stratum_ece(ds, xi, stratum)
            b = stratum_ece(flipped, xi, stratum)
            if a is None:
                assert b is None
            else:
                assert b == -a  # exact, bit-level
            checked += 1
        ok("sign anti-symmetry", "100 relabeled triples, exact negation")

    def test_c05_closed_miner_matches_exhaustive_enumeration(self):
        rng = np.random.default_rng(17)
        params = MiningParams(min_support=0.1, max_len=3)
        for trial in range(50):
            n = int(rng.integers(40, 160))
            m = int(rng.integers(2, 6))  # at most 10 frequent literals
            cols = {f"X{i}": (rng.random(n) < rng.uniform(0.2, 0.8)).astype(np.uint8).tolist()
                    for i in range(m)}
            cols["Y"] = [0] * n
            asym = {f"X{i}" for i in range(m) if rng.random() < 0.25}
            ds = make_dataset(cols, outcome="Y", asymmetric=asym)
            mined = {cv.literals for cv in mine_closed_patterns(ds, params)}
            expected = closed_patterns_exhaustive(ds, params)
            assert mined == expected, f"trial {trial}: {mined ^ expected}"
        ok("closed miner exactness", "50 datasets, set equality")

    def test_c06_g2_null_calibration(self):
        reps, n = 10_000, 1000
        rng = np.random.default_rng(2024)
        pvals = np.empty(reps)
        zeros = np.zeros(n, dtype=np.uint8)
        for i in range(reps):
            a = (rng.random(n) < 0.5).astype(np.uint8)
            b = (rng.random(n) < 0.5).astype(np.uint8)
            ds = BinaryDataset(
                [Column("a", "a", True, a), Column("b", "b", True, b),
                 Column("Y", "Y", True, zeros)],
                2,
            )
            pvals[i] = g2_test(ds, 0, 1).p_value
        s = np.sort(pvals)
        grid = np.arange(1, reps + 1) / reps
        ks = max(float(np.max(np.abs(s - grid))), float(np.max(np.abs(s - (grid - 1 / reps)))))
        assert ks < 0.02, f"KS distance {ks:.4f}"
        ok("null calibration of the independence test", f"KS {ks:.4f} over {reps} replicates")

    def test_c07_census_global_table(self):
        path = adult_csv_path()
        if path is None:
            print("[acceptance] census global table: SKIP (data unavailable)")
            pytest.skip(ADULT_SKIP_MSG)
        schema_path = path.with_suffix(".schema")
        schema = load_schema(schema_path) if schema_path.exists() else None
        started = time.perf_counter()
        ds = load_csv(path, schema, "Income")
        assert ds.n_rows == 48842
        married = ds.columns[ds.index_of("Married")].bits.sum()
        assert abs(int(married) - 22397) <= 25  # grouping matched to the published marginal
        report = run_global(RunConfig(data=str(path), schema=str(schema_path) if schema_path.exists() else None, target="Income"), ds=ds)
        elapsed = time.perf_counter() - started
        expected_signs = {
            "Married": 1, "Education.num.12": 1, "Agelt30": -1,
            "Prof": 1, "Education.num.9": -1,
        }
        top5 = [e for e in report.entries if e.kind == "parent"][:5]
        top5_names = {e.members[0][0] for e in top5}
        hits = 0
        for e in top5:
            name = e.members[0][0]
            if name in expected_signs and np.sign(e.effect) == expected_signs[name]:
                hits += 1
        assert hits >= 3, f"only {hits} of the published top-5 reproduced (got {top5_names})"
        married_entry = next(e for e in report.entries if e.members == (("Married", 1),))
        assert abs(married_entry.effect - 0.382) <= 0.08
        assert elapsed < 60.0, f"took {elapsed:.1f}s, budget 60s"
        ok(
            "census global table",
            f"{hits}/5 top features, Married at {married_entry.effect:.3f}, {elapsed:.1f}s",
        )

    def test_c08_census_local_coherence(self):
        path = adult_csv_path()
        if path is None:
            print("[acceptance] census local coherence: SKIP (data unavailable)")
            pytest.skip(ADULT_SKIP_MSG)
        schema_path = path.with_suffix(".schema")
        schema = load_schema(schema_path) if schema_path.exists() else None
        ds = load_csv(path, schema, "Income")
        wanted = {"Married": 0, "Education.num.12": 0, "Prof": 0, "Income": 0}
        idx = {name: ds.index_of(name) for name in wanted}
        row = next(
            r for r in range(ds.n_rows)
            if all(int(ds.columns[i].bits[r]) == v for name, v in wanted.items()
                   for i in [idx[name]])
        )
        report = run_local(
            RunConfig(data=str(path), schema=str(schema_path) if schema_path.exists() else None, target="Income"),
            row=row,
            ds=ds,
        )
        contributions = {}
        for e in report.entries:
            if e.kind == "parent" and e.members[0][0] in ("Married", "Education.num.12", "Prof"):
                contributions[e.members[0][0]] = e.effect
        assert set(contributions) == {"Married", "Education.num.12", "Prof"}
        assert all(v is not None and v > 0 for v in contributions.values()), contributions
        assert contributions["Married"] == max(contributions.values()), contributions
        ok("census local coherence", f"contributions {contributions}")

    def test_c09_byte_identical_reruns(self, tmp_path):
        data = tmp_path / "d.csv"
        truth = tmp_path / "t.json"
        rc = cli_main([
            "simulate", "--nodes", "8", "--parents", "3", "--n-rows", "20000",
            "--seed", "5", "--out-data", str(data), "--out-truth", str(truth),
        ])
        assert rc == 0
        outs = []
        for i in (1, 2):
            out = tmp_path / f"run{i}.json"
            rc = cli_main([
                "explain-global", "--data", str(data), "--target", "Y",
                "--seed", "11", "--format", "json", "--out", str(out),
            ])
            assert rc == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        ok("byte-identical reruns", f"{len(outs[0])} bytes")

    def test_c10_irrelevant_column_robustness(self):
        good = 0
        details = []
        for i in range(20):
            scm = random_scm(10, 3, seed=2000 + i)
            base = sample(scm, SCM_ROWS)
            rng = np.random.default_rng(9000 + i)
            z = (rng.random(SCM_ROWS) < 0.5).astype(np.uint8)
            aug = BinaryDataset(
                list(base.columns) + [Column("Znoise", "Znoise", True, z)], base.outcome
            )
            cfg = RunConfig(data="memory", target="Y")
            r1 = _run_pipeline(cfg, base)
            r2 = _run_pipeline(cfg, aug)
            eff1 = {m.column: m.avg_eece.value for m in r1.epa.members if m.column is not None}
            eff2 = {m.column: m.avg_eece.value for m in r2.epa.members if m.column is not None}
            z_col = aug.index_of("Znoise")
            z_is_parent = z_col in r2.epa.parents.parents
            shift = max((abs(eff1[c] - eff2[c]) for c in set(eff1) & set(eff2)), default=0.0)
            z_conditioned = any(
                "Znoise" == desc
                for m in r2.epa.members
                for est in (m.avg_eece, m.screen_effect)
                if est is not None
                for desc in est.conditioning
            )
            passed = (not z_is_parent) and (not z_conditioned) and shift <= 0.02
            good += passed
            details.append(round(shift, 4))
        assert good >= 19, f"{good}/20 runs clean (shifts {details})"
        ok("irrelevant-column robustness", f"{good}/20 runs, max shift {max(details):.4f}")
