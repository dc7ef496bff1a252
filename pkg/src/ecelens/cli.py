"""Command-line interface.

Subcommands::

    explain-global   rank extended members by average effect
    explain-local    rank extended members by effect at one instance
    discover         print the discovered parent set and per-parent effects
    mine             dump closed frequent conjunctions
    simulate         sample a random synthetic model to CSV plus ground truth

Exit codes: 0 success, 1 validation/schema/parse error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import ece as ece_mod
from . import report as report_mod
from . import testkit
from .dataset import save as save_dataset
from .errors import EceLensError
from .patterns import MiningParams, mine_closed_patterns
from .report import FORMATS, RunConfig, render
from .structure import discover_parents


def _add_data_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", required=True, help="input CSV path")
    parser.add_argument("--schema", default=None, help="companion schema file (key=value lines)")
    parser.add_argument("--target", required=True, help="outcome column name")


def _add_discovery_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p-value", type=float, default=0.01, help="independence-test threshold for parent discovery")
    parser.add_argument("--max-order", type=int, default=3, help="largest conditioning-set size in discovery")


def _add_mining_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-support", type=float, default=0.05, help="minimum support fraction for conjunctions")
    parser.add_argument("--max-len", type=int, default=3, help="largest conjunction length")


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    _add_discovery_options(parser)
    _add_mining_options(parser)
    parser.add_argument("--epsilon", type=float, default=0.01, help="minimum effect / improvement magnitude")
    parser.add_argument("--cond-size", type=int, default=5, help="conditioning-subset budget per estimate")
    parser.add_argument("--assoc-p", type=float, default=0.05, help="association threshold for conditioning eligibility")
    parser.add_argument("--seed", type=int, default=0, help="echoed into the report for provenance")
    parser.add_argument("--format", choices=FORMATS, default="json")
    _add_out_option(parser)
    parser.add_argument("--plot", default=None, help="also render a bar chart to this image path")


def _add_out_option(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="output path (stdout when omitted)")


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        data=args.data,
        schema=args.schema,
        target=args.target,
        p_threshold=args.p_value,
        max_order=args.max_order,
        min_support=args.min_support,
        max_len=args.max_len,
        epsilon=args.epsilon,
        cond_subset_size=args.cond_size,
        assoc_p_threshold=args.assoc_p,
        seed=args.seed,
        fmt=args.format,
    )


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _cmd_explain_global(args: argparse.Namespace) -> int:
    config = _config(args)
    report = report_mod.run_global(config)
    _emit(render(report, config.fmt), args.out)
    if args.plot:
        from .figures import render_effect_chart

        render_effect_chart(report, args.plot)
    return 0


def _cmd_explain_local(args: argparse.Namespace) -> int:
    config = _config(args)
    report = report_mod.run_local(config, row=args.row, instance_file=args.instance)
    _emit(render(report, config.fmt), args.out)
    if args.plot:
        from .figures import render_effect_chart

        render_effect_chart(report, args.plot)
    return 0


def _load(args: argparse.Namespace):
    config = RunConfig(data=args.data, schema=args.schema, target=args.target)
    return report_mod.load_dataset(config)


def _cmd_discover(args: argparse.Namespace) -> int:
    ds = _load(args)
    parents = discover_parents(ds, args.p_value, args.max_order)
    estimates = {c: ece_mod.avg_ece(ds, c, parents) for c in parents}
    doc = {
        "mode": "discover",
        "target": args.target,
        "p_value": args.p_value,
        "max_order": args.max_order,
        "parents": [
            {"column": ds.name_of(c), "effect": round(estimates[c].value, 4)} for c in parents
        ],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _cmd_mine(args: argparse.Namespace) -> int:
    ds = _load(args)
    mined = mine_closed_patterns(ds, MiningParams(args.min_support, args.max_len))
    doc = {
        "mode": "mine",
        "target": args.target,
        "min_support": args.min_support,
        "max_len": args.max_len,
        "patterns": [
            {
                "members": [
                    {"column": ds.name_of(lit.column), "value": lit.value}
                    for lit in cv.literals
                ],
                "support": cv.support,
                "support_fraction": round(cv.support / ds.n_rows, 4),
            }
            for cv in mined
        ],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    scm = testkit.random_scm(args.nodes, args.parents, args.seed)
    ds = testkit.sample(scm, args.n_rows)
    save_dataset(ds, args.out_data)
    truth = {
        "outcome": scm.names[scm.outcome],
        "parents": [scm.names[u] for u in scm.outcome_parents()],
        "true_avg_ece": {
            scm.names[u]: testkit.true_avg_ece(scm, u) for u in scm.outcome_parents()
        },
    }
    Path(args.out_truth).write_text(json.dumps(truth, indent=2) + "\n", encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ecelens",
        description="Model-agnostic explanations from stratified causal-effect estimates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_global = sub.add_parser("explain-global", help="model-level ranked explanation")
    _add_data_options(p_global)
    _add_run_options(p_global)
    p_global.set_defaults(func=_cmd_explain_global)

    p_local = sub.add_parser("explain-local", help="instance-level ranked explanation")
    _add_data_options(p_local)
    _add_run_options(p_local)
    p_local.add_argument("--row", type=int, default=None, help="0-based row index of the instance")
    p_local.add_argument("--instance", default=None, help="json file of column: value assignments")
    p_local.set_defaults(func=_cmd_explain_local)

    p_discover = sub.add_parser("discover", help="parent discovery only")
    _add_data_options(p_discover)
    _add_discovery_options(p_discover)
    _add_out_option(p_discover)
    p_discover.set_defaults(func=_cmd_discover)

    p_mine = sub.add_parser("mine", help="closed frequent conjunctions only")
    _add_data_options(p_mine)
    _add_mining_options(p_mine)
    _add_out_option(p_mine)
    p_mine.set_defaults(func=_cmd_mine)

    p_sim = sub.add_parser("simulate", help="sample a synthetic model with known truth")
    p_sim.add_argument("--nodes", type=int, required=True, help="total variables including the outcome")
    p_sim.add_argument("--parents", type=int, required=True, help="number of outcome parents")
    p_sim.add_argument("--n-rows", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out-data", required=True, help="CSV path for the sampled matrix")
    p_sim.add_argument("--out-truth", required=True, help="json path for parents and true effects")
    p_sim.set_defaults(func=_cmd_simulate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (EceLensError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
