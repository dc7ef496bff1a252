"""Pipeline orchestration and report rendering.

``run_global`` chains discovery, effect estimation, pattern mining, member
classification, extended-set assembly, re-estimation, and redundancy removal
into one ranked model-level explanation.  ``run_local`` reuses the same
extended set and evaluates each member at a single instance's conditioning
values; entries are oriented so a positive number always reads as support
for the instance's predicted class.

Reports render to json (stable field names), csv (one entry per row) and
markdown (a human table).  Effects are printed with four decimal places,
round-half-to-even, in every format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from . import ece as ece_mod
from .dataset import AttributeSchema, BinaryDataset, load_csv, load_schema
from .ece import EceParams, EpaMember, ExtendedParentSet
from .errors import ValidationError
from .patterns import MiningParams, mine_closed_patterns
from .structure import discover_parents

FORMATS = ("json", "csv", "md")


@dataclass(frozen=True)
class RunConfig:
    data: str
    target: str
    schema: str | None = None
    p_threshold: float = 0.01
    max_order: int = 3
    min_support: float = 0.05
    max_len: int = 3
    epsilon: float = 0.01
    cond_subset_size: int = 5
    assoc_p_threshold: float = 0.05
    seed: int = 0
    fmt: str = "json"

    def __post_init__(self) -> None:
        if self.fmt not in FORMATS:
            raise ValidationError(f"unknown output format {self.fmt!r}")

    def mining_params(self) -> MiningParams:
        return MiningParams(min_support=self.min_support, max_len=self.max_len)

    def ece_params(self) -> EceParams:
        return EceParams(
            epsilon=self.epsilon,
            cond_subset_size=self.cond_subset_size,
            assoc_p_threshold=self.assoc_p_threshold,
        )


@dataclass(frozen=True)
class Entry:
    rank: int
    kind: str
    members: tuple[tuple[str, int], ...]
    effect: float | None
    direction: str | None = None

    @property
    def description(self) -> str:
        if self.kind == ece_mod.PARENT:
            return self.members[0][0]
        names = ", ".join(name for name, _ in self.members)
        values = ", ".join(str(value) for _, value in self.members)
        return f"{{{names}}}={{{values}}}"


@dataclass(frozen=True)
class ExplanationReport:
    mode: str
    target: str
    config: dict
    entries: tuple[Entry, ...]
    warnings: tuple[str, ...] = ()


def load_dataset(config: RunConfig) -> BinaryDataset:
    schema = load_schema(config.schema) if config.schema else AttributeSchema()
    return load_csv(config.data, schema, config.target)


def _member_literals(ds: BinaryDataset, member: EpaMember) -> tuple[tuple[str, int], ...]:
    if member.column is not None:
        return ((ds.name_of(member.column), 1),)
    assert member.pattern is not None
    return tuple((ds.name_of(lit.column), lit.value) for lit in member.pattern.literals)


@dataclass
class PipelineResult:
    ds: BinaryDataset
    epa: ExtendedParentSet
    warnings: list[str]
    n_mined: int


def _run_pipeline(config: RunConfig, ds: BinaryDataset | None = None) -> PipelineResult:
    ds = ds if ds is not None else load_dataset(config)
    params = config.ece_params()
    warnings: list[str] = []

    parents = discover_parents(ds, config.p_threshold, config.max_order)
    if not parents.parents:
        warnings.append("no parents discovered; the extended parent set is empty")
    parent_estimates = {c: ece_mod.avg_ece(ds, c, parents) for c in parents}
    mined = mine_closed_patterns(ds, config.mining_params())
    epa = ece_mod.build_epa(ds, parents, parent_estimates, mined, params)
    for member in epa.members:
        member.avg_eece = ece_mod.avg_eece(ds, member, epa, params)
    epa = ece_mod.dedupe_members(ds, epa)
    return PipelineResult(ds, epa, warnings, len(mined))


def _config_echo(config: RunConfig, result: PipelineResult) -> dict:
    skipped = sum(
        m.avg_eece.n_skipped for m in result.epa.members if m.avg_eece is not None
    )
    return {
        "data": str(config.data),
        "schema": str(config.schema) if config.schema else None,
        "target": config.target,
        "p_value": config.p_threshold,
        "max_order": config.max_order,
        "min_support": config.min_support,
        "max_len": config.max_len,
        "epsilon": config.epsilon,
        "cond_size": config.cond_subset_size,
        "assoc_p": config.assoc_p_threshold,
        "seed": config.seed,
        "n_rows": result.ds.n_rows,
        "n_parents": len(result.epa.parents),
        "n_epa": len(result.epa),
        "n_patterns_mined": result.n_mined,
        "strata_skipped": skipped,
    }


def run_global(config: RunConfig, ds: BinaryDataset | None = None) -> ExplanationReport:
    """Model-level explanation: extended members ranked by average effect size."""
    result = _run_pipeline(config, ds)
    ds = result.ds
    ordered = sorted(
        enumerate(result.epa.members),
        key=lambda pair: (-abs(pair[1].avg_eece.value), pair[0]),
    )
    entries = tuple(
        Entry(
            rank=i + 1,
            kind=member.kind,
            members=_member_literals(ds, member),
            effect=member.avg_eece.value,
        )
        for i, (_, member) in enumerate(ordered)
    )
    return ExplanationReport(
        mode="global",
        target=config.target,
        config=_config_echo(config, result),
        entries=entries,
        warnings=tuple(result.warnings),
    )


def _resolve_instance(
    ds: BinaryDataset, row: int | None, instance_file: str | Path | None
) -> list[int]:
    if (row is None) == (instance_file is None):
        raise ValidationError("local explanation needs exactly one of a row index or an instance file")
    if row is not None:
        if not 0 <= row < ds.n_rows:
            raise ValidationError(f"row {row} out of range (dataset has {ds.n_rows} rows)")
        return [int(col.bits[row]) for col in ds.columns]
    try:
        payload = json.loads(Path(instance_file).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"instance file is not valid json: {exc}") from exc
    if not isinstance(payload, dict):
        raise ValidationError("instance file must hold a json object of column: value")
    known = {c.name for c in ds.columns}
    unknown = sorted(set(payload) - known)
    if unknown:
        raise ValidationError(f"instance assigns unknown columns: {unknown}")
    missing = sorted(known - set(payload))
    if missing:
        raise ValidationError(f"instance is missing columns: {missing}")
    values = []
    for col in ds.columns:
        v = payload[col.name]
        if v not in (0, 1):
            raise ValidationError(f"instance value for {col.name!r} must be 0 or 1, got {v!r}")
        values.append(int(v))
    return values


def run_local(
    config: RunConfig,
    row: int | None = None,
    instance_file: str | Path | None = None,
    ds: BinaryDataset | None = None,
) -> ExplanationReport:
    """Instance-level explanation: members ranked by effect at the instance.

    Each member's raw effect (arm 1 minus arm 0) is oriented by the signs of
    the member's indicator value at the instance and of the predicted class,
    so positive entries support the prediction.  Members whose stratum lacks
    support in one arm are listed last with no number.
    """
    result = _run_pipeline(config, ds)
    ds = result.ds
    instance = _resolve_instance(ds, row, instance_file)
    predicted = instance[ds.outcome]
    params = config.ece_params()

    scored: list[tuple[EpaMember, float | None, int]] = []
    for member in result.epa.members:
        raw = ece_mod.eece_local(ds, member, result.epa, instance, params)
        indicator = member.indicator_at(instance)
        if raw is None:
            scored.append((member, None, indicator))
        else:
            orient = (1.0 if indicator == 1 else -1.0) * (1.0 if predicted == 1 else -1.0)
            scored.append((member, raw * orient, indicator))

    def order(key: tuple[int, tuple[EpaMember, float | None, int]]) -> tuple:
        idx, (_, effect, _) = key
        if effect is None:
            return (1, 0.0, idx)
        return (0, -abs(effect), idx)

    entries = []
    warnings = list(result.warnings)
    for rank, (_, (member, effect, indicator)) in enumerate(
        sorted(enumerate(scored), key=order), start=1
    ):
        if member.column is not None:
            shown = f"{ds.name_of(member.column)}={indicator}"
        else:
            shown = f"{member.description(ds)}={indicator}"
        direction = f"{shown} -> Class={predicted}"
        entries.append(
            Entry(
                rank=rank,
                kind=member.kind,
                members=_member_literals(ds, member),
                effect=effect,
                direction=direction,
            )
        )
        if effect is None:
            warnings.append(f"no support for {member.description(ds)} at this instance")
    return ExplanationReport(
        mode="local",
        target=config.target,
        config=_config_echo(config, result),
        entries=tuple(entries),
        warnings=tuple(warnings),
    )


def _entry_payload(entry: Entry, local: bool) -> dict:
    payload: dict = {
        "rank": entry.rank,
        "kind": entry.kind,
        "members": [{"column": name, "value": value} for name, value in entry.members],
        "effect": None if entry.effect is None else round(entry.effect, 4),
    }
    if local:
        payload["direction"] = entry.direction
    return payload


def _fmt_effect(effect: float | None) -> str:
    return "no support" if effect is None else f"{effect:.4f}"


def render(report: ExplanationReport, fmt: str) -> str:
    """Serialize a report; json, csv and markdown carry identical entries."""
    local = report.mode == "local"
    if fmt == "json":
        doc = {
            "mode": report.mode,
            "target": report.target,
            "config": report.config,
            "entries": [_entry_payload(e, local) for e in report.entries],
            "warnings": list(report.warnings),
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        lines = ["rank,kind,members,effect,direction"]
        for e in report.entries:
            members = ";".join(f"{name}={value}" for name, value in e.members)
            direction = e.direction or ""
            lines.append(f"{e.rank},{e.kind},\"{members}\",{_fmt_effect(e.effect)},\"{direction}\"")
        return "\n".join(lines) + "\n"
    if fmt == "md":
        title = f"{'Local' if local else 'Global'} explanation for {report.target}"
        lines = [f"# {title}", ""]
        if local:
            lines += ["| Rank | Member | Kind | Effect | Direction |", "| --- | --- | --- | --- | --- |"]
            for e in report.entries:
                lines.append(
                    f"| {e.rank} | {e.description} | {e.kind} | {_fmt_effect(e.effect)} | {e.direction} |"
                )
        else:
            lines += ["| Rank | Member | Kind | Effect |", "| --- | --- | --- | --- |"]
            for e in report.entries:
                lines.append(f"| {e.rank} | {e.description} | {e.kind} | {_fmt_effect(e.effect)} |")
        if report.warnings:
            lines += ["", "Warnings:"] + [f"- {w}" for w in report.warnings]
        return "\n".join(lines) + "\n"
    raise ValidationError(f"unknown output format {fmt!r}")


def parse_report_json(text: str) -> ExplanationReport:
    """Inverse of the json rendering, for round-trip checks and downstream tooling."""
    doc = json.loads(text)
    entries = tuple(
        Entry(
            rank=e["rank"],
            kind=e["kind"],
            members=tuple((m["column"], m["value"]) for m in e["members"]),
            effect=e["effect"],
            direction=e.get("direction"),
        )
        for e in doc["entries"]
    )
    return ExplanationReport(
        mode=doc["mode"],
        target=doc["target"],
        config=doc["config"],
        entries=entries,
        warnings=tuple(doc["warnings"]),
    )
