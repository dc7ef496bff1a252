"""Binary tabular data: schema declarations, CSV loading, and bit-level counting.

Everything downstream operates on an immutable :class:`BinaryDataset`: an
n x m 0/1 matrix with named columns, per-column attribute-group tags and
value-symmetry flags, and one designated outcome column.  Counting queries
are served from per-column bitmasks (arbitrary-size Python integers), which
keeps stratified contingency counting fast at census scale without anything
beyond numpy.

A companion schema file declares attribute kinds and symmetry as plain
``key=value`` lines::

    married.kind=binary
    age.kind=numeric
    occupation.kind=categorical
    occupation.symmetric=false

Attributes absent from the file default to ``kind=binary``,
``symmetric=true``.  An optional ``name.group=attr`` line restores the
source-attribute tag when reloading an already binarized matrix, so a
save/load round trip is lossless.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ParseError, SchemaError

KINDS = ("categorical", "numeric", "binary")


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str = "binary"
    symmetric: bool = True
    group: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"unknown kind {self.kind!r} for attribute {self.name!r}")


@dataclass(frozen=True)
class AttributeSchema:
    """Declared attributes; lookups fall back to binary/symmetric defaults."""

    attributes: tuple[Attribute, ...] = ()

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate attribute names in schema: {dupes}")

    def resolve(self, name: str) -> Attribute:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return Attribute(name=name)

    def declared_names(self) -> list[str]:
        return [a.name for a in self.attributes]


def parse_schema(text: str) -> AttributeSchema:
    """Parse ``name.kind= / name.symmetric= / name.group=`` lines into a schema."""
    kinds: dict[str, str] = {}
    symmetric: dict[str, bool] = {}
    groups: dict[str, str] = {}
    order: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SchemaError(f"schema line {lineno} is not key=value: {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if "." not in key:
            raise SchemaError(f"schema line {lineno}: key {key!r} lacks a .kind/.symmetric/.group suffix")
        name, prop = key.rsplit(".", 1)
        if name not in order:
            order.append(name)
        if prop == "kind":
            kinds[name] = value
        elif prop == "symmetric":
            if value.lower() not in ("true", "false"):
                raise SchemaError(f"schema line {lineno}: symmetric must be true/false, got {value!r}")
            symmetric[name] = value.lower() == "true"
        elif prop == "group":
            groups[name] = value
        else:
            raise SchemaError(f"schema line {lineno}: unknown property {prop!r}")
    attrs = tuple(
        Attribute(
            name=name,
            kind=kinds.get(name, "binary"),
            symmetric=symmetric.get(name, True),
            group=groups.get(name),
        )
        for name in order
    )
    return AttributeSchema(attrs)


def load_schema(path: str | Path) -> AttributeSchema:
    return parse_schema(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class Column:
    name: str
    group: str
    symmetric: bool
    bits: np.ndarray = field(repr=False)


@dataclass(frozen=True, order=True)
class Literal:
    """A (column, value) atom; value is 0 or 1."""

    column: int
    value: int


class BinaryDataset:
    """Immutable n x m 0/1 matrix with named, group-tagged columns and one outcome.

    Construction validates shape and content once; afterwards the dataset is
    safe to share across threads.  ``mask(col, value)`` returns an n-bit
    integer whose bit i is set iff row i has that value, the primitive every
    counting operation reduces to.
    """

    def __init__(self, columns: Sequence[Column], outcome: int):
        if not columns:
            raise SchemaError("dataset needs at least the outcome column")
        n = len(columns[0].bits)
        if n < 1:
            raise SchemaError("dataset needs at least one row")
        names = set()
        cleaned = []
        for col in columns:
            if len(col.bits) != n:
                raise SchemaError(f"column {col.name!r} has {len(col.bits)} rows, expected {n}")
            bits = np.asarray(col.bits, dtype=np.uint8)
            if bits.ndim != 1 or not np.isin(bits, (0, 1)).all():
                raise SchemaError(f"column {col.name!r} contains non-binary values")
            if col.name in names:
                raise SchemaError(f"duplicate column name {col.name!r}")
            names.add(col.name)
            bits.setflags(write=False)
            cleaned.append(Column(col.name, col.group, col.symmetric, bits))
        if not 0 <= outcome < len(cleaned):
            raise SchemaError(f"outcome index {outcome} out of range")
        self.columns: tuple[Column, ...] = tuple(cleaned)
        self.outcome: int = outcome
        self.n_rows: int = n
        self._index = {c.name: i for i, c in enumerate(self.columns)}
        self._mask_cache: dict[tuple[int, int], int] = {}
        self.full_mask: int = (1 << n) - 1

    def __repr__(self) -> str:
        return f"BinaryDataset(n_rows={self.n_rows}, columns={len(self.columns)}, outcome={self.columns[self.outcome].name!r})"

    @property
    def feature_indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.columns)) if i != self.outcome)

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"no column named {name!r}") from None

    def name_of(self, col: int) -> str:
        return self.columns[col].name

    def mask(self, col: int, value: int) -> int:
        """n-bit integer with bit i set iff row i of `col` equals `value`."""
        if not 0 <= col < len(self.columns):
            raise SchemaError(f"column index {col} out of range")
        if value not in (0, 1):
            raise SchemaError(f"value must be 0 or 1, got {value}")
        key = (col, value)
        cached = self._mask_cache.get(key)
        if cached is not None:
            return cached
        ones = int.from_bytes(
            np.packbits(self.columns[col].bits, bitorder="little").tobytes(), "little"
        )
        self._mask_cache[(col, 1)] = ones
        self._mask_cache[(col, 0)] = self.full_mask ^ ones
        return self._mask_cache[key]

    def value_masks(self, col: int) -> tuple[int, int]:
        """(mask for value 1, mask for value 0)."""
        return self.mask(col, 1), self.mask(col, 0)


def binarize_numeric_median(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """1 where the value strictly exceeds the median, else 0.

    For even length the lower of the two middle order statistics is used,
    so the split never depends on floating-point averaging.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or len(arr) < 1:
        raise ValueError("need a non-empty 1-D numeric vector")
    median = np.sort(arr)[(len(arr) - 1) // 2]
    return (arr > median).astype(np.uint8)


def load_csv(path: str | Path, schema: AttributeSchema | None, outcome_name: str) -> BinaryDataset:
    """Load a UTF-8 comma-separated file and binarize it per the schema.

    Binary attributes expect literal ``0``/``1`` cells; numeric attributes are
    median-binarized; each distinct token of a categorical attribute becomes
    one column named ``attr.token`` (token order sorted).  Missing cells are
    rejected outright: there is no imputation.
    """
    schema = schema or AttributeSchema()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise SchemaError(f"{path}: duplicate header names")
        missing = [n for n in schema.declared_names() if n not in header]
        if missing:
            raise SchemaError(f"{path}: schema declares columns absent from header: {missing}")
        if outcome_name not in header:
            raise SchemaError(f"{path}: outcome column {outcome_name!r} not in header")
        raw: list[list[str]] = [[] for _ in header]
        for rownum, row in enumerate(reader):
            if len(row) != len(header):
                raise ParseError(f"{path}: row {rownum} has {len(row)} cells, expected {len(header)}")
            for j, cell in enumerate(row):
                raw[j].append(cell.strip())
    n = len(raw[0]) if raw else 0
    if n < 1:
        raise ParseError(f"{path}: no data rows")

    columns: list[Column] = []
    for j, name in enumerate(header):
        attr = schema.resolve(name)
        cells = raw[j]
        for i, cell in enumerate(cells):
            if cell == "":
                raise ParseError(f"{path}: missing value at row {i}, column {name!r}")
        group = attr.group or name
        if attr.kind == "binary":
            bits = np.empty(n, dtype=np.uint8)
            for i, cell in enumerate(cells):
                if cell == "0":
                    bits[i] = 0
                elif cell == "1":
                    bits[i] = 1
                else:
                    raise ParseError(f"{path}: row {i}, column {name!r}: expected 0/1, got {cell!r}")
            columns.append(Column(name, group, attr.symmetric, bits))
        elif attr.kind == "numeric":
            values = np.empty(n, dtype=float)
            for i, cell in enumerate(cells):
                try:
                    values[i] = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: row {i}, column {name!r}: non-numeric cell {cell!r}"
                    ) from None
            columns.append(Column(name, group, attr.symmetric, binarize_numeric_median(values)))
        else:  # categorical
            if name == outcome_name:
                raise SchemaError(f"{path}: outcome column {name!r} must be binary, not categorical")
            for token in sorted(set(cells)):
                bits = np.fromiter((1 if c == token else 0 for c in cells), dtype=np.uint8, count=n)
                columns.append(Column(f"{name}.{token}", group, attr.symmetric, bits))

    names = [c.name for c in columns]
    if outcome_name not in names:
        raise SchemaError(f"{path}: outcome column {outcome_name!r} vanished during binarization")
    return BinaryDataset(columns, names.index(outcome_name))


def save(ds: BinaryDataset, data_path: str | Path, schema_path: str | Path | None = None) -> None:
    """Write the binarized matrix back to CSV (plus a schema file for lossless reload)."""
    with open(data_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([c.name for c in ds.columns])
        matrix = np.column_stack([c.bits for c in ds.columns])
        for row in matrix:
            writer.writerow([str(int(v)) for v in row])
    if schema_path is not None:
        lines = []
        for c in ds.columns:
            lines.append(f"{c.name}.kind=binary")
            lines.append(f"{c.name}.symmetric={'true' if c.symmetric else 'false'}")
            if c.group != c.name:
                lines.append(f"{c.name}.group={c.group}")
        Path(schema_path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _combined_mask(ds: BinaryDataset, lits: Iterable[Literal]) -> int:
    mask = ds.full_mask
    for lit in lits:
        mask &= ds.mask(lit.column, lit.value)
        if mask == 0:
            return 0
    return mask


def marginal_count(ds: BinaryDataset, lits: Iterable[Literal]) -> int:
    """Number of rows satisfying every literal; the empty set matches all rows."""
    return _combined_mask(ds, lits).bit_count()


def cond_prob_y(ds: BinaryDataset, lits: Iterable[Literal]) -> float | None:
    """Plug-in estimate of P(outcome=1 | literals), or None on zero support."""
    denom_mask = _combined_mask(ds, lits)
    denom = denom_mask.bit_count()
    if denom == 0:
        return None
    return (denom_mask & ds.mask(ds.outcome, 1)).bit_count() / denom


def iter_strata(
    universe: int, pairs: Sequence[tuple[int, int]]
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Yield (values, row mask) for every non-empty value combination of `pairs`.

    `pairs` holds (mask for value 1, mask for value 0) per conditioning
    variable.  Combinations come out in lexicographic value order with 0
    before 1, and empty branches are pruned without expansion, so the number
    of strata visited never exceeds the number of distinct observed rows.
    """
    if universe == 0:
        return
    if not pairs:
        yield (), universe
        return
    stack: list[tuple[int, tuple[int, ...], int]] = [(0, (), universe)]
    while stack:
        depth, values, mask = stack.pop()
        if depth == len(pairs):
            yield values, mask
            continue
        ones, zeros = pairs[depth]
        # push value 1 first so value 0 pops first: lexicographic output order
        hi = mask & ones
        lo = mask & zeros
        if hi:
            stack.append((depth + 1, values + (1,), hi))
        if lo:
            stack.append((depth + 1, values + (0,), lo))
