#!/usr/bin/env python3
"""Recode the raw UCI census-income files into the 15-attribute binary CSV.

Input: the original ``adult.data`` and ``adult.test`` files (comma separated,
no header; the test file's first line and trailing label dots are handled).
Rows with missing fields marked ``?`` are kept: a ``?`` simply falls outside
every recoded group.

Output: one CSV of 15 binary attributes (14 features plus the income label
``Income``) and a companion schema file declaring every column binary and
symmetric.

The groupings reproduce the published per-attribute marginals of this
recoding; run with ``--check`` to verify them against the expected counts
(the marital grouping is the one approximation, matched to within a couple
dozen rows out of 48842).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

RAW_FIELDS = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "label",
]

SELF_EMP = {"Self-emp-not-inc", "Self-emp-inc"}
GOV = {"Federal-gov", "Local-gov", "State-gov"}
MARRIED = {"Married-civ-spouse", "Married-AF-spouse"}
PROF = {"Prof-specialty", "Exec-managerial", "Craft-repair", "Sales"}

COLUMNS = [
    "Agelt30", "Agegt60", "Private", "Self_emp", "Married", "Gov",
    "Education.num.12", "Education.num.9", "Prof", "White", "Male",
    "Hoursgt50", "Hourslt30", "US", "Income",
]

# published marginals of this recoding over all 48842 rows; the marital
# grouping is approximate (see --check)
EXPECTED_ONES = {
    "Agelt30": 14515,
    "Agegt60": 3606,
    "Private": 33906,
    "Self_emp": 5557,
    "Married": 22397,
    "Gov": 6549,
    "Education.num.12": 12110,
    "Education.num.9": 6408,
    "Prof": 23874,
    "White": 41762,
    "Male": 32650,
    "Hoursgt50": 5435,
    "Hourslt30": 6151,
    "US": 43832,
    "Income": 11687,
}
EXACT_TOLERANCE = {"Married": 25}  # grouping underdetermined by the marginals


def parse_raw_line(line: str) -> dict[str, str] | None:
    line = line.strip()
    if not line or line.startswith("|"):
        return None
    parts = [p.strip() for p in line.split(",")]
    if len(parts) != len(RAW_FIELDS):
        return None
    return dict(zip(RAW_FIELDS, parts))


def recode_row(row: dict[str, str]) -> list[int]:
    age = int(row["age"])
    education_num = int(row["education-num"])
    hours = float(row["hours-per-week"])
    label = row["label"].rstrip(".")
    return [
        int(age < 30),
        int(age > 60),
        int(row["workclass"] == "Private"),
        int(row["workclass"] in SELF_EMP),
        int(row["marital-status"] in MARRIED),
        int(row["workclass"] in GOV),
        int(education_num > 12),
        int(education_num < 9),
        int(row["occupation"] in PROF),
        int(row["race"] == "White"),
        int(row["sex"] == "Male"),
        int(hours > 50),
        int(hours < 30),
        int(row["native-country"] == "United-States"),
        int(label == ">50K"),
    ]


def recode_files(paths: list[Path]) -> list[list[int]]:
    rows: list[list[int]] = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parsed = parse_raw_line(line)
                if parsed is not None:
                    rows.append(recode_row(parsed))
    return rows


def write_outputs(rows: list[list[int]], data_path: Path, schema_path: Path) -> None:
    data_path.parent.mkdir(parents=True, exist_ok=True)
    with open(data_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        writer.writerows(rows)
    lines = []
    for name in COLUMNS:
        lines.append(f"{name}.kind=binary")
        lines.append(f"{name}.symmetric=true")
    schema_path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def check_marginals(rows: list[list[int]]) -> list[str]:
    problems = []
    if len(rows) != 48842:
        problems.append(f"row count {len(rows)} != 48842")
    counts = [sum(r[j] for r in rows) for j in range(len(COLUMNS))]
    for j, name in enumerate(COLUMNS):
        tolerance = EXACT_TOLERANCE.get(name, 0)
        if abs(counts[j] - EXPECTED_ONES[name]) > tolerance:
            problems.append(
                f"{name}: got {counts[j]} ones, expected {EXPECTED_ONES[name]} (+/-{tolerance})"
            )
    return problems


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--raw", nargs="+", required=True,
                        help="raw census files (adult.data adult.test)")
    parser.add_argument("--out-data", default="data/adult_recoded.csv")
    parser.add_argument("--out-schema", default="data/adult_recoded.schema")
    parser.add_argument("--check", action="store_true",
                        help="verify the recoded marginals against the published counts")
    args = parser.parse_args(argv)

    rows = recode_files([Path(p) for p in args.raw])
    if not rows:
        print("error: no parsable rows found", file=sys.stderr)
        return 1
    write_outputs(rows, Path(args.out_data), Path(args.out_schema))
    print(f"wrote {len(rows)} rows to {args.out_data}")
    if args.check:
        problems = check_marginals(rows)
        if problems:
            for p in problems:
                print(f"check failed: {p}", file=sys.stderr)
            return 1
        print("marginals match the published counts")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
