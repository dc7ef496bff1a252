from __future__ import annotations

import os
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

ADULT_SKIP_MSG = (
    "recoded census-income CSV not available: set ADULT_RECODED_CSV or place "
    "data/adult_recoded.csv (see scripts/prepare_adult.py; the raw files are "
    "not redistributable with this repository and this environment has no "
    "network access)"
)


def adult_csv_path() -> Path | None:
    env = os.environ.get("ADULT_RECODED_CSV")
    if env:
        p = Path(env)
        if p.exists():
            return p
    default = REPO_ROOT / "data" / "adult_recoded.csv"
    return default if default.exists() else None
