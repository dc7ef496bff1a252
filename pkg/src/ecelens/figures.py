"""Render an explanation report as a horizontal bar chart.

Charts are side outputs written next to the delimited report: positive
effects in one color, negative in another, members ordered by rank from the
top.  Entries without support carry no bar.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .report import ExplanationReport

_POS_COLOR = "#2b6cb0"
_NEG_COLOR = "#c05621"


def render_effect_chart(
    report: ExplanationReport, path: str | Path, max_entries: int = 20
) -> Path:
    """Write a ranked-effect bar chart to `path`; returns the path written."""
    entries = [e for e in report.entries if e.effect is not None][:max_entries]
    labels = [e.description for e in entries]
    values = [e.effect for e in entries]

    height = max(2.0, 0.42 * len(entries) + 1.2)
    fig, ax = plt.subplots(figsize=(7.5, height))
    positions = range(len(entries))
    colors = [_POS_COLOR if v >= 0 else _NEG_COLOR for v in values]
    ax.barh(positions, values, color=colors)
    ax.set_yticks(list(positions))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("average effect" if report.mode == "global" else "effect at instance")
    ax.set_title(f"{report.mode} explanation: {report.target}")
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
