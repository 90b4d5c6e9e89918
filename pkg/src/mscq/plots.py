"""Figure rendering for the stats and bench reports.

Imported lazily by the CLI so matplotlib is only a cost when figures are
actually requested; files land next to the delimited output.
"""
from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_stats_figure(reports: Sequence, out_dir: str) -> str:
    """Bar chart of the existential-count histogram, one group per mode."""
    os.makedirs(out_dir, exist_ok=True)
    labels = [label for label, _ in reports[0].histogram]
    width = 0.8 / max(1, len(reports))
    fig, ax = plt.subplots(figsize=(7, 3.5))
    for i, report in enumerate(reports):
        xs = [j + i * width for j in range(len(labels))]
        ax.bar(xs, [count for _, count in report.histogram], width, label=report.mode)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_xlabel("existential quantifiers per rolled concept")
    ax.set_ylabel("individuals")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "existential_histogram.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_bench_figure(rows: Sequence, out_dir: str) -> str:
    """Grouped bars of average per-check time for every (ontology, query, mode)."""
    os.makedirs(out_dir, exist_ok=True)
    groups: dict[tuple[str, str], dict[str, float]] = {}
    for row in rows:
        groups.setdefault((row.ontology, row.query), {})[row.mode] = row.avg_check_ms
    modes = sorted({row.mode for row in rows})
    keys = sorted(groups)
    width = 0.8 / max(1, len(modes))
    fig, ax = plt.subplots(figsize=(max(7, len(keys) * 0.9), 4))
    for i, mode in enumerate(modes):
        xs = [j + i * width for j in range(len(keys))]
        ys = [groups[k].get(mode, 0.0) for k in keys]
        ax.bar(xs, ys, width, label=mode)
    ax.set_xticks(range(len(keys)))
    ax.set_xticklabels(
        [f"{ont}\n{q[:28]}" for ont, q in keys], rotation=45, ha="right", fontsize=7
    )
    ax.set_ylabel("avg check time (ms)")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    path = os.path.join(out_dir, "bench_avg_check_ms.png")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
