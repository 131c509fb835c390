"""Render a MetricReport to delimited files and charts.

``emit_report`` writes two CSVs with fixed 6-decimal formatting (so repeat
runs are byte-identical) and, unless disabled, two PNG charts: per-topic
NDCG bars at one cutoff, and grouped mean bars for every metric/cutoff.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .metrics import METRICS, MetricReport

logger = logging.getLogger(__name__)

PER_TOPIC_CSV = "per_topic.csv"
SUMMARY_CSV = "summary.csv"
NDCG_FIGURE = "ndcg_per_topic.png"
MEANS_FIGURE = "metric_means.png"

METRIC_LABELS = {"ndcg": "NDCG", "p": "P", "map": "AP", "recall": "Recall"}


def _topic_sort_key(topic_id: str) -> tuple[int, str]:
    # numeric topics sort as numbers, anything else falls back to the string
    if topic_id.isdigit():
        return (int(topic_id), "")
    return (10**9, topic_id)


def _chart_cutoff(cutoffs: Sequence[int]) -> int:
    return 10 if 10 in cutoffs else cutoffs[0]


def per_topic_csv_text(report: MetricReport) -> str:
    lines = ["topic_id,metric,cutoff,value"]
    for topic_id in sorted(report.per_topic, key=_topic_sort_key):
        for metric in METRICS:
            for k in report.cutoffs:
                value = report.per_topic[topic_id][metric][k]
                lines.append(f"{topic_id},{metric},{k},{value:.6f}")
    return "\n".join(lines) + "\n"


def summary_csv_text(report: MetricReport) -> str:
    lines = ["metric,cutoff,mean"]
    for metric in METRICS:
        for k in report.cutoffs:
            lines.append(f"{metric},{k},{report.means[metric][k]:.6f}")
    return "\n".join(lines) + "\n"


def summary_table_text(report: MetricReport) -> str:
    """Two fixed-width console tables in the classic layout: NDCG means
    across all cutoffs, then P / map / recall at a single cutoff."""
    tag = report.run_tag or "run"
    cut = _chart_cutoff(report.cutoffs)
    ndcg = _table(
        ["Run"] + [f"NDCG@{k}" for k in report.cutoffs],
        [tag] + [f"{report.means['ndcg'][k]:.6f}" for k in report.cutoffs],
    )
    binary = _table(
        ["Run", f"P@{cut}", f"map@{cut}", f"recall@{cut}"],
        [tag] + [f"{report.means[m][cut]:.6f}" for m in ("p", "map", "recall")],
    )
    return ndcg + "\n" + binary


def _table(header: list[str], row: list[str]) -> str:
    widths = [max(len(h), len(v)) for h, v in zip(header, row)]
    lines = [
        "  ".join(cell.ljust(w) for cell, w in zip(cells, widths)).rstrip()
        for cells in (header, row)
    ]
    return "\n".join(lines) + "\n"


def _save_figure(fig: Figure, path: Path) -> None:
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120)


def render_ndcg_figure(report: MetricReport, path: Path) -> None:
    cutoff = _chart_cutoff(report.cutoffs)
    topics = sorted(report.per_topic, key=_topic_sort_key)
    values = [report.per_topic[t]["ndcg"][cutoff] for t in topics]

    fig = Figure(figsize=(max(6.0, 0.28 * len(topics) + 2.0), 3.5))
    ax = fig.add_subplot(111)
    ax.bar(range(len(topics)), values, color="#4878a8")
    ax.set_xticks(range(len(topics)))
    ax.set_xticklabels(topics, rotation=90, fontsize=7)
    ax.set_ylim(0.0, 1.05)
    ax.set_xlabel("topic")
    ax.set_ylabel(f"NDCG@{cutoff}")
    title = f"Per-topic NDCG@{cutoff}"
    if report.run_tag:
        title += f" ({report.run_tag})"
    ax.set_title(title)
    fig.tight_layout()
    _save_figure(fig, path)


def render_means_figure(report: MetricReport, path: Path) -> None:
    fig = Figure(figsize=(6.5, 3.5))
    ax = fig.add_subplot(111)
    n_groups = len(METRICS)
    n_bars = len(report.cutoffs)
    width = 0.8 / n_bars
    for j, k in enumerate(report.cutoffs):
        xs = [i + j * width for i in range(n_groups)]
        ys = [report.means[m][k] for m in METRICS]
        ax.bar(xs, ys, width=width, label=f"@{k}")
    ax.set_xticks([i + 0.4 - width / 2 for i in range(n_groups)])
    ax.set_xticklabels([METRIC_LABELS[m] for m in METRICS])
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("mean over topics")
    title = "Mean metrics by cutoff"
    if report.run_tag:
        title += f" ({report.run_tag})"
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save_figure(fig, path)


def emit_report(report: MetricReport, out_dir: str | Path, figures: bool = True) -> list[Path]:
    """Write CSVs (and charts) under out_dir; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    per_topic_path = out / PER_TOPIC_CSV
    per_topic_path.write_text(per_topic_csv_text(report), encoding="utf-8", newline="\n")
    written.append(per_topic_path)

    summary_path = out / SUMMARY_CSV
    summary_path.write_text(summary_csv_text(report), encoding="utf-8", newline="\n")
    written.append(summary_path)

    if figures:
        ndcg_path = out / NDCG_FIGURE
        render_ndcg_figure(report, ndcg_path)
        written.append(ndcg_path)
        means_path = out / MEANS_FIGURE
        render_means_figure(report, means_path)
        written.append(means_path)

    for path in written:
        logger.info("wrote %s", path)
    return written
