"""Static chart emission for report CSVs."""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _config_label(row: dict) -> str:
    return f"{row['agent']}\n{row['os']}\n{row['device_type']}/{row['channel']}"


def plot_vulnerability(report_csv: str | Path, out_path: str | Path) -> Path:
    """Grouped TV/MV/A bars per device configuration."""
    with open(report_csv, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"no rows in {report_csv}")
    labels = [_config_label(r) for r in rows]
    tv = [float(r["TV"]) for r in rows]
    mv = [float(r["MV"]) for r in rows]
    acc = [float(r["A"]) for r in rows]
    x = range(len(rows))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6, 1.6 * len(rows)), 4.2))
    ax.bar([i - width for i in x], tv, width, label="TV", color="#4878d0")
    ax.bar(list(x), mv, width, label="MV", color="#ee854a")
    ax.bar([i + width for i in x], acc, width, label="A", color="#6acc64")
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fraction of fingerprint groups")
    ax.legend()
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_comparison(comparison_csv: str | Path, out_path: str | Path) -> Path:
    """Per-policy TV/MV bars with percent-delta annotations."""
    with open(comparison_csv, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"no rows in {comparison_csv}")
    labels = [f"{r['policy']}\n{r['agent']}/{r['os']}" for r in rows]
    tv = [float(r["TV"]) for r in rows]
    mv = [float(r["MV"]) for r in rows]
    x = range(len(rows))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6, 1.7 * len(rows)), 4.2))
    bars_tv = ax.bar([i - width / 2 for i in x], tv, width, label="TV", color="#4878d0")
    bars_mv = ax.bar([i + width / 2 for i in x], mv, width, label="MV", color="#ee854a")
    for bar, row, key in list(zip(bars_tv, rows, ["dTV_pct"] * len(rows))) + list(
        zip(bars_mv, rows, ["dMV_pct"] * len(rows))
    ):
        raw = row.get(key) or ""
        if raw in ("", "None"):
            continue
        delta = float(raw)
        ax.annotate(
            f"{delta:+.2f}%",
            (bar.get_x() + bar.get_width() / 2, bar.get_height()),
            ha="center",
            va="bottom",
            fontsize=7,
            color="#b02428" if delta < 0 else "#2a6fbb",
        )
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylim(0, 1.1)
    ax.set_ylabel("fraction of fingerprint groups")
    ax.legend()
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
