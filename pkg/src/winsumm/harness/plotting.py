"""Figures written next to the TSV reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
}
FIGSIZE = (5.0, 3.2)


def _save(fig, path: str | Path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def loss_curve_figure(curve: Sequence[tuple[int, float, float]], path: str | Path) -> Path:
    """Mean training loss (log scale) and validation ROUGE-1 recall per epoch."""
    epochs = [c[0] for c in curve]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        ax.plot(epochs, [c[1] for c in curve], color="tab:blue", label="train loss")
        ax.set_xlabel("epoch")
        ax.set_ylabel("mean loss")
        if all(c[1] > 0 for c in curve):
            ax.set_yscale("log")
        twin = ax.twinx()
        twin.plot(epochs, [c[2] for c in curve], color="tab:orange", label="valid ROUGE-1")
        twin.set_ylabel("ROUGE-1 recall")
        twin.spines["top"].set_visible(False)
        lines = ax.get_lines() + twin.get_lines()
        ax.legend(lines, [ln.get_label() for ln in lines], loc="center right", frameon=False)
        return _save(fig, path)


def report_figure(means: dict[str, tuple[float, float, float]], path: str | Path) -> Path:
    """Grouped bars of mean ROUGE-1/2/L recall per system."""
    systems = list(means)
    width = 0.8 / 3
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        for k, label in enumerate(("ROUGE-1", "ROUGE-2", "ROUGE-L")):
            xs = [i + (k - 1) * width for i in range(len(systems))]
            ax.bar(xs, [means[s][k] for s in systems], width, label=label)
        ax.set_xticks(range(len(systems)))
        ax.set_xticklabels(systems)
        ax.set_ylabel("recall")
        ax.set_ylim(0, 1)
        ax.legend(frameon=False)
        return _save(fig, path)


def sweep_figure(rows: Sequence[tuple[int, float, float]], path: str | Path) -> Path:
    """Validation ROUGE-1 recall against window size, trained ranker and oracle labels."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        ax.plot([r[0] for r in rows], [r[1] for r in rows], marker="o", label="ranker")
        ax.plot([r[0] for r in rows], [r[2] for r in rows], marker="s", linestyle="--", label="oracle labels")
        ax.set_xlabel("window size")
        ax.set_ylabel("ROUGE-1 recall (valid)")
        ax.legend(frameon=False)
        return _save(fig, path)
