"""SVG emission for training curves and ROC plots."""

from __future__ import annotations

from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure


def save_line_plot(path, series: dict[str, list[float]], xlabel: str, ylabel: str, title: str) -> None:
    """One or more named series as an SVG line plot."""
    fig = Figure(figsize=(6, 4))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(111)
    for name, ys in series.items():
        ax.plot(range(len(ys)), ys, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(path, format="svg")


def save_roc_plot(path, points: list[tuple[float, float]], auc: float) -> None:
    fig = Figure(figsize=(5, 5))
    FigureCanvasSVG(fig)
    ax = fig.add_subplot(111)
    ax.plot([p[0] for p in points], [p[1] for p in points], label=f"AUC = {auc:.4f}")
    ax.plot([0, 1], [0, 1], linestyle="--", color="gray", alpha=0.5)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title("ROC")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(path, format="svg")
