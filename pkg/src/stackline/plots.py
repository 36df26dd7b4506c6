"""Figures written as SVG files.

Figures are built on bare ``Figure`` objects (no pyplot state) and saved
with a fixed hash salt and no date stamp, so equal inputs give
byte-identical files.
"""

import math

import matplotlib as mpl
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

_RC = {
    "svg.hashsalt": "stackline",
    "svg.fonttype": "path",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
}
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"]


def _save(fig, path):
    FigureCanvasSVG(fig)
    fig.savefig(path, format="svg", metadata={"Date": None})


def chi2_bar_chart(results, path, alpha=0.05):
    """Horizontal bars of -log10(p) per feature, most significant on top."""
    with mpl.rc_context(_RC):
        fig = Figure(figsize=(6.5, 0.35 * len(results) + 1.4))
        ax = fig.add_subplot()
        names = [r.feature_name for r in results][::-1]
        heights = [min(-math.log10(r.p_value), 320.0) if r.p_value > 0 else 320.0
                   for r in results][::-1]
        colors = ["#1f77b4" if r.kept else "#b0b0b0" for r in results][::-1]
        ax.barh(range(len(names)), heights, color=colors)
        ax.set_yticks(range(len(names)), names)
        ax.axvline(-math.log10(alpha), color="#d62728", linestyle="--", linewidth=1,
                   label=f"alpha = {alpha:g}")
        ax.set_xlabel("-log10(p-value)")
        ax.set_title("Chi-square significance by feature")
        ax.legend(loc="lower right", frameon=False)
        fig.tight_layout()
        _save(fig, path)


def roc_chart(curves, path):
    """ROC curves; ``curves`` maps a label to ``(points, auc)``."""
    with mpl.rc_context(_RC):
        fig = Figure(figsize=(5, 5))
        ax = fig.add_subplot()
        ax.plot([0, 1], [0, 1], color="#808080", linestyle="--", linewidth=1)
        for i, (label, (points, auc)) in enumerate(curves.items()):
            xs = [p[0] for p in points]
            ys = [p[1] for p in points]
            ax.plot(xs, ys, color=_COLORS[i % len(_COLORS)], linewidth=1.5,
                    label=f"{label} (AUC = {auc:.2f})")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
        ax.set_aspect("equal")
        ax.set_xlabel("False positive rate")
        ax.set_ylabel("True positive rate")
        ax.set_title("ROC curve")
        ax.legend(loc="lower right", frameon=False)
        fig.tight_layout()
        _save(fig, path)


def confusion_chart(matrix, path, title="Confusion matrix"):
    grid = [[matrix.tn, matrix.fp], [matrix.fn, matrix.tp]]
    peak = max(max(row) for row in grid) or 1
    with mpl.rc_context(_RC):
        fig = Figure(figsize=(4, 3.6))
        ax = fig.add_subplot()
        ax.imshow(grid, cmap="Blues", vmin=0, vmax=peak)
        for i in range(2):
            for j in range(2):
                ax.text(j, i, str(grid[i][j]), ha="center", va="center",
                        color="white" if grid[i][j] > peak / 2 else "black", fontsize=12)
        ax.set_xticks([0, 1], ["Predicted 0", "Predicted 1"])
        ax.set_yticks([0, 1], ["Actual 0", "Actual 1"])
        ax.set_title(title)
        fig.tight_layout()
        _save(fig, path)


def comparison_chart(rows, path):
    """Grouped bars of accuracy, precision, recall and F1 per model."""
    metrics = ["accuracy", "precision", "recall", "f1"]
    with mpl.rc_context(_RC):
        fig = Figure(figsize=(8, 3.8))
        ax = fig.add_subplot()
        width = 0.2
        for k, metric in enumerate(metrics):
            xs = [i + (k - 1.5) * width for i in range(len(rows))]
            ax.bar(xs, [100 * r[metric] for r in rows], width, color=_COLORS[k], label=metric)
        ax.set_xticks(range(len(rows)), [r["model"] for r in rows], rotation=25, ha="right")
        ax.set_ylabel("score (%)")
        ax.set_ylim(0, 100)
        ax.legend(loc="lower right", frameon=False, ncols=4)
        ax.set_title("Model comparison on the test split")
        fig.tight_layout()
        _save(fig, path)
