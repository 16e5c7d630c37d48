"""Figure rendering for reports (headless; files only).

Every function saves a PNG to the requested path and returns that path.
The Agg backend is forced so rendering works without a display.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .criteria import localized_matrix, primary_matrix  # noqa: E402
from .pipeline import BatchReport, RingReport  # noqa: E402
from .rings import FusionRing  # noqa: E402

__all__ = [
    "margins_figure",
    "spectrum_figure",
    "batch_overview_figure",
    "suite_slack_figure",
]

_STATUS_COLORS = {
    "Passes": "#2a9d2a",
    "Fails": "#d62728",
    "Inconclusive": "#e6a400",
    "Skipped": "#999999",
}


def margins_figure(report: RingReport, path: str) -> str:
    """Horizontal bars of per-task relative margins, colored by verdict."""
    tasks = [t for t in report.tasks if t.margin is not None]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.4 * len(tasks) + 1.2)))
    if tasks:
        labels = [t.task for t in tasks]
        margins = [t.margin for t in tasks]
        colors = [_STATUS_COLORS.get(t.status, "#1f77b4") for t in tasks]
        y = np.arange(len(tasks))
        ax.barh(y, margins, color=colors)
        ax.set_yticks(y)
        ax.set_yticklabels(labels, fontsize=8)
        ax.invert_yaxis()
        ax.axvline(0.0, color="black", linewidth=0.8)
        ax.set_xscale("symlog", linthresh=1e-12)
    else:
        ax.text(0.5, 0.5, "no numeric checks ran", ha="center", va="center")
        ax.set_axis_off()
    ax.set_xlabel("relative margin (symlog)")
    ax.set_title(f"{report.name}: positivity margins ({report.overall})")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def spectrum_figure(
    ring: FusionRing,
    n: int,
    path: str,
    subset=None,
    name: str = "ring",
) -> str:
    """Sorted eigenvalues of the n-th positivity matrix (full or localized)."""
    if subset is None:
        T = primary_matrix(ring, n)
        title = f"{name}: spectrum of the order-{n} positivity matrix"
    else:
        T = localized_matrix(ring, subset, n)
        title = f"{name}: localized spectrum, S={list(subset)}, order {n}"
    eigs = np.sort(np.linalg.eigvalsh(T))
    fig, ax = plt.subplots(figsize=(7, 4))
    colors = np.where(eigs < 0, "#d62728", "#2a9d2a")
    ax.scatter(np.arange(eigs.size), eigs, s=14, c=colors)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("eigenvalue index (ascending)")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def batch_overview_figure(batch: BatchReport, path: str) -> str:
    """Worst margin per ring, colored by the ring's overall verdict."""
    names, worsts, colors = [], [], []
    for r in batch.reports:
        margins = [t.margin for t in r.tasks if t.margin is not None]
        names.append(r.name)
        worsts.append(min(margins) if margins else 0.0)
        colors.append(_STATUS_COLORS.get(r.overall, "#1f77b4"))
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.4 * len(names) + 1.2)))
    y = np.arange(len(names))
    ax.barh(y, worsts, color=colors)
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xscale("symlog", linthresh=1e-12)
    ax.set_xlabel("worst relative margin (symlog)")
    ax.set_title("batch overview: worst margin per ring")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def suite_slack_figure(suite, path: str) -> str:
    """Worst slack per inequality for a cyclic-group suite run (negative
    slack for an asserted record means a violation)."""
    records = suite.records
    names = [r.name for r in records]
    slacks = [r.min_slack for r in records]
    colors = [
        "#999999" if not r.asserted else ("#d62728" if not r.passed else "#2a9d2a")
        for r in records
    ]
    fig, ax = plt.subplots(figsize=(9, max(2.5, 0.35 * len(names) + 1.2)))
    y = np.arange(len(names))
    finite = [s if np.isfinite(s) else 0.0 for s in slacks]
    ax.barh(y, finite, color=colors)
    ax.set_yticks(y)
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xscale("symlog", linthresh=1e-12)
    ax.set_xlabel("worst slack (symlog; >= 0 means the inequality held)")
    ax.set_title(f"Z_{suite.n} transform-inequality suite (delta = sqrt({suite.n}))")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
