"""File-only matplotlib rendering for the CLI report paths.

Figures are written next to the delimited output, never shown
interactively; the Agg backend is forced before pyplot is imported.
"""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .analysis import RepeatStats, SuccessGridRow  # noqa: E402

_LINESTYLES = ["--", ":", "-.", "-"]
_MARKERS = ["o", "s", "^", "v", "*"]


def _split_sweeps(rows: Sequence[SuccessGridRow]):
    """Group rows into fixed-N curves over p and fixed-p curves over N."""
    by_n: dict[int, list[SuccessGridRow]] = {}
    by_p: dict[float, list[SuccessGridRow]] = {}
    for row in rows:
        by_n.setdefault(row.N, []).append(row)
        by_p.setdefault(row.p, []).append(row)
    n_curves = {n: sorted(v, key=lambda r: r.p) for n, v in by_n.items() if len(v) >= 6}
    p_curves = {p: sorted(v, key=lambda r: r.N) for p, v in by_p.items() if len(v) >= 6}
    return n_curves, p_curves


def render_success_grid(rows: Sequence[SuccessGridRow], path: str | Path) -> Path:
    """Two-panel figure: total success vs p for fixed N, and vs N for fixed p."""
    n_curves, p_curves = _split_sweeps(rows)
    n_panels = (1 if n_curves else 0) + (1 if p_curves else 0)
    if n_panels == 0:
        raise ValueError("grid has no sweep long enough to plot")
    fig, axes = plt.subplots(1, n_panels, figsize=(6.0 * n_panels, 4.2))
    if n_panels == 1:
        axes = [axes]
    index = 0
    if n_curves:
        ax = axes[index]
        index += 1
        for i, (n, curve) in enumerate(sorted(n_curves.items())):
            ax.plot(
                [r.p for r in curve],
                [r.prob for r in curve],
                linestyle=_LINESTYLES[i % len(_LINESTYLES)],
                label=f"N = {n}",
            )
        ax.set_xlabel("per-attempt success probability p")
        ax.set_ylabel("P(success within N attempts)")
        ax.set_title("(a) fixed N")
        ax.legend()
        ax.grid(True, alpha=0.3)
    if p_curves:
        ax = axes[index]
        for i, (p, curve) in enumerate(sorted(p_curves.items())):
            ax.plot(
                [r.N for r in curve],
                [r.prob for r in curve],
                marker=_MARKERS[i % len(_MARKERS)],
                markersize=3,
                linewidth=1,
                label=f"p = {p:g}",
            )
        ax.set_xlabel("number of attempts N")
        ax.set_ylabel("P(success within N attempts)")
        ax.set_title("(b) fixed p")
        ax.legend()
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_repeat_histogram(stats: RepeatStats, path: str | Path) -> Path:
    """First-success histogram against the geometric distribution."""
    ks = sorted(stats.first_success_histogram)
    if not ks:
        raise ValueError("no successful trials to plot")
    counts = [stats.first_success_histogram[k] for k in ks]
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    ax.bar(ks, counts, width=0.8, alpha=0.6, label="observed first success")
    p = stats.p_closed
    expected = [stats.trials * (1.0 - p) ** (k - 1) * p for k in ks]
    ax.plot(ks, expected, "k.-", label="geometric expectation")
    ax.set_xlabel("attempt index k")
    ax.set_ylabel("trials")
    ax.set_title(f"first success over {stats.trials} trials (p = {p:g})")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
