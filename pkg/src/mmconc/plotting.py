"""Figure rendering for report objects.

Everything goes straight to PNG files via the Agg backend; no display
is ever opened.  Each helper returns the path it wrote.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 120


def _finish(fig, path) -> str:
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def save_levy_figure(report, path) -> str:
    """Log-log plot of observable diameter against scale, one line per alpha."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    alphas = sorted({row.alpha for row in report.rows})
    for alpha in alphas:
        rows = [r for r in report.rows if r.alpha == alpha]
        xs = [s for s, _ in zip(report.scales, rows)]
        ys = [r.oracle_value if r.oracle_value is not None else r.lower_bound for r in rows]
        ax.plot(xs, ys, marker="o", label=f"alpha={alpha:g}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("scale")
    ax.set_ylabel("observable diameter")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return _finish(fig, path)


def save_obsdiam_figure(reports, path) -> str:
    """Lower bounds (and oracle values when present) against alpha."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    alphas = [r.alpha for r in reports]
    ax.plot(alphas, [r.lower_bound for r in reports], marker="o", label="lower bound")
    oracle = [(r.alpha, r.oracle_value) for r in reports if r.oracle_value is not None]
    if oracle:
        ax.plot(*zip(*oracle), marker="x", linestyle="--", label="exact")
    ax.set_xlabel("alpha")
    ax.set_ylabel("observable diameter")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return _finish(fig, path)


def save_defect_figure(rows, path) -> str:
    """Bar chart of invariance defects; rows are (group, label, defect)."""
    fig, ax = plt.subplots(figsize=(max(6.0, 0.25 * len(rows)), 4.0))
    xs = np.arange(len(rows))
    ax.bar(xs, [r[2] for r in rows])
    ax.set_xticks(xs)
    ax.set_xticklabels([f"{r[0]}:{r[1]}" for r in rows], rotation=90, fontsize=6)
    ax.set_ylabel("transport defect")
    return _finish(fig, path)


def save_flow_figure(named_reports, path) -> str:
    """Grouped bars of displacement cost against window bound per scenario."""
    fig, ax = plt.subplots(figsize=(max(6.0, 0.8 * len(named_reports)), 4.0))
    xs = np.arange(len(named_reports))
    width = 0.38
    ax.bar(xs - width / 2, [r.lhs for _, r in named_reports], width, label="lhs")
    ax.bar(xs + width / 2, [r.rhs for _, r in named_reports], width, label="rhs")
    for i, (_, rep) in enumerate(named_reports):
        if not rep.certified:
            ax.annotate("lb", (i + width / 2, rep.rhs), ha="center", va="bottom")
    ax.set_xticks(xs)
    ax.set_xticklabels([name for name, _ in named_reports], rotation=30, ha="right")
    ax.set_ylabel("value")
    ax.legend()
    return _finish(fig, path)


def save_concentration_figure(report, path) -> str:
    """Per-stage transport proximity and the two-sided certification bounds."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [row.index for row in report.rows]
    ax.plot(xs, [r.prokhorov for r in report.rows], marker="o", label="prokhorov")
    ax.plot(xs, [r.forward_upper for r in report.rows], marker="s", label="forward upper")
    ax.plot(xs, [r.reverse_lower for r in report.rows], marker="^", label="reverse lower")
    ax.set_xlabel("stage")
    ax.set_ylabel("value")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return _finish(fig, path)


def save_mmdist_figure(rows, path) -> str:
    """Bar chart for the two distance values; rows are (name, value)."""
    fig, ax = plt.subplots(figsize=(4.0, 4.0))
    xs = np.arange(len(rows))
    ax.bar(xs, [v for _, v in rows])
    ax.set_xticks(xs)
    ax.set_xticklabels([name for name, _ in rows])
    ax.set_ylabel("distance")
    return _finish(fig, path)
