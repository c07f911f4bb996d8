"""Figure rendering for benchmark reports.

Uses the Agg backend so figures can be written from headless runs; every
chart lands next to the CSV it illustrates.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SWEEP_LABELS = {"workers": "workers", "batch_size": "batch size"}


def save_sweep_plot(report, path) -> None:
    """Line chart of median wall time against the swept parameter."""
    if not report.rows:
        raise ValueError("report has no rows to plot")
    sweep = report.rows[0].sweep
    values = [r.value for r in report.rows]
    times = [r.median_ms for r in report.rows]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(values, times, marker="o", color="tab:blue")
    if sweep == "batch_size" and max(values) / max(min(values), 1) >= 100:
        ax.set_xscale("log")
    ax.set_xlabel(_SWEEP_LABELS.get(sweep, sweep))
    ax.set_ylabel("median wall time (ms)")
    n = report.rows[0].n
    ax.set_title(f"parameter estimation, {n} records")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
