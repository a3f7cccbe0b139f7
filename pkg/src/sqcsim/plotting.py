"""Two-panel report figure for a finished sweep.

Left panel: overlap fidelity versus total time, one curve per dwell time.
Right panel: normalized concurrence versus total time.  Rendering is kept
out of the sweep itself; matplotlib is imported lazily with a non-GUI
backend so headless runs and CSV-only callers never touch a display.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .sweep import SweepRow


def render_report(rows: Sequence[SweepRow], path: str | Path,
                  title: str | None = None) -> Path:
    """Render the fidelity / normalized-concurrence panels to an image file.

    Rows are grouped by dwell time in their existing order.  Rows whose
    normalized concurrence is undefined (unentangled initial pair) are left
    off the right panel.  The output format follows the file suffix.
    """
    if not rows:
        raise ValueError("nothing to plot: rows is empty")
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_dt: dict[float, list[SweepRow]] = {}
    for row in rows:
        by_dt.setdefault(row.dt, []).append(row)

    fig, (ax_f, ax_c) = plt.subplots(1, 2, figsize=(9.0, 3.8), sharex=True)
    for dt, group in by_dt.items():
        times = [r.total_time for r in group]
        label = f"dt = {dt:g}"
        ax_f.plot(times, [r.metrics.fidelity_uhlmann for r in group],
                  marker="o", markersize=3.5, linewidth=1.5, label=label)
        defined = [(r.total_time, r.metrics.concurrence_normalized)
                   for r in group if r.metrics.concurrence_normalized is not None]
        if defined:
            ax_c.plot([p[0] for p in defined], [p[1] for p in defined],
                      marker="s", markersize=3.5, linewidth=1.5, label=label)

    ax_f.set_xlabel("total time T")
    ax_f.set_ylabel("fidelity")
    ax_c.set_xlabel("total time T")
    ax_c.set_ylabel("normalized concurrence")
    for ax in (ax_f, ax_c):
        ax.grid(True, alpha=0.3)
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out
