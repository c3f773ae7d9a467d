"""Figure for the evaluation report."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "svg.hashsalt": "idiom-forge",
}


def plot_eval(rows: Sequence, path: Union[str, Path]) -> Path:
    """Grouped %Top5/%Top10 bars per query with FRank annotated on top."""
    path = Path(path)
    with plt.rc_context(RC):
        width = max(4.0, 0.9 * len(rows) + 1.5)
        fig, ax = plt.subplots(figsize=(width, 3.2))
        xs = range(len(rows))
        ax.bar([x - 0.2 for x in xs], [r.top5 for r in rows], width=0.4, label="%Top5", color="#4C72B0")
        ax.bar([x + 0.2 for x in xs], [r.top10 for r in rows], width=0.4, label="%Top10", color="#DD8452")
        for x, r in zip(xs, rows):
            ax.annotate("FRank " + ("-" if r.frank is None else str(r.frank)),
                        (x, max(r.top5, r.top10) + 2), ha="center", fontsize=7)
        ax.set_xticks(list(xs))
        ax.set_xticklabels([r.query for r in rows], rotation=30, ha="right")
        ax.set_ylim(0, 115)
        ax.set_ylabel("relevant snippets (%)")
        ax.legend(loc="upper right", ncol=2)
        fig.tight_layout()
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
    return path
