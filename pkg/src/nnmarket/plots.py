"""Render sweep datasets to PNG files.

Rendering is deliberately plain and fully deterministic: fixed figure
geometry, the Agg backend, and no timestamps in the output, so repeated runs
produce byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import SweepRow
from .model import Regime

plt.rcParams.update(
    {
        "figure.figsize": (10.0, 6.0),
        "figure.dpi": 110,
        "savefig.dpi": 110,
        "font.size": 9,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "lines.markersize": 3.5,
    }
)

_AXIS_LABELS = {
    "a": "ad revenue per click a",
    "theta": "price insensitivity theta",
    "v": "content sensitivity v",
    "w": "network sensitivity w",
    "k": "variety preference k",
    "alpha": "ISP outside option alpha",
    "beta": "CP outside option beta",
    "c_e": "CP entry cost c_e",
    "N": "number of ISPs N",
}

_STYLE = {
    Regime.NONNEUTRAL: dict(color="#c0392b", marker="o", label="non-neutral"),
    Regime.NEUTRAL: dict(color="#2c5f9e", marker="s", label="neutral (q=0)"),
}

# Deterministic PNGs: drop the writer's software tag.
_PNG_META = {"metadata": {"Software": None}}


def _series(rows: Sequence[SweepRow], regime: Regime, field: str):
    xs = [r.value for r in rows if r.regime is regime and r.error is None]
    ys = [getattr(r, field) for r in rows if r.regime is regime and r.error is None]
    return xs, ys


def render_sweep(rows: Sequence[SweepRow], axis: str, out_png: Path | str) -> Path:
    """Panel grid (M, t, c, UW, prices) for one sweep, both regimes."""
    out_png = Path(out_png)
    regimes = sorted({r.regime for r in rows}, key=lambda r: r.value)
    xlabel = _AXIS_LABELS.get(axis, axis)
    fig, axes = plt.subplots(2, 3)

    panels = [
        ("M", "CPs entering M", axes[0, 0]),
        ("t", "ISP investment t", axes[0, 1]),
        ("c", "CP investment c", axes[0, 2]),
        ("uw", "user welfare UW", axes[1, 0]),
        ("isp_profit", "ISP profit", axes[1, 1]),
    ]
    for field, title, ax in panels:
        for regime in regimes:
            xs, ys = _series(rows, regime, field)
            ax.plot(xs, ys, **_STYLE[regime])
        ax.set_title(title)
        ax.set_xlabel(xlabel)

    ax = axes[1, 2]
    for regime in regimes:
        xs, ys = _series(rows, regime, "p")
        ax.plot(xs, ys, **{**_STYLE[regime], "label": f"p {_STYLE[regime]['label']}"})
    if Regime.NONNEUTRAL in regimes:
        xs, ys = _series(rows, Regime.NONNEUTRAL, "q")
        ax.plot(xs, ys, color="#7d6608", marker="^", label="q non-neutral")
    ax.set_title("prices per click")
    ax.set_xlabel(xlabel)
    ax.legend(fontsize=7)

    handles, labels = axes[0, 0].get_legend_handles_labels()
    if handles:
        fig.legend(handles, labels, loc="upper center", ncol=2, fontsize=8)
    fig.tight_layout(rect=(0, 0, 1, 0.95))
    fig.savefig(out_png, **_PNG_META)
    plt.close(fig)
    return out_png


def render_diversity_curve(
    rows: Sequence[tuple[str, float, float]], out_png: Path | str
) -> Path:
    """Diversity value M*gamma versus M with the two entry markers."""
    out_png = Path(out_png)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [m for series, m, _ in rows if series == "curve"]
    ys = [mg for series, _, mg in rows if series == "curve"]
    ax.plot(xs, ys, color="black", lw=1.5, label="M * gamma")
    for series, color in (("nonneutral", "#c0392b"), ("neutral", "#2c5f9e")):
        pts = [(m, mg) for s, m, mg in rows if s == series]
        if pts:
            (m, mg) = pts[0]
            ax.plot([m], [mg], "o", color=color, label=f"{series} entry (M={int(m)})")
    ax.set_xlabel("number of CPs M")
    ax.set_ylabel("M * gamma")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_png, **_PNG_META)
    plt.close(fig)
    return out_png
