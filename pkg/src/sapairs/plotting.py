"""PNG figures written next to a report file (Agg backend, no display)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .exact import ARCHIMEDEAN, parse_scalar, scalar_float  # noqa: E402
from .report import Report  # noqa: E402

_FLOOR = 1e-300


def figure_path(out: str) -> Path:
    return Path(out).with_suffix(".png")


def _log10(s) -> float:
    v = abs(scalar_float(parse_scalar(s)))
    return math.log10(max(v, _FLOOR))


def plot_experiment(report: Report, path) -> Path | None:
    """Per-row log10 magnitudes at every place against the row's epsilon."""
    rows = [r for r in report.rows if r.get("found") and r.get("magnitudes")]
    if not rows:
        return None
    places = list(rows[0]["magnitudes"])
    fig, axes = plt.subplots(1, len(places), figsize=(4.2 * len(places), 3.4), squeeze=False)
    idx = [r["index"] for r in rows]
    for ax, place in zip(axes[0], places):
        eps = [_log10(r["eps"][place].split(",")[0]) for r in rows]
        q = [_log10(r["magnitudes"][place]["Q"]) for r in rows]
        lv = [_log10(r["magnitudes"][place]["L"]) for r in rows]
        ax.plot(idx, eps, "k--", lw=1, label="log10 eps")
        ax.plot(idx, q, "o", label="log10 |Q|")
        ax.plot(idx, [max(v, -20) for v in lv], "s", mfc="none", label="log10 |L| (0 drawn at -20)")
        ax.set_title("archimedean" if place == ARCHIMEDEAN else f"p = {place}")
        ax.set_xlabel("schedule row")
        ax.grid(alpha=0.3)
    axes[0][0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def plot_obstruction(report: Report, path) -> Path | None:
    rows = [r for r in report.rows if r.get("smallest")]
    if not rows:
        return None
    vals = [float(parse_scalar(x)) for x in rows[0]["smallest"]]
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(range(1, len(vals) + 1), vals, "o-", ms=3)
    ax.axhline(1.0, color="k", ls="--", lw=1, label="product-formula floor")
    ax.set_yscale("log")
    ax.set_xlabel("rank among distinct nonzero values")
    ax.set_ylabel("max over places of |Q0(x)|")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render(report: Report, out: str) -> Path | None:
    path = figure_path(out)
    if report.mode in ("experiment", "search"):
        return plot_experiment(report, path)
    if report.mode == "obstruct":
        return plot_obstruction(report, path)
    return None
