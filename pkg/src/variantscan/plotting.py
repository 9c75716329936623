"""SVG heatmaps for ldist series and segment comparison matrices.

Figures are drawn through the object API (no pyplot state), with the SVG
hash salt and metadata pinned so identical data gives identical bytes.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib
import numpy as np
from matplotlib.colors import LinearSegmentedColormap, Normalize
from matplotlib.figure import Figure

from .change_detection import LdistSeries
from .segmentation import ComparisonMatrix

WHITE_TO_DARK = LinearSegmentedColormap.from_list("white_to_dark", ["#ffffff", "#08306b"])

RC = {
    "svg.hashsalt": "variantscan",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "font.size": 8,
    "axes.linewidth": 0.6,
}
SVG_METADATA = {"Date": None, "Creator": "variantscan"}


def color_norm(values: np.ndarray) -> Normalize:
    finite = values[np.isfinite(values)]
    top = float(finite.max()) if finite.size else 0.0
    return Normalize(vmin=0.0, vmax=top if top > 0 else 1.0)


def _annotate(ax, grid: np.ndarray, norm: Normalize, fontsize: float, rotation: float = 0) -> None:
    for (r, c), v in np.ndenumerate(grid):
        if not np.isfinite(v):
            continue
        dark = norm(v) > 0.55
        ax.text(
            c, r, f"{v:.3f}", ha="center", va="center", fontsize=fontsize,
            rotation=rotation, color="white" if dark else "black",
        )


def _save(fig: Figure, out: Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(RC):
        fig.savefig(out, format="svg", metadata=SVG_METADATA)
    return out


def _matrix_figure(matrix: ComparisonMatrix, title: str) -> Figure:
    grid = np.asarray(matrix.values, dtype=float)
    k = grid.shape[0]
    norm = color_norm(grid)
    side = max(2.5, 0.7 * k + 1.2)
    fig = Figure(figsize=(side + 0.8, side))
    ax = fig.add_subplot()
    im = ax.imshow(grid, cmap=WHITE_TO_DARK, norm=norm, interpolation="nearest")
    ax.set_xticks(range(k), matrix.labels, rotation=90 if k > 6 else 0)
    ax.set_yticks(range(k), matrix.labels)
    _annotate(ax, grid, norm, fontsize=max(4.0, 9 - 0.3 * k))
    ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
    fig.tight_layout()
    return fig


def _series_figure(series: LdistSeries, title: str) -> Figure:
    grid = np.array([series.values], dtype=float)
    n = grid.shape[1]
    norm = color_norm(grid)
    fig = Figure(figsize=(max(3.0, 0.28 * n + 1.5), 1.9))
    ax = fig.add_subplot()
    im = ax.imshow(grid, cmap=WHITE_TO_DARK, norm=norm, aspect="auto", interpolation="nearest")
    step = max(1, n // 25)
    ticks = list(range(0, n, step))
    ax.set_xticks(ticks, [str(series.indices[t]) for t in ticks])
    ax.set_yticks([0], [f"w={series.w}"])
    ax.set_xlabel("center bucket i")
    _annotate(ax, grid, norm, fontsize=5 if n > 30 else 7, rotation=90)
    ax.set_title(title)
    fig.colorbar(im, ax=ax, fraction=0.03, pad=0.02)
    fig.tight_layout()
    return fig


def render_heatmap(data: Union[ComparisonMatrix, LdistSeries], out: Path, title: str | None = None) -> Path:
    """Render a comparison matrix (k x k) or an ldist series (1 x n strip)."""
    if isinstance(data, ComparisonMatrix):
        if data.size == 0:
            raise ValueError("empty comparison matrix")
        return _save(_matrix_figure(data, title or "pairwise segment EMD"), out)
    if isinstance(data, LdistSeries):
        if not data.entries:
            raise ValueError("empty ldist series")
        return _save(_series_figure(data, title or f"ldist, w={data.w}"), out)
    raise TypeError(f"cannot render {type(data).__name__}")


def render_ldist_panel(series: Sequence[LdistSeries], b: int, out: Path, change_points: Sequence[int] = ()) -> Path:
    """All window sizes stacked on a shared center axis ``1..b-1``; centers
    outside a window's domain are left blank. Each row is scaled to its own
    maximum."""
    rows = len(series)
    fig = Figure(figsize=(max(4.0, 0.09 * b + 2.0), 0.6 * rows + 1.2))
    axes = fig.subplots(rows, 1, squeeze=False, sharex=True)[:, 0]
    for ax, s in zip(axes, series):
        grid = np.full((1, b - 1), np.nan)
        for e in s.entries:
            grid[0, e.i - 1] = e.value
        ax.imshow(grid, cmap=WHITE_TO_DARK, norm=color_norm(grid), aspect="auto", interpolation="nearest",
                  extent=(0.5, b - 0.5, 0.5, -0.5))
        ax.set_yticks([0], [f"w={s.w}"])
        for p in change_points:
            ax.axvline(p, color="#d62728", linewidth=0.6, linestyle=":")
    axes[-1].set_xlabel("center bucket i")
    fig.tight_layout()
    return _save(fig, out)


def render_report_figures(report, out_dir: Path) -> list[Path]:
    out_dir = Path(out_dir)
    paths = [render_heatmap(s, out_dir / f"ldist_w{s.w}.svg") for s in report.series]
    paths.append(
        render_ldist_panel(report.series, report.bucketing.b, out_dir / "ldist_panel.svg", report.change_points.points)
    )
    paths.append(render_heatmap(report.matrix, out_dir / "matrix.svg"))
    return paths
