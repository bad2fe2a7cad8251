"""Figure rendering for CLI reports.

Everything draws through the Agg backend straight to files; no window is
ever opened. PNG output carries no timestamps, so re-running a command
reproduces figures byte-for-byte.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import SweepResult
from .saliency import SaliencyMap
from .scene import Scene

plt.rcParams.update({
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
})


def save_area_curves(s_values: Sequence[float], pillars_by_kind: Mapping[str, Sequence[float]], path) -> None:
    """Spoofing pillars versus target scale, one curve per patch kind."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for kind in sorted(pillars_by_kind):
        ax.plot(s_values, pillars_by_kind[kind], marker="o", markersize=3, label=kind)
    ax.set_xlabel("target scale S (m); footprint 2S x S")
    ax.set_ylabel("spoofing pillars needed")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_asr_curves(result: SweepResult, path) -> None:
    """Attack success rate versus budget, one curve per (patch, strategy)."""
    series: dict[tuple[str, str], list[tuple[int, float]]] = {}
    for row in result.rows:
        series.setdefault((row.patch, row.strategy), []).append((row.budget, row.asr))
    fig, ax = plt.subplots(figsize=(6, 4))
    for (patch, strategy) in sorted(series):
        pts = sorted(series[(patch, strategy)])
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker="o", markersize=3, label=f"{patch}/{strategy}")
    ax.set_xlabel("point budget per object")
    ax.set_ylabel("attack success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_map_heatmap(m: SaliencyMap, path) -> None:
    """Signed contribution heatmap of a saliency map."""
    fig, ax = plt.subplots(figsize=(5, 7))
    lim = float(np.abs(m.values).max()) or 1.0
    im = ax.imshow(m.values, cmap="coolwarm", vmin=-lim, vmax=lim, aspect="auto")
    ax.set_xlabel("width cells")
    ax.set_ylabel("length cells")
    ax.set_title(f"{m.kind.value} map, {m.cls.value}, k={m.k}")
    ax.grid(False)
    fig.colorbar(im, ax=ax, shrink=0.8, label="contribution")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_bev_scatter(scene: Scene, path, shifted_indices: Sequence[int] | None = None) -> None:
    """Ground-plane view of a scene: points plus box footprints."""
    fig, ax = plt.subplots(figsize=(6, 6))
    xyz = scene.cloud.xyz
    ax.scatter(xyz[:, 0], xyz[:, 1], s=2, c="0.55", linewidths=0, label="points")
    if shifted_indices is not None and len(shifted_indices):
        sel = np.asarray(shifted_indices, dtype=np.intp)
        ax.scatter(xyz[sel, 0], xyz[sel, 1], s=4, c="crimson", linewidths=0, label="shifted")
    for box in scene.boxes:
        corners = box.footprint_corners()
        loop = np.vstack([corners, corners[:1]])
        ax.plot(loop[:, 0], loop[:, 1], c="tab:blue", lw=1.0)
    ax.plot(0, 0, marker="^", c="k", markersize=8)  # sensor
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal")
    ax.set_title(scene.id)
    if shifted_indices is not None and len(shifted_indices):
        ax.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
