"""Virtual patch masks and closed-form spoofing areas.

A patch is a boolean mask over a grid laid on an object's footprint; the
perturbation stage may only touch points whose ground-plane cell is
selected. Two families exist:

  * manual shapes (edges, nearest_corner, center, x) defined on the
    square-cell pillar grid, and
  * saliency-driven shapes (top_n, half_edges, critical_x, whole_area)
    defined on the fixed-resolution box-frame grid.

The closed-form area formulas answer "how many spoofing pillars would a
relay attack need to cover this patch" for a target footprint and pillar
size; they are continuous quantities, deliberately not rounded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, FormatError
from .indexing import BoxFrameGrid, PillarGrid
from .scene import BoundingBox

DEFAULT_PILLAR_CELL = 0.16  # m, manual-patch grid resolution


class PatchKind(str, Enum):
    EDGES = "edges"
    NEAREST_CORNER = "nearest_corner"
    CENTER = "center"
    X = "x"
    TOP_N = "top_n"
    HALF_EDGES = "half_edges"
    CRITICAL_X = "critical_x"
    WHOLE_AREA = "whole_area"


MANUAL_KINDS = frozenset(
    {PatchKind.EDGES, PatchKind.NEAREST_CORNER, PatchKind.CENTER, PatchKind.X}
)


class GridFrame(str, Enum):
    PILLAR = "pillar"         # square cells of fixed size over the footprint
    BOX_FRAME = "box_frame"   # fixed rows x cols stretched over the footprint


@dataclass(frozen=True)
class PatchMask:
    """Immutable boolean cell selection over a footprint grid."""

    kind: PatchKind
    frame: GridFrame
    selected: np.ndarray
    params: dict = field(default_factory=dict)
    warning: str | None = None

    def __post_init__(self) -> None:
        sel = np.asarray(self.selected, dtype=bool)
        if sel.ndim != 2:
            raise ValueError("selected must be a 2D boolean matrix")
        sel = sel.copy()
        sel.setflags(write=False)
        object.__setattr__(self, "selected", sel)
        object.__setattr__(self, "params", dict(self.params))

    @property
    def rows(self) -> int:
        return self.selected.shape[0]

    @property
    def cols(self) -> int:
        return self.selected.shape[1]

    @property
    def count(self) -> int:
        return int(self.selected.sum())

    @property
    def fraction(self) -> float:
        return self.count / self.selected.size


@dataclass(frozen=True)
class AreaParams:
    """Inputs to the spoofing-area formulas.

    target_height is carried for reporting only; no area formula uses it.
    """

    target_length: float
    target_width: float
    voxel_length: float = 0.05
    voxel_width: float = 0.05
    alpha: float = 0.1
    beta: float = 0.2
    top_percent: float = 30.0
    target_height: float = 1.5

    def __post_init__(self) -> None:
        if self.target_length <= 0.0 or self.target_width <= 0.0:
            raise ValueError("target dimensions must be positive")
        if self.voxel_length <= 0.0 or self.voxel_width <= 0.0:
            raise ValueError("voxel dimensions must be positive")
        if not (0.0 < self.alpha < 0.5 and 0.0 < self.beta < 0.5):
            raise ValueError("alpha and beta must lie in (0, 0.5)")
        if not 0.0 < self.top_percent <= 100.0:
            raise ValueError("top_percent must lie in (0, 100]")


# ---------------------------------------------------------------------------
# Manual shapes (pillar grid)
# ---------------------------------------------------------------------------

def edges_mask(dims: tuple[int, int]) -> PatchMask:
    """Border band three cells thick along all four footprint edges."""
    rows, cols = dims
    if rows < 6 or cols < 6:
        raise ConfigError(f"edges patch needs a grid of at least 6x6, got {rows}x{cols}")
    sel = np.ones((rows, cols), dtype=bool)
    sel[3 : rows - 3, 3 : cols - 3] = False
    return PatchMask(PatchKind.EDGES, GridFrame.PILLAR, sel, {"thickness": 3})


def nearest_corner_mask(
    dims: tuple[int, int], box: BoundingBox, sensor_origin=(0.0, 0.0, 0.0)
) -> PatchMask:
    """8x8 block anchored at the footprint corner closest to the sensor.

    Equidistant corners resolve to the lowest (row, col) anchor.
    """
    rows, cols = dims
    if rows < 8 or cols < 8:
        raise ConfigError(f"nearest-corner patch needs at least 8x8, got {rows}x{cols}")
    hl, hw = box.length / 2.0, box.width / 2.0
    origin = np.asarray(sensor_origin, dtype=float)
    # Footprint corners paired with the grid anchor of an 8x8 block there.
    corners = [
        ((-hl, -hw), (0, 0)),
        ((hl, -hw), (rows - 8, 0)),
        ((-hl, hw), (0, cols - 8)),
        ((hl, hw), (rows - 8, cols - 8)),
    ]
    best = None
    for (lx, ly), anchor in corners:
        world = box.to_world(np.array([[lx, ly, 0.0]]))[0]
        d2 = float(np.sum((world - origin) ** 2))
        key = (d2, anchor[0], anchor[1])
        if best is None or key < best[0]:
            best = (key, anchor)
    r0, c0 = best[1]
    sel = np.zeros((rows, cols), dtype=bool)
    sel[r0 : r0 + 8, c0 : c0 + 8] = True
    return PatchMask(
        PatchKind.NEAREST_CORNER, GridFrame.PILLAR, sel, {"block": 8, "anchor": [r0, c0]}
    )


def center_mask(dims: tuple[int, int]) -> PatchMask:
    """Concentric block covering three quarters of each dimension."""
    rows, cols = dims
    br = math.ceil(0.75 * rows)
    bc = math.ceil(0.75 * cols)
    r0 = (rows - br) // 2
    c0 = (cols - bc) // 2
    sel = np.zeros((rows, cols), dtype=bool)
    sel[r0 : r0 + br, c0 : c0 + bc] = True
    return PatchMask(PatchKind.CENTER, GridFrame.PILLAR, sel, {"fraction": 0.75})


def x_mask(dims: tuple[int, int], max_dist_cells: float = 1.5) -> PatchMask:
    """Cells whose center lies within `max_dist_cells` of either footprint diagonal.

    Distance is Euclidean in cell units (each cell treated as 1x1), so the
    band has uniform thickness on the grid regardless of cell aspect.
    """
    rows, cols = dims
    ci = np.arange(rows)[:, None] + 0.5
    cj = np.arange(cols)[None, :] + 0.5
    norm = math.hypot(rows, cols)
    # Lines through (0,0)-(rows,cols) and (0,cols)-(rows,0) in cell units.
    d_main = np.abs(ci * cols - cj * rows) / norm
    d_anti = np.abs(ci * cols + cj * rows - rows * cols) / norm
    sel = (d_main <= max_dist_cells) | (d_anti <= max_dist_cells)
    return PatchMask(PatchKind.X, GridFrame.PILLAR, sel, {"max_dist_cells": max_dist_cells})


# ---------------------------------------------------------------------------
# Saliency-driven shapes (box-frame grid)
# ---------------------------------------------------------------------------

def top_fraction_mask(contributions, percent: float = 30.0) -> PatchMask:
    """Highest-contribution cells: ceil(percent% of strictly positive cells).

    Equal contributions resolve in (row, col) ascending order. With no
    positive cell the mask is empty and carries a warning.
    """
    values = np.asarray(getattr(contributions, "values", contributions), dtype=float)
    if values.ndim != 2:
        raise ConfigError("contribution map must be 2D")
    if not 0.0 < percent <= 100.0:
        raise ConfigError("percent must lie in (0, 100]")
    rows, cols = values.shape
    sel = np.zeros((rows, cols), dtype=bool)
    pos_r, pos_c = np.nonzero(values > 0.0)
    n_pos = pos_r.size
    if n_pos == 0:
        return PatchMask(
            PatchKind.TOP_N, GridFrame.BOX_FRAME, sel,
            {"percent": percent}, warning="no positive contributions",
        )
    k = math.ceil(percent / 100.0 * n_pos)
    order = np.lexsort((pos_c, pos_r, -values[pos_r, pos_c]))
    take = order[:k]
    sel[pos_r[take], pos_c[take]] = True
    return PatchMask(PatchKind.TOP_N, GridFrame.BOX_FRAME, sel, {"percent": percent})


def half_edges_mask(dims: tuple[int, int], beta: float = 0.2, contributions=None) -> PatchMask:
    """Bands along the two long edges of the footprint.

    Default: one band per long edge, each ceil((beta/2) * cols) columns
    thick. With a contribution map, only the band on the higher-total
    side is kept, at double thickness ceil(beta * cols); a tie keeps the
    low-column band.
    """
    rows, cols = dims
    if not 0.0 < beta < 0.5:
        raise ConfigError("beta must lie in (0, 0.5)")
    sel = np.zeros((rows, cols), dtype=bool)
    if contributions is None:
        t = min(math.ceil(beta / 2.0 * cols), cols)
        sel[:, :t] = True
        sel[:, cols - t :] = True
        params = {"beta": beta, "band": "both", "thickness": t}
    else:
        values = np.asarray(getattr(contributions, "values", contributions), dtype=float)
        if values.shape != (rows, cols):
            raise ConfigError("contribution map dims do not match the grid")
        t = min(math.ceil(beta * cols), cols)
        low = float(values[:, :t].sum())
        high = float(values[:, cols - t :].sum())
        if high > low:
            sel[:, cols - t :] = True
            params = {"beta": beta, "band": "high", "thickness": t}
        else:
            sel[:, :t] = True
            params = {"beta": beta, "band": "low", "thickness": t}
    return PatchMask(PatchKind.HALF_EDGES, GridFrame.BOX_FRAME, sel, params)


def _open_triangle_contains(u, v, a, b, c) -> np.ndarray:
    """Strict interior test for triangle (a, b, c); u, v broadcastable arrays."""
    def cross(p, q):
        return (q[0] - p[0]) * (v - p[1]) - (q[1] - p[1]) * (u - p[0])

    s1, s2, s3 = cross(a, b), cross(b, c), cross(c, a)
    return ((s1 > 0) & (s2 > 0) & (s3 > 0)) | ((s1 < 0) & (s2 < 0) & (s3 < 0))


def critical_x_fraction(alpha: float, beta: float) -> float:
    """Closed-form covered fraction of the X-shaped critical patch."""
    t1 = (0.5 - alpha) * (1.0 - 2.0 * alpha) * (1.0 - beta) / (1.0 - alpha)
    t2 = (0.5 - beta) * (1.0 - 2.0 * beta) * (1.0 - alpha) / (1.0 - beta)
    return 1.0 - t1 - t2


def critical_x_contains(u, v, alpha: float, beta: float) -> np.ndarray:
    """Continuous membership on the unit square: complement of 4 open triangles.

    One triangle pair stands on the length edges (v = 0 and v = 1) with
    bases trimmed by alpha; the other pair stands on the width edges with
    bases trimmed by beta. Apex heights are chosen so each pair's area
    equals the matching subtracted term of the closed form, which makes
    the covered fraction of this test equal critical_x_fraction(alpha, beta).
    """
    if not (0.0 < alpha < 0.5 and 0.0 < beta < 0.5):
        raise ConfigError("alpha and beta must lie in (0, 0.5)")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    m_len = (0.5 - alpha) * (1.0 - beta) / (1.0 - alpha)   # apex height of length-edge pair
    m_wid = (0.5 - beta) * (1.0 - alpha) / (1.0 - beta)    # apex height of width-edge pair
    inside = (
        _open_triangle_contains(u, v, (alpha, 0.0), (1.0 - alpha, 0.0), (0.5, m_len))
        | _open_triangle_contains(u, v, (alpha, 1.0), (1.0 - alpha, 1.0), (0.5, 1.0 - m_len))
        | _open_triangle_contains(u, v, (0.0, beta), (0.0, 1.0 - beta), (m_wid, 0.5))
        | _open_triangle_contains(u, v, (1.0, beta), (1.0, 1.0 - beta), (1.0 - m_wid, 0.5))
    )
    return ~inside


def critical_x_mask(dims: tuple[int, int], alpha: float = 0.1, beta: float = 0.2) -> PatchMask:
    """Discretized X band: cell selected iff its center passes the continuous test."""
    rows, cols = dims
    u = (np.arange(rows)[:, None] + 0.5) / rows
    v = (np.arange(cols)[None, :] + 0.5) / cols
    sel = critical_x_contains(np.broadcast_to(u, (rows, cols)), np.broadcast_to(v, (rows, cols)), alpha, beta)
    return PatchMask(PatchKind.CRITICAL_X, GridFrame.BOX_FRAME, sel, {"alpha": alpha, "beta": beta})


def whole_area_mask(dims: tuple[int, int]) -> PatchMask:
    rows, cols = dims
    return PatchMask(PatchKind.WHOLE_AREA, GridFrame.BOX_FRAME, np.ones((rows, cols), dtype=bool))


# ---------------------------------------------------------------------------
# Spoofing-area closed forms
# ---------------------------------------------------------------------------

def area_pillars(params: AreaParams, kind: PatchKind) -> float:
    """Spoofing pillars needed to cover a patch of `kind` on the target footprint."""
    whole = (params.target_length * params.target_width) / (
        params.voxel_length * params.voxel_width
    )
    if kind is PatchKind.WHOLE_AREA:
        return whole
    if kind is PatchKind.CRITICAL_X:
        return critical_x_fraction(params.alpha, params.beta) * whole
    if kind is PatchKind.HALF_EDGES:
        return params.beta * whole
    if kind is PatchKind.TOP_N:
        return params.top_percent / 100.0 * whole
    raise ConfigError(f"no closed-form spoofing area for patch kind '{kind.value}'")


# ---------------------------------------------------------------------------
# Mask construction for a concrete box
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PatchSpec:
    """Which patch to build, plus the shape parameters it may need."""

    kind: PatchKind
    alpha: float = 0.1
    beta: float = 0.2
    top_percent: float = 30.0
    max_dist_cells: float = 1.5
    pillar_cell: float = DEFAULT_PILLAR_CELL
    grid: BoxFrameGrid = field(default_factory=BoxFrameGrid)


def build_mask(
    spec: PatchSpec,
    box: BoundingBox,
    sensor_origin=(0.0, 0.0, 0.0),
    contributions=None,
) -> PatchMask:
    """Instantiate the mask for one object box.

    Manual kinds land on the pillar grid sized for the box; the others on
    the fixed box-frame grid. top_n requires a contribution map.
    """
    if spec.kind in MANUAL_KINDS:
        dims = PillarGrid.for_box(box, spec.pillar_cell).shape
        if spec.kind is PatchKind.EDGES:
            mask = edges_mask(dims)
        elif spec.kind is PatchKind.NEAREST_CORNER:
            mask = nearest_corner_mask(dims, box, sensor_origin)
        elif spec.kind is PatchKind.CENTER:
            mask = center_mask(dims)
        else:
            mask = x_mask(dims, spec.max_dist_cells)
        merged = dict(mask.params)
        merged["cell_size"] = spec.pillar_cell
        return PatchMask(mask.kind, mask.frame, mask.selected, merged, mask.warning)

    dims = spec.grid.shape
    if spec.kind is PatchKind.TOP_N:
        if contributions is None:
            raise ConfigError("top_n patch requires a contribution map")
        return top_fraction_mask(contributions, spec.top_percent)
    if spec.kind is PatchKind.HALF_EDGES:
        return half_edges_mask(dims, spec.beta, contributions)
    if spec.kind is PatchKind.CRITICAL_X:
        return critical_x_mask(dims, spec.alpha, spec.beta)
    return whole_area_mask(dims)


# ---------------------------------------------------------------------------
# Serialization: JSON + RLE rows, and PGM for eyeballing
# ---------------------------------------------------------------------------

def _rle_encode_row(row: np.ndarray) -> list[int]:
    """Alternating run lengths, starting with the count of leading False."""
    runs: list[int] = []
    current = False
    run = 0
    for bit in row:
        if bool(bit) == current:
            run += 1
        else:
            runs.append(run)
            current = not current
            run = 1
    runs.append(run)
    return runs


def _rle_decode_row(runs: list[int], cols: int) -> np.ndarray:
    row = np.zeros(cols, dtype=bool)
    pos = 0
    value = False
    for run in runs:
        if run < 0 or pos + run > cols:
            raise FormatError("run lengths exceed the row width")
        if value:
            row[pos : pos + run] = True
        pos += run
        value = not value
    if pos != cols:
        raise FormatError(f"run lengths cover {pos} of {cols} columns")
    return row


def mask_to_json(mask: PatchMask) -> str:
    doc = {
        "kind": mask.kind.value,
        "rows": mask.rows,
        "cols": mask.cols,
        "frame": mask.frame.value,
        "params": mask.params,
        "rle": [_rle_encode_row(mask.selected[r]) for r in range(mask.rows)],
    }
    if mask.warning is not None:
        doc["warning"] = mask.warning
    return json.dumps(doc, ensure_ascii=False)


def mask_from_json(text: str) -> PatchMask:
    try:
        doc = json.loads(text)
        rows, cols = int(doc["rows"]), int(doc["cols"])
        rle = doc["rle"]
        if len(rle) != rows:
            raise FormatError(f"expected {rows} encoded rows, got {len(rle)}")
        sel = np.stack([_rle_decode_row(r, cols) for r in rle]) if rows else np.zeros((0, cols), bool)
        return PatchMask(
            PatchKind(doc["kind"]),
            GridFrame(doc["frame"]),
            sel,
            doc.get("params", {}),
            doc.get("warning"),
        )
    except FormatError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"malformed mask JSON: {exc}") from exc


def save_mask(mask: PatchMask, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(mask_to_json(mask))
        f.write("\n")


def load_mask(path) -> PatchMask:
    with open(path, "r", encoding="utf-8") as f:
        return mask_from_json(f.read())


def mask_to_pgm(mask: PatchMask) -> str:
    """Plain (P2) PGM, one image row per grid row, selected cells white."""
    lines = ["P2", f"{mask.cols} {mask.rows}", "1"]
    for r in range(mask.rows):
        lines.append(" ".join("1" if v else "0" for v in mask.selected[r]))
    return "\n".join(lines) + "\n"


def save_mask_pgm(mask: PatchMask, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(mask_to_pgm(mask))
