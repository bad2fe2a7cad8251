"""Ground-plane grids over a box footprint.

Two flavors are used by the rest of the package:

  * PillarGrid: square cells of fixed size (0.16 m by default), with as
    many rows/columns as it takes to cover the footprint. Manual patch
    shapes are defined on this grid.
  * BoxFrameGrid: a fixed number of rows x columns (64 x 32 by default)
    stretched over the footprint, so cell size adapts to the object.
    Saliency maps and critical patch shapes live on this grid.

Both address cells as (row, col): rows run along the box length and
columns along the width. Footprint coordinates (u, v) place the origin
at the corner where both local axes are most negative, so u is in
[0, length) and v is in [0, width) for points inside the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scene import BoundingBox


def box_frame_coords(box: BoundingBox, xyz: np.ndarray) -> np.ndarray:
    """World positions (n, 3) -> footprint coordinates (n, 2)."""
    local = box.to_local(xyz)
    return local[:, :2] + np.array([box.length / 2.0, box.width / 2.0])


@dataclass(frozen=True)
class CellIndex:
    row: int
    col: int


@dataclass(frozen=True)
class PillarGrid:
    """Square-cell grid; covers at least the footprint it was built for."""

    rows: int
    cols: int
    cell_size: float = 0.16

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must have at least one row and column")
        if self.cell_size <= 0.0:
            raise ValueError("cell_size must be positive")

    @classmethod
    def for_box(cls, box: BoundingBox, cell_size: float = 0.16) -> "PillarGrid":
        return cls(
            rows=math.ceil(box.length / cell_size),
            cols=math.ceil(box.width / cell_size),
            cell_size=cell_size,
        )

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def index(self, uv: np.ndarray) -> np.ndarray:
        """Footprint coordinates (n, 2) -> integer cells (n, 2).

        Cells are half-open; a coordinate exactly on the far edge of the
        grid (possible only through rounding) lands in the last cell.
        """
        uv = np.atleast_2d(uv)
        if uv.size and (uv.min() < 0.0
                        or uv[:, 0].max() > self.rows * self.cell_size
                        or uv[:, 1].max() > self.cols * self.cell_size):
            raise ValueError("coordinates outside the grid extent")
        cells = np.floor(uv / self.cell_size).astype(np.intp)
        cells[:, 0] = np.minimum(cells[:, 0], self.rows - 1)
        cells[:, 1] = np.minimum(cells[:, 1], self.cols - 1)
        return cells

    def cell_of(self, u: float, v: float) -> CellIndex:
        c = self.index(np.array([[u, v]]))[0]
        return CellIndex(int(c[0]), int(c[1]))


@dataclass(frozen=True)
class BoxFrameGrid:
    """Fixed-resolution grid stretched over whatever footprint it is applied to."""

    rows: int = 64
    cols: int = 32

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid must have at least one row and column")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def cell_dims(self, box: BoundingBox) -> tuple[float, float]:
        """Per-cell (length, width) in meters for this box."""
        return (box.length / self.rows, box.width / self.cols)

    def index_for_box(self, box: BoundingBox, uv: np.ndarray) -> np.ndarray:
        """Footprint coordinates (n, 2) -> integer cells (n, 2)."""
        uv = np.atleast_2d(uv)
        if uv.size and (uv.min() < 0.0
                        or uv[:, 0].max() > box.length
                        or uv[:, 1].max() > box.width):
            raise ValueError("coordinates outside the box footprint")
        rows = np.floor(uv[:, 0] / box.length * self.rows).astype(np.intp)
        cols = np.floor(uv[:, 1] / box.width * self.cols).astype(np.intp)
        rows = np.minimum(rows, self.rows - 1)
        cols = np.minimum(cols, self.cols - 1)
        return np.stack([rows, cols], axis=1)
