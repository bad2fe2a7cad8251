"""A small differentiable pillar-based object scorer.

This stands in for a deep detector so attribution and attack evaluation
can run in milliseconds. The score of a (cloud, box) pair is a logistic
regression over three pooled pillar features, each computed with smooth
Gaussian soft assignment of points to footprint cells so the logit is a
C1 function of every point coordinate.

The detector keys on the shape LiDAR actually sees: an object is a
shell of surface returns around a hollow interior. Cells of the
footprint grid split into a border band (within `shell_cells` of any
footprint edge) and the interior, and the features are

  shell occupancy      mean over band cells of 1 - exp(-mass), where a
                       cell's mass is the summed assignment kernel of
                       nearby points; enters with weight +w_shell;
  interior clutter     mean over interior cells of 1 - exp(-mass), with
                       each point's kernel discounted by a logistic
                       weight in normalized height centered at roof_cut.
                       A sensor above roof level legitimately paints the
                       roof, so top-of-box interior mass is benign; mass
                       at hull height inside the footprint is not how
                       cars scan and is penalized with weight
                       -w_interior. 0.0 when the grid is too small to
                       have interior cells;
  mean height          kernel-weighted average of (local z + h/2) / h,
                       weight +w_height.

Thinning the shell lowers the first feature; relaying returns into the
interior raises the penalized second, because relayed surface points
keep their hull-level heights; both are what point-displacement attacks
do, so the logit degrades smoothly as points leave their benign
arrangement. A box with no points in its neighborhood scores exactly
the bias with zero gradient. All features live in the box frame, which
makes the logit
invariant under rigid motion of box and points together. Gradients with
respect to world point coordinates come from the chain rule in closed
form.

Points participate if they fall inside the box dilated by 8 sigma per
side; the kernel is ~1e-14 at that distance, so clipping there changes
nothing at double precision but bounds the work. The "flagged" bit on a
score reports an empty 2-sigma neighborhood, the operational meaning of
"no points support this box".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detector import Detection, ObjectScore
from .errors import FormatError
from .indexing import PillarGrid
from .scene import BoundingBox, PointCloud, rotation_z

MASS_EPS = 1e-9         # denominator guard for the weighted mean
SUPPORT_SIGMAS = 8.0    # computation support: box dilated this many sigma
FLAG_SIGMAS = 2.0       # "neighborhood is empty" diagnostic distance


@dataclass(frozen=True)
class SurrogateParams:
    """Frozen configuration of the scorer."""

    voxel: float = 0.2
    sigma: float = 0.15
    shell_cells: int = 2
    w_shell: float = 6.0
    w_interior: float = 6.0
    w_height: float = 0.25
    roof_cut: float = 0.7
    roof_smooth: float = 0.1
    bias: float = -0.05
    tau: float = 0.5

    def __post_init__(self) -> None:
        if self.voxel <= 0.0 or self.sigma <= 0.0:
            raise ValueError("voxel and sigma must be positive")
        if int(self.shell_cells) != self.shell_cells or self.shell_cells < 1:
            raise ValueError("shell_cells must be a positive integer")
        object.__setattr__(self, "shell_cells", int(self.shell_cells))
        if not all(map(math.isfinite, (self.w_shell, self.w_interior, self.w_height, self.bias))):
            raise ValueError("weights and bias must be finite")
        if not 0.0 < self.roof_cut < 1.0:
            raise ValueError("roof_cut must lie in (0, 1)")
        if self.roof_smooth <= 0.0:
            raise ValueError("roof_smooth must be positive")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must lie in (0, 1)")


DEFAULT_PARAMS = SurrogateParams()


def params_to_json(params: SurrogateParams) -> str:
    return json.dumps({
        "voxel": params.voxel,
        "sigma": params.sigma,
        "shell_cells": params.shell_cells,
        "w_shell": params.w_shell,
        "w_interior": params.w_interior,
        "w_height": params.w_height,
        "roof_cut": params.roof_cut,
        "roof_smooth": params.roof_smooth,
        "bias": params.bias,
        "tau": params.tau,
    })


def params_from_json(text: str) -> SurrogateParams:
    try:
        doc = json.loads(text)
        if not isinstance(doc, dict):
            raise TypeError("params document must be an object")
        return SurrogateParams(**{k: float(v) for k, v in doc.items()})
    except (ValueError, TypeError) as exc:
        raise FormatError(f"malformed surrogate params: {exc}") from exc


def save_params(params: SurrogateParams, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(params_to_json(params))
        f.write("\n")


def load_params(path) -> SurrogateParams:
    with open(path, "r", encoding="utf-8") as f:
        return params_from_json(f.read())


# ---------------------------------------------------------------------------
# Core scoring math
# ---------------------------------------------------------------------------

def _dilated_contains(box: BoundingBox, xyz: np.ndarray, margin: float) -> np.ndarray:
    local = box.to_local(xyz)
    h = np.array([box.length, box.width, box.height]) / 2.0 + margin
    return (np.abs(local) < h).all(axis=1)


def _sigmoid(x: float) -> float:
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _band_split(rows: int, cols: int, thickness: int) -> tuple[np.ndarray, np.ndarray]:
    """Flat cell indices of the border band and of the interior."""
    i = np.repeat(np.arange(rows), cols)
    j = np.tile(np.arange(cols), rows)
    band = (i < thickness) | (i >= rows - thickness) | (j < thickness) | (j >= cols - thickness)
    return np.flatnonzero(band), np.flatnonzero(~band)


def _score_xyz(
    xyz: np.ndarray, box: BoundingBox, params: SurrogateParams, with_gradient: bool
) -> tuple[float, np.ndarray | None, bool]:
    """Logit, world-frame gradient (n, 3) or None, and the empty-neighborhood flag."""
    n = xyz.shape[0]
    sigma = params.sigma
    flagged = not (n and _dilated_contains(box, xyz, FLAG_SIGMAS * sigma).any())
    support = _dilated_contains(box, xyz, SUPPORT_SIGMAS * sigma) if n else np.zeros(0, bool)
    if not support.any():
        grad = np.zeros((n, 3)) if with_gradient else None
        return params.bias, grad, True

    idx = np.flatnonzero(support)
    local = box.to_local(xyz[idx])
    hl, hw = box.length / 2.0, box.width / 2.0
    uv = local[:, :2] + np.array([hl, hw])

    grid = PillarGrid.for_box(box, params.voxel)
    centers_u = (np.arange(grid.rows) + 0.5) * grid.cell_size
    centers_v = (np.arange(grid.cols) + 0.5) * grid.cell_size
    centers = np.stack(
        [np.repeat(centers_u, grid.cols), np.tile(centers_v, grid.rows)], axis=1
    )
    band, interior = _band_split(grid.rows, grid.cols, params.shell_cells)

    diff = uv[:, None, :] - centers[None, :, :]          # (s, C, 2)
    kernel = np.exp(-(diff ** 2).sum(axis=2) / (2.0 * sigma * sigma))  # (s, C)
    cell_mass = kernel.sum(axis=0)                       # (C,)
    point_mass = kernel.sum(axis=1)                      # (s,)
    band_vacancy = np.exp(-cell_mass[band])

    height = (local[:, 2] + box.height / 2.0) / box.height
    # Logistic hull weight: ~1 below the roof line, ~0 above it. The
    # exponent clip only touches weights within 1e-26 of saturation.
    hull_arg = np.clip((height - params.roof_cut) / params.roof_smooth, -60.0, 60.0)
    hull = 1.0 / (1.0 + np.exp(hull_arg))

    shell_occ = float((1.0 - band_vacancy).mean())
    if interior.size:
        clutter_mass = hull @ kernel[:, interior]        # (I,)
        clutter_vacancy = np.exp(-clutter_mass)
        interior_clutter = float((1.0 - clutter_vacancy).mean())
    else:
        interior_clutter = 0.0
    denom = float(point_mass.sum()) + MASS_EPS
    mean_height = float((point_mass * height).sum()) / denom

    logit = (
        params.bias
        + params.w_shell * shell_occ
        - params.w_interior * interior_clutter
        + params.w_height * mean_height
    )
    if not with_gradient:
        return logit, None, flagged

    # d(kernel)/d(uv): one 2-vector per (point, cell) pair.
    dk = kernel[:, :, None] * (-diff / (sigma * sigma))  # (s, C, 2)
    dshell_uv = np.einsum("c,pcv->pv", band_vacancy, dk[:, band, :]) / band.size
    if interior.size:
        dclutter_uv = hull[:, None] * np.einsum(
            "c,pcv->pv", clutter_vacancy, dk[:, interior, :]
        ) / interior.size
        dhull = -hull * (1.0 - hull) / (params.roof_smooth * box.height)
        dclutter_z = (kernel[:, interior] @ clutter_vacancy) * dhull / interior.size
    else:
        dclutter_uv = 0.0
        dclutter_z = 0.0
    # point_mass gradient feeds the kernel-weighted height mean.
    dmass_uv = dk.sum(axis=1)                            # (s, 2)
    dheight_uv = dmass_uv * (height - mean_height)[:, None] / denom
    dheight_z = point_mass / (box.height * denom)        # via the height term itself

    guv = (
        params.w_shell * dshell_uv
        - params.w_interior * dclutter_uv
        + params.w_height * dheight_uv
    )
    gz = params.w_height * dheight_z - params.w_interior * dclutter_z
    rot = rotation_z(box.yaw)
    grad_support = guv @ rot[:, :2].T + gz[:, None] * rot[:, 2][None, :]

    grad = np.zeros((n, 3))
    grad[idx] = grad_support
    return logit, grad, flagged


def score(cloud: PointCloud, box: BoundingBox, params: SurrogateParams = DEFAULT_PARAMS) -> ObjectScore:
    """Score one box against the cloud, with per-point logit gradients."""
    logit, grad, flagged = _score_xyz(cloud.xyz, box, params, with_gradient=True)
    return ObjectScore(
        logit=logit, probability=_sigmoid(logit), gradient=grad, flagged=flagged
    )


def detect(
    cloud: PointCloud,
    candidates: Sequence[BoundingBox],
    params: SurrogateParams = DEFAULT_PARAMS,
) -> tuple[Detection, ...]:
    """Score every candidate box; keep those at or above threshold.

    Results are sorted by probability descending, ties by candidate index.
    """
    hits: list[Detection] = []
    for i, box in enumerate(candidates):
        logit, _, _ = _score_xyz(cloud.xyz, box, params, with_gradient=False)
        prob = _sigmoid(logit)
        if prob >= params.tau:
            hits.append(Detection(box=box, probability=prob, logit=logit, candidate_index=i))
    hits.sort(key=lambda d: (-d.probability, d.candidate_index))
    return tuple(hits)


def grad_check(
    cloud: PointCloud,
    box: BoundingBox,
    params: SurrogateParams = DEFAULT_PARAMS,
    h: float = 1e-4,
    rel_floor: float = 1e-3,
) -> float:
    """Max relative error of analytic vs. central-difference gradients.

    Checked over every point comfortably inside the computation support
    (dilation 7 sigma, so a +-h probe cannot cross the support boundary)
    plus up to five points well outside it, where both sides must vanish.
    The error metric is |analytic - fd| / max(|analytic|, |fd|, rel_floor),
    the usual mixed absolute/relative comparison: gradients above the
    floor are held to the relative tolerance, while comparisons between
    near-zero gradients only need to agree within tolerance * floor,
    below the finite-difference noise of a double-precision logit.
    """
    if h <= 0.0:
        raise ValueError("h must be positive")
    xyz = cloud.xyz
    inner = np.flatnonzero(_dilated_contains(box, xyz, (SUPPORT_SIGMAS - 1.0) * params.sigma))
    outer = np.flatnonzero(~_dilated_contains(box, xyz, (SUPPORT_SIGMAS + 1.0) * params.sigma))[:5]
    check = np.concatenate([inner, outer])
    _, grad, _ = _score_xyz(xyz, box, params, with_gradient=True)
    worst = 0.0
    for p in check:
        for c in range(3):
            bumped = xyz.copy()
            bumped[p, c] += h
            hi, _, _ = _score_xyz(bumped, box, params, with_gradient=False)
            bumped[p, c] -= 2.0 * h
            lo, _, _ = _score_xyz(bumped, box, params, with_gradient=False)
            fd = (hi - lo) / (2.0 * h)
            a = grad[p, c]
            err = abs(a - fd) / max(abs(a), abs(fd), rel_floor)
            worst = max(worst, err)
    return worst


class SurrogateDetector:
    """DetectorHandle over the built-in scorer."""

    def __init__(self, params: SurrogateParams = DEFAULT_PARAMS) -> None:
        self.params = params

    def score(self, cloud: PointCloud, box: BoundingBox) -> ObjectScore:
        return score(cloud, box, self.params)

    def detect(self, cloud: PointCloud, candidates: Sequence[BoundingBox]) -> tuple[Detection, ...]:
        return detect(cloud, candidates, self.params)
