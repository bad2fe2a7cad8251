"""Integrated-gradients attribution and universal saliency maps.

Per object, attribution integrates the detector's point-coordinate
gradients along a straight path from a baseline cloud (the object's
points pushed 2 m out along their rays, or collapsed to the box center)
to the observed cloud. Each point's attribution is the dot product of
its displacement with the path-averaged gradient, summed over x, y, z.
The completeness residual |sum(attributions) - (F(x) - F(baseline))| is
stored on every result, so convergence is checkable after the fact.

Per-object attributions are then binned on the fixed-resolution
box-frame grid and summed across scenes into one universal map. The
aggregation order is fixed (ascending scene id, then object index, with
identical keys folded first), which makes results schedule-independent
and makes duplicating the scene list exactly double the map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .detector import Detection, DetectorHandle
from .errors import ConfigError, DetectorError, NoMatchError
from .indexing import BoxFrameGrid, box_frame_coords
from .scene import BoundingBox, Extraction, ObjectClass, Scene, bev_iou, extract

UNRESTRICTED_RANGE = (0.0, 1000.0)  # m, "any distance" bin


class BaselineKind(str, Enum):
    RADIAL_PUSHOUT = "radial_pushout"  # each point +displacement along its ray
    BOX_CENTROID = "box_centroid"      # all points collapsed to the box center


class Quadrature(str, Enum):
    TRAPEZOID = "trapezoid"
    RIGHT_ENDPOINT = "right_endpoint"


@dataclass(frozen=True)
class IGConfig:
    steps: int = 25
    baseline: BaselineKind = BaselineKind.RADIAL_PUSHOUT
    displacement: float = 2.0
    quadrature: Quadrature = Quadrature.TRAPEZOID

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ConfigError("steps must be >= 1")


@dataclass(frozen=True)
class FocusRegion:
    box: BoundingBox
    cls: ObjectClass
    distance_bin: tuple[float, float] = UNRESTRICTED_RANGE

    def __post_init__(self) -> None:
        lo, hi = self.distance_bin
        if not lo < hi:
            raise ValueError("distance bin lower bound must be below the upper")


@dataclass(frozen=True)
class AttributionVector:
    """Per-point contributions for one object, plus convergence bookkeeping."""

    values: np.ndarray
    scene_id: str
    object_index: int
    steps: int
    residual: float      # |sum(values) - delta|
    delta: float         # F(input) - F(baseline)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or not np.isfinite(vals).all():
            raise ValueError("attribution values must be a finite 1D vector")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


class MapKind(str, Enum):
    PER_OBJECT = "per_object"
    UNIVERSAL = "universal"


@dataclass(frozen=True)
class SaliencyMap:
    values: np.ndarray
    kind: MapKind
    cls: ObjectClass
    range_m: tuple[float, float] = UNRESTRICTED_RANGE
    k: int = 1
    scene_id: str | None = None
    object_index: int | None = None

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("map values must be 2D")
        if not np.isfinite(vals).all():
            raise ValueError("map values must be finite")
        if self.kind is MapKind.UNIVERSAL and self.k < 1:
            raise ValueError("a universal map aggregates at least one object")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "range_m", tuple(float(v) for v in self.range_m))

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


# ---------------------------------------------------------------------------
# Integrated gradients
# ---------------------------------------------------------------------------

def _quadrature_nodes(config: IGConfig) -> tuple[np.ndarray, np.ndarray]:
    m = config.steps
    if config.quadrature is Quadrature.RIGHT_ENDPOINT:
        nodes = np.arange(1, m + 1) / m
        weights = np.full(m, 1.0 / m)
    else:
        nodes = np.arange(0, m + 1) / m
        weights = np.full(m + 1, 1.0 / m)
        weights[0] = weights[-1] = 0.5 / m
    return nodes, weights


def _baseline_xyz(x: np.ndarray, box: BoundingBox, config: IGConfig) -> np.ndarray:
    if config.baseline is BaselineKind.BOX_CENTROID:
        return np.tile(box.center_array, (x.shape[0], 1))
    r = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(r == 0.0):
        raise ConfigError("radial pushout undefined for a point at the sensor origin")
    return x * ((r + config.displacement) / r)


def ig_attribute(
    scene: Scene,
    target_index: int,
    detector: DetectorHandle,
    config: IGConfig = IGConfig(),
    extraction: Extraction | None = None,
    focus_box: BoundingBox | None = None,
) -> AttributionVector:
    """Integrated-gradients contribution of each of one object's points.

    The detector is scored on the focus box (the object's own box unless a
    better-matching prediction is supplied) while only the object's target
    points move along the path; background points ride along unchanged in
    every evaluated scene.
    """
    if extraction is None:
        extraction = extract(scene)
    if not 0 <= target_index < len(scene.boxes):
        raise ConfigError(f"scene has no object {target_index}")
    box = focus_box if focus_box is not None else scene.boxes[target_index]
    target = extraction.targets[target_index]
    cloud = scene.cloud

    f_input = detector.score(cloud, box).logit
    if target.size == 0:
        return AttributionVector(
            values=np.zeros(0), scene_id=scene.id, object_index=target_index,
            steps=config.steps, residual=0.0, delta=0.0,
        )

    x = cloud.xyz[target]
    x0 = _baseline_xyz(x, box, config)
    f_base = detector.score(cloud.replace_xyz(target, x0), box).logit

    nodes, weights = _quadrature_nodes(config)
    avg_grad = np.zeros_like(x)
    for k, (c, w) in enumerate(zip(nodes, weights)):
        path_xyz = x0 + c * (x - x0)
        try:
            s = detector.score(cloud.replace_xyz(target, path_xyz), box)
        except DetectorError as exc:
            raise DetectorError(
                f"detector failed at path step {k + 1}/{len(nodes)}: {exc}"
            ) from exc
        avg_grad += w * s.gradient[target]

    values = ((x - x0) * avg_grad).sum(axis=1)
    delta = f_input - f_base
    residual = abs(float(values.sum()) - delta)
    return AttributionVector(
        values=values, scene_id=scene.id, object_index=target_index,
        steps=config.steps, residual=residual, delta=delta,
    )


# ---------------------------------------------------------------------------
# Prediction filtering and voxelization
# ---------------------------------------------------------------------------

def iou_filter(predictions: Sequence[Detection], focus: FocusRegion) -> Detection:
    """The prediction with the highest ground-plane IOU against the focus box.

    Raises NoMatchError when every overlap is zero (the object is treated
    as missed and skipped by the aggregation pipeline).
    """
    if not predictions:
        raise NoMatchError("no predictions to filter")
    best = None
    for det in predictions:
        iou = bev_iou(det.box, focus.box)
        key = (-iou, -det.probability, det.candidate_index)
        if best is None or key < best[0]:
            best = (key, iou, det)
    if best[1] <= 0.0:
        raise NoMatchError("no prediction overlaps the focus region")
    return best[2]


def voxelize_attribution(
    attr: AttributionVector,
    xyz: np.ndarray,
    box: BoundingBox,
    grid: BoxFrameGrid = BoxFrameGrid(),
    range_m: tuple[float, float] = UNRESTRICTED_RANGE,
) -> SaliencyMap:
    """Bin per-point contributions into the object's footprint cells.

    `xyz` holds the world position of each attributed point, aligned with
    attr.values; the matrix total equals the vector total up to rounding.
    """
    xyz = np.atleast_2d(xyz)
    if xyz.shape[0] != attr.values.shape[0]:
        raise ConfigError("xyz rows must match the attribution vector length")
    values = np.zeros(grid.shape)
    if attr.values.size:
        cells = grid.index_for_box(box, box_frame_coords(box, xyz))
        np.add.at(values, (cells[:, 0], cells[:, 1]), attr.values)
    return SaliencyMap(
        values=values, kind=MapKind.PER_OBJECT, cls=box.cls, range_m=range_m,
        k=1, scene_id=attr.scene_id, object_index=attr.object_index,
    )


def aggregate(maps: Sequence[SaliencyMap]) -> SaliencyMap:
    """Element-wise sum into a universal map, in a fixed fold order.

    Maps are ordered by ascending (scene id, object index); maps sharing a
    key are folded together first, then group sums are folded in key
    order. Summing each group first makes repeated inputs add exactly:
    aggregating a duplicated list yields bit-for-bit twice the original.
    """
    if not maps:
        raise ConfigError("nothing to aggregate")
    first = maps[0]
    for m in maps[1:]:
        if m.values.shape != first.values.shape:
            raise ConfigError("map dimensions differ")
        if m.cls is not first.cls or m.range_m != first.range_m:
            raise ConfigError("maps mix object classes or distance bins")

    def key(m: SaliencyMap) -> tuple[str, int]:
        return (m.scene_id or "", -1 if m.object_index is None else m.object_index)

    groups: dict[tuple[str, int], np.ndarray] = {}
    for m in sorted(maps, key=key):
        k = key(m)
        groups[k] = m.values.copy() if k not in groups else groups[k] + m.values
    total = None
    for k in sorted(groups):
        total = groups[k].copy() if total is None else total + groups[k]
    return SaliencyMap(
        values=total, kind=MapKind.UNIVERSAL, cls=first.cls,
        range_m=first.range_m, k=len(maps),
    )


# ---------------------------------------------------------------------------
# End-to-end universal map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SkippedObject:
    scene_id: str
    object_index: int
    reason: str


@dataclass(frozen=True)
class UniversalMapReport:
    objects_considered: int
    objects_used: int
    skipped: tuple[SkippedObject, ...]
    residuals: tuple[float, ...]
    deltas: tuple[float, ...]


def build_universal_map(
    scenes: Sequence[Scene],
    cls: ObjectClass,
    distance_bin: tuple[float, float],
    detector: DetectorHandle,
    config: IGConfig = IGConfig(),
    grid: BoxFrameGrid = BoxFrameGrid(),
) -> tuple[SaliencyMap, UniversalMapReport]:
    """Extract, attribute, filter, voxelize, and aggregate across scenes.

    Objects whose class or sensor distance falls outside the requested bin
    are not considered; objects with no overlapping prediction are counted
    and skipped. At least one object must survive.
    """
    lo, hi = distance_bin
    maps: list[SaliencyMap] = []
    skipped: list[SkippedObject] = []
    residuals: list[float] = []
    deltas: list[float] = []
    considered = 0
    for scene in scenes:
        extraction = extract(scene)
        predictions = detector.detect(scene.cloud, scene.boxes)
        for i, box in enumerate(scene.boxes):
            if box.cls is not cls or not lo <= box.bev_range() < hi:
                continue
            considered += 1
            focus = FocusRegion(box, cls, (lo, hi))
            try:
                best = iou_filter(predictions, focus)
            except NoMatchError as exc:
                skipped.append(SkippedObject(scene.id, i, str(exc)))
                continue
            attr = ig_attribute(
                scene, i, detector, config, extraction=extraction, focus_box=best.box
            )
            xyz = scene.cloud.xyz[extraction.targets[i]]
            maps.append(voxelize_attribution(attr, xyz, box, grid, (lo, hi)))
            residuals.append(attr.residual)
            deltas.append(attr.delta)
    if not maps:
        raise ConfigError("no object qualified for the saliency map")
    universal = aggregate(maps)
    report = UniversalMapReport(
        objects_considered=considered,
        objects_used=len(maps),
        skipped=tuple(skipped),
        residuals=tuple(residuals),
        deltas=tuple(deltas),
    )
    return universal, report


# ---------------------------------------------------------------------------
# Map file formats
# ---------------------------------------------------------------------------

def save_map(m: SaliencyMap, path) -> None:
    """JSON header line, then rows*cols little-endian float64, row-major."""
    header = {
        "rows": m.rows, "cols": m.cols, "class": m.cls.value,
        "range_m": [m.range_m[0], m.range_m[1]], "k": m.k, "kind": m.kind.value,
    }
    if m.scene_id is not None:
        header["scene_id"] = m.scene_id
    if m.object_index is not None:
        header["object_index"] = m.object_index
    with open(path, "wb") as f:
        f.write(json.dumps(header, ensure_ascii=False).encode("utf-8"))
        f.write(b"\n")
        f.write(m.values.astype("<f8").tobytes())


def load_map(path) -> SaliencyMap:
    from .errors import FormatError

    with open(path, "rb") as f:
        raw = f.read()
    nl = raw.find(b"\n")
    if nl < 0:
        raise FormatError(f"{path}: missing header line")
    try:
        header = json.loads(raw[:nl].decode("utf-8"))
        rows, cols = int(header["rows"]), int(header["cols"])
        body = raw[nl + 1 :]
        if len(body) != rows * cols * 8:
            raise FormatError(
                f"{path}: body holds {len(body)} bytes, expected {rows * cols * 8}"
            )
        values = np.frombuffer(body, dtype="<f8").reshape(rows, cols)
        return SaliencyMap(
            values=values,
            kind=MapKind(header["kind"]),
            cls=ObjectClass(header["class"]),
            range_m=tuple(header["range_m"]),
            k=int(header["k"]),
            scene_id=header.get("scene_id"),
            object_index=header.get("object_index"),
        )
    except FormatError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"{path}: malformed map file: {exc}") from exc


def map_to_csv(m: SaliencyMap) -> str:
    lines = [",".join(repr(v) for v in row) for row in m.values.tolist()]
    return "\n".join(lines) + "\n"


def save_map_csv(m: SaliencyMap, path) -> None:
    with open(path, "w", encoding="ascii") as f:
        f.write(map_to_csv(m))
