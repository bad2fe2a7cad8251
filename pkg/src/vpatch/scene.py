"""Core geometric types for LiDAR scenes.

Coordinate conventions (fixed throughout the toolkit):
  * LiDAR frame: x forward, y left, z up, origin at the sensor. Meters.
  * Angles in radians. Azimuth and yaw normalized to [-pi, pi).
  * Spherical: radius >= 0, azimuth about +z from +x, elevation from the
    horizontal plane in [-pi/2, pi/2].
  * Box-local frame: origin at the box center, x along length, y along
    width, z along height. Membership intervals are half-open on the
    positive faces ([-l/2, l/2) etc.) so shared boundaries belong to
    exactly one region.

All types are immutable after construction and safe to share across
threads; the operations here are pure functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError

TWO_PI = 2.0 * math.pi


def wrap_angle(a: float) -> float:
    """Normalize an angle to [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


def rotation_z(yaw: float) -> np.ndarray:
    """3x3 active rotation about +z by `yaw`."""
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


class ObjectClass(str, Enum):
    CAR = "Car"
    PEDESTRIAN = "Pedestrian"
    CYCLIST = "Cyclist"


@dataclass(frozen=True)
class Point:
    """A single LiDAR return: position in meters plus reflectance in [0, 1]."""

    x: float
    y: float
    z: float
    intensity: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z, self.intensity)):
            raise ValueError("point coordinates and intensity must be finite")
        if not 0.0 <= self.intensity <= 1.0:
            raise ValueError(f"intensity {self.intensity} outside [0, 1]")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.intensity])


@dataclass(frozen=True)
class SphericalCoord:
    """Spherical position: radius in meters, firing angles in radians."""

    radius: float
    azimuth: float
    elevation: float

    def __post_init__(self) -> None:
        if self.radius < 0.0:
            raise ValueError("radius must be >= 0")


class PointCloud:
    """Immutable ordered collection of points, stored as an (n, 4) array.

    Columns are x, y, z, intensity (float64). Order is stable: operations
    that modify a subset of points keep every other row bit-identical.
    """

    __slots__ = ("_data",)

    def __init__(self, data: np.ndarray | Sequence[Sequence[float]]):
        arr = np.asarray(data, dtype=np.float64)
        if arr.size == 0:
            arr = arr.reshape(0, 4)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValueError(f"expected (n, 4) point data, got shape {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("point cloud contains non-finite values")
        inten = arr[:, 3]
        if inten.size and (inten.min() < 0.0 or inten.max() > 1.0):
            raise ValueError("intensity values outside [0, 1]")
        arr = arr.copy()
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        """Read-only (n, 4) view of the cloud."""
        return self._data

    @property
    def xyz(self) -> np.ndarray:
        return self._data[:, :3]

    @property
    def intensity(self) -> np.ndarray:
        return self._data[:, 3]

    def __len__(self) -> int:
        return self._data.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointCloud):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            np.array_equal(self._data, other._data)
        )

    def point(self, i: int) -> Point:
        x, y, z, inten = self._data[i]
        return Point(float(x), float(y), float(z), float(inten))

    def replace_xyz(self, indices: np.ndarray, new_xyz: np.ndarray) -> "PointCloud":
        """Return a new cloud with rows `indices` moved to `new_xyz`.

        Intensity and every untouched row are preserved bit-identically.
        """
        data = self._data.copy()
        data[indices, :3] = new_xyz
        return PointCloud(data)


@dataclass(frozen=True)
class BoundingBox:
    """Oriented 3D box: center, dimensions, yaw about +z, object class."""

    center: tuple[float, float, float]
    length: float
    width: float
    height: float
    yaw: float
    cls: ObjectClass = ObjectClass.CAR

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.center):
            raise ValueError("box center must be finite")
        if min(self.length, self.width, self.height) <= 0.0:
            raise ValueError("box dimensions must be positive")
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "yaw", wrap_angle(float(self.yaw)))

    @property
    def center_array(self) -> np.ndarray:
        return np.array(self.center)

    def to_local(self, xyz: np.ndarray) -> np.ndarray:
        """Map world-frame positions (n, 3) into the box-local frame."""
        return (np.atleast_2d(xyz) - self.center_array) @ rotation_z(self.yaw)

    def to_world(self, local: np.ndarray) -> np.ndarray:
        return np.atleast_2d(local) @ rotation_z(self.yaw).T + self.center_array

    def footprint_corners(self) -> np.ndarray:
        """World-frame BEV corners (4, 2), counter-clockwise."""
        hl, hw = self.length / 2.0, self.width / 2.0
        local = np.array(
            [[-hl, -hw, 0.0], [hl, -hw, 0.0], [hl, hw, 0.0], [-hl, hw, 0.0]]
        )
        return self.to_world(local)[:, :2]

    def bev_range(self) -> float:
        """Ground-plane distance from the sensor origin to the box center."""
        return math.hypot(self.center[0], self.center[1])


@dataclass(frozen=True)
class Scene:
    """A LiDAR point cloud plus its ground-truth object boxes."""

    id: str
    cloud: PointCloud
    boxes: tuple[BoundingBox, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("scene id must be non-empty")
        object.__setattr__(self, "boxes", tuple(self.boxes))


@dataclass(frozen=True)
class Extraction:
    """Partition of a scene's point indices into per-box targets + background."""

    targets: tuple[np.ndarray, ...]
    background: np.ndarray
    n_points: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", tuple(np.asarray(t, dtype=np.intp) for t in self.targets))
        object.__setattr__(self, "background", np.asarray(self.background, dtype=np.intp))
        counted = sum(len(t) for t in self.targets) + len(self.background)
        if counted != self.n_points:
            raise ValueError("extraction does not cover every point exactly once")
        merged = np.concatenate([self.background, *self.targets]) if counted else np.empty(0, dtype=np.intp)
        if counted and not np.array_equal(np.sort(merged), np.arange(self.n_points)):
            raise ValueError("extraction index sets overlap or miss indices")


# ---------------------------------------------------------------------------
# Spherical transforms
# ---------------------------------------------------------------------------

def to_spherical(p: Point) -> SphericalCoord:
    """Cartesian -> spherical. The origin is rejected (azimuth undefined)."""
    r = math.sqrt(p.x * p.x + p.y * p.y + p.z * p.z)
    if r == 0.0:
        raise ValueError("spherical coordinates undefined at the origin")
    az = math.atan2(p.y, p.x)
    if az >= math.pi:  # atan2 returns (-pi, pi]; fold pi onto -pi
        az -= TWO_PI
    el = math.asin(max(-1.0, min(1.0, p.z / r)))
    return SphericalCoord(r, az, el)


def from_spherical(s: SphericalCoord, intensity: float = 0.0) -> Point:
    ce = math.cos(s.elevation)
    return Point(
        s.radius * ce * math.cos(s.azimuth),
        s.radius * ce * math.sin(s.azimuth),
        s.radius * math.sin(s.elevation),
        intensity,
    )


def cartesian_to_spherical(xyz: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized (n, 3) -> (radius, azimuth, elevation) arrays."""
    xyz = np.atleast_2d(xyz)
    r = np.linalg.norm(xyz, axis=1)
    if np.any(r == 0.0):
        raise ValueError("spherical coordinates undefined at the origin")
    az = np.arctan2(xyz[:, 1], xyz[:, 0])
    az = np.where(az >= math.pi, az - TWO_PI, az)
    el = np.arcsin(np.clip(xyz[:, 2] / r, -1.0, 1.0))
    return r, az, el


def spherical_to_cartesian(r: np.ndarray, az: np.ndarray, el: np.ndarray) -> np.ndarray:
    ce = np.cos(el)
    return np.stack([r * ce * np.cos(az), r * ce * np.sin(az), r * np.sin(el)], axis=1)


# ---------------------------------------------------------------------------
# Extraction (point-in-box partition)
# ---------------------------------------------------------------------------

def box_contains(box: BoundingBox, xyz: np.ndarray) -> np.ndarray:
    """Half-open membership test for (n, 3) positions."""
    local = box.to_local(xyz)
    hl, hw, hh = box.length / 2.0, box.width / 2.0, box.height / 2.0
    return (
        (local[:, 0] >= -hl) & (local[:, 0] < hl)
        & (local[:, 1] >= -hw) & (local[:, 1] < hw)
        & (local[:, 2] >= -hh) & (local[:, 2] < hh)
    )


def extract(scene: Scene) -> Extraction:
    """Partition scene points into per-box target sets and background.

    A point inside several overlapping boxes goes to the box whose center
    is nearest (ties broken by lower box index).
    """
    n = len(scene.cloud)
    m = len(scene.boxes)
    if m == 0:
        return Extraction(targets=(), background=np.arange(n, dtype=np.intp), n_points=n)
    xyz = scene.cloud.xyz
    dist2 = np.full((m, n), np.inf)
    for i, box in enumerate(scene.boxes):
        inside = box_contains(box, xyz)
        if inside.any():
            delta = xyz[inside] - box.center_array
            dist2[i, inside] = np.einsum("ij,ij->i", delta, delta)
    owner = np.argmin(dist2, axis=0)            # lowest index wins ties
    owner[~np.isfinite(dist2.min(axis=0))] = -1  # in no box
    targets = tuple(np.flatnonzero(owner == i).astype(np.intp) for i in range(m))
    background = np.flatnonzero(owner == -1).astype(np.intp)
    return Extraction(targets=targets, background=background, n_points=n)


# ---------------------------------------------------------------------------
# Bird's-eye-view IOU (yaw-aware rectangles, Sutherland-Hodgman clipping)
# ---------------------------------------------------------------------------

def _polygon_area(poly: list[tuple[float, float]]) -> float:
    if len(poly) < 3:
        return 0.0
    s = 0.0
    for (x1, y1), (x2, y2) in zip(poly, poly[1:] + poly[:1]):
        s += x1 * y2 - y1 * x2
    return abs(s) / 2.0


def _clip_polygon(poly: list[tuple[float, float]], a: tuple[float, float], b: tuple[float, float]) -> list[tuple[float, float]]:
    # Keep the half-plane to the left of the directed edge a->b.
    ex, ey = b[0] - a[0], b[1] - a[1]

    def side(p: tuple[float, float]) -> float:
        return ex * (p[1] - a[1]) - ey * (p[0] - a[0])

    out: list[tuple[float, float]] = []
    for p, q in zip(poly, poly[1:] + poly[:1]):
        sp, sq = side(p), side(q)
        if sp >= 0.0:
            out.append(p)
        if (sp > 0.0) != (sq > 0.0) and sp != sq:
            t = sp / (sp - sq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def bev_iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of the two ground-plane footprints, in [0, 1]."""
    pa = [tuple(v) for v in a.footprint_corners()]
    pb = [tuple(v) for v in b.footprint_corners()]
    clipped = pa
    for e1, e2 in zip(pb, pb[1:] + pb[:1]):
        clipped = _clip_polygon(clipped, e1, e2)
        if len(clipped) < 3:
            return 0.0
    inter = _polygon_area(clipped)
    union = a.length * a.width + b.length * b.width - inter
    if union <= 0.0:
        return 0.0
    return min(1.0, inter / union)


# ---------------------------------------------------------------------------
# Native scene JSON (canonical field order, UTF-8)
# ---------------------------------------------------------------------------

def _box_to_dict(box: BoundingBox) -> dict:
    return {
        "center": [box.center[0], box.center[1], box.center[2]],
        "lwh": [box.length, box.width, box.height],
        "yaw": box.yaw,
        "class": box.cls.value,
    }


def _box_from_dict(d: dict) -> BoundingBox:
    try:
        cx, cy, cz = d["center"]
        l, w, h = d["lwh"]
        return BoundingBox((cx, cy, cz), l, w, h, d["yaw"], ObjectClass(d["class"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"malformed box entry: {exc}") from exc


def scene_to_json(scene: Scene) -> str:
    doc = {
        "id": scene.id,
        "points": scene.cloud.data.tolist(),
        "boxes": [_box_to_dict(b) for b in scene.boxes],
    }
    return json.dumps(doc, ensure_ascii=False)


def scene_from_json(text: str) -> Scene:
    try:
        doc = json.loads(text)
        cloud = PointCloud(np.array(doc["points"], dtype=np.float64).reshape(-1, 4))
        boxes = tuple(_box_from_dict(b) for b in doc.get("boxes", []))
        return Scene(id=doc["id"], cloud=cloud, boxes=boxes)
    except FormatError:
        raise
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"malformed scene JSON: {exc}") from exc


def save_scene_json(scene: Scene, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(scene_to_json(scene))
        f.write("\n")


def load_scene_json(path) -> Scene:
    with open(path, "r", encoding="utf-8") as f:
        return scene_from_json(f.read())
