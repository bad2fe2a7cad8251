"""KITTI velodyne / label / calibration readers and writers.

Velodyne scans are flat binaries of little-endian float32 quadruples
(x, y, z, reflectance), already in the LiDAR frame used by this package.
Labels live in the rectified camera frame (x right, y down, z forward)
with dimensions ordered height, width, length, a bottom-center location,
and rotation about the camera y axis; loading converts them to LiDAR
frame boxes with the center at mid-height.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError
from .scene import BoundingBox, ObjectClass, PointCloud

_LABEL_CLASSES = {c.value: c for c in ObjectClass}


def load_kitti_bin(path) -> PointCloud:
    raw = Path(path).read_bytes()
    if len(raw) % 16 != 0:
        raise FormatError(
            f"{path}: size {len(raw)} is not a multiple of 16 bytes (x, y, z, reflectance float32)"
        )
    arr = np.frombuffer(raw, dtype="<f4").reshape(-1, 4).astype(np.float64)
    try:
        return PointCloud(arr)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def save_kitti_bin(cloud: PointCloud, path) -> None:
    cloud.data.astype("<f4").tofile(path)


@dataclass(frozen=True)
class KittiCalib:
    """Rigid transforms from a KITTI calib file (camera <-> velodyne)."""

    tr_velo_to_cam: np.ndarray  # (3, 4) velodyne -> reference camera
    r0_rect: np.ndarray         # (3, 3) reference camera -> rectified camera

    def cam_to_velo(self, xyz_cam: np.ndarray) -> np.ndarray:
        """Map rectified-camera positions (n, 3) into the velodyne frame."""
        cam0 = np.atleast_2d(xyz_cam) @ np.linalg.inv(self.r0_rect).T
        tr = np.eye(4)
        tr[:3, :] = self.tr_velo_to_cam
        inv = np.linalg.inv(tr)
        return cam0 @ inv[:3, :3].T + inv[:3, 3]


def load_kitti_calib(path) -> KittiCalib:
    values: dict[str, np.ndarray] = {}
    for line in Path(path).read_text().splitlines():
        if ":" not in line:
            continue
        key, _, rest = line.partition(":")
        fields = rest.split()
        if fields:
            try:
                values[key.strip()] = np.array([float(v) for v in fields])
            except ValueError as exc:
                raise FormatError(f"{path}: bad number in '{key.strip()}'") from exc
    try:
        tr = values["Tr_velo_to_cam"].reshape(3, 4)
        r0 = values["R0_rect"].reshape(3, 3)
    except KeyError as exc:
        raise FormatError(f"{path}: missing calibration entry {exc}") from exc
    except ValueError as exc:
        raise FormatError(f"{path}: wrong element count: {exc}") from exc
    return KittiCalib(tr_velo_to_cam=tr, r0_rect=r0)


def load_kitti_labels(label_path, calib: KittiCalib) -> tuple[BoundingBox, ...]:
    """Parse a KITTI label file into LiDAR-frame boxes.

    DontCare rows and classes outside {Car, Pedestrian, Cyclist} are skipped.
    """
    boxes: list[BoundingBox] = []
    for ln, line in enumerate(Path(label_path).read_text().splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        cls = _LABEL_CLASSES.get(fields[0])
        if cls is None:
            continue
        if len(fields) < 15:
            raise FormatError(f"{label_path}:{ln}: expected 15+ fields, got {len(fields)}")
        try:
            h, w, l = (float(v) for v in fields[8:11])
            loc_cam = np.array([float(v) for v in fields[11:14]])
            rotation_y = float(fields[14])
        except ValueError as exc:
            raise FormatError(f"{label_path}:{ln}: bad number: {exc}") from exc
        center = calib.cam_to_velo(loc_cam)[0]
        center[2] += h / 2.0  # label location is the bottom face center
        yaw = -rotation_y - math.pi / 2.0
        try:
            boxes.append(
                BoundingBox(tuple(center), length=l, width=w, height=h, yaw=yaw, cls=cls)
            )
        except ValueError as exc:
            raise FormatError(f"{label_path}:{ln}: {exc}") from exc
    return tuple(boxes)
