"""Synthetic LiDAR scene generation with exact ground-truth membership.

Scenes are built the way a spinning sensor at the origin would see them:
points land on the box faces oriented toward the sensor, with per-face
densities proportional to projected area over squared distance, so the
vertical sides of a car collect far more returns than its grazing roof.
Samples are inset from the surface and jittered a few centimeters inward,
which keeps every object point strictly inside its box and every
background point strictly outside all boxes. Construction therefore
records the exact index partition that extraction must recover.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene import (
    BoundingBox,
    Extraction,
    ObjectClass,
    PointCloud,
    Scene,
    box_contains,
    rotation_z,
)

# Mean (length, width, height) per class, meters; jittered per object.
_CLASS_DIMS = {
    ObjectClass.CAR: (4.0, 1.7, 1.5),
    ObjectClass.PEDESTRIAN: (0.8, 0.6, 1.75),
    ObjectClass.CYCLIST: (1.76, 0.6, 1.73),
}

_SURFACE_INSET = 0.02   # m, lateral margin from face edges
_DEPTH_JITTER = 0.12    # m, maximum inward offset from the face plane


@dataclass(frozen=True)
class SynthSpec:
    """Knobs for one generated scene."""

    n_objects: int = 1
    classes: tuple[ObjectClass, ...] = (ObjectClass.CAR,)
    points_per_object: int = 256
    n_background: int = 512
    range_min: float = 6.0
    range_max: float = 18.0
    ground_z: float = -1.73
    scene_id: str = "synth"

    def __post_init__(self) -> None:
        if self.n_objects < 0 or self.points_per_object < 1 or self.n_background < 0:
            raise ValueError("counts must be non-negative (>=1 point per object)")
        if not 0.0 < self.range_min < self.range_max:
            raise ValueError("need 0 < range_min < range_max")
        if not self.classes:
            raise ValueError("classes must be non-empty")


@dataclass(frozen=True)
class SynthScene(Scene):
    """A scene that remembers which points were generated for which box."""

    truth: Extraction | None = None


def _place_boxes(spec: SynthSpec, rng: np.random.Generator) -> list[BoundingBox]:
    boxes: list[BoundingBox] = []
    for k in range(spec.n_objects):
        cls = spec.classes[k % len(spec.classes)]
        base = _CLASS_DIMS[cls]
        dims = tuple(d * rng.uniform(0.9, 1.1) for d in base)
        for _ in range(200):
            r = rng.uniform(spec.range_min, spec.range_max)
            az = rng.uniform(-1.2, 1.2)
            center = (r * np.cos(az), r * np.sin(az), spec.ground_z + dims[2] / 2.0)
            clear = True
            for other in boxes:
                sep = np.hypot(center[0] - other.center[0], center[1] - other.center[1])
                need = 0.5 * (np.hypot(dims[0], dims[1]) + np.hypot(other.length, other.width)) + 0.5
                if sep < need:
                    clear = False
                    break
            if clear:
                boxes.append(
                    BoundingBox(center, dims[0], dims[1], dims[2],
                                yaw=rng.uniform(-np.pi, np.pi), cls=cls)
                )
                break
        else:
            raise ValueError("could not place boxes without overlap; lower n_objects or widen range")
    return boxes


def _sample_box_points(box: BoundingBox, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample n points strictly inside `box`, concentrated on sensor-facing faces."""
    half = np.array([box.length, box.width, box.height]) / 2.0
    rot = rotation_z(box.yaw)
    center = box.center_array
    faces = [(axis, sign) for axis in range(3) for sign in (1.0, -1.0)]
    weights = np.zeros(len(faces))
    for i, (axis, sign) in enumerate(faces):
        normal = sign * rot[:, axis]
        face_center = center + normal * half[axis]
        d = np.linalg.norm(face_center)
        cos_view = -normal @ face_center / d
        if cos_view <= 0.0:
            continue  # back face, not visible from the origin
        others = [j for j in range(3) if j != axis]
        area = 4.0 * half[others[0]] * half[others[1]]
        weights[i] = area * cos_view / (d * d)
    if weights.sum() <= 0.0:
        weights[:] = 1.0
    weights = weights / weights.sum()

    face_idx = rng.choice(len(faces), size=n, p=weights)
    local = np.empty((n, 3))
    depth_max = np.minimum(_DEPTH_JITTER, 0.4 * half)
    for i, (axis, sign) in enumerate(faces):
        mask = face_idx == i
        m = int(mask.sum())
        if m == 0:
            continue
        coords = np.empty((m, 3))
        depth = rng.uniform(_SURFACE_INSET, depth_max[axis], size=m)
        coords[:, axis] = sign * (half[axis] - depth)
        for other in (j for j in range(3) if j != axis):
            lo = -half[other] + _SURFACE_INSET
            coords[:, other] = rng.uniform(lo, -lo, size=m)
        local[mask] = coords
    return box.to_world(local)


def _sample_background(spec: SynthSpec, boxes: list[BoundingBox], rng: np.random.Generator) -> np.ndarray:
    out = np.empty((0, 3))
    while out.shape[0] < spec.n_background:
        m = max(64, 2 * (spec.n_background - out.shape[0]))
        r = rng.uniform(2.0, spec.range_max + 5.0, size=m)
        az = rng.uniform(-np.pi, np.pi, size=m)
        ground = rng.random(m) < 0.8
        z = np.where(
            ground,
            spec.ground_z + rng.normal(0.0, 0.02, size=m),
            rng.uniform(spec.ground_z, spec.ground_z + 2.5, size=m),
        )
        cand = np.stack([r * np.cos(az), r * np.sin(az), z], axis=1)
        keep = np.ones(m, dtype=bool)
        for box in boxes:
            keep &= ~box_contains(box, cand)
        out = np.concatenate([out, cand[keep]])
    return out[: spec.n_background]


def synth_scene(spec: SynthSpec, seed: int, index: int = 0) -> SynthScene:
    """Generate one deterministic scene; (seed, index) fully determines it."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    boxes = _place_boxes(spec, rng)

    chunks: list[np.ndarray] = []
    for box in boxes:
        chunks.append(_sample_box_points(box, spec.points_per_object, rng))
    chunks.append(_sample_background(spec, boxes, rng))
    xyz = np.concatenate(chunks) if chunks else np.empty((0, 3))
    total = xyz.shape[0]
    inten = rng.uniform(0.1, 0.9, size=total)

    # Shuffle rows so per-object indices are not contiguous runs.
    perm = rng.permutation(total)
    inv = np.argsort(perm)
    data = np.concatenate([xyz[perm], inten[perm, None]], axis=1)

    targets = []
    start = 0
    for _ in boxes:
        old = np.arange(start, start + spec.points_per_object)
        targets.append(np.sort(inv[old]))
        start += spec.points_per_object
    background = np.sort(inv[np.arange(start, total)])

    sid = f"{spec.scene_id}-{index:04d}"
    return SynthScene(
        id=sid,
        cloud=PointCloud(data),
        boxes=tuple(boxes),
        truth=Extraction(targets=tuple(targets), background=background, n_points=total),
    )


def synth_scenes(spec: SynthSpec, count: int, seed: int) -> list[SynthScene]:
    """Generate `count` scenes with ids suffixed by index, all from one seed."""
    return [synth_scene(spec, seed, index=k) for k in range(count)]
