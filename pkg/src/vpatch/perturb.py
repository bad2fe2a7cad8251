"""Point selection and ray-consistent radial perturbation.

The attack picks up to `budget` points whose footprint cell lies inside
the patch mask, then slides each selected point along its sensor ray by
a displacement drawn from the permitted shift set. Azimuth and elevation
are untouched by construction (the point is scaled along its own ray),
points are never deleted, and every unselected point survives
bit-identically, so an adversarial scene has exactly the shape of the
original.

Per-object randomness is a dedicated stream seeded by
config.seed XOR blake2b("{scene_id}:{object_index}"), which makes
multi-object output independent of processing order.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError
from .indexing import BoxFrameGrid, PillarGrid, box_frame_coords
from .patch import DEFAULT_PILLAR_CELL, GridFrame, PatchMask, PatchSpec, build_mask
from .scene import BoundingBox, Extraction, Point, PointCloud, Scene, extract

MASK64 = 0xFFFFFFFFFFFFFFFF
DEFAULT_SHIFT_SET = (-2.0, -1.0, 1.0, 2.0)
ORA_COMPAT_SHIFT_SET = (1.0, 2.0)


class SelectionStrategy(str, Enum):
    RANDOM = "random"
    CRITICAL_FIRST = "critical_first"


def derive_seed(base_seed: int, *parts) -> int:
    """Stable 64-bit stream seed: base XOR blake2b over the joined parts."""
    key = ":".join(str(p) for p in parts).encode("utf-8")
    h = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    return (int(base_seed) & MASK64) ^ h


@dataclass(frozen=True)
class AttackConfig:
    """Everything that determines one perturbation run."""

    patch: PatchSpec
    budget: int
    shift_set: tuple[float, ...] = DEFAULT_SHIFT_SET
    strategy: SelectionStrategy = SelectionStrategy.RANDOM
    seed: int = 0

    def __post_init__(self) -> None:
        if self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if not self.shift_set:
            raise ConfigError("shift_set must be non-empty")
        shifts = tuple(float(s) for s in self.shift_set)
        for s in shifts:
            if not -2.0 <= s <= 2.0 or s != round(s):
                raise ConfigError(
                    f"shift {s} outside the threat model (multiples of 1 m within [-2, 2])"
                )
        object.__setattr__(self, "shift_set", shifts)


@dataclass(frozen=True)
class ShiftEntry:
    """One selected point: where it was, how far along its ray it moved."""

    point_index: int
    old: tuple[float, float, float]
    shift: float
    new: tuple[float, float, float]
    flagged: bool = False  # True when no permitted shift kept the radius positive


@dataclass(frozen=True)
class PerturbationRecord:
    scene_id: str
    object_index: int
    kind: str
    entries: tuple[ShiftEntry, ...] = ()


# ---------------------------------------------------------------------------
# Candidate selection
# ---------------------------------------------------------------------------

def candidates(
    cloud: PointCloud, target: np.ndarray, box: BoundingBox, mask: PatchMask
) -> np.ndarray:
    """Indices (ascending) of target points whose footprint cell is selected."""
    target = np.asarray(target, dtype=np.intp)
    if target.size == 0 or not mask.selected.any():
        return np.empty(0, dtype=np.intp)
    uv = box_frame_coords(box, cloud.xyz[target])
    if mask.frame is GridFrame.PILLAR:
        cell = float(mask.params.get("cell_size", DEFAULT_PILLAR_CELL))
        cells = PillarGrid(mask.rows, mask.cols, cell).index(uv)
    else:
        cells = BoxFrameGrid(mask.rows, mask.cols).index_for_box(box, uv)
    keep = mask.selected[cells[:, 0], cells[:, 1]]
    return np.sort(target[keep])


def select(
    cands: np.ndarray,
    budget: int,
    strategy: SelectionStrategy,
    criticality: np.ndarray | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Choose min(budget, len(cands)) point indices, returned ascending.

    RANDOM draws uniformly without replacement from the candidate set;
    CRITICAL_FIRST takes the highest `criticality` first (one value per
    candidate, ties to the lower point index).
    """
    cands = np.sort(np.asarray(cands, dtype=np.intp))
    k = min(int(budget), cands.size)
    if k == 0:
        return np.empty(0, dtype=np.intp)
    if strategy is SelectionStrategy.RANDOM:
        if k == cands.size:
            return cands
        # Uniform k-subset via per-candidate priorities: the k smallest of
        # i.i.d. uniforms. Draw count does not depend on the budget, so a
        # larger budget selects a superset of a smaller one under one seed.
        rng = np.random.default_rng(seed)
        priority = rng.random(cands.size)
        picked = cands[np.argpartition(priority, k - 1)[:k]]
        return np.sort(picked)
    if criticality is None:
        raise ConfigError("critical_first selection requires per-candidate criticality")
    crit = np.asarray(criticality, dtype=float)
    if crit.shape != cands.shape:
        raise ConfigError("criticality must supply one value per candidate")
    order = np.lexsort((cands, -crit))
    return np.sort(cands[order[:k]])


# ---------------------------------------------------------------------------
# Radial shifts
# ---------------------------------------------------------------------------

def radial_shift(p: Point, d: float) -> Point:
    """Move a point along its sensor ray by d meters; angles are preserved."""
    r = math.sqrt(p.x * p.x + p.y * p.y + p.z * p.z)
    if r == 0.0:
        raise ValueError("cannot shift a point at the sensor origin")
    if r + d <= 0.0:
        raise ValueError(f"shift {d} would make the radius non-positive (r={r})")
    s = (r + d) / r
    return Point(p.x * s, p.y * s, p.z * s, p.intensity)


def _draw_shift(rng: np.random.Generator, shift_set: tuple[float, ...], radius: float):
    """Uniform draw; invalid draws are retried on the remaining set."""
    remaining = list(shift_set)
    while remaining:
        d = remaining.pop(int(rng.integers(len(remaining))))
        if radius + d > 0.0:
            return d, False
    return 0.0, True


# ---------------------------------------------------------------------------
# End-to-end application
# ---------------------------------------------------------------------------

def _perturb_object(
    scene: Scene,
    extraction: Extraction,
    object_index: int,
    config: AttackConfig,
    contributions=None,
    criticality_full: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, PerturbationRecord]:
    """Selected indices, their new xyz, and the audit record for one object."""
    box = scene.boxes[object_index]
    target = extraction.targets[object_index]
    mask = build_mask(config.patch, box, contributions=contributions)
    cands = candidates(scene.cloud, target, box, mask)
    stream_seed = derive_seed(config.seed, scene.id, object_index)
    crit = None
    if config.strategy is SelectionStrategy.CRITICAL_FIRST:
        if criticality_full is None:
            raise ConfigError("critical_first strategy needs per-point criticality")
        crit = np.asarray(criticality_full, dtype=float)[cands]
    chosen = select(cands, config.budget, config.strategy, crit, stream_seed)

    entries: list[ShiftEntry] = []
    new_xyz = np.empty((chosen.size, 3))
    xyz = scene.cloud.xyz
    for row, idx in enumerate(chosen):
        p = xyz[idx]
        r = float(np.linalg.norm(p))
        # One stream per point, so a point's shift does not depend on which
        # other points were selected (budgets then compose monotonically).
        rng = np.random.default_rng(derive_seed(stream_seed, "shift", int(idx)))
        d, flagged = _draw_shift(rng, config.shift_set, r)
        moved = p * ((r + d) / r)
        new_xyz[row] = moved
        entries.append(
            ShiftEntry(int(idx), tuple(float(v) for v in p), d,
                       tuple(float(v) for v in moved), flagged)
        )
    record = PerturbationRecord(
        scene_id=scene.id,
        object_index=object_index,
        kind=config.patch.kind.value,
        entries=tuple(entries),
    )
    return chosen, new_xyz, record


def apply_multi(
    scene: Scene,
    config: AttackConfig,
    extraction: Extraction | None = None,
    contributions=None,
    criticality: np.ndarray | None = None,
) -> tuple[Scene, tuple[PerturbationRecord, ...]]:
    """Perturb every box in the scene under one config.

    Extraction runs once on the input scene; each object then gets its own
    derived random stream, so the result does not depend on the order the
    objects are processed in. Points are conserved and non-selected rows
    are bit-identical to the input.
    """
    if extraction is None:
        extraction = extract(scene)
    all_idx: list[np.ndarray] = []
    all_xyz: list[np.ndarray] = []
    records: list[PerturbationRecord] = []
    for obj in range(len(scene.boxes)):
        chosen, new_xyz, record = _perturb_object(
            scene, extraction, obj, config, contributions, criticality
        )
        all_idx.append(chosen)
        all_xyz.append(new_xyz)
        records.append(record)
    if all_idx:
        idx = np.concatenate(all_idx)
        xyz = np.concatenate(all_xyz)
    else:
        idx = np.empty(0, dtype=np.intp)
        xyz = np.empty((0, 3))
    cloud = scene.cloud.replace_xyz(idx, xyz) if idx.size else scene.cloud
    out = Scene(id=scene.id, cloud=cloud, boxes=scene.boxes)
    return out, tuple(records)


def apply(
    scene: Scene,
    box: BoundingBox,
    config: AttackConfig,
    extraction: Extraction | None = None,
    contributions=None,
    criticality: np.ndarray | None = None,
) -> tuple[Scene, PerturbationRecord]:
    """Perturb a single box of the scene; other boxes are left alone.

    Uses the same per-object stream derivation as apply_multi, so applying
    each box separately composes to exactly the multi-object result.
    """
    try:
        object_index = scene.boxes.index(box)
    except ValueError:
        raise ConfigError("box does not belong to the scene") from None
    if extraction is None:
        extraction = extract(scene)
    chosen, new_xyz, record = _perturb_object(
        scene, extraction, object_index, config, contributions, criticality
    )
    cloud = scene.cloud.replace_xyz(chosen, new_xyz) if chosen.size else scene.cloud
    return Scene(id=scene.id, cloud=cloud, boxes=scene.boxes), record


# ---------------------------------------------------------------------------
# Record export (JSON lines, one shifted point per line)
# ---------------------------------------------------------------------------

def records_to_jsonl(records) -> str:
    lines = []
    for rec in records if not isinstance(records, PerturbationRecord) else (records,):
        for e in rec.entries:
            lines.append(json.dumps({
                "scene_id": rec.scene_id,
                "object_index": rec.object_index,
                "kind": rec.kind,
                "point_index": e.point_index,
                "old": list(e.old),
                "shift": e.shift,
                "new": list(e.new),
                "flagged": e.flagged,
            }, ensure_ascii=False))
    return "\n".join(lines) + ("\n" if lines else "")


def save_records(records, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(records_to_jsonl(records))
