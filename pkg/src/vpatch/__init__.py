"""Virtual-patch LiDAR attack simulation and saliency analysis.

The package models an attacker who relocates a bounded number of LiDAR
returns along their sensor rays so that a detector loses an object, and
an analyst who explains which parts of a box detections depend on:

- :mod:`vpatch.scene` holds point clouds, boxes, scenes, extraction.
- :mod:`vpatch.patch` builds spatial masks (manual and saliency-driven)
  and evaluates closed-form spoofing areas.
- :mod:`vpatch.perturb` selects points under a mask and budget and
  applies ray-consistent radial shifts.
- :mod:`vpatch.surrogate` is a differentiable pillar-occupancy scorer.
- :mod:`vpatch.saliency` computes path-integrated attributions and
  aggregates them into per-class universal maps.
- :mod:`vpatch.evaluate` measures attack success and runs sweeps.
- :mod:`vpatch.cli` exposes all of it as the ``vpatch`` command.
"""

from .detector import BridgeDetector, Detection, DetectorHandle, ObjectScore
from .errors import ConfigError, DetectorError, FormatError, NoMatchError, VPatchError
from .evaluate import (
    DEFAULT_IOU_THRESHOLD,
    AttackOutcome,
    SweepResult,
    SweepRow,
    asr,
    attack_outcomes,
    recall,
    save_sweep,
    scene_criticality,
    sweep,
)
from .indexing import BoxFrameGrid, CellIndex, PillarGrid, box_frame_coords
from .kitti import KittiCalib, load_kitti_bin, load_kitti_calib, load_kitti_labels, save_kitti_bin
from .patch import (
    DEFAULT_PILLAR_CELL,
    AreaParams,
    GridFrame,
    PatchKind,
    PatchMask,
    PatchSpec,
    area_pillars,
    build_mask,
    critical_x_fraction,
    load_mask,
    save_mask,
    save_mask_pgm,
)
from .perturb import (
    DEFAULT_SHIFT_SET,
    ORA_COMPAT_SHIFT_SET,
    AttackConfig,
    PerturbationRecord,
    SelectionStrategy,
    ShiftEntry,
    apply,
    apply_multi,
    candidates,
    derive_seed,
    radial_shift,
    save_records,
    select,
)
from .saliency import (
    UNRESTRICTED_RANGE,
    AttributionVector,
    BaselineKind,
    FocusRegion,
    IGConfig,
    MapKind,
    Quadrature,
    SaliencyMap,
    UniversalMapReport,
    aggregate,
    build_universal_map,
    ig_attribute,
    iou_filter,
    load_map,
    save_map,
    save_map_csv,
    voxelize_attribution,
)
from .scene import (
    BoundingBox,
    Extraction,
    ObjectClass,
    Point,
    PointCloud,
    Scene,
    SphericalCoord,
    bev_iou,
    box_contains,
    extract,
    from_spherical,
    load_scene_json,
    save_scene_json,
    to_spherical,
)
from .surrogate import (
    DEFAULT_PARAMS,
    SurrogateDetector,
    SurrogateParams,
    grad_check,
    load_params,
    save_params,
)
from .synth import SynthScene, SynthSpec, synth_scene, synth_scenes

__version__ = "0.1.0"

__all__ = [
    "AreaParams",
    "AttackConfig",
    "AttackOutcome",
    "AttributionVector",
    "BaselineKind",
    "BoundingBox",
    "BoxFrameGrid",
    "BridgeDetector",
    "CellIndex",
    "ConfigError",
    "DEFAULT_IOU_THRESHOLD",
    "DEFAULT_PARAMS",
    "DEFAULT_PILLAR_CELL",
    "DEFAULT_SHIFT_SET",
    "Detection",
    "DetectorError",
    "DetectorHandle",
    "Extraction",
    "FocusRegion",
    "FormatError",
    "GridFrame",
    "IGConfig",
    "KittiCalib",
    "MapKind",
    "NoMatchError",
    "ORA_COMPAT_SHIFT_SET",
    "ObjectClass",
    "ObjectScore",
    "PatchKind",
    "PatchMask",
    "PatchSpec",
    "PerturbationRecord",
    "PillarGrid",
    "Point",
    "PointCloud",
    "Quadrature",
    "SaliencyMap",
    "Scene",
    "SelectionStrategy",
    "ShiftEntry",
    "SphericalCoord",
    "SurrogateDetector",
    "SurrogateParams",
    "SweepResult",
    "SweepRow",
    "SynthScene",
    "SynthSpec",
    "UNRESTRICTED_RANGE",
    "UniversalMapReport",
    "VPatchError",
    "aggregate",
    "apply",
    "apply_multi",
    "area_pillars",
    "asr",
    "attack_outcomes",
    "bev_iou",
    "box_contains",
    "box_frame_coords",
    "build_mask",
    "build_universal_map",
    "candidates",
    "critical_x_fraction",
    "derive_seed",
    "extract",
    "from_spherical",
    "grad_check",
    "ig_attribute",
    "iou_filter",
    "load_kitti_bin",
    "load_kitti_calib",
    "load_kitti_labels",
    "load_map",
    "load_mask",
    "load_params",
    "load_scene_json",
    "radial_shift",
    "recall",
    "save_kitti_bin",
    "save_map",
    "save_map_csv",
    "save_mask",
    "save_mask_pgm",
    "save_params",
    "save_records",
    "save_scene_json",
    "save_sweep",
    "scene_criticality",
    "select",
    "sweep",
    "synth_scene",
    "synth_scenes",
    "to_spherical",
    "voxelize_attribution",
]
