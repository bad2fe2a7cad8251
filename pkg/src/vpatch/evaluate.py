"""Attack-effectiveness metrics and the budget-sweep harness.

An object counts as detected when some prediction of its class overlaps
it at or above the IOU threshold (0.7 by default, the usual car
convention) with probability at or above the detector's own threshold.
ASR is the fraction of objects hidden by the attack among those that
were detected beforehand; recall is the fraction still detected
afterwards among all targeted objects. Objects missed even before the
attack leave the ASR denominator but stay in recall's.

A sweep evaluates the full (patch, strategy, budget) cross product over
a scene list, one attack run per object and combination, every random
draw derived from the one sweep seed. Combinations are independent, so
they may run on several workers; rows are sorted before emission and
the output is identical for any worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .detector import DetectorHandle
from .errors import ConfigError, NoMatchError
from .patch import PatchKind, PatchSpec
from .perturb import (
    DEFAULT_SHIFT_SET,
    AttackConfig,
    SelectionStrategy,
    apply_multi,
    derive_seed,
)
from .saliency import FocusRegion, IGConfig, SaliencyMap, ig_attribute, iou_filter
from .scene import Extraction, Scene, bev_iou, extract

DEFAULT_IOU_THRESHOLD = 0.7


@dataclass(frozen=True)
class AttackOutcome:
    scene_id: str
    object_index: int
    kind: str
    strategy: str
    budget: int
    seed: int
    detected_before: bool
    detected_after: bool
    best_iou: float  # best post-attack matching-class overlap, 0 when none

    def __post_init__(self) -> None:
        if not 0.0 <= self.best_iou <= 1.0:
            raise ValueError("best_iou must lie in [0, 1]")


def _best_match_iou(box, detections) -> float:
    """Best IOU of any same-class detection against `box` (0 when none)."""
    best = 0.0
    for det in detections:
        if det.box.cls is box.cls:
            best = max(best, bev_iou(det.box, box))
    return best


def attack_outcomes(
    scene: Scene,
    config: AttackConfig,
    detector: DetectorHandle,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    extraction: Extraction | None = None,
    contributions: SaliencyMap | None = None,
    criticality: np.ndarray | None = None,
    assume_detected_before: bool = False,
) -> list[AttackOutcome]:
    """Attack every object of one scene and report per-object outcomes.

    assume_detected_before treats ground truth as the pre-attack detector
    output (every object detected), the convention of label-based ASR
    experiments; by default the detector decides.
    """
    if extraction is None:
        extraction = extract(scene)
    before = None if assume_detected_before else detector.detect(scene.cloud, scene.boxes)
    adv, _records = apply_multi(scene, config, extraction, contributions, criticality)
    after = detector.detect(adv.cloud, scene.boxes)
    outcomes = []
    for i, box in enumerate(scene.boxes):
        if assume_detected_before:
            detected_before = True
        else:
            detected_before = _best_match_iou(box, before) >= iou_threshold
        best_iou = _best_match_iou(box, after)
        outcomes.append(AttackOutcome(
            scene_id=scene.id,
            object_index=i,
            kind=config.patch.kind.value,
            strategy=config.strategy.value,
            budget=config.budget,
            seed=config.seed,
            detected_before=detected_before,
            detected_after=best_iou >= iou_threshold,
            best_iou=best_iou,
        ))
    return outcomes


def asr(outcomes: Sequence[AttackOutcome]) -> float:
    """Hidden objects as a fraction of those detected before the attack."""
    if not outcomes:
        raise ValueError("no outcomes to evaluate")
    targeted = [o for o in outcomes if o.detected_before]
    if not targeted:
        raise ValueError("ASR undefined: nothing was detected before the attack")
    hidden = sum(1 for o in targeted if not o.detected_after)
    return hidden / len(targeted)


def recall(outcomes: Sequence[AttackOutcome]) -> float:
    """Objects still detected after the attack, over all targeted objects."""
    if not outcomes:
        raise ValueError("no outcomes to evaluate")
    return sum(1 for o in outcomes if o.detected_after) / len(outcomes)


# ---------------------------------------------------------------------------
# Budget sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    patch: str
    strategy: str
    budget: int
    asr: float
    recall: float
    n_objects: int
    seed: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.asr <= 1.0 and 0.0 <= self.recall <= 1.0):
            raise ValueError("asr and recall must lie in [0, 1]")


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        lines = ["patch,strategy,budget,asr,recall,n_objects,seed"]
        for r in self.rows:
            lines.append(
                f"{r.patch},{r.strategy},{r.budget},{r.asr!r},{r.recall!r},{r.n_objects},{r.seed}"
            )
        return "\n".join(lines) + "\n"


def scene_criticality(
    scene: Scene,
    extraction: Extraction,
    detector: DetectorHandle,
    ig_config: IGConfig,
) -> np.ndarray:
    """Per-point criticality on the benign scene: each object's attribution.

    Objects with no overlapping prediction keep zero criticality for their
    points; selection then falls back to index order among equals.
    """
    crit = np.zeros(len(scene.cloud))
    predictions = detector.detect(scene.cloud, scene.boxes)
    for i, box in enumerate(scene.boxes):
        try:
            best = iou_filter(predictions, FocusRegion(box, box.cls))
        except NoMatchError:
            continue
        attr = ig_attribute(
            scene, i, detector, ig_config, extraction=extraction, focus_box=best.box
        )
        crit[extraction.targets[i]] = attr.values
    return crit


def sweep(
    scenes: Sequence[Scene],
    patches: Sequence[PatchSpec],
    strategies: Sequence[SelectionStrategy],
    budgets: Sequence[int],
    detector: DetectorHandle,
    seed: int,
    shift_set: tuple[float, ...] = DEFAULT_SHIFT_SET,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    ig_config: IGConfig = IGConfig(),
    saliency_map: SaliencyMap | None = None,
    assume_detected_before: bool = False,
    jobs: int = 1,
) -> SweepResult:
    """Evaluate the full patch x strategy x budget grid over the scenes.

    The top_n patch needs `saliency_map` (a universal map on the box-frame
    grid); critical-first selection computes per-point attributions on
    each benign scene once and reuses them for every combination.
    """
    if not scenes or not patches or not budgets or not strategies:
        raise ConfigError("scenes, patches, strategies, and budgets must be non-empty")
    if any(p.kind is PatchKind.TOP_N for p in patches) and saliency_map is None:
        raise ConfigError("a top_n sweep needs a saliency map")

    prepared = []
    need_criticality = SelectionStrategy.CRITICAL_FIRST in set(strategies)
    for scene in scenes:
        extraction = extract(scene)
        crit = (
            scene_criticality(scene, extraction, detector, ig_config)
            if need_criticality
            else None
        )
        prepared.append((scene, extraction, crit))

    combos = [
        (patch, strategy, budget)
        for patch in patches
        for strategy in strategies
        for budget in budgets
    ]

    def run_combo(combo) -> SweepRow:
        patch, strategy, budget = combo
        combo_seed = derive_seed(seed, patch.kind.value, strategy.value, budget)
        config = AttackConfig(
            patch=patch, budget=budget, shift_set=shift_set,
            strategy=strategy, seed=combo_seed,
        )
        outcomes: list[AttackOutcome] = []
        for scene, extraction, crit in prepared:
            outcomes.extend(attack_outcomes(
                scene, config, detector, iou_threshold,
                extraction=extraction, contributions=saliency_map,
                criticality=crit, assume_detected_before=assume_detected_before,
            ))
        return SweepRow(
            patch=patch.kind.value,
            strategy=strategy.value,
            budget=budget,
            asr=asr(outcomes),
            recall=recall(outcomes),
            n_objects=len(outcomes),
            seed=seed,
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(run_combo, combos))
    else:
        rows = [run_combo(c) for c in combos]
    rows.sort(key=lambda r: (r.patch, r.strategy, r.budget))
    return SweepResult(rows=tuple(rows))


def save_sweep(result: SweepResult, csv_path, manifest: dict, manifest_path) -> None:
    """Write the CSV rows and the companion manifest describing the run."""
    with open(csv_path, "w", encoding="utf-8") as f:
        f.write(result.to_csv())
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
