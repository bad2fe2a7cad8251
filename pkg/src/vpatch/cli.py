"""Command-line entry point.

Subcommands cover the whole pipeline: `inspect` summarizes scenes,
`patch-export` materializes a mask for one box, `attack` writes
adversarial scenes, `saliency` builds a universal contribution map,
`area` tabulates closed-form spoofing areas, and `sweep` runs the
attack-effectiveness grid. Every command writes its outputs plus a
timestamp-free manifest.json into the output directory (--out, or the
VPATCH_OUT environment variable, or ./vpatch-out); re-running with
`--from-manifest <path>` reproduces the outputs byte-for-byte. All
randomness flows from --seed through documented derivations, and --jobs
only changes how much runs in parallel, never the results.

Exit codes: 0 success, 2 configuration or usage error, 3 input/output or
format error, 4 detector failure.
"""

from __future__ import annotations

import argparse
import json
import os
import shlex
import sys
from pathlib import Path

import numpy as np

from . import report
from .detector import BridgeDetector
from .errors import ConfigError, DetectorError, FormatError, VPatchError
from .evaluate import (
    DEFAULT_IOU_THRESHOLD,
    asr,
    attack_outcomes,
    recall,
    save_sweep,
    scene_criticality,
    sweep,
)
from .indexing import BoxFrameGrid
from .kitti import load_kitti_bin, load_kitti_calib, load_kitti_labels, save_kitti_bin
from .patch import (
    AreaParams,
    PatchKind,
    PatchSpec,
    area_pillars,
    build_mask,
    save_mask,
    save_mask_pgm,
)
from .perturb import (
    DEFAULT_SHIFT_SET,
    AttackConfig,
    SelectionStrategy,
    apply_multi,
    save_records,
)
from .saliency import (
    BaselineKind,
    IGConfig,
    Quadrature,
    build_universal_map,
    load_map,
    save_map,
    save_map_csv,
)
from .scene import BoundingBox, ObjectClass, Scene, extract, load_scene_json, save_scene_json
from .surrogate import DEFAULT_PARAMS, SurrogateDetector, load_params, params_to_json
from .synth import SynthSpec, synth_scenes

_PATCH_ALIASES = {"whole": "whole_area", "corner": "nearest_corner"}


# ---------------------------------------------------------------------------
# Small parsers
# ---------------------------------------------------------------------------

def _parse_kind(token: str) -> PatchKind:
    name = token.strip().lower().replace("-", "_")
    name = _PATCH_ALIASES.get(name, name)
    try:
        return PatchKind(name)
    except ValueError:
        raise ConfigError(f"unknown patch kind '{token}'") from None


def _parse_class(token: str) -> ObjectClass:
    try:
        return ObjectClass(token.strip().capitalize())
    except ValueError:
        raise ConfigError(f"unknown object class '{token}'") from None


def _parse_grid(token: str) -> BoxFrameGrid:
    try:
        r, c = token.lower().split("x")
        return BoxFrameGrid(int(r), int(c))
    except ValueError as exc:
        raise ConfigError(f"bad grid '{token}', expected ROWSxCOLS") from exc


def _parse_range(token: str) -> tuple[float, float]:
    try:
        lo, hi = token.split(":")
        return (float(lo), float(hi))
    except ValueError as exc:
        raise ConfigError(f"bad range '{token}', expected LO:HI") from exc


def _parse_float_list(token: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in token.split(",") if v != "")
    except ValueError as exc:
        raise ConfigError(f"bad number list '{token}'") from exc


def _parse_int_list(token: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in token.split(",") if v != "")
    except ValueError as exc:
        raise ConfigError(f"bad integer list '{token}'") from exc


def _outdir(args) -> Path:
    out = args.out or os.environ.get("VPATCH_OUT") or "vpatch-out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _strip_flag(tokens: list[str], name: str) -> list[str]:
    out, i = [], 0
    while i < len(tokens):
        if tokens[i] == name:
            i += 2
            continue
        if tokens[i].startswith(name + "="):
            i += 1
            continue
        out.append(tokens[i])
        i += 1
    return out


def _write_run_manifest(outdir: Path, argv: list[str]) -> None:
    command, *rest = argv
    # --out and --from-manifest are replay plumbing, --jobs is an execution
    # detail; none of them may change results, so none belong in the manifest.
    for name in ("--out", "--from-manifest", "--jobs"):
        rest = _strip_flag(rest, name)
    doc = {"manifest_version": 1, "tool": "vpatch", "command": command, "args": rest}
    with open(outdir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(doc, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def _write_json(path: Path, doc) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# Inputs
# ---------------------------------------------------------------------------

def _load_scenes(args) -> list[tuple[Scene, str]]:
    """Collect (scene, source format) pairs from files and the generator."""
    scenes: list[tuple[Scene, str]] = []
    for p in args.scene or []:
        scenes.append((load_scene_json(p), "json"))
    for triple in args.kitti or []:
        parts = triple.split(":")
        if len(parts) != 3:
            raise ConfigError(f"--kitti wants VELODYNE:LABELS:CALIB, got '{triple}'")
        vel, labels, calib_path = parts
        cloud = load_kitti_bin(vel)
        boxes = load_kitti_labels(labels, load_kitti_calib(calib_path))
        scenes.append((Scene(id=Path(vel).stem, cloud=cloud, boxes=boxes), "bin"))
    if args.synth_scenes:
        spec = SynthSpec(
            n_objects=args.synth_objects,
            classes=tuple(_parse_class(c) for c in args.synth_classes.split(",")),
            points_per_object=args.synth_points,
            n_background=args.synth_background,
            range_min=args.synth_range[0],
            range_max=args.synth_range[1],
            scene_id=args.synth_id,
        )
        for sc in synth_scenes(spec, args.synth_scenes, args.synth_seed):
            scenes.append((sc, "synth"))
    if not scenes:
        raise ConfigError("no input scenes: pass --scene, --kitti, or --synth-scenes")
    return scenes


def _patch_spec(args, kind: PatchKind | None = None) -> PatchSpec:
    return PatchSpec(
        kind=kind if kind is not None else _parse_kind(args.patch),
        alpha=args.alpha,
        beta=args.beta,
        top_percent=args.top_percent,
        max_dist_cells=args.max_dist_cells,
        pillar_cell=args.pillar_cell,
        grid=_parse_grid(args.grid),
    )


def _make_detector(args, outdir: Path):
    if args.detector == "bridge":
        if not args.bridge_cmd:
            raise ConfigError("--detector bridge needs --bridge-cmd")
        handle = BridgeDetector(shlex.split(args.bridge_cmd), outdir / "bridge-io")
        return handle, {"type": "bridge", "command": args.bridge_cmd}
    params = load_params(args.params) if args.params else DEFAULT_PARAMS
    return SurrogateDetector(params), {
        "type": "surrogate",
        "params": json.loads(params_to_json(params)),
    }


def _close_detector(handle) -> None:
    if isinstance(handle, BridgeDetector):
        handle.close()


def _ig_config(args) -> IGConfig:
    return IGConfig(
        steps=args.steps,
        baseline=BaselineKind(args.baseline.replace("-", "_")),
        displacement=args.displacement,
        quadrature=Quadrature(args.quadrature.replace("-", "_")),
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_inspect(args) -> int:
    outdir = _outdir(args)
    scenes = _load_scenes(args)
    lines = []
    for scene, _src in scenes:
        extraction = extract(scene)
        lines.append(f"scene {scene.id}: {len(scene.cloud)} points, {len(scene.boxes)} boxes")
        for i, box in enumerate(scene.boxes):
            lines.append(
                f"  [{i}] {box.cls.value} lwh=({box.length:.2f},{box.width:.2f},{box.height:.2f})"
                f" yaw={box.yaw:.3f} range={box.bev_range():.1f}m"
                f" points={len(extraction.targets[i])}"
            )
        lines.append(f"  background points: {len(extraction.background)}")
        if args.plot:
            report.save_bev_scatter(scene, outdir / f"{scene.id}.bev.png")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    (outdir / "inspect.txt").write_text(text, encoding="utf-8")
    _write_run_manifest(outdir, args.argv)
    return 0


def cmd_patch_export(args) -> int:
    outdir = _outdir(args)
    spec = _patch_spec(args)
    if args.box:
        vals = args.box.split(",")
        if len(vals) not in (7, 8):
            raise ConfigError("--box wants cx,cy,cz,l,w,h,yaw[,class]")
        cls = _parse_class(vals[7]) if len(vals) == 8 else ObjectClass.CAR
        nums = [float(v) for v in vals[:7]]
        box = BoundingBox((nums[0], nums[1], nums[2]), nums[3], nums[4], nums[5], nums[6], cls)
    else:
        scenes = _load_scenes(args)
        scene = scenes[0][0]
        if not 0 <= args.object < len(scene.boxes):
            raise ConfigError(f"scene has no object {args.object}")
        box = scene.boxes[args.object]
    contributions = load_map(args.saliency_map).values if args.saliency_map else None
    mask = build_mask(spec, box, contributions=contributions)
    save_mask(mask, outdir / "mask.json")
    save_mask_pgm(mask, outdir / "mask.pgm")
    if mask.warning:
        print(f"warning: {mask.warning}", file=sys.stderr)
    print(f"{mask.kind.value}: {mask.count}/{mask.selected.size} cells selected")
    _write_run_manifest(outdir, args.argv)
    return 0


def cmd_attack(args) -> int:
    outdir = _outdir(args)
    scenes = _load_scenes(args)
    spec = _patch_spec(args)
    config = AttackConfig(
        patch=spec,
        budget=args.budget,
        shift_set=_parse_float_list(args.shift_set),
        strategy=SelectionStrategy(args.strategy.replace("-", "_")),
        seed=args.seed,
    )
    saliency_map = load_map(args.saliency_map) if args.saliency_map else None
    if spec.kind is PatchKind.TOP_N and saliency_map is None:
        raise ConfigError("a top_n attack needs --saliency-map")
    detector, detector_desc = _make_detector(args, outdir)
    try:
        ig = _ig_config(args)
        all_records = []
        all_outcomes = []
        first_plotted = False
        for scene, src in scenes:
            extraction = extract(scene)
            crit = (
                scene_criticality(scene, extraction, detector, ig)
                if config.strategy is SelectionStrategy.CRITICAL_FIRST
                else None
            )
            adv, records = apply_multi(scene, config, extraction, saliency_map, crit)
            if src == "bin":
                save_kitti_bin(adv.cloud, outdir / f"{scene.id}.adv.bin")
            else:
                save_scene_json(adv, outdir / f"{scene.id}.adv.json")
            all_records.extend(records)
            all_outcomes.extend(attack_outcomes(
                scene, config, detector, args.iou_threshold,
                extraction=extraction, contributions=saliency_map, criticality=crit,
                assume_detected_before=args.assume_detected,
            ))
            if not first_plotted:
                shifted = [e.point_index for rec in records for e in rec.entries]
                report.save_bev_scatter(adv, outdir / f"{scene.id}.attack.png", shifted)
                first_plotted = True
        save_records(all_records, outdir / "records.jsonl")
        try:
            asr_value = asr(all_outcomes)
        except ValueError:
            asr_value = None
        metrics = {
            "asr": asr_value,
            "recall": recall(all_outcomes),
            "n_objects": len(all_outcomes),
            "hidden": [
                {"scene_id": o.scene_id, "object_index": o.object_index}
                for o in all_outcomes
                if o.detected_before and not o.detected_after
            ],
            "detector": detector_desc,
            "iou_threshold": args.iou_threshold,
        }
        _write_json(outdir / "metrics.json", metrics)
        recall_str = f"{metrics['recall']:.3f}"
        asr_str = "n/a" if asr_value is None else f"{asr_value:.3f}"
        print(f"attacked {len(all_outcomes)} objects: asr={asr_str} recall={recall_str}")
    finally:
        _close_detector(detector)
    _write_run_manifest(outdir, args.argv)
    return 0


def cmd_saliency(args) -> int:
    outdir = _outdir(args)
    scenes = [s for s, _ in _load_scenes(args)]
    detector, detector_desc = _make_detector(args, outdir)
    try:
        universal, rep = build_universal_map(
            scenes,
            cls=_parse_class(args.cls),
            distance_bin=_parse_range(args.range),
            detector=detector,
            config=_ig_config(args),
            grid=_parse_grid(args.grid),
        )
    finally:
        _close_detector(detector)
    save_map(universal, outdir / "map.bin")
    save_map_csv(universal, outdir / "map.csv")
    report.save_map_heatmap(universal, outdir / "map.png")
    _write_json(outdir / "report.json", {
        "objects_considered": rep.objects_considered,
        "objects_used": rep.objects_used,
        "skipped": [
            {"scene_id": s.scene_id, "object_index": s.object_index, "reason": s.reason}
            for s in rep.skipped
        ],
        "residuals": list(rep.residuals),
        "deltas": list(rep.deltas),
        "detector": detector_desc,
    })
    print(
        f"universal map over {rep.objects_used}/{rep.objects_considered} objects;"
        f" max |residual| = {max(rep.residuals):.3e}"
    )
    _write_run_manifest(outdir, args.argv)
    return 0


_AREA_KINDS = (PatchKind.WHOLE_AREA, PatchKind.CRITICAL_X, PatchKind.HALF_EDGES, PatchKind.TOP_N)


def cmd_area(args) -> int:
    outdir = _outdir(args)
    if args.s_values:
        s_values = list(_parse_float_list(args.s_values))
    else:
        s_values = [round(0.5 + 0.25 * i, 2) for i in range(19)]  # 0.5 .. 5.0
    rows = []
    curves: dict[str, list[float]] = {k.value: [] for k in _AREA_KINDS}
    for s in s_values:
        params = AreaParams(
            target_length=2.0 * s,
            target_width=s,
            voxel_length=args.voxel_l,
            voxel_width=args.voxel_w,
            alpha=args.alpha,
            beta=args.beta,
            top_percent=args.top_percent,
        )
        for kind in _AREA_KINDS:
            pillars = area_pillars(params, kind)
            rows.append((s, kind.value, pillars))
            curves[kind.value].append(pillars)
    with open(outdir / "area.csv", "w", encoding="utf-8") as f:
        f.write("s,kind,pillars\n")
        for s, kind, pillars in rows:
            f.write(f"{s!r},{kind},{pillars!r}\n")
    report.save_area_curves(s_values, curves, outdir / "area.png")
    for kind in _AREA_KINDS:
        last = curves[kind.value][-1]
        print(f"{kind.value}: {last:.1f} pillars at S={s_values[-1]}")
    _write_run_manifest(outdir, args.argv)
    return 0


def cmd_sweep(args) -> int:
    outdir = _outdir(args)
    scenes = [s for s, _ in _load_scenes(args)]
    kinds = [_parse_kind(tok) for tok in args.patches.split(",")]
    patches = [_patch_spec(args, kind=k) for k in kinds]
    strategies = [
        SelectionStrategy(tok.strip().replace("-", "_"))
        for tok in args.strategies.split(",")
    ]
    budgets = list(_parse_int_list(args.budgets))
    saliency_map = load_map(args.saliency_map) if args.saliency_map else None
    detector, detector_desc = _make_detector(args, outdir)
    try:
        result = sweep(
            scenes,
            patches,
            strategies,
            budgets,
            detector,
            seed=args.seed,
            shift_set=_parse_float_list(args.shift_set),
            iou_threshold=args.iou_threshold,
            ig_config=_ig_config(args),
            saliency_map=saliency_map,
            assume_detected_before=args.assume_detected,
            jobs=args.jobs,
        )
    finally:
        _close_detector(detector)
    companion = {
        "detector": detector_desc,
        "iou_threshold": args.iou_threshold,
        "scenes": [s.id for s in scenes],
        "patches": [k.value for k in kinds],
        "strategies": [s.value for s in strategies],
        "budgets": budgets,
        "shift_set": list(_parse_float_list(args.shift_set)),
        "seed": args.seed,
        "ig_steps": args.steps,
    }
    save_sweep(result, outdir / "sweep.csv", companion, outdir / "sweep_manifest.json")
    report.save_asr_curves(result, outdir / "asr.png")
    print(f"{len(result.rows)} sweep rows -> {outdir / 'sweep.csv'}")
    _write_run_manifest(outdir, args.argv)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output directory (default $VPATCH_OUT or ./vpatch-out)")
    p.add_argument("--from-manifest", default=None, help="replay a previous run's manifest.json")
    p.add_argument("--seed", type=int, default=0, help="master seed; all randomness derives from it")
    p.add_argument("--jobs", type=int, default=1, help="worker parallelism (results independent of it)")


def _add_scene_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scene", action="append", help="native scene JSON file (repeatable)")
    p.add_argument("--kitti", action="append", metavar="VEL:LABELS:CALIB",
                   help="KITTI scene as velodyne:labels:calib paths (repeatable)")
    p.add_argument("--synth-scenes", type=int, default=0, help="generate this many synthetic scenes")
    p.add_argument("--synth-objects", type=int, default=2)
    p.add_argument("--synth-points", type=int, default=256)
    p.add_argument("--synth-background", type=int, default=512)
    p.add_argument("--synth-classes", default="car")
    p.add_argument("--synth-range", type=_parse_range, default=(6.0, 18.0), metavar="LO:HI")
    p.add_argument("--synth-seed", type=int, default=0)
    p.add_argument("--synth-id", default="synth")


def _add_patch_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--top-percent", type=float, default=30.0)
    p.add_argument("--max-dist-cells", type=float, default=1.5)
    p.add_argument("--pillar-cell", type=float, default=0.16, help="manual-patch grid cell (m)")
    p.add_argument("--grid", default="64x32", help="box-frame grid as ROWSxCOLS")


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--detector", choices=["surrogate", "bridge"], default="surrogate")
    p.add_argument("--params", default=None, help="surrogate params JSON file")
    p.add_argument("--bridge-cmd", default=None, help="external provider command line")
    p.add_argument("--iou-threshold", type=float, default=DEFAULT_IOU_THRESHOLD)
    p.add_argument("--assume-detected", action="store_true",
                   help="treat every object as detected before the attack (label-based ASR)")


def _add_ig_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--steps", type=int, default=25, help="path integration steps")
    p.add_argument("--baseline", choices=["radial_pushout", "box_centroid"], default="radial_pushout")
    p.add_argument("--displacement", type=float, default=2.0, help="radial pushout distance (m)")
    p.add_argument("--quadrature", choices=["trapezoid", "right_endpoint"], default="trapezoid")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vpatch",
        description="Virtual-patch LiDAR attack simulation and saliency analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inspect", help="summarize scenes and point-to-box assignment")
    _add_common(p)
    _add_scene_flags(p)
    p.add_argument("--plot", action="store_true", help="write a BEV scatter per scene")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("patch-export", help="build one patch mask and write JSON + PGM")
    _add_common(p)
    _add_scene_flags(p)
    _add_patch_flags(p)
    p.add_argument("--patch", required=True, help="patch kind")
    p.add_argument("--box", default=None, help="cx,cy,cz,l,w,h,yaw[,class] instead of a scene")
    p.add_argument("--object", type=int, default=0, help="object index when using --scene")
    p.add_argument("--saliency-map", default=None, help="map file for top_n / band choice")
    p.set_defaults(func=cmd_patch_export)

    p = sub.add_parser("attack", help="perturb scenes under a patch and budget")
    _add_common(p)
    _add_scene_flags(p)
    _add_patch_flags(p)
    _add_detector_flags(p)
    _add_ig_flags(p)
    p.add_argument("--patch", required=True, help="patch kind")
    p.add_argument("--budget", type=int, required=True, help="max points moved per object")
    p.add_argument("--shift-set", default=",".join(str(s) for s in DEFAULT_SHIFT_SET),
                   help="permitted radial shifts, e.g. --shift-set=-2,-1,1,2")
    p.add_argument("--strategy", choices=["random", "critical_first"], default="random")
    p.add_argument("--saliency-map", default=None, help="universal map (needed for top_n)")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("saliency", help="build a universal saliency map across scenes")
    _add_common(p)
    _add_scene_flags(p)
    _add_detector_flags(p)
    _add_ig_flags(p)
    p.add_argument("--class", dest="cls", default="car", help="object class to attribute")
    p.add_argument("--range", default="0:1000", help="sensor-distance bin LO:HI (m)")
    p.add_argument("--grid", default="64x32", help="map grid as ROWSxCOLS")
    p.set_defaults(func=cmd_saliency)

    p = sub.add_parser("area", help="closed-form spoofing-area table over target scale")
    _add_common(p)
    p.add_argument("--s-values", default=None, help="comma-separated S values (footprint 2S x S)")
    p.add_argument("--voxel-l", type=float, default=0.05)
    p.add_argument("--voxel-w", type=float, default=0.05)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.2)
    p.add_argument("--top-percent", type=float, default=30.0)
    p.set_defaults(func=cmd_area)

    p = sub.add_parser("sweep", help="patch x strategy x budget effectiveness grid")
    _add_common(p)
    _add_scene_flags(p)
    _add_patch_flags(p)
    _add_detector_flags(p)
    _add_ig_flags(p)
    p.add_argument("--patches", default="edges,nearest_corner,center,x,whole_area",
                   help="comma-separated patch kinds")
    p.add_argument("--strategies", default="random", help="comma-separated strategies")
    p.add_argument("--budgets", required=True, help="comma-separated integer budgets")
    p.add_argument("--shift-set", default=",".join(str(s) for s in DEFAULT_SHIFT_SET))
    p.add_argument("--saliency-map", default=None, help="universal map (needed for top_n)")
    p.set_defaults(func=cmd_sweep)

    return parser


def _replay_request(argv: list[str]) -> tuple[str | None, str | None]:
    """Pre-scan for --from-manifest/--out so replay skips required flags."""
    manifest = out = None
    i = 0
    while i < len(argv):
        tok = argv[i]
        for name in ("--from-manifest", "--out"):
            if tok == name and i + 1 < len(argv):
                value, step = argv[i + 1], 2
                break
            if tok.startswith(name + "="):
                value, step = tok.split("=", 1)[1], 1
                break
        else:
            i += 1
            continue
        if tok.split("=", 1)[0] == "--from-manifest":
            manifest = value
        else:
            out = value
        i += step
    return manifest, out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    argv = [str(a) for a in argv]
    parser = _build_parser()
    try:
        manifest_path, out_override = _replay_request(argv)
        if manifest_path is not None:
            doc = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
            argv = [str(doc["command"]), *[str(a) for a in doc["args"]]]
            if out_override is not None:
                argv += ["--out", out_override]
        args = parser.parse_args(argv)
        args.argv = argv
        return args.func(args)
    except ConfigError as exc:
        print(f"vpatch: {exc}", file=sys.stderr)
        return 2
    except (FormatError, OSError) as exc:
        print(f"vpatch: {exc}", file=sys.stderr)
        return 3
    except DetectorError as exc:
        print(f"vpatch: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"vpatch: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
