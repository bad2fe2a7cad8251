"""Detector-provider protocol: what the attribution and evaluation engines
need from any object detector, built-in or external.

A provider must score a (cloud, box) pair, returning a logit, a
probability, and the gradient of the logit with respect to every point
coordinate in the cloud, and must score a list of candidate boxes. The
built-in surrogate implements this natively; BridgeDetector forwards the
calls to an external process over a line-delimited JSON protocol (see
PROTOCOL.md at the repository root).
"""

from __future__ import annotations

import json
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .errors import DetectorError
from .scene import BoundingBox, PointCloud


@dataclass(frozen=True)
class ObjectScore:
    """Score of one box: detection logit plus per-point logit gradients."""

    logit: float
    probability: float
    gradient: np.ndarray  # (n, 3), zero rows for points the score ignores
    flagged: bool = False  # True when the box neighborhood held no points

    def __post_init__(self) -> None:
        grad = np.asarray(self.gradient, dtype=np.float64)
        if grad.ndim != 2 or grad.shape[1] != 3:
            raise ValueError("gradient must be (n, 3)")
        if not np.isfinite(grad).all() or not np.isfinite([self.logit, self.probability]).all():
            raise ValueError("score values must be finite")
        if not 0.0 < self.probability < 1.0:
            raise ValueError("probability must lie strictly in (0, 1)")
        grad = grad.copy()
        grad.setflags(write=False)
        object.__setattr__(self, "gradient", grad)


@dataclass(frozen=True)
class Detection:
    box: BoundingBox
    probability: float
    logit: float
    candidate_index: int


@runtime_checkable
class DetectorHandle(Protocol):
    """What the engine calls; both the surrogate and the bridge satisfy it."""

    def score(self, cloud: PointCloud, box: BoundingBox) -> ObjectScore: ...

    def detect(self, cloud: PointCloud, candidates: Sequence[BoundingBox]) -> tuple[Detection, ...]: ...


# ---------------------------------------------------------------------------
# External provider client
# ---------------------------------------------------------------------------

def _box_payload(box: BoundingBox) -> dict:
    return {
        "center": list(box.center),
        "lwh": [box.length, box.width, box.height],
        "yaw": box.yaw,
        "class": box.cls.value,
    }


class BridgeDetector:
    """Client for an external detector provider process.

    The provider is spawned once and spoken to over stdin/stdout, one JSON
    object per line. Gradients come back as a sidecar file of little-endian
    float32 triples named by request id; see PROTOCOL.md for the exact
    layout. The client owns a scratch directory for scene snapshots and
    sidecar files.
    """

    def __init__(self, command: Sequence[str], workdir) -> None:
        self.workdir = Path(workdir)
        self.workdir.mkdir(parents=True, exist_ok=True)
        try:
            self._proc = subprocess.Popen(
                list(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise DetectorError(f"could not start provider {command!r}: {exc}") from exc
        self._next_id = 0
        self._snapshots: dict[int, Path] = {}

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()

    def __enter__(self) -> "BridgeDetector":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- protocol plumbing ---------------------------------------------------

    def _snapshot(self, cloud: PointCloud) -> Path:
        """Write the cloud to a snapshot file the provider can read."""
        key = id(cloud.data)
        path = self._snapshots.get(key)
        if path is None:
            path = self.workdir / f"scene-{len(self._snapshots):06d}.f32"
            cloud.data.astype("<f4").tofile(path)
            self._snapshots[key] = path
        return path

    def _roundtrip(self, request: dict) -> dict:
        rid = self._next_id
        self._next_id += 1
        request = {"id": rid, **request}
        try:
            self._proc.stdin.write(json.dumps(request) + "\n")
            self._proc.stdin.flush()
            line = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise DetectorError(f"provider pipe failed: {exc}") from exc
        if not line:
            raise DetectorError("provider closed its output stream")
        try:
            reply = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DetectorError(f"provider sent malformed JSON: {line!r}") from exc
        if reply.get("id") != rid:
            raise DetectorError(f"provider answered id {reply.get('id')} to request {rid}")
        if reply.get("status") != "ok":
            raise DetectorError(f"provider error: {reply.get('error', 'unspecified')}")
        return reply

    def _read_gradient(self, rid: int, n_points: int) -> np.ndarray:
        path = self.workdir / f"grad-{rid:08d}.f32"
        raw = path.read_bytes()
        expect = n_points * 3 * 4
        if len(raw) != expect:
            raise DetectorError(
                f"gradient sidecar {path.name}: {len(raw)} bytes, expected {expect}"
            )
        return np.frombuffer(raw, dtype="<f4").reshape(n_points, 3).astype(np.float64)

    # -- DetectorHandle ------------------------------------------------------

    def score(self, cloud: PointCloud, box: BoundingBox) -> ObjectScore:
        snap = self._snapshot(cloud)
        reply = self._roundtrip({
            "op": "score",
            "scene": str(snap),
            "n_points": len(cloud),
            "box": _box_payload(box),
        })
        grad = self._read_gradient(reply["id"], len(cloud))
        return ObjectScore(
            logit=float(reply["logit"]),
            probability=float(reply["probability"]),
            gradient=grad,
            flagged=bool(reply.get("flagged", False)),
        )

    def detect(self, cloud: PointCloud, candidates: Sequence[BoundingBox]) -> tuple[Detection, ...]:
        snap = self._snapshot(cloud)
        reply = self._roundtrip({
            "op": "detect",
            "scene": str(snap),
            "n_points": len(cloud),
            "boxes": [_box_payload(b) for b in candidates],
        })
        dets = []
        for d in reply["detections"]:
            i = int(d["index"])
            dets.append(Detection(
                box=candidates[i],
                probability=float(d["probability"]),
                logit=float(d["logit"]),
                candidate_index=i,
            ))
        return tuple(dets)
