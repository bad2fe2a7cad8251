"""Parity checks between the in-process scorer and the node provider.

Every test here needs the provider bundle at bridge/dist/server.js and a
node executable on PATH. When either is missing the whole module skips,
so the core suite never depends on the bridge being built.
"""

from __future__ import annotations

import json
import shutil
import textwrap
import time
from pathlib import Path

import numpy as np
import pytest

from vpatch import (
    DEFAULT_PARAMS,
    BoundingBox,
    BridgeDetector,
    DetectorError,
    PointCloud,
    SurrogateDetector,
    SynthSpec,
    save_params,
    synth_scenes,
)
from vpatch.cli import main as cli_main

SERVER = Path(__file__).resolve().parent.parent / "bridge" / "dist" / "server.js"
NODE = shutil.which("node")

pytestmark = pytest.mark.skipif(
    NODE is None or not SERVER.exists(),
    reason="node provider not built; run `npm install && npm run build` in bridge/",
)

LOGIT_TOL = 1e-6
GRAD_TOL = 1e-5

TARGET = BoundingBox((9.0, -2.0, 0.1), 4.2, 1.8, 1.6, yaw=0.35)


def spawn_bridge(workdir: Path) -> BridgeDetector:
    params_file = workdir / "params.json"
    save_params(DEFAULT_PARAMS, params_file)
    command = [NODE, str(SERVER), "--params", str(params_file)]
    return BridgeDetector(command, workdir / "io")


@pytest.fixture()
def bridge(tmp_path):
    handle = spawn_bridge(tmp_path)
    yield handle
    handle.close()


def ten_point_cloud() -> PointCloud:
    """Ten hand-placed points: six near the walls, three inside, one far off."""
    hl, hw = TARGET.length / 2, TARGET.width / 2
    local = np.array(
        [
            [hl * 0.95, 0.0, -0.20],
            [-hl * 0.95, hw * 0.30, 0.10],
            [hl * 0.20, hw * 0.95, -0.30],
            [-hl * 0.40, -hw * 0.95, 0.00],
            [hl * 0.90, hw * 0.90, 0.25],
            [-hl * 0.90, -hw * 0.90, -0.10],
            [0.0, 0.0, -0.50],
            [hl * 0.30, -hw * 0.20, 0.60],
            [-hl * 0.20, hw * 0.10, 0.00],
            [60.0, 25.0, 1.00],
        ]
    )
    world = TARGET.to_world(local)
    return PointCloud(np.column_stack([world, np.full(len(world), 0.5)]))


def parity_scenes():
    spec = SynthSpec(n_objects=2, points_per_object=96, n_background=160)
    return synth_scenes(spec, 2, seed=101)


def test_handcrafted_fixture_parity(bridge):
    engine = SurrogateDetector()
    cloud = ten_point_cloud()
    ref = engine.score(cloud, TARGET)
    got = bridge.score(cloud, TARGET)
    assert got.flagged == ref.flagged
    assert abs(got.logit - ref.logit) <= LOGIT_TOL
    assert abs(got.probability - ref.probability) <= LOGIT_TOL
    assert got.gradient.shape == ref.gradient.shape
    assert np.max(np.abs(got.gradient - ref.gradient)) <= GRAD_TOL
    # the far point sits outside the support window on both sides
    assert not np.any(ref.gradient[9])
    assert not np.any(got.gradient[9])


def test_synthetic_scene_parity(bridge):
    engine = SurrogateDetector()
    checked = 0
    for scene in parity_scenes():
        for box in scene.boxes:
            ref = engine.score(scene.cloud, box)
            got = bridge.score(scene.cloud, box)
            assert abs(got.logit - ref.logit) <= LOGIT_TOL
            assert np.max(np.abs(got.gradient - ref.gradient)) <= GRAD_TOL
            assert got.flagged == ref.flagged
            checked += 1
    assert checked == 4


def test_empty_neighborhood_matches_bias(bridge):
    engine = SurrogateDetector()
    far = np.array([[120.0, 80.0, 2.0, 0.5], [-90.0, 40.0, 1.0, 0.5]])
    for cloud in (PointCloud(far), PointCloud(np.empty((0, 4)))):
        ref = engine.score(cloud, TARGET)
        got = bridge.score(cloud, TARGET)
        assert ref.flagged and got.flagged
        assert abs(ref.logit - DEFAULT_PARAMS.bias) <= 1e-12
        assert abs(got.logit - DEFAULT_PARAMS.bias) <= 1e-12
        assert got.gradient.shape == (len(cloud.data), 3)
        assert not np.any(got.gradient)


def test_gradient_rows_follow_request_order(bridge):
    rng = np.random.default_rng(7)
    scene = parity_scenes()[0]
    box = scene.boxes[0]
    base = bridge.score(scene.cloud, box)
    perm = rng.permutation(len(scene.cloud.data))
    shuffled = PointCloud(scene.cloud.data[perm])
    got = bridge.score(shuffled, box)
    assert abs(got.logit - base.logit) <= 1e-9
    np.testing.assert_allclose(got.gradient, base.gradient[perm], rtol=0, atol=GRAD_TOL)


def test_detect_parity(bridge):
    engine = SurrogateDetector()
    spec = SynthSpec(n_objects=3, points_per_object=110, n_background=200)
    scene = synth_scenes(spec, 1, seed=23)[0]
    off_road = BoundingBox((70.0, 55.0, 0.0), 4.0, 1.8, 1.5, yaw=1.0)
    candidates = [*scene.boxes, off_road]
    ref = engine.detect(scene.cloud, candidates)
    got = bridge.detect(scene.cloud, candidates)
    assert {d.candidate_index for d in ref} == {0, 1, 2}
    assert [d.candidate_index for d in got] == [d.candidate_index for d in ref]
    for mine, theirs in zip(got, ref):
        assert mine.box is candidates[mine.candidate_index]
        assert abs(mine.probability - theirs.probability) <= LOGIT_TOL
        assert abs(mine.logit - theirs.logit) <= LOGIT_TOL


def test_bridge_parity_criterion(tmp_path, criterion_report):
    start = time.perf_counter()
    engine = SurrogateDetector()
    handle = spawn_bridge(tmp_path)
    worst_logit = 0.0
    worst_grad = 0.0
    order_ok = True
    rng = np.random.default_rng(3)
    try:
        jobs = [(ten_point_cloud(), TARGET)]
        for scene in parity_scenes():
            jobs.extend((scene.cloud, box) for box in scene.boxes)
        for cloud, box in jobs:
            ref = engine.score(cloud, box)
            got = handle.score(cloud, box)
            worst_logit = max(worst_logit, abs(got.logit - ref.logit))
            worst_grad = max(worst_grad, float(np.max(np.abs(got.gradient - ref.gradient))))
            perm = rng.permutation(len(cloud.data))
            again = handle.score(PointCloud(cloud.data[perm]), box)
            if not np.allclose(again.gradient, got.gradient[perm], rtol=0, atol=GRAD_TOL):
                order_ok = False
    finally:
        handle.close()
    elapsed = time.perf_counter() - start
    ok = (
        worst_logit <= LOGIT_TOL
        and worst_grad <= GRAD_TOL
        and order_ok
        and elapsed < 60.0
    )
    criterion_report(
        f"secondary criterion {'PASS' if ok else 'FAIL'} bridge parity:"
        f" worst logit gap {worst_logit:.2e} (tol 1e-06),"
        f" worst gradient gap {worst_grad:.2e} (tol 1e-05),"
        f" order_preserved={order_ok} ({elapsed:.2f}s, limit 60s)"
    )
    assert worst_logit <= LOGIT_TOL
    assert worst_grad <= GRAD_TOL
    assert order_ok
    assert elapsed < 60.0


def test_cli_attack_with_bridge_detector(tmp_path):
    out = tmp_path / "run"
    code = cli_main(
        [
            "attack",
            "--synth-scenes", "1",
            "--synth-objects", "2",
            "--synth-points", "96",
            "--synth-background", "128",
            "--patch", "edges",
            "--budget", "16",
            "--strategy", "random",
            "--assume-detected",
            "--seed", "9",
            "--detector", "bridge",
            "--bridge-cmd", f"{NODE} {SERVER}",
            "--out", str(out),
        ]
    )
    assert code == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["n_objects"] == 2
    assert metrics["detector"]["type"] == "bridge"
    assert (out / "bridge-io").is_dir()


def run_failing_provider(tmp_path: Path, script: str, match: str) -> None:
    js = tmp_path / "provider.js"
    js.write_text(textwrap.dedent(script))
    handle = BridgeDetector([NODE, str(js)], tmp_path / "io")
    try:
        with pytest.raises(DetectorError, match=match):
            handle.score(ten_point_cloud(), TARGET)
    finally:
        handle.close()


def test_error_status_raises(tmp_path):
    run_failing_provider(
        tmp_path,
        """\
        const readline = require('node:readline');
        const rl = readline.createInterface({ input: process.stdin });
        rl.on('line', (line) => {
          const req = JSON.parse(line);
          const reply = { id: req.id, status: 'error', error: 'no such scene' };
          process.stdout.write(JSON.stringify(reply) + '\\n');
        });
        """,
        match="provider error: no such scene",
    )


def test_immediate_exit_raises(tmp_path):
    run_failing_provider(
        tmp_path,
        "process.exit(0);\n",
        match="pipe failed|closed its output stream",
    )


def test_wrong_reply_id_raises(tmp_path):
    run_failing_provider(
        tmp_path,
        """\
        const readline = require('node:readline');
        const rl = readline.createInterface({ input: process.stdin });
        rl.on('line', () => {
          const reply = { id: 999, status: 'ok', logit: 0.1, probability: 0.52, flagged: false };
          process.stdout.write(JSON.stringify(reply) + '\\n');
        });
        """,
        match="answered id 999 to request 0",
    )


def test_malformed_reply_raises(tmp_path):
    run_failing_provider(
        tmp_path,
        """\
        const readline = require('node:readline');
        const rl = readline.createInterface({ input: process.stdin });
        rl.on('line', () => {
          process.stdout.write('not a json object\\n');
        });
        """,
        match="malformed JSON",
    )


def test_short_sidecar_raises(tmp_path):
    run_failing_provider(
        tmp_path,
        """\
        const fs = require('node:fs');
        const path = require('node:path');
        const readline = require('node:readline');
        const rl = readline.createInterface({ input: process.stdin });
        rl.on('line', (line) => {
          const req = JSON.parse(line);
          const name = 'grad-' + String(req.id).padStart(8, '0') + '.f32';
          fs.writeFileSync(path.join(path.dirname(req.scene), name), Buffer.alloc(4));
          const reply = { id: req.id, status: 'ok', logit: 0.25, probability: 0.562, flagged: false };
          process.stdout.write(JSON.stringify(reply) + '\\n');
        });
        """,
        match="gradient sidecar grad-00000000.f32: 4 bytes, expected 120",
    )
