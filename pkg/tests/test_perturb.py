"""Radial shifts, seed derivation, candidate selection, and attack application."""

import json
import math

import numpy as np
import pytest

from vpatch.errors import ConfigError
from vpatch.patch import PatchKind, PatchSpec, top_fraction_mask, whole_area_mask
from vpatch.perturb import (
    DEFAULT_SHIFT_SET,
    AttackConfig,
    SelectionStrategy,
    apply,
    apply_multi,
    candidates,
    derive_seed,
    radial_shift,
    records_to_jsonl,
    select,
)
from vpatch.scene import BoundingBox, Point, PointCloud, Scene, extract, to_spherical


def make_cloud(xyz, intensity=0.5):
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    col = np.full((xyz.shape[0], 1), float(intensity))
    return PointCloud(np.hstack([xyz, col]))


def one_box_scene(points_inside, points_outside=(), box=None):
    box = box or BoundingBox((10.0, 0.0, 0.0), 4.0, 2.0, 2.0, yaw=0.0)
    xyz = list(points_inside) + list(points_outside)
    return Scene(id="unit", cloud=make_cloud(xyz), boxes=(box,)), box


# ---------------------------------------------------------------------------
# radial_shift
# ---------------------------------------------------------------------------

def test_radial_shift_345_triangle():
    moved = radial_shift(Point(3.0, 4.0, 0.0, 0.5), 1.0)
    assert (moved.x, moved.y, moved.z) == pytest.approx((3.6, 4.8, 0.0), abs=1e-12)
    assert moved.intensity == 0.5
    pulled = radial_shift(Point(3.0, 4.0, 0.0), -1.0)
    assert (pulled.x, pulled.y) == pytest.approx((2.4, 3.2), abs=1e-12)


def test_radial_shift_preserves_firing_angles():
    rng = np.random.default_rng(17)
    for _ in range(100):
        p = Point(*rng.uniform(-15.0, 15.0, size=3))
        r = math.sqrt(p.x**2 + p.y**2 + p.z**2)
        if r < 3.0:
            continue
        d = float(rng.choice(DEFAULT_SHIFT_SET))
        before = to_spherical(p)
        after = to_spherical(radial_shift(p, d))
        assert after.azimuth == pytest.approx(before.azimuth, abs=1e-12)
        assert after.elevation == pytest.approx(before.elevation, abs=1e-12)
        assert after.radius - before.radius == pytest.approx(d, abs=1e-12)


def test_radial_shift_rejects_degenerate_cases():
    with pytest.raises(ValueError):
        radial_shift(Point(0.0, 0.0, 0.0), 1.0)
    with pytest.raises(ValueError):
        radial_shift(Point(3.0, 4.0, 0.0), -5.0)  # radius 5 would go to 0


# ---------------------------------------------------------------------------
# derive_seed
# ---------------------------------------------------------------------------

def test_derive_seed_is_stable_and_order_sensitive():
    assert derive_seed(7, "a", 1) == derive_seed(7, "a", 1)
    assert derive_seed(7, "a", 1) != derive_seed(7, 1, "a")
    assert derive_seed(7, "a") != derive_seed(8, "a")
    assert 0 <= derive_seed(123, "scene", 42) < 2**64


# ---------------------------------------------------------------------------
# AttackConfig
# ---------------------------------------------------------------------------

def test_attack_config_validation():
    spec = PatchSpec(kind=PatchKind.WHOLE_AREA)
    with pytest.raises(ConfigError):
        AttackConfig(patch=spec, budget=-1)
    with pytest.raises(ConfigError):
        AttackConfig(patch=spec, budget=1, shift_set=())
    with pytest.raises(ConfigError):
        AttackConfig(patch=spec, budget=1, shift_set=(0.5,))
    with pytest.raises(ConfigError):
        AttackConfig(patch=spec, budget=1, shift_set=(3.0,))
    ok = AttackConfig(patch=spec, budget=1, shift_set=(-2, 1))
    assert ok.shift_set == (-2.0, 1.0)


# ---------------------------------------------------------------------------
# candidates and select
# ---------------------------------------------------------------------------

def test_candidates_returns_points_in_selected_cells():
    scene, box = one_box_scene(
        [[8.5, -0.5, 0.0], [10.0, 0.0, 0.0], [11.5, 0.5, 0.0]],
        points_outside=[[30.0, 0.0, 0.0]],
    )
    ex = extract(scene)
    mask = whole_area_mask((64, 32))
    cands = candidates(scene.cloud, ex.targets[0], box, mask)
    assert cands.tolist() == [0, 1, 2]

    nothing = top_fraction_mask(np.full((64, 32), -1.0))  # selects no cells
    assert candidates(scene.cloud, ex.targets[0], box, nothing).size == 0


def test_select_random_budgets_nest():
    """A bigger budget must pick a superset under the same seed."""
    cands = np.arange(100, 200)
    for seed in (0, 1, 99):
        small = select(cands, 10, SelectionStrategy.RANDOM, seed=seed)
        large = select(cands, 35, SelectionStrategy.RANDOM, seed=seed)
        assert set(small) <= set(large)
        assert small.size == 10 and large.size == 35
        assert np.array_equal(small, np.sort(small))


def test_select_caps_at_the_candidate_count():
    cands = np.array([5, 9, 2])
    chosen = select(cands, 10, SelectionStrategy.RANDOM, seed=3)
    assert chosen.tolist() == [2, 5, 9]
    assert select(cands, 0, SelectionStrategy.RANDOM, seed=3).size == 0


def test_select_critical_first_takes_highest_scores():
    cands = np.array([10, 11, 12, 13])
    crit = np.array([0.1, 0.9, 0.9, 0.4])
    chosen = select(cands, 2, SelectionStrategy.CRITICAL_FIRST, criticality=crit)
    # The tied 0.9 entries win; the tie favors the lower point index.
    assert chosen.tolist() == [11, 12]


def test_select_critical_first_needs_matching_criticality():
    cands = np.array([1, 2, 3])
    with pytest.raises(ConfigError):
        select(cands, 2, SelectionStrategy.CRITICAL_FIRST)
    with pytest.raises(ConfigError):
        select(cands, 2, SelectionStrategy.CRITICAL_FIRST, criticality=np.array([1.0]))


# ---------------------------------------------------------------------------
# apply / apply_multi
# ---------------------------------------------------------------------------

def _whole_config(budget, seed=0, shift_set=DEFAULT_SHIFT_SET, strategy=SelectionStrategy.RANDOM):
    return AttackConfig(
        patch=PatchSpec(kind=PatchKind.WHOLE_AREA),
        budget=budget,
        shift_set=shift_set,
        strategy=strategy,
        seed=seed,
    )


def _grid_scene(n=30, seed=2):
    rng = np.random.default_rng(seed)
    box = BoundingBox((12.0, 1.0, 0.0), 4.0, 2.0, 2.0, yaw=0.4)
    local = rng.uniform(-0.9, 0.9, size=(n, 3)) * [1.9, 0.9, 0.9]
    inside = box.to_world(local)
    outside = rng.uniform(25.0, 40.0, size=(10, 3))
    xyz = np.vstack([inside, outside])
    return Scene(id="grid", cloud=make_cloud(xyz), boxes=(box,)), box


def test_apply_conserves_points_and_moves_along_rays():
    scene, box = _grid_scene()
    adv, record = apply(scene, box, _whole_config(budget=8, seed=5))
    assert len(adv.cloud) == len(scene.cloud)
    assert adv.id == scene.id

    touched = [e.point_index for e in record.entries]
    assert len(touched) == 8
    untouched = np.setdiff1d(np.arange(len(scene.cloud)), touched)
    assert np.array_equal(adv.cloud.data[untouched], scene.cloud.data[untouched])

    for e in record.entries:
        assert not e.flagged
        assert e.shift in DEFAULT_SHIFT_SET
        expected = radial_shift(Point(*e.old), e.shift)
        assert e.new == pytest.approx((expected.x, expected.y, expected.z), abs=1e-12)
        assert np.allclose(adv.cloud.xyz[e.point_index], e.new)


def test_apply_budgets_nest_with_identical_shifts():
    scene, box = _grid_scene()
    _, small = apply(scene, box, _whole_config(budget=5, seed=9))
    _, large = apply(scene, box, _whole_config(budget=20, seed=9))
    small_by_idx = {e.point_index: e for e in small.entries}
    large_by_idx = {e.point_index: e for e in large.entries}
    assert set(small_by_idx) <= set(large_by_idx)
    for idx, entry in small_by_idx.items():
        assert large_by_idx[idx].shift == entry.shift
        assert large_by_idx[idx].new == entry.new


def test_apply_rejects_foreign_boxes():
    scene, _ = _grid_scene()
    other = BoundingBox((0.0, 0.0, 0.0), 1.0, 1.0, 1.0, yaw=0.0)
    with pytest.raises(ConfigError):
        apply(scene, other, _whole_config(budget=1))


def test_apply_flags_points_with_no_legal_shift():
    # Points barely over a meter from the sensor cannot absorb a -2 m
    # pull, and -2 is the only permitted shift here.
    box = BoundingBox((1.2, 0.0, 0.0), 1.0, 1.0, 1.0, yaw=0.0)
    scene, _ = one_box_scene([[1.2, 0.1, 0.0], [1.3, -0.2, 0.1]], box=box)
    adv, record = apply(scene, box, _whole_config(budget=2, shift_set=(-2.0,)))
    assert len(record.entries) == 2
    for e in record.entries:
        assert e.flagged
        assert e.shift == 0.0
        assert e.new == e.old
    assert adv.cloud == scene.cloud


def test_apply_multi_composes_per_object_applications():
    rng = np.random.default_rng(8)
    box_a = BoundingBox((10.0, 3.0, 0.0), 4.0, 2.0, 2.0, yaw=0.2)
    box_b = BoundingBox((10.0, -4.0, 0.0), 4.0, 2.0, 2.0, yaw=-0.5)
    pts = np.vstack([
        box_a.to_world(rng.uniform(-0.8, 0.8, size=(12, 3))),
        box_b.to_world(rng.uniform(-0.8, 0.8, size=(12, 3))),
        rng.uniform(30.0, 40.0, size=(6, 3)),
    ])
    scene = Scene(id="multi", cloud=make_cloud(pts), boxes=(box_a, box_b))
    config = _whole_config(budget=6, seed=4)

    adv_multi, records = apply_multi(scene, config)
    step_a, rec_a = apply(scene, box_a, config)
    step_ab, rec_b = apply(step_a, box_b, config)

    assert adv_multi.cloud == step_ab.cloud
    assert records == (rec_a, rec_b)


def test_apply_multi_is_deterministic():
    scene, _ = _grid_scene(seed=6)
    config = _whole_config(budget=10, seed=77)
    first, _ = apply_multi(scene, config)
    second, _ = apply_multi(scene, config)
    assert first.cloud == second.cloud


def test_records_to_jsonl_one_line_per_entry():
    scene, box = _grid_scene()
    _, record = apply(scene, box, _whole_config(budget=4, seed=1))
    text = records_to_jsonl([record])
    lines = text.strip().splitlines()
    assert len(lines) == 4
    doc = json.loads(lines[0])
    assert doc["scene_id"] == "grid"
    assert doc["kind"] == "whole_area"
    assert set(doc) == {
        "scene_id", "object_index", "kind", "point_index", "old", "shift", "new", "flagged",
    }
    assert records_to_jsonl([]) == ""
