"""Geometry, spherical transforms, extraction, and scene serialization."""

import math

import numpy as np
import pytest
from shapely.geometry import Polygon

from vpatch.errors import FormatError
from vpatch.scene import (
    BoundingBox,
    Extraction,
    ObjectClass,
    Point,
    PointCloud,
    Scene,
    bev_iou,
    box_contains,
    cartesian_to_spherical,
    extract,
    from_spherical,
    load_scene_json,
    rotation_z,
    save_scene_json,
    scene_from_json,
    spherical_to_cartesian,
    to_spherical,
    wrap_angle,
)


def make_cloud(xyz, intensity=0.5):
    xyz = np.atleast_2d(np.asarray(xyz, dtype=float))
    col = np.full((xyz.shape[0], 1), float(intensity))
    return PointCloud(np.hstack([xyz, col]))


# ---------------------------------------------------------------------------
# Angles and rotations
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("angle,expected", [
    (0.0, 0.0),
    (math.pi, -math.pi),
    (-math.pi, -math.pi),
    (3 * math.pi / 2, -math.pi / 2),
    (2 * math.pi, 0.0),
    (-3 * math.pi, -math.pi),
    (0.25, 0.25),
])
def test_wrap_angle(angle, expected):
    wrapped = wrap_angle(angle)
    assert wrapped == pytest.approx(expected, abs=1e-12)
    assert -math.pi <= wrapped < math.pi


def test_rotation_z_quarter_turn():
    r = rotation_z(math.pi / 2)
    assert np.allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-12)
    assert np.allclose(r @ [0.0, 0.0, 1.0], [0.0, 0.0, 1.0], atol=1e-15)


def test_rotation_z_is_orthonormal():
    rng = np.random.default_rng(0)
    for yaw in rng.uniform(-math.pi, math.pi, size=20):
        r = rotation_z(yaw)
        assert np.allclose(r @ r.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-14)


# ---------------------------------------------------------------------------
# Points and spherical transforms
# ---------------------------------------------------------------------------

def test_point_rejects_bad_values():
    with pytest.raises(ValueError):
        Point(math.nan, 0.0, 0.0)
    with pytest.raises(ValueError):
        Point(0.0, 0.0, 0.0, intensity=1.5)
    with pytest.raises(ValueError):
        Point(0.0, 0.0, 0.0, intensity=-0.1)


def test_to_spherical_345_triangle():
    s = to_spherical(Point(3.0, 4.0, 0.0))
    assert s.radius == pytest.approx(5.0, abs=1e-15)
    assert s.azimuth == pytest.approx(math.atan2(4.0, 3.0), abs=1e-15)
    assert s.elevation == 0.0


def test_to_spherical_rejects_origin():
    with pytest.raises(ValueError):
        to_spherical(Point(0.0, 0.0, 0.0))


def test_to_spherical_folds_pi_azimuth():
    # atan2 returns exactly pi on the negative x axis; the convention
    # here is [-pi, pi), so that ray must come back as -pi.
    s = to_spherical(Point(-2.0, 0.0, 0.0))
    assert s.azimuth == -math.pi


def test_spherical_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = Point(*rng.uniform(-30.0, 30.0, size=3), intensity=0.3)
        if p.x == 0.0 and p.y == 0.0 and p.z == 0.0:
            continue
        q = from_spherical(to_spherical(p), intensity=0.3)
        assert math.hypot(q.x - p.x, q.y - p.y, q.z - p.z) < 1e-12 * (1 + abs(p.x))


def test_vectorized_spherical_matches_scalar():
    rng = np.random.default_rng(13)
    xyz = rng.uniform(-20.0, 20.0, size=(100, 3))
    r, az, el = cartesian_to_spherical(xyz)
    for i in range(0, 100, 17):
        s = to_spherical(Point(*xyz[i], intensity=0.0))
        assert r[i] == pytest.approx(s.radius, abs=1e-12)
        assert az[i] == pytest.approx(s.azimuth, abs=1e-12)
        assert el[i] == pytest.approx(s.elevation, abs=1e-12)
    back = spherical_to_cartesian(r, az, el)
    assert np.allclose(back, xyz, atol=1e-10)


def test_cartesian_to_spherical_rejects_origin_row():
    with pytest.raises(ValueError):
        cartesian_to_spherical(np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))


# ---------------------------------------------------------------------------
# PointCloud
# ---------------------------------------------------------------------------

def test_cloud_validation():
    with pytest.raises(ValueError):
        PointCloud(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        PointCloud(np.array([[0.0, 0.0, 0.0, 2.0]]))
    bad = np.zeros((2, 4))
    bad[1, 0] = np.inf
    with pytest.raises(ValueError):
        PointCloud(bad)


def test_cloud_is_immutable():
    cloud = make_cloud([[1.0, 2.0, 3.0]])
    with pytest.raises(ValueError):
        cloud.data[0, 0] = 9.0


def test_replace_xyz_preserves_untouched_rows():
    rng = np.random.default_rng(3)
    data = np.hstack([rng.uniform(-5, 5, size=(50, 3)), rng.uniform(0, 1, size=(50, 1))])
    cloud = PointCloud(data)
    idx = np.array([4, 17, 31])
    moved = cloud.replace_xyz(idx, np.zeros((3, 3)))
    assert len(moved) == 50
    untouched = np.setdiff1d(np.arange(50), idx)
    assert np.array_equal(moved.data[untouched], cloud.data[untouched])
    assert np.array_equal(moved.xyz[idx], np.zeros((3, 3)))
    assert np.array_equal(moved.intensity[idx], cloud.intensity[idx])


def test_cloud_equality():
    a = make_cloud([[1.0, 2.0, 3.0]])
    b = make_cloud([[1.0, 2.0, 3.0]])
    c = make_cloud([[1.0, 2.0, 3.1]])
    assert a == b
    assert a != c


# ---------------------------------------------------------------------------
# Boxes
# ---------------------------------------------------------------------------

def test_box_wraps_yaw_and_validates_dims():
    box = BoundingBox((0.0, 0.0, 0.0), 4.0, 2.0, 1.5, yaw=3 * math.pi / 2)
    assert box.yaw == pytest.approx(-math.pi / 2, abs=1e-12)
    with pytest.raises(ValueError):
        BoundingBox((0.0, 0.0, 0.0), -1.0, 2.0, 1.5, yaw=0.0)


def test_box_local_world_round_trip():
    box = BoundingBox((5.0, -2.0, 1.0), 4.0, 2.0, 1.5, yaw=0.7)
    rng = np.random.default_rng(5)
    pts = rng.uniform(-3.0, 3.0, size=(40, 3))
    assert np.allclose(box.to_world(box.to_local(pts)), pts, atol=1e-12)


def test_footprint_corners_ccw_and_axis_aligned():
    box = BoundingBox((10.0, 0.0, 0.0), 4.0, 2.0, 1.5, yaw=0.0)
    corners = box.footprint_corners()
    expected = np.array([[8.0, -1.0], [12.0, -1.0], [12.0, 1.0], [8.0, 1.0]])
    assert np.allclose(corners, expected, atol=1e-12)
    # Shoelace signed area positive means counter-clockwise order.
    x, y = corners[:, 0], corners[:, 1]
    signed = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
    assert signed > 0


def test_bev_range():
    box = BoundingBox((3.0, 4.0, -5.0), 1.0, 1.0, 1.0, yaw=0.0)
    assert box.bev_range() == pytest.approx(5.0, abs=1e-15)


def test_box_contains_half_open_faces():
    box = BoundingBox((0.0, 0.0, 0.0), 4.0, 2.0, 2.0, yaw=0.0)
    pts = np.array([
        [-2.0, 0.0, 0.0],   # on the negative x face: inside
        [2.0, 0.0, 0.0],    # on the positive x face: outside
        [0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 0.999],
        [0.0, 0.0, 1.0],
    ])
    assert box_contains(box, pts).tolist() == [True, False, True, False, True, False]


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

def test_extract_partitions_every_point_once():
    box_a = BoundingBox((0.0, 0.0, 0.0), 2.0, 2.0, 2.0, yaw=0.0)
    box_b = BoundingBox((5.0, 0.0, 0.0), 2.0, 2.0, 2.0, yaw=0.0)
    cloud = make_cloud([
        [0.1, 0.2, 0.0],   # in a
        [5.2, -0.3, 0.1],  # in b
        [9.0, 9.0, 9.0],   # background
        [-0.4, 0.0, 0.0],  # in a
    ])
    ex = extract(Scene(id="s", cloud=cloud, boxes=(box_a, box_b)))
    assert ex.targets[0].tolist() == [0, 3]
    assert ex.targets[1].tolist() == [1]
    assert ex.background.tolist() == [2]


def test_extract_overlap_goes_to_nearest_center_then_lower_index():
    # Two overlapping identical boxes; the shared point sits closer to
    # the second box's center, and a dead-center tie goes to index 0.
    box_a = BoundingBox((0.0, 0.0, 0.0), 4.0, 4.0, 4.0, yaw=0.0)
    box_b = BoundingBox((2.0, 0.0, 0.0), 4.0, 4.0, 4.0, yaw=0.0)
    cloud = make_cloud([
        [1.8, 0.0, 0.0],  # inside both, nearer to b's center at x=2
        [1.0, 0.0, 0.0],  # equidistant from both centers: tie, box a
    ])
    ex = extract(Scene(id="s", cloud=cloud, boxes=(box_a, box_b)))
    assert ex.targets[0].tolist() == [1]
    assert ex.targets[1].tolist() == [0]


def test_extract_no_boxes():
    ex = extract(Scene(id="s", cloud=make_cloud([[1.0, 1.0, 1.0]])))
    assert ex.targets == ()
    assert ex.background.tolist() == [0]


def test_extraction_rejects_bad_partitions():
    with pytest.raises(ValueError):
        Extraction(targets=(np.array([0, 1]),), background=np.array([1]), n_points=3)
    with pytest.raises(ValueError):
        Extraction(targets=(np.array([0]),), background=np.array([0]), n_points=2)


# ---------------------------------------------------------------------------
# BEV IOU
# ---------------------------------------------------------------------------

def test_bev_iou_identical_and_disjoint():
    a = BoundingBox((0.0, 0.0, 0.0), 4.0, 2.0, 1.5, yaw=0.3)
    far = BoundingBox((100.0, 0.0, 0.0), 4.0, 2.0, 1.5, yaw=0.3)
    assert bev_iou(a, a) == pytest.approx(1.0, abs=1e-12)
    assert bev_iou(a, far) == 0.0


def test_bev_iou_axis_aligned_half_overlap():
    a = BoundingBox((0.0, 0.0, 0.0), 4.0, 2.0, 1.0, yaw=0.0)
    b = BoundingBox((2.0, 0.0, 0.0), 4.0, 2.0, 1.0, yaw=0.0)
    # Intersection 2x2 = 4, union 8 + 8 - 4 = 12.
    assert bev_iou(a, b) == pytest.approx(4.0 / 12.0, abs=1e-12)


def test_bev_iou_matches_shapely_on_random_boxes():
    """Clipping-based IOU against an independent polygon library."""
    rng = np.random.default_rng(42)
    for _ in range(200):
        a = BoundingBox(
            (rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0),
            rng.uniform(0.5, 6.0), rng.uniform(0.5, 4.0), 1.5,
            yaw=rng.uniform(-math.pi, math.pi),
        )
        b = BoundingBox(
            (rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0),
            rng.uniform(0.5, 6.0), rng.uniform(0.5, 4.0), 1.5,
            yaw=rng.uniform(-math.pi, math.pi),
        )
        pa = Polygon(a.footprint_corners())
        pb = Polygon(b.footprint_corners())
        inter = pa.intersection(pb).area
        union = pa.area + pb.area - inter
        expected = inter / union if union > 0 else 0.0
        assert bev_iou(a, b) == pytest.approx(expected, abs=1e-9)


# ---------------------------------------------------------------------------
# Scene JSON
# ---------------------------------------------------------------------------

def test_scene_json_round_trip(tmp_path):
    rng = np.random.default_rng(11)
    cloud = PointCloud(
        np.hstack([rng.uniform(-20, 20, size=(30, 3)), rng.uniform(0, 1, size=(30, 1))])
    )
    boxes = (
        BoundingBox((5.0, 1.0, 0.2), 4.1, 1.8, 1.4, yaw=0.45, cls=ObjectClass.CAR),
        BoundingBox((-3.0, 2.0, 0.0), 0.8, 0.6, 1.7, yaw=-2.1, cls=ObjectClass.PEDESTRIAN),
    )
    scene = Scene(id="unit-1", cloud=cloud, boxes=boxes)
    path = tmp_path / "scene.json"
    save_scene_json(scene, path)
    loaded = load_scene_json(path)
    assert loaded.id == scene.id
    assert loaded.cloud == scene.cloud
    assert loaded.boxes == scene.boxes


@pytest.mark.parametrize("text", [
    "not json at all",
    '{"id": "x"}',
    '{"id": "x", "points": [[0, 0, 0, 0]], "boxes": [{"center": [0, 0]}]}',
])
def test_scene_from_json_rejects_malformed(text):
    with pytest.raises(FormatError):
        scene_from_json(text)


def test_scene_requires_id():
    with pytest.raises(ValueError):
        Scene(id="", cloud=make_cloud([[0.0, 0.0, 1.0]]))
