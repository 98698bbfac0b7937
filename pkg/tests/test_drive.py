import csv
import hashlib
import math
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from desksim.core import Pose2, SeededRng, Vec2
from desksim.drive import (AugmentationConfig, ControllerParams,
                           DegenerateLabelError, MANIFEST_HEADER,
                           OracleDriver, WaypointLabel, control_from_label,
                           decode_label, encode_label, export_driving_dataset,
                           mirror_label, run_driving_episode,
                           score_deviations, select_waypoints)
from desksim.drive.labels import WAYPOINT_DISTANCES
from desksim.physics import CarParams
from desksim.worldmap import (apply_obstacle_reroutes, extract_path_network,
                              generate_random_map)
from desksim.worldmap.paths import Chain, LineSeg, SegmentInfo

angles = st.floats(-math.pi, math.pi, allow_nan=False)
coords = st.floats(-100, 100, allow_nan=False)


def chain(segs, closed=False):
    infos = [SegmentInfo(0, 0, "straight", 0) for _ in segs]
    return Chain(segs, infos, closed)


def straight_path(length=40.0):
    return chain([LineSeg(0.0, 0.0, length, 0.0)])


class TestWaypointSelection:
    def test_distances_pinned(self):
        assert WAYPOINT_DISTANCES == (2.0, 4.0, 6.0, 8.0)

    def test_straight_from_origin(self):
        wps = select_waypoints(straight_path(), 0.0)
        assert [(p.x, p.y) for p in wps] == [(2, 0), (4, 0), (6, 0), (8, 0)]

    def test_circle_chords(self):
        """Radius-4 circle: arc steps of 2 m are angle steps of 0.5 rad."""
        r = 4.0
        n = 64
        pts = [(r * math.cos(2 * math.pi * k / n),
                r * math.sin(2 * math.pi * k / n)) for k in range(n + 1)]
        segs = [LineSeg(*pts[i], *pts[i + 1]) for i in range(n)]
        # piecewise-linear circle approximation is fine at 1e-2 tolerance
        circle = chain(segs, closed=True)
        wps = select_waypoints(circle, 0.0)
        for d, p in zip(WAYPOINT_DISTANCES, wps):
            ang = d / r
            assert p.x == pytest.approx(r * math.cos(ang), abs=0.02)
            assert p.y == pytest.approx(r * math.sin(ang), abs=0.02)

    def test_closed_path_wraps(self, small_network):
        path = small_network.ideal_pathway
        wps = select_waypoints(path, path.total_length - 1.0)
        x, y = path.point_at(1.0)
        assert (wps[0].x, wps[0].y) == pytest.approx((x, y), abs=1e-9)

    def test_open_path_too_short(self):
        with pytest.raises(ValueError):
            select_waypoints(straight_path(5.0), 0.0)


class TestLabelEncoding:
    def test_straight_ahead(self):
        label = encode_label(Pose2(0, 0, 0),
                             select_waypoints(straight_path(), 0.0))
        assert label.h == pytest.approx((0, 0, 0, 0))
        assert label.v == pytest.approx((2, 4, 6, 8))

    def test_yawed_view(self):
        """View yawed +30 deg CCW (left): a straight-ahead waypoint appears
        to the driver's right, so h is positive (rightward-positive h,
        matching the offset-car case below and the steering sign)."""
        label = encode_label(Pose2(0, 0, math.radians(30.0)),
                             select_waypoints(straight_path(), 0.0))
        assert label.h[0] == pytest.approx(2.0 * math.sin(math.radians(30.0)))
        assert label.v[0] == pytest.approx(2.0 * math.cos(math.radians(30.0)))

    def test_right_offset_car(self):
        """Car 0.5 m right (y=-0.5 at psi=0): waypoints appear left."""
        label = encode_label(Pose2(0, -0.5, 0),
                             select_waypoints(straight_path(), 0.0))
        assert label.h == pytest.approx((-0.5, -0.5, -0.5, -0.5))

    @given(coords, coords, angles, st.integers(0, 10 ** 6))
    @settings(max_examples=300)
    def test_roundtrip(self, px, py, psi, seed):
        rng = SeededRng(seed)
        wps = [Vec2(rng.uniform(-50, 50), rng.uniform(-50, 50))
               for _ in range(4)]
        pose = Pose2(px, py, psi)
        back = decode_label(pose, encode_label(pose, wps))
        for a, b in zip(wps, back):
            assert math.hypot(a.x - b.x, a.y - b.y) < 1e-9 * max(1, abs(a.x))

    def test_label_requires_four_pairs(self):
        with pytest.raises(ValueError):
            WaypointLabel((1.0,), (1.0,))
        with pytest.raises(ValueError):
            WaypointLabel((0, 0, 0, math.nan), (1, 2, 3, 4))


class TestMirror:
    def test_zero_fixed_point(self):
        label = WaypointLabel((0, 0, 0, 0), (2, 4, 6, 8))
        assert mirror_label(label) == label

    def test_involution(self):
        label = WaypointLabel((1, -2, 3, -4), (2, 4, 6, 8))
        assert mirror_label(mirror_label(label)) == label

    @given(coords, coords, angles, st.integers(0, 10 ** 6))
    @settings(max_examples=300)
    def test_mirrored_world_commutes(self, px, py, psi, seed):
        """encode(mirror-world) == mirror_label(encode(world)) where the
        world is reflected about the view axis."""
        rng = SeededRng(seed)
        wps = [Vec2(rng.uniform(-50, 50), rng.uniform(-50, 50))
               for _ in range(4)]
        pose = Pose2(px, py, psi)
        fwd = pose.forward()
        mirrored = []
        for p in wps:  # reflect across the line through pose along fwd
            dx, dy = p.x - px, p.y - py
            along = dx * fwd.x + dy * fwd.y
            mx = px + 2 * along * fwd.x - dx
            my = py + 2 * along * fwd.y - dy
            mirrored.append(Vec2(mx, my))
        lhs = encode_label(pose, mirrored)
        rhs = mirror_label(encode_label(pose, wps))
        for a, b in zip(lhs.flat(), rhs.flat()):
            assert a == pytest.approx(b, abs=1e-6)


class TestController:
    def test_zero_h1_zero_steering(self):
        c = control_from_label(WaypointLabel((0, 0, 0, 0), (2, 4, 6, 8)))
        assert c.steering == 0.0

    def test_45deg_saturates(self):
        c = control_from_label(WaypointLabel((2, 0, 0, 0), (2, 4, 6, 8)))
        assert c.steering == pytest.approx(1.0)

    def test_steering_law(self):
        c = control_from_label(WaypointLabel((1, 0, 0, 0), (2, 4, 6, 8)))
        expected = math.atan2(1, 2) / CarParams().max_steer
        assert c.steering == pytest.approx(expected)

    def test_throttle_boundaries(self):
        t0 = control_from_label(WaypointLabel((0, 0, 0, 0), (2, 4, 6, 8)))
        assert t0.throttle == pytest.approx(1.0)
        t3 = control_from_label(WaypointLabel((0, 0, 0, 3), (2, 4, 6, 8)))
        assert t3.throttle == pytest.approx(0.2)
        t15 = control_from_label(WaypointLabel((0, 0, 0, 1.5), (2, 4, 6, 8)))
        assert t15.throttle == pytest.approx(0.5)

    def test_degenerate_label(self):
        with pytest.raises(DegenerateLabelError):
            control_from_label(WaypointLabel((1, 0, 0, 0), (0, 0, 0, 0)))


class TestScoring:
    def test_on_path(self):
        s = score_deviations([0.0] * 100)
        assert s.mean_deviation == 0.0
        assert s.cumulative_histogram[0] == pytest.approx(1.0)
        assert not s.critical_exit

    def test_constant_10cm(self):
        s = score_deviations([0.10] * 50)
        assert s.mean_deviation == pytest.approx(0.10)
        for i, frac in enumerate(s.cumulative_histogram):
            upper = (i + 1) * 0.05
            assert frac == pytest.approx(1.0 if upper >= 0.10 else 0.0)

    def test_mixed(self):
        s = score_deviations([0.02, 0.07, 0.12])
        assert s.mean_deviation == pytest.approx(0.07)
        assert s.frac_within_25cm == pytest.approx(1.0)
        assert not s.critical_exit

    def test_critical_exit(self):
        s = score_deviations([0.1, 1.2, 0.1])
        assert s.critical_exit
        assert s.max_deviation == pytest.approx(1.2)


class TestClosedLoop:
    def test_oracle_completes(self, small_network):
        path = apply_obstacle_reroutes(small_network)
        agent = OracleDriver(path, small_network.left_pathway)
        result = run_driving_episode(path, agent, target_speed=6.0)
        assert result.status == "completed"
        assert result.completion == pytest.approx(1.0)
        assert not result.score.critical_exit

    def test_log_determinism(self, small_network):
        path = apply_obstacle_reroutes(small_network)
        out = []
        for _ in range(2):
            agent = OracleDriver(path, small_network.left_pathway,
                                 sigma=0.1, seed=5)
            r = run_driving_episode(path, agent, target_speed=6.0)
            out.append(hashlib.sha256(r.log.dumps().encode()).hexdigest())
        assert out[0] == out[1]

    def test_steering_continuity(self, small_network):
        """Slew-limited steering: finite difference bounded per frame."""
        path = apply_obstacle_reroutes(small_network)
        agent = OracleDriver(path, small_network.left_pathway)
        r = run_driving_episode(path, agent, target_speed=6.0)
        steers = [rec["control"]["steer"] for rec in r.log.records]
        max_step = max(abs(b - a) for a, b in zip(steers, steers[1:]))
        assert max_step <= 5.0 / 30.0 + 1e-9

    def test_lane_toggle_involution(self, small_network):
        path = apply_obstacle_reroutes(small_network)
        agent = OracleDriver(path, small_network.left_pathway)
        assert agent.lane == "right"
        agent.toggle_lane()
        agent.toggle_lane()
        assert agent.lane == "right"

    def test_lane_change_settles_on_target_lane(self, small_network):
        """Switch to the left lane mid-straight; deviation relative to the
        TARGET lane returns below the critical bound after settling."""
        right = small_network.ideal_pathway
        left = small_network.left_pathway
        agent = OracleDriver(right, left)
        schedule = {90: "left"}
        r = run_driving_episode(right, agent, target_speed=4.0,
                                score_path=left, lane_schedule=schedule,
                                max_frames=360)
        tail = [rec["deviation"] for rec in r.log.records[-30:]]
        assert max(tail) < 1.0


@pytest.fixture(scope="module")
def export(tmp_path_factory):
    out = tmp_path_factory.mktemp("ds")
    m = generate_random_map(4, 6, 5)
    aug = AugmentationConfig(mode="random", views=1)
    rows = export_driving_dataset([("m4", m)], out, augmentation=aug,
                                  with_goals=True, seed=11)
    return m, out, rows


class TestDatasetExport:
    def test_row_count_formula(self, export):
        m, out, rows = export
        path = apply_obstacle_reroutes(extract_path_network(m))
        from desksim.worldmap.paths import LineSeg, sample_path
        n_samples = len(sample_path(path, 0.8, 0.2))
        assert len(rows) == n_samples * 2  # originals + 1 random view each

    def test_manifest_matches_rows(self, export):
        _, out, rows = export
        with open(out / "manifest.csv", newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            assert header == MANIFEST_HEADER
            lines = list(reader)
        assert len(lines) == len(rows)
        for line in lines:
            assert (out / line[0]).exists()

    def test_offsets_within_ranges(self, export):
        _, out, rows = export
        ix = {k: i for i, k in enumerate(MANIFEST_HEADER)}
        for row in rows:
            assert -4.0 <= float(row[ix["x_off"]]) <= 4.0
            assert -math.radians(30) <= float(row[ix["yaw_off"]]) \
                <= math.radians(30)
            assert int(row[ix["goal"]]) in (-1, 0, 1)

    def test_reexport_byte_identical(self, tmp_path):
        m = generate_random_map(4, 6, 5)
        aug = AugmentationConfig(mode="fixed",
                                 fixed_offsets=((0.0, math.radians(-30)),
                                                (0.0, math.radians(30))))
        digests = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            export_driving_dataset([("m4", m)], out, augmentation=aug,
                                   seed=11)
            h = hashlib.sha256()
            for p in sorted(out.iterdir()):
                h.update(p.name.encode() + p.read_bytes())
            digests.append(h.hexdigest())
        assert digests[0] == digests[1]

    def test_fixed_views_three_images_per_pose(self, tmp_path):
        m = generate_random_map(4, 6, 5)
        aug = AugmentationConfig(mode="fixed",
                                 fixed_offsets=((0.0, math.radians(-30)),
                                                (0.0, math.radians(30))))
        rows = export_driving_dataset([("m", m)], tmp_path / "x",
                                      augmentation=aug, seed=0)
        ix = MANIFEST_HEADER.index("s")
        by_s = {}
        for row in rows:
            by_s.setdefault(row[ix], []).append(row)
        assert all(len(v) == 3 for v in by_s.values())

    def test_augmentation_config_validation(self):
        with pytest.raises(ValueError):
            AugmentationConfig(mode="banana")
        with pytest.raises(ValueError):
            AugmentationConfig(mode="fixed", fixed_offsets=((9.0, 0.0),))
