import math
import os
import re

import numpy as np
import pytest

from chronolapse.params import CameraPose
from chronolapse.robotplan import (GeodesyError, compile_plan,
                                   deserialize_plan, gimbal_angles,
                                   gps_to_local, local_to_gps,
                                   serialize_plan)
from chronolapse.scene import GeoReference

from conftest import simple_params, utc

G0 = GeoReference(0.0, 0.0, 0.0, 0.0)


class TestGeodesy:
    def test_origin_maps_to_origin(self):
        g = GeoReference(40.7, -74.0, 5.0, 30.0)
        assert local_to_gps(g, (0.0, 0.0, 0.0)) == (40.7, -74.0, 5.0)
        x, y, z = gps_to_local(g, 40.7, -74.0, 5.0)
        assert (x, y, z) == (0.0, 0.0, 0.0)

    def test_north_displacement_at_equator(self):
        # 111.32 m north = a millidegree of latitude; heading 0 maps +x
        # to North
        lat, lon, alt = local_to_gps(G0, (111.32, 0.0, 0.0))
        assert lat == pytest.approx(0.001, abs=1e-9)
        assert lon == 0.0
        assert alt == 0.0

    def test_east_displacement_at_45n(self):
        g = GeoReference(45.0, 10.0, 0.0, 0.0)
        east_m = 111320.0 * math.cos(math.radians(45.0)) / 1000.0  # 1 mdeg
        # +y is West at heading 0, so go along -y for an eastward move
        lat, lon, _ = local_to_gps(g, (0.0, -east_m, 0.0))
        assert lon == pytest.approx(10.001, abs=1e-12)
        assert lat == pytest.approx(45.0, abs=1e-12)
        assert east_m == pytest.approx(78.71, abs=0.01)

    def test_round_trip_sub_micrometer(self):
        rng = np.random.default_rng(11)
        g = GeoReference(40.7, -74.0, 12.0, 137.0)
        pts = rng.uniform(-2000, 2000, (1000, 3))
        for p in pts:
            lat, lon, alt = local_to_gps(g, tuple(p))
            x, y, z = gps_to_local(g, lat, lon, alt)
            err = math.dist((x, y, z), tuple(p))
            assert err < 1e-6

    def test_polar_latitude_rejected(self):
        g = GeoReference(89.5, 0.0, 0.0, 0.0)
        with pytest.raises(GeodesyError):
            local_to_gps(g, (1.0, 2.0, 3.0))

    def test_distant_point_rejected(self):
        with pytest.raises(GeodesyError):
            local_to_gps(G0, (60_000.0, 0.0, 0.0))


class TestGimbalConventions:
    # hand-built convention table: +x has compass bearing `heading`,
    # scene yaw is counterclockwise, compass is clockwise, so the camera
    # bearing is heading - yaw
    TABLE = [
        # (heading, yaw, expected compass bearing)
        (0.0, 0.0, 0.0),      # +x = North
        (0.0, 90.0, 270.0),   # +y = West
        (0.0, 180.0, 180.0),  # -x = South
        (0.0, 270.0, 90.0),   # -y = East
        (90.0, 0.0, 90.0),    # +x = East
        (90.0, 90.0, 0.0),    # +y = North
        (90.0, 180.0, 270.0),
        (90.0, 270.0, 180.0),
    ]

    @pytest.mark.parametrize("heading,yaw,expected", TABLE)
    def test_yaw_table(self, heading, yaw, expected):
        g = GeoReference(10.0, 20.0, 0.0, heading)
        pose = CameraPose((0.0, 0.0, 5.0), yaw, 0.0)
        _, gyaw = gimbal_angles(g, pose)
        assert gyaw == pytest.approx(expected)

    def test_pitch_sign_flips_to_positive_down(self):
        pose_up = CameraPose((0, 0, 5), 0.0, 30.0)
        pose_down = CameraPose((0, 0, 5), 0.0, -45.0)
        assert gimbal_angles(G0, pose_up)[0] == -30.0
        assert gimbal_angles(G0, pose_down)[0] == 45.0

    def test_yaw_always_in_range(self):
        for heading in (0.0, 45.0, 180.0, 359.0):
            g = GeoReference(0.0, 0.0, 0.0, heading)
            for yaw in (-720.0, -90.0, 0.0, 123.4, 359.9, 720.0):
                _, gy = gimbal_angles(g, CameraPose((0, 0, 5), yaw, 0.0))
                assert 0.0 <= gy < 360.0


class TestCompilePlan:
    def test_static_path_constant_waypoints(self, scene):
        params = simple_params(scene)
        plan = compile_plan(params, scene.georef, waypoint_count=8)
        assert len(plan.waypoints) == 8
        first = plan.waypoints[0]
        for w in plan.waypoints:
            assert (w.lat, w.lon, w.alt_m) == (first.lat, first.lon,
                                               first.alt_m)
            assert (w.gimbal_pitch_deg, w.gimbal_yaw_deg) == \
                (first.gimbal_pitch_deg, first.gimbal_yaw_deg)
        assert plan.waypoints[0].time == params.timewarp.start
        assert plan.waypoints[-1].time == params.timewarp.end

    def test_times_exactly_uniform(self, scene):
        params = simple_params(scene)
        n = 6
        plan = compile_plan(params, scene.georef, waypoint_count=n)
        span = (params.timewarp.end - params.timewarp.start).total_seconds()
        from datetime import timedelta
        for i, w in enumerate(plan.waypoints):
            expected = params.timewarp.start + timedelta(
                seconds=i / (n - 1) * span)
            assert w.time == expected

    def test_capture_copies_timewarp(self, scene):
        params = simple_params(scene)
        plan = compile_plan(params, scene.georef)
        assert plan.capture_start == params.timewarp.start
        assert plan.capture_end == params.timewarp.end
        assert plan.capture_interval_s == params.timewarp.interval_s

    def test_moving_path_spans_positions(self, scene):
        params = simple_params(scene, mode="truck", amplitude=10.0)
        plan = compile_plan(params, scene.georef, waypoint_count=5)
        lats = {w.lat for w in plan.waypoints} | {w.lon
                                                  for w in plan.waypoints}
        assert len(lats) > 2

    def test_gimbal_ranges(self, scene):
        params = simple_params(scene, mode="orbit", amplitude=40.0,
                               pivot=(60.0, 0.0))
        plan = compile_plan(params, scene.georef, waypoint_count=12)
        for w in plan.waypoints:
            assert 0.0 <= w.gimbal_yaw_deg < 360.0
            assert -90.0 <= w.gimbal_pitch_deg <= 90.0


class TestSerialization:
    def test_round_trip_identity(self, scene):
        params = simple_params(scene, mode="pan", amplitude=30.0)
        plan = compile_plan(params, scene.georef)
        assert deserialize_plan(serialize_plan(plan)) == plan

    def test_timestamp_format(self, scene):
        plan = compile_plan(simple_params(scene), scene.georef)
        text = serialize_plan(plan)
        stamps = re.findall(r'"time": "([^"]+)"', text)
        assert stamps
        for s in stamps:
            assert re.fullmatch(
                r"\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?Z", s)

    def test_golden_tutorial_plan(self):
        from importlib import resources

        from chronolapse.interface.cli import main
        golden_path = os.path.join(os.path.dirname(__file__), "data",
                                   "tutorial_plan.json")
        from chronolapse.params import load_params
        from chronolapse.scene import load_scene
        scene = load_scene((resources.files("chronolapse")
                            / "data/scenes/tutorial.json").read_text())
        params_text = (
            '{"viewfinder": {"location": [0.0, 0.0, 6.0], "yaw_deg": 90.0,'
            ' "pitch_deg": -5.0},'
            ' "path": {"mode": "pan", "amplitude": 30.0},'
            ' "timewarp": {"start": "2024-06-21T12:00:00Z",'
            ' "end": "2024-06-21T14:00:00Z", "interval_s": 30.0}}')
        plan = compile_plan(load_params(params_text, scene), scene.georef,
                            waypoint_count=4)
        text = serialize_plan(plan)
        with open(golden_path) as fh:
            assert fh.read() == text
