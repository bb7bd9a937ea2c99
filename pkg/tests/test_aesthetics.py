import math

import numpy as np
import pytest

from chronolapse.aesthetics import (assess, assess_report, mean_luma_series,
                                    project_landmarks, project_point,
                                    score_image, score_timelapse,
                                    score_video, smooth_series)
from chronolapse.params import CameraPath, CameraPose, ViewfinderParams
from chronolapse.render import (ExposureAuto, RenderSettings, render_sequence)

from conftest import (make_scene, simple_params, uniform_frame,
                      uniform_sequence, utc)


class TestProjection:
    def test_on_axis_center(self):
        pose = CameraPose((0.0, 0.0, 5.0), 0.0, 0.0, 60.0)
        assert project_point(pose, (10.0, 0.0, 5.0), 1.0) == \
            pytest.approx((0.5, 0.5))

    def test_behind_camera_excluded(self):
        pose = CameraPose((0.0, 0.0, 5.0), 0.0, 0.0, 60.0)
        assert project_point(pose, (-10.0, 0.0, 5.0), 1.0) is None

    def test_pinhole_formula_left_offset(self):
        # subject 10 m ahead, 2 m to the left, vfov 60, square image:
        # x = 0.5 - (2/10) / (2 tan 30)
        pose = CameraPose((0.0, 0.0, 5.0), 0.0, 0.0, 60.0)
        x, y = project_point(pose, (10.0, 2.0, 5.0), 1.0)  # +y is left
        expected = 0.5 - (2.0 / 10.0) / (2.0 * math.tan(math.radians(30.0)))
        assert x == pytest.approx(expected, abs=1e-12)
        assert y == pytest.approx(0.5, abs=1e-12)

    def test_landmarks_filtered_to_image(self):
        sc = make_scene(solids=[
            {"center": [60.0, 0.0, 12.0], "size": [5, 5, 24],
             "albedo": [0.5, 0.5, 0.5], "landmark": 1.0},
            {"center": [-60.0, 0.0, 12.0], "size": [5, 5, 24],
             "albedo": [0.5, 0.5, 0.5], "landmark": 0.5},
        ])
        pose = CameraPose((0.0, 0.0, 12.0), 0.0, 0.0, 60.0)
        pts = project_landmarks(sc, pose, aspect=1.0)
        assert len(pts) == 1
        assert pts[0][1] == 1.0
        assert pts[0][0] == pytest.approx((0.5, 0.5))


class TestScoreImage:
    def test_uniform_midgray_closed_form(self):
        frame = uniform_frame(127.5)
        s = score_image(frame, [])
        assert s.exposure == pytest.approx(1.0, abs=1e-12)
        assert s.contrast == pytest.approx(0.0, abs=1e-12)
        assert s.colorfulness == pytest.approx(0.0, abs=1e-12)
        assert s.thirds == 0.5
        assert s.q_i == pytest.approx(0.375, abs=1e-9)

    def test_uniform_black_closed_form(self):
        s = score_image(uniform_frame(0), [])
        expected_exposure = math.exp(-0.25 / (2 * 0.18 ** 2))
        assert s.exposure == pytest.approx(expected_exposure, abs=1e-12)
        assert s.q_i == pytest.approx(0.25 * (expected_exposure + 0.5),
                                      abs=1e-9)

    def test_salient_on_thirds_point(self):
        s = score_image(uniform_frame(127.5), [((1 / 3, 1 / 3), 1.0)])
        assert s.thirds == pytest.approx(1.0, abs=1e-12)

    def test_centered_subject_scores_low_thirds(self):
        s = score_image(uniform_frame(127.5), [((0.5, 0.5), 1.0)])
        d = math.hypot(0.5 - 1 / 3, 0.5 - 1 / 3)
        assert s.thirds == pytest.approx(math.exp(-d ** 2 / 0.02), abs=1e-12)

    def test_weighted_centroid(self):
        salient = [((0.2, 0.4), 3.0), ((0.6, 0.4), 1.0)]
        s = score_image(uniform_frame(127.5), salient)
        cx = (0.2 * 3 + 0.6 * 1) / 4.0
        d = min(math.hypot(cx - tx, 0.4 - ty)
                for tx in (1 / 3, 2 / 3) for ty in (1 / 3, 2 / 3))
        assert s.thirds == pytest.approx(math.exp(-d ** 2 / 0.02), abs=1e-12)

    def test_horizontal_flip_invariance(self):
        rng = np.random.default_rng(5)
        px = rng.integers(0, 256, (18, 32, 3)).astype(np.uint8)
        frame = uniform_frame(0)
        frame.pixels = px
        flipped = uniform_frame(0)
        flipped.pixels = px[:, ::-1, :]
        salient = [((0.2, 0.3), 1.0), ((0.7, 0.6), 0.5)]
        mirrored = [((1 - x, y), w) for (x, y), w in salient]
        a = score_image(frame, salient)
        b = score_image(flipped, mirrored)
        assert a.q_i == pytest.approx(b.q_i, abs=1e-12)


class TestScoreVideo:
    def test_static_smoothness_exactly_one(self, plain_scene):
        pose = CameraPose((0.0, 0.0, 5.0), 10.0, 0.0)
        s = score_video([pose] * 8, plain_scene)
        assert s.translational_smoothness == 1.0
        assert s.rotational_smoothness == 1.0
        assert s.framing_persistence == 1.0
        assert s.q_v == 1.0

    def test_constant_velocity_translation_smooth(self, plain_scene):
        poses = [CameraPose((0.5 * i, 0.0, 5.0), 0.0, 0.0) for i in range(9)]
        s = score_video(poses, plain_scene)
        assert s.translational_smoothness == pytest.approx(1.0, abs=1e-9)

    def test_jittered_path_scores_lower(self, plain_scene):
        rng = np.random.default_rng(3)
        clean = [CameraPose((0.5 * i, 0.0, 5.0), 2.0 * i, 0.0)
                 for i in range(12)]
        jittered = [
            CameraPose((0.5 * i + rng.normal(0, 0.2),
                        rng.normal(0, 0.2), 5.0),
                       2.0 * i + rng.normal(0, 1.0), 0.0)
            for i in range(12)
        ]
        assert score_video(jittered, plain_scene).q_v \
            < score_video(clean, plain_scene).q_v

    def test_requires_three_poses(self, plain_scene):
        pose = CameraPose((0.0, 0.0, 5.0), 0.0, 0.0)
        with pytest.raises(ValueError):
            score_video([pose, pose], plain_scene)

    def test_framing_persistence_counts_landmark(self, scene):
        # aimed at the landmark vs aimed away
        toward = CameraPose((0.0, 0.0, 8.0), 0.0, 0.0)
        away = CameraPose((0.0, 0.0, 8.0), 180.0, 0.0)
        s_t = score_video([toward] * 5, scene)
        s_a = score_video([away] * 5, scene)
        assert s_t.framing_persistence == 1.0
        assert s_a.framing_persistence == 0.0


class TestScoreTimelapse:
    def test_constant_sequence_closed_form(self):
        seq = uniform_sequence([100] * 8)
        s = score_timelapse(seq)
        assert s.light_dynamism == 0.0
        assert s.pixel_dynamism == 0.0
        assert s.flicker_penalty == pytest.approx(0.0, abs=1e-9)
        assert s.q_t == pytest.approx(0.5, abs=1e-9)

    def test_linear_ramp_no_flicker(self):
        seq = uniform_sequence(np.linspace(40, 200, 15))
        s = score_timelapse(seq)
        assert s.flicker_penalty == pytest.approx(0.0, abs=1e-9)
        assert s.light_dynamism > 0.5

    def test_alternating_means_max_flicker(self):
        seq = uniform_sequence([102, 153] * 6)  # luma 0.4 / 0.6
        mu = mean_luma_series(seq.frames)
        sm = smooth_series(mu, 5)
        inner = slice(2, len(mu) - 2)
        f = float(np.mean(np.abs(mu[inner] - sm[inner])))
        # hand computation: window mix of 3:2 gives means 0.48/0.52,
        # deviation 0.08 everywhere
        assert f == pytest.approx(0.08, abs=1e-9)
        assert score_timelapse(seq).flicker_penalty == 1.0

    def test_requires_five_frames(self):
        with pytest.raises(ValueError):
            score_timelapse(uniform_sequence([10, 20, 30, 40]))

    def test_moving_scene_pixel_dynamism(self, scene):
        params = simple_params(scene, start=utc(2024, 6, 21, 15, 0),
                               end=utc(2024, 6, 21, 16, 0), interval_s=300.0)
        from chronolapse.render import probe_settings
        seq = render_sequence(scene, params, probe_settings(64, 36))
        s = score_timelapse(seq)
        assert s.pixel_dynamism > 0.0


class TestAssess:
    def test_identical_midgray_static_closed_form(self, plain_scene):
        pose = CameraPose((0.0, 0.0, 5.0), 0.0, 0.0)
        seq = uniform_sequence([127.5] * 7, pose=pose)
        q = assess(seq, plain_scene)
        assert q.q_i == pytest.approx(0.375, abs=1e-9)
        assert q.q_v == pytest.approx(1.0, abs=1e-12)
        assert q.q_t == pytest.approx(0.5, abs=1e-9)
        assert q.total == pytest.approx((0.375 + 1.0 + 0.5) / 3, abs=1e-9)

    def test_total_invariant(self, scene):
        params = simple_params(scene, start=utc(2024, 6, 21, 15, 0),
                               end=utc(2024, 6, 21, 16, 0), interval_s=300.0)
        from chronolapse.render import probe_settings
        seq = render_sequence(scene, params, probe_settings(48, 27))
        q = assess(seq, scene)
        assert q.total == pytest.approx((q.q_i + q.q_v + q.q_t) / 3,
                                        abs=1e-12)
        for v in (q.q_i, q.q_v, q.q_t, q.total):
            assert 0.0 <= v <= 1.0

    def test_deterministic(self, scene):
        params = simple_params(scene, start=utc(2024, 6, 21, 15, 0),
                               end=utc(2024, 6, 21, 15, 30), interval_s=300.0)
        from chronolapse.render import probe_settings
        seq = render_sequence(scene, params, probe_settings(48, 27))
        a = assess_report(seq, scene)
        b = assess_report(seq, scene)
        assert a["score"] == b["score"]

    def test_all_components_in_unit_range(self, scene):
        rng = np.random.default_rng(31)
        for _ in range(20):
            frame = uniform_frame(0)
            frame.pixels = rng.integers(0, 256, (18, 32, 3)).astype(np.uint8)
            salient = [((float(rng.uniform()), float(rng.uniform())), 1.0)] \
                if rng.uniform() < 0.5 else []
            s = score_image(frame, salient)
            for v in (s.exposure, s.contrast, s.colorfulness, s.thirds,
                      s.q_i):
                assert 0.0 <= v <= 1.0
        for _ in range(10):
            poses = [CameraPose((float(rng.uniform(-20, 20)),
                                 float(rng.uniform(-20, 20)),
                                 float(rng.uniform(1, 20))),
                                float(rng.uniform(-360, 360)),
                                float(rng.uniform(-80, 80)))
                     for _ in range(int(rng.integers(3, 10)))]
            v = score_video(poses, scene)
            for x in (v.translational_smoothness, v.rotational_smoothness,
                      v.framing_persistence, v.q_v):
                assert 0.0 <= x <= 1.0
        for _ in range(10):
            seq = uniform_sequence(rng.integers(0, 256,
                                                int(rng.integers(5, 15))))
            t = score_timelapse(seq)
            for x in (t.light_dynamism, t.pixel_dynamism, t.flicker_penalty,
                      t.q_t):
                assert 0.0 <= x <= 1.0

    def test_jitter_never_decreases_flicker_penalty(self, scene):
        params = simple_params(scene, start=utc(2024, 6, 21, 15, 0),
                               end=utc(2024, 6, 21, 15, 30), interval_s=120.0)
        for seed in (1, 2):
            clean = render_sequence(
                scene, params,
                RenderSettings(width=48, height=27,
                               exposure=ExposureAuto(0.0), seed=seed))
            jittered = render_sequence(
                scene, params,
                RenderSettings(width=48, height=27,
                               exposure=ExposureAuto(0.12), seed=seed))
            assert score_timelapse(jittered).flicker_penalty >= \
                score_timelapse(clean).flicker_penalty
