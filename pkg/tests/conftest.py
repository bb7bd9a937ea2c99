import json
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from chronolapse.params import (CameraPath, ShootingParameters,
                                TimeWarpParams, ViewfinderParams)
from chronolapse.render import Frame, FrameSequence
from chronolapse.params import CameraPose
from chronolapse.scene import load_scene


def utc(*args):
    return datetime(*args, tzinfo=timezone.utc)


BASE_SCENE = {
    "name": "testbed",
    "georef": {"lat0": 40.0, "lon0": -74.0, "alt0": 10.0, "heading_deg": 0.0},
    "ground": {"kind": "flat", "albedo": 0.3},
    "solids": [
        {"center": [60.0, 0.0, 12.5], "size": [10.0, 10.0, 25.0],
         "albedo": [0.7, 0.6, 0.5], "landmark": 1.0},
        {"center": [40.0, 25.0, 4.0], "size": [14.0, 8.0, 8.0],
         "albedo": [0.6, 0.3, 0.3]},
    ],
    "reachable": {"rects": [{"xmin": -40.0, "xmax": 20.0,
                             "ymin": -40.0, "ymax": 40.0}],
                  "height_range": [1.5, 30.0]},
    "agents": [
        {"kind": "person",
         "polyline": [[20.0, -15.0], [45.0, -15.0], [45.0, 15.0],
                      [20.0, 15.0], [20.0, -15.0]],
         "speed": 1.4, "count": 3, "phase_spread": 1.0},
    ],
    "sky": {"day_zenith": [0.35, 0.55, 0.85],
            "night_zenith": [0.01, 0.015, 0.04], "haze": 0.3},
}


def make_scene(**overrides):
    doc = json.loads(json.dumps(BASE_SCENE))
    doc.update(overrides)
    return load_scene(json.dumps(doc))


@pytest.fixture(scope="session")
def scene():
    return make_scene()


@pytest.fixture(scope="session")
def plain_scene():
    """Flat ground, no solids, no agents: every viewpoint looks the same."""
    return make_scene(name="plain", solids=[], agents=[])


def uniform_frame(value, width=32, height=18, t=None, pose=None,
                  dtype=np.float64):
    """Single-color frame; float values allowed for closed-form tests."""
    px = np.full((height, width, 3), value, dtype=dtype)
    return Frame(width=width, height=height, pixels=px,
                 timestamp=t or utc(2024, 6, 21, 12, 0),
                 pose=pose or CameraPose((0.0, 0.0, 5.0), 0.0, 0.0),
                 pre_gain_mean_luminance=0.5)


def uniform_sequence(values, width=32, height=18, interval_s=30.0,
                     pose=None):
    t0 = utc(2024, 6, 21, 12, 0)
    frames = [
        uniform_frame(v, width, height,
                      t=t0 + timedelta(seconds=i * interval_s), pose=pose)
        for i, v in enumerate(values)
    ]
    return FrameSequence(frames=frames)


def simple_params(scene, mode="static", amplitude=0.0,
                  start=None, end=None, interval_s=60.0, pivot=None):
    vf = ViewfinderParams((0.0, 0.0, 5.0), 0.0, 0.0)
    path = CameraPath(mode, amplitude, vf, pivot)
    tw = TimeWarpParams(start or utc(2024, 6, 21, 14, 0),
                        end or utc(2024, 6, 21, 15, 0), interval_s)
    return ShootingParameters(vf, path, tw)
