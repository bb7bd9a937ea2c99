#!/usr/bin/env python3
"""Regenerate the packaged demo scenes and the default search space.

The five evaluation scenes differ in latitude, heading, sky and layout; one
uses heightfield terrain. Re-running this script must reproduce the shipped
files byte for byte.
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from chronolapse.optimize import SearchSpace, space_to_dict  # noqa: E402
from chronolapse.scene import load_scene, serialize_scene  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "chronolapse",
                   "data")


def ring(cx, cy, r, n=8):
    pts = [[round(cx + r * math.cos(2 * math.pi * i / n), 2),
            round(cy + r * math.sin(2 * math.pi * i / n), 2)]
           for i in range(n)]
    return pts + [pts[0]]


def hills(rows, cols, amp, base, kx, ky):
    return [[round(base + amp * math.sin(kx * j) * math.cos(ky * i), 3)
             for j in range(cols)] for i in range(rows)]


SCENES = {
    "riverside": {
        "name": "riverside",
        "georef": {"lat0": 40.7, "lon0": -74.0, "alt0": 5.0,
                   "heading_deg": 0.0},
        "ground": {"kind": "flat", "albedo": 0.28},
        "solids": [
            {"center": [70.0, 10.0, 16.0], "size": [12.0, 12.0, 32.0],
             "albedo": [0.75, 0.65, 0.5], "landmark": 1.0},
            {"center": [45.0, -30.0, 5.0], "size": [18.0, 10.0, 10.0],
             "albedo": [0.55, 0.3, 0.25]},
            {"center": [50.0, 45.0, 7.0], "size": [10.0, 16.0, 14.0],
             "albedo": [0.4, 0.45, 0.5]},
            {"center": [90.0, -15.0, 9.0], "size": [14.0, 14.0, 18.0],
             "albedo": [0.5, 0.5, 0.55], "landmark": 0.4},
        ],
        "reachable": {
            "rects": [{"xmin": -50.0, "xmax": 25.0,
                       "ymin": -45.0, "ymax": 45.0}],
            "height_range": [1.5, 28.0]},
        "agents": [
            {"kind": "person", "polyline": ring(45.0, 5.0, 22.0),
             "speed": 1.4, "count": 4, "phase_spread": 1.0},
            {"kind": "vehicle",
             "polyline": [[20.0, -60.0], [20.0, 60.0], [28.0, 60.0],
                          [28.0, -60.0], [20.0, -60.0]],
             "speed": 9.0, "count": 2, "phase_spread": 1.0},
        ],
        "sky": {"day_zenith": [0.32, 0.52, 0.85],
                "night_zenith": [0.01, 0.015, 0.04], "haze": 0.35},
    },
    "plaza": {
        "name": "plaza",
        "georef": {"lat0": 48.85, "lon0": 2.35, "alt0": 35.0,
                   "heading_deg": 90.0},
        "ground": {"kind": "flat", "albedo": 0.33},
        "solids": [
            {"center": [0.0, -65.0, 22.0], "size": [14.0, 14.0, 44.0],
             "albedo": [0.8, 0.72, 0.6], "landmark": 1.0},
            {"center": [35.0, -40.0, 6.0], "size": [20.0, 12.0, 12.0],
             "albedo": [0.6, 0.55, 0.45]},
            {"center": [-35.0, -45.0, 8.0], "size": [12.0, 18.0, 16.0],
             "albedo": [0.5, 0.4, 0.35]},
        ],
        "reachable": {
            "rects": [{"xmin": -45.0, "xmax": 45.0,
                       "ymin": -15.0, "ymax": 55.0}],
            "height_range": [1.5, 24.0]},
        "agents": [
            {"kind": "person", "polyline": ring(0.0, -35.0, 18.0),
             "speed": 1.2, "count": 6, "phase_spread": 1.0},
        ],
        "sky": {"day_zenith": [0.36, 0.55, 0.82],
                "night_zenith": [0.012, 0.02, 0.05], "haze": 0.45},
    },
    "overlook": {
        "name": "overlook",
        "georef": {"lat0": 35.68, "lon0": 139.75, "alt0": 120.0,
                   "heading_deg": 45.0},
        "ground": {"kind": "heightfield",
                   "origin": [-150.0, -150.0], "cell_size": 12.5,
                   "elevations": hills(25, 25, 4.0, 2.0, 0.55, 0.4),
                   "albedo": 0.3},
        "solids": [
            {"center": [55.0, 55.0, 20.0], "size": [10.0, 10.0, 36.0],
             "albedo": [0.7, 0.6, 0.55], "landmark": 1.0},
            {"center": [80.0, 20.0, 8.0], "size": [16.0, 10.0, 12.0],
             "albedo": [0.45, 0.5, 0.4]},
        ],
        "reachable": {
            "rects": [{"xmin": -70.0, "xmax": 10.0,
                       "ymin": -70.0, "ymax": 10.0}],
            "height_range": [8.0, 40.0]},
        "agents": [
            {"kind": "vehicle",
             "polyline": [[-20.0, 90.0], [90.0, -20.0], [100.0, -10.0],
                          [-10.0, 100.0], [-20.0, 90.0]],
             "speed": 7.0, "count": 2, "phase_spread": 1.0},
        ],
        "sky": {"day_zenith": [0.3, 0.5, 0.8],
                "night_zenith": [0.008, 0.012, 0.035], "haze": 0.5},
    },
    "harbor": {
        "name": "harbor",
        "georef": {"lat0": -33.86, "lon0": 151.2, "alt0": 8.0,
                   "heading_deg": 270.0},
        "ground": {"kind": "flat", "albedo": 0.22},
        "solids": [
            {"center": [-75.0, -20.0, 14.0], "size": [26.0, 12.0, 28.0],
             "albedo": [0.85, 0.85, 0.8], "landmark": 1.0},
            {"center": [-50.0, 25.0, 5.0], "size": [12.0, 20.0, 10.0],
             "albedo": [0.35, 0.4, 0.5]},
            {"center": [-95.0, 15.0, 10.0], "size": [10.0, 10.0, 20.0],
             "albedo": [0.55, 0.45, 0.4], "landmark": 0.5},
            {"center": [-60.0, -50.0, 4.0], "size": [30.0, 8.0, 8.0],
             "albedo": [0.45, 0.3, 0.3]},
        ],
        "reachable": {
            "rects": [{"xmin": -25.0, "xmax": 55.0,
                       "ymin": -50.0, "ymax": 50.0}],
            "height_range": [2.0, 35.0]},
        "agents": [
            {"kind": "person", "polyline": ring(-45.0, -10.0, 16.0),
             "speed": 1.5, "count": 3, "phase_spread": 1.0},
            {"kind": "vehicle",
             "polyline": [[-20.0, -70.0], [-20.0, 70.0], [-12.0, 70.0],
                          [-12.0, -70.0], [-20.0, -70.0]],
             "speed": 8.0, "count": 3, "phase_spread": 1.0},
        ],
        "sky": {"day_zenith": [0.34, 0.56, 0.88],
                "night_zenith": [0.01, 0.018, 0.045], "haze": 0.3},
    },
    "courtyard": {
        "name": "courtyard",
        "georef": {"lat0": 25.26, "lon0": 55.3, "alt0": 15.0,
                   "heading_deg": 180.0},
        "ground": {"kind": "flat", "albedo": 0.4},
        "solids": [
            {"center": [0.0, 70.0, 25.0], "size": [16.0, 16.0, 50.0],
             "albedo": [0.78, 0.7, 0.58], "landmark": 1.0},
            {"center": [40.0, 50.0, 10.0], "size": [14.0, 14.0, 20.0],
             "albedo": [0.65, 0.55, 0.45]},
            {"center": [-40.0, 55.0, 7.0], "size": [18.0, 10.0, 14.0],
             "albedo": [0.5, 0.45, 0.4]},
            {"center": [0.0, 40.0, 3.0], "size": [8.0, 8.0, 6.0],
             "albedo": [0.3, 0.5, 0.35]},
        ],
        "reachable": {
            "rects": [{"xmin": -55.0, "xmax": 55.0,
                       "ymin": -60.0, "ymax": 20.0}],
            "height_range": [1.5, 30.0]},
        "agents": [
            {"kind": "person", "polyline": ring(0.0, 35.0, 20.0),
             "speed": 1.3, "count": 5, "phase_spread": 1.0},
        ],
        "sky": {"day_zenith": [0.38, 0.55, 0.8],
                "night_zenith": [0.015, 0.02, 0.05], "haze": 0.55},
    },
}

# the tutorial scene is the riverside layout under a friendlier name
TUTORIAL = dict(SCENES["riverside"], name="tutorial")


def main():
    scenes_dir = os.path.join(OUT, "scenes")
    os.makedirs(scenes_dir, exist_ok=True)
    for name, doc in list(SCENES.items()) + [("tutorial", TUTORIAL)]:
        text = serialize_scene(load_scene(json.dumps(doc)))
        path = os.path.join(scenes_dir, f"{name}.json")
        with open(path, "w") as fh:
            fh.write(text)
        print("wrote", path)
    space_path = os.path.join(OUT, "default_space.json")
    with open(space_path, "w") as fh:
        json.dump(space_to_dict(SearchSpace()), fh, indent=2)
        fh.write("\n")
    print("wrote", space_path)


if __name__ == "__main__":
    main()
