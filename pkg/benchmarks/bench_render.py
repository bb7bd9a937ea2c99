#!/usr/bin/env python3
"""Benchmark the compiled ray-cast kernel against the numpy fallback.

Renders the packaged riverside scene at probe and output resolutions with
both backends, checks they agree pixel for pixel, and prints a timing
table. Run after `pip install -e . --no-build-isolation`.
"""

import argparse
import time
from importlib import resources

import numpy as np

import chronolapse.render as render_mod
from chronolapse._kernels import get_backend
from chronolapse.params import CameraPose
from chronolapse.render import ExposureManual, RenderSettings, render_frame
from chronolapse.scene import load_scene

from datetime import datetime, timezone

POSE = CameraPose((0.0, -10.0, 9.0), 35.0, -4.0)
WHEN = datetime(2024, 6, 21, 16, 30, tzinfo=timezone.utc)


def bench(scene, backend_name, width, height, repeats):
    settings = RenderSettings(width=width, height=height,
                              exposure=ExposureManual(1.0), shadows=True,
                              seed=0)
    original = render_mod.render_linear
    render_mod.render_linear = get_backend(backend_name).render_linear
    try:
        frame = render_frame(scene, POSE, WHEN, settings)  # warm-up
        t0 = time.perf_counter()
        for _ in range(repeats):
            render_frame(scene, POSE, WHEN, settings)
        dt = (time.perf_counter() - t0) / repeats
    finally:
        render_mod.render_linear = original
    return dt, frame


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--scene", default="riverside")
    args = ap.parse_args()

    text = (resources.files("chronolapse")
            / f"data/scenes/{args.scene}.json").read_text()
    scene = load_scene(text)

    backends = ["python"]
    try:
        get_backend("cython")
        backends.append("cython")
    except ImportError:
        print("compiled kernel not built; benchmarking the fallback only")

    sizes = [(96, 54), (320, 180), (640, 360)]
    print(f"scene={args.scene} repeats={args.repeats}")
    print(f"{'size':>10} " + "".join(f"{b:>14}" for b in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for w, h in sizes:
        times = {}
        frames = {}
        for b in backends:
            reps = args.repeats if (w, h) == sizes[0] or b == "cython" \
                else max(3, args.repeats // 4)
            times[b], frames[b] = bench(scene, b, w, h, reps)
        if len(backends) == 2:
            assert np.array_equal(frames["python"].pixels,
                                  frames["cython"].pixels), \
                "backends disagree"
            ratio = times["python"] / times["cython"]
            extra = f"   {ratio:7.1f}x"
        else:
            extra = ""
        cells = "".join(f"{times[b] * 1000:11.2f} ms" for b in backends)
        print(f"{w:>5}x{h:<4} {cells}{extra}")
    if len(backends) == 2:
        print("pixel-exact agreement between backends verified")


if __name__ == "__main__":
    main()
