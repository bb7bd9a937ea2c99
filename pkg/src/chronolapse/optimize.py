"""Staged search over shooting parameters.

The three parameter groups are optimized in order: viewfinder first (best
single-frame composition), then the camera move (smoothness plus framing,
with a small image guard so sweeps do not wander off the subject), then the
time warp (most rewarding capture window and interval within the frame
budget). Every stage is an exhaustive scan over an explicit candidate list
with a fixed tie rule, so an independent brute-force pass must reproduce
each pick exactly.

Probes render small, with manual unit gain and jitter disabled: metering
would erase exactly the illumination differences the scorers look for.
"""

import json
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta, timezone

import numpy as np

from .aesthetics import (QualityScore, assess_report, project_landmarks,
                         score_image, score_timelapse, score_video)
from .params import (CameraPath, ShootingParameters, TimeWarpParams,
                     ViewfinderParams)
from .render import FrameSequence, probe_settings, render_frame
from .scene import Rect, ReachableRegion, SceneDescription, daylight_window

PATH_SAMPLES = 16          # poses scored per path candidate
PATH_IMAGE_WEIGHT = 0.25   # weight of the image guard in the path stage
IMAGE_PROBES_DEFAULT = 3


class SearchSpaceError(ValueError):
    """Invalid search space definition."""


@dataclass(frozen=True)
class SearchSpace:
    grid_nx: int = 3
    grid_ny: int = 3
    grid_nz: int = 2
    yaw_deg: tuple = (0.0, 60.0, 120.0, 180.0, 240.0, 300.0)
    pitch_deg: tuple = (-10.0, 0.0, 10.0)
    modes: tuple = ("static", "pan", "truck", "orbit")
    amplitudes: dict = field(default_factory=lambda: {
        "static": (0.0,), "pan": (10.0, 25.0, 45.0),
        "truck": (2.0, 5.0, 10.0), "orbit": (15.0, 30.0, 60.0)})
    start_hours: tuple = (5.0, 8.0, 11.0, 14.0, 17.0, 20.0)
    duration_hours: tuple = (1.0, 2.0, 3.0)
    interval_s: tuple = (20.0, 30.0, 60.0)
    frame_budget: tuple = (120, 600)
    reference_date: str = "2024-06-21"
    probe_width: int = 96
    probe_height: int = 54
    probe_timestamps: int = IMAGE_PROBES_DEFAULT
    probe_seq_frames: int | None = 40

    def validate(self):
        for name in ("grid_nx", "grid_ny", "grid_nz"):
            if getattr(self, name) < 1:
                raise SearchSpaceError(f"{name}: must be >= 1")
        for name in ("yaw_deg", "pitch_deg", "modes", "start_hours",
                     "duration_hours", "interval_s"):
            if not getattr(self, name):
                raise SearchSpaceError(f"{name}: candidate list is empty")
        for m in self.modes:
            if m not in ("static", "pan", "truck", "orbit"):
                raise SearchSpaceError(f"modes: unknown mode {m!r}")
            if not self.amplitudes.get(m):
                raise SearchSpaceError(f"amplitudes[{m!r}]: list is empty")
        if self.frame_budget[0] > self.frame_budget[1] \
                or self.frame_budget[0] < 1:
            raise SearchSpaceError("frame_budget: need 1 <= min <= max")
        if self.probe_timestamps < 1:
            raise SearchSpaceError("probe_timestamps: must be >= 1")
        if self.probe_seq_frames is not None and self.probe_seq_frames < 5:
            raise SearchSpaceError(
                "probe.sequence_frames: need >= 5 frames to score a probe "
                "sequence (or null for no cap)")
        return self

    def reference_day(self) -> datetime:
        d = datetime.fromisoformat(self.reference_date)
        return d.replace(tzinfo=timezone.utc)


def space_to_dict(s: SearchSpace) -> dict:
    return {
        "location_grid": {"nx": s.grid_nx, "ny": s.grid_ny, "nz": s.grid_nz},
        "yaw_deg": list(s.yaw_deg),
        "pitch_deg": list(s.pitch_deg),
        "modes": list(s.modes),
        "amplitudes": {k: list(v) for k, v in s.amplitudes.items()},
        "start_hours": list(s.start_hours),
        "duration_hours": list(s.duration_hours),
        "interval_s": list(s.interval_s),
        "frame_budget": list(s.frame_budget),
        "reference_date": s.reference_date,
        "probe": {"width": s.probe_width, "height": s.probe_height,
                  "timestamps": s.probe_timestamps,
                  "sequence_frames": s.probe_seq_frames},
    }


def space_from_dict(doc: dict) -> SearchSpace:
    try:
        grid = doc.get("location_grid", {})
        probe = doc.get("probe", {})
        amplitudes = {k: tuple(float(a) for a in v)
                      for k, v in doc.get("amplitudes", {}).items()}
        defaults = SearchSpace()
        space = SearchSpace(
            grid_nx=int(grid.get("nx", defaults.grid_nx)),
            grid_ny=int(grid.get("ny", defaults.grid_ny)),
            grid_nz=int(grid.get("nz", defaults.grid_nz)),
            yaw_deg=tuple(float(v) for v in
                          doc.get("yaw_deg", defaults.yaw_deg)),
            pitch_deg=tuple(float(v) for v in
                            doc.get("pitch_deg", defaults.pitch_deg)),
            modes=tuple(doc.get("modes", defaults.modes)),
            amplitudes=amplitudes or dict(defaults.amplitudes),
            start_hours=tuple(float(v) for v in
                              doc.get("start_hours", defaults.start_hours)),
            duration_hours=tuple(
                float(v) for v in
                doc.get("duration_hours", defaults.duration_hours)),
            interval_s=tuple(float(v) for v in
                             doc.get("interval_s", defaults.interval_s)),
            frame_budget=tuple(int(v) for v in
                               doc.get("frame_budget", defaults.frame_budget)),
            reference_date=str(doc.get("reference_date",
                                       defaults.reference_date)),
            probe_width=int(probe.get("width", defaults.probe_width)),
            probe_height=int(probe.get("height", defaults.probe_height)),
            probe_timestamps=int(probe.get("timestamps",
                                           defaults.probe_timestamps)),
            probe_seq_frames=(None if probe.get("sequence_frames") is None
                              else int(probe["sequence_frames"]))
            if "sequence_frames" in probe else defaults.probe_seq_frames,
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise SearchSpaceError(f"malformed search space: {exc}") from exc
    return space.validate()


def load_space(text: str) -> SearchSpace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SearchSpaceError(
            f"search space file is not valid JSON: {exc}") from exc
    return space_from_dict(doc)


def serialize_space(space: SearchSpace) -> str:
    return json.dumps(space_to_dict(space), indent=2) + "\n"


# ---------------------------------------------------------------------------
# candidate enumeration (flat order defines the tie rule)

def _axis_points(lo: float, hi: float, n: int):
    if n == 1:
        return [0.5 * (lo + hi)]
    return list(np.linspace(lo, hi, n))


def location_candidates(scene: SceneDescription, space: SearchSpace):
    pts = []
    lo, hi = scene.reachable.height_range
    for rect in scene.reachable.rects:
        xs = _axis_points(rect.xmin, rect.xmax, space.grid_nx)
        ys = _axis_points(rect.ymin, rect.ymax, space.grid_ny)
        zs = _axis_points(lo, hi, space.grid_nz)
        for x in xs:
            for y in ys:
                for z in zs:
                    pts.append((float(x), float(y), float(z)))
    return pts


def viewfinder_candidates(scene: SceneDescription, space: SearchSpace):
    """Location-major, then yaw, then pitch; index order is the tie rule."""
    out = []
    for loc in location_candidates(scene, space):
        for yaw in space.yaw_deg:
            for pitch in space.pitch_deg:
                out.append(ViewfinderParams(loc, float(yaw), float(pitch)))
    return out


def path_candidates(scene: SceneDescription, vf: ViewfinderParams,
                    space: SearchSpace):
    """Mode-major then amplitude. Orbit needs a landmark pivot and is
    excluded in scenes without one."""
    lm = scene.highest_landmark()
    out = []
    for mode in space.modes:
        if mode == "orbit" and lm is None:
            continue
        pivot = (lm.center[0], lm.center[1]) if mode == "orbit" else None
        for amp in space.amplitudes[mode]:
            out.append(CameraPath(mode=mode, amplitude=float(amp), base=vf,
                                  pivot=pivot))
    return out


def timewarp_candidates(scene: SceneDescription, space: SearchSpace):
    """Start-hour-major, then duration, then interval; budget-filtered."""
    base = space.reference_day()
    lon = scene.georef.lon0
    lo, hi = space.frame_budget
    out = []
    for sh in space.start_hours:
        start = base + timedelta(hours=float(sh) - lon / 15.0)
        for dur in space.duration_hours:
            end = start + timedelta(hours=float(dur))
            for iv in space.interval_s:
                tw = TimeWarpParams(start, end, float(iv))
                if lo <= tw.frame_count() <= hi:
                    out.append(tw)
    return out


def probe_times(scene: SceneDescription, space: SearchSpace):
    """Image-probe timestamps spread across the reference day's daylight."""
    sr, ss = daylight_window(scene.georef, space.reference_day())
    n = space.probe_timestamps
    return [sr + (ss - sr) * ((i + 1) / (n + 1)) for i in range(n)]


def _argmax_first(scores):
    """Index of the max score; ties go to the smallest index."""
    best_i = 0
    best_s = scores[0]
    for i, s in enumerate(scores[1:], start=1):
        if s > best_s:
            best_i, best_s = i, s
    return best_i, best_s


def _score_all(fn, candidates, workers, progress_cb, stage):
    """Evaluate every candidate, optionally across threads.

    Scores come back in candidate order whatever the completion order, so
    the argmax (score, then smallest flat index) never depends on
    scheduling. The compiled kernel releases the GIL, so threads help.
    """
    if workers <= 1:
        scores = []
        for i, c in enumerate(candidates):
            scores.append(fn(c))
            if progress_cb is not None:
                progress_cb(stage, i + 1, len(candidates))
        return scores
    from concurrent.futures import ThreadPoolExecutor
    with ThreadPoolExecutor(max_workers=workers) as pool:
        scores = []
        for i, s in enumerate(pool.map(fn, candidates)):
            scores.append(s)
            if progress_cb is not None:
                progress_cb(stage, i + 1, len(candidates))
    return scores


# ---------------------------------------------------------------------------
# stage scoring

def viewfinder_score(scene: SceneDescription, vf: ViewfinderParams,
                     space: SearchSpace, times=None) -> float:
    """Mean image quality of probe frames at the daylight timestamps."""
    if times is None:
        times = probe_times(scene, space)
    settings = probe_settings(space.probe_width, space.probe_height)
    aspect = space.probe_width / space.probe_height
    pose = vf.pose()
    total = 0.0
    for t in times:
        frame = render_frame(scene, pose, t, settings)
        salient = project_landmarks(scene, pose, aspect)
        total += score_image(frame, salient).q_i
    return total / len(times)


def path_score(scene: SceneDescription, path: CameraPath,
               space: SearchSpace, times=None) -> float:
    """Video quality over sampled poses plus a weighted image guard."""
    if times is None:
        times = probe_times(scene, space)
    poses = [path.pose_at(i / (PATH_SAMPLES - 1)) for i in range(PATH_SAMPLES)]
    aspect = space.probe_width / space.probe_height
    q_v = score_video(poses, scene, aspect).q_v
    settings = probe_settings(space.probe_width, space.probe_height)
    guards = ((times[0], 0.0), (times[len(times) // 2], 0.5), (times[-1], 1.0))
    total_qi = 0.0
    for t, u in guards:
        pose = path.pose_at(u)
        frame = render_frame(scene, pose, t, settings)
        salient = project_landmarks(scene, pose, aspect)
        total_qi += score_image(frame, salient).q_i
    return q_v + PATH_IMAGE_WEIGHT * (total_qi / len(guards))


def probe_sequence(scene: SceneDescription, params: ShootingParameters,
                   space: SearchSpace) -> FrameSequence:
    """Low-resolution jitter-free render of a plan, frame count capped.

    Subsampled frames keep their true timestamps and path progress so the
    probe sees the same window and framing the full render would.
    """
    times = params.timewarp.frame_times()
    count = len(times)
    indices = range(count)
    cap = space.probe_seq_frames
    if cap is not None and count > cap:
        indices = sorted(set(
            int(round(i)) for i in np.linspace(0, count - 1, cap)))
    settings = probe_settings(space.probe_width, space.probe_height)
    frames = []
    for k in indices:
        u = k / max(1, count - 1)
        pose = params.path.pose_at(u)
        frames.append(render_frame(scene, pose, times[k], settings))
    return FrameSequence(frames=frames, params=params).validate()


def timewarp_score(scene: SceneDescription, vf: ViewfinderParams,
                   path: CameraPath, tw: TimeWarpParams,
                   space: SearchSpace) -> float:
    params = ShootingParameters(vf, path, tw)
    seq = probe_sequence(scene, params, space)
    return score_timelapse(seq).q_t


# ---------------------------------------------------------------------------
# stages

@dataclass(frozen=True)
class StageReport:
    name: str
    candidates: int
    best_index: int
    best_score: float


@dataclass
class OptimizationReport:
    stages: list
    total_evaluations: int
    wall_time_s: float
    params: ShootingParameters
    score: QualityScore
    seed: int


def optimize_viewfinder(scene: SceneDescription, space: SearchSpace,
                        progress_cb=None, workers: int = 1):
    """Exhaustive scan of location x yaw x pitch; returns (params, score)."""
    space.validate()
    cands = viewfinder_candidates(scene, space)
    if not cands:
        raise ValueError("optimize_viewfinder: no reachable grid point")
    times = probe_times(scene, space)
    scores = _score_all(
        lambda vf: viewfinder_score(scene, vf, space, times),
        cands, workers, progress_cb, "image")
    best_i, best_s = _argmax_first(scores)
    return cands[best_i], best_s


def optimize_path(scene: SceneDescription, vf: ViewfinderParams,
                  space: SearchSpace, progress_cb=None, workers: int = 1):
    space.validate()
    cands = path_candidates(scene, vf, space)
    if not cands:
        raise ValueError("optimize_path: no usable path candidates "
                         "(orbit requires a landmark)")
    times = probe_times(scene, space)
    scores = _score_all(
        lambda p: path_score(scene, p, space, times),
        cands, workers, progress_cb, "video")
    best_i, best_s = _argmax_first(scores)
    return cands[best_i], best_s


def optimize_timewarp(scene: SceneDescription, vf: ViewfinderParams,
                      path: CameraPath, space: SearchSpace,
                      progress_cb=None, workers: int = 1):
    space.validate()
    cands = timewarp_candidates(scene, space)
    if not cands:
        raise ValueError(
            "optimize_timewarp: no candidate fits the frame budget")
    scores = _score_all(
        lambda tw: timewarp_score(scene, vf, path, tw, space),
        cands, workers, progress_cb, "time")
    best_i, best_s = _argmax_first(scores)
    return cands[best_i], best_s


def optimize_all(scene: SceneDescription, space: SearchSpace, seed: int = 0,
                 progress_cb=None, workers: int = 1):
    """Run the three stages in order; each consumes the previous result.

    The search itself is exhaustive and deterministic; the seed is recorded
    for the report and for consumers that mix in random baselines.
    """
    t0 = time.perf_counter()
    vf, s_img = optimize_viewfinder(scene, space, progress_cb, workers)
    path, s_vid = optimize_path(scene, vf, space, progress_cb, workers)
    tw, s_time = optimize_timewarp(scene, vf, path, space, progress_cb,
                                   workers)
    params = ShootingParameters(vf, path, tw).validate(scene)

    report_probe = assess_report(probe_sequence(scene, params, space), scene)
    n_vf = len(viewfinder_candidates(scene, space))
    n_path = len(path_candidates(scene, vf, space))
    n_tw = len(timewarp_candidates(scene, space))
    stages = [
        StageReport("image", n_vf,
                    viewfinder_candidates(scene, space).index(vf), s_img),
        StageReport("video", n_path,
                    path_candidates(scene, vf, space).index(path), s_vid),
        StageReport("time", n_tw,
                    timewarp_candidates(scene, space).index(tw), s_time),
    ]
    report = OptimizationReport(
        stages=stages,
        total_evaluations=n_vf + n_path + n_tw,
        wall_time_s=time.perf_counter() - t0,
        params=params,
        score=report_probe["score"],
        seed=seed,
    )
    return params, report


def report_to_dict(report: OptimizationReport) -> dict:
    from .params import params_to_dict
    return {
        "stages": [{"name": s.name, "candidates": s.candidates,
                    "best_index": s.best_index, "best_score": s.best_score}
                   for s in report.stages],
        "total_evaluations": report.total_evaluations,
        "wall_time_s": report.wall_time_s,
        "params": params_to_dict(report.params),
        "score": {"q_i": report.score.q_i, "q_v": report.score.q_v,
                  "q_t": report.score.q_t, "total": report.score.total},
        "seed": report.seed,
    }


# ---------------------------------------------------------------------------
# random baselines

_STAGE_SALT = {"image": 0x1, "video": 0x2, "time": 0x3}


def _stage_rng(seed: int, stage: str):
    return np.random.default_rng([seed % 2 ** 63, _STAGE_SALT[stage]])


def random_viewfinder(scene, space, seed) -> ViewfinderParams:
    cands = viewfinder_candidates(scene, space)
    rng = _stage_rng(seed, "image")
    return cands[int(rng.integers(len(cands)))]


def random_path(scene, vf, space, seed) -> CameraPath:
    cands = path_candidates(scene, vf, space)
    if not cands:
        raise ValueError("random_path: no usable path candidates")
    rng = _stage_rng(seed, "video")
    return cands[int(rng.integers(len(cands)))]


def random_timewarp(scene, space, seed) -> TimeWarpParams:
    cands = timewarp_candidates(scene, space)
    if not cands:
        raise ValueError("random_timewarp: no candidate fits the budget")
    rng = _stage_rng(seed, "time")
    return cands[int(rng.integers(len(cands)))]


def random_params(scene: SceneDescription, space: SearchSpace,
                  seed: int) -> ShootingParameters:
    """Uniform draw from each stage's admissible candidate list.

    Deterministic per seed; every draw satisfies reachability and the
    frame budget because the lists are pre-filtered.
    """
    space.validate()
    vf = random_viewfinder(scene, space, seed)
    path = random_path(scene, vf, space, seed)
    tw = random_timewarp(scene, space, seed)
    return ShootingParameters(vf, path, tw).validate(scene)


def score_params(scene: SceneDescription, params: ShootingParameters,
                 space: SearchSpace) -> dict:
    """Probe-resolution assessment report for a parameter set."""
    return assess_report(probe_sequence(scene, params, space), scene)


# ---------------------------------------------------------------------------
# self-evaluation harness

ABLATION_CONFIGS = ("none", "i", "iv", "ivt")


def quadrant_regions(scene: SceneDescription):
    """Split the reachable region into its four quadrant sub-regions.

    Mirrors the evaluation protocol of shooting each scene in four areas.
    Quadrants that contain no reachable area are dropped.
    """
    rects = scene.reachable.rects
    x0 = min(r.xmin for r in rects)
    x1 = max(r.xmax for r in rects)
    y0 = min(r.ymin for r in rects)
    y1 = max(r.ymax for r in rects)
    cx, cy = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
    quads = [Rect(x0, cx, y0, cy), Rect(cx, x1, y0, cy),
             Rect(x0, cx, cy, y1), Rect(cx, x1, cy, y1)]
    out = []
    for q in quads:
        clipped = []
        for r in rects:
            xi0, xi1 = max(r.xmin, q.xmin), min(r.xmax, q.xmax)
            yi0, yi1 = max(r.ymin, q.ymin), min(r.ymax, q.ymax)
            if xi1 > xi0 and yi1 > yi0:
                clipped.append(Rect(xi0, xi1, yi0, yi1))
        if clipped:
            region = ReachableRegion(tuple(clipped),
                                     scene.reachable.height_range)
            out.append(replace(scene, reachable=region))
    return out


def ablation_totals(scene: SceneDescription, space: SearchSpace,
                    n_seeds: int = 10):
    """Mean assessed totals for the four cumulative stage configurations.

    Random stages are drawn with the same per-seed streams in every
    configuration, so differences come from the optimized stages alone.
    """
    vf_opt, _ = optimize_viewfinder(scene, space)
    path_opt, _ = optimize_path(scene, vf_opt, space)
    tw_opt, _ = optimize_timewarp(scene, vf_opt, path_opt, space)

    def total_of(params):
        return score_params(scene, params, space)["score"].total

    sums = dict.fromkeys(ABLATION_CONFIGS, 0.0)
    full_total = total_of(ShootingParameters(vf_opt, path_opt, tw_opt))
    for seed in range(n_seeds):
        vf_r = random_viewfinder(scene, space, seed)
        tw_r = random_timewarp(scene, space, seed)
        path_r_on_random = random_path(scene, vf_r, space, seed)
        path_r_on_opt = random_path(scene, vf_opt, space, seed)
        sums["none"] += total_of(
            ShootingParameters(vf_r, path_r_on_random, tw_r))
        sums["i"] += total_of(
            ShootingParameters(vf_opt, path_r_on_opt, tw_r))
        sums["iv"] += total_of(ShootingParameters(vf_opt, path_opt, tw_r))
        sums["ivt"] += full_total
    return {k: v / n_seeds for k, v in sums.items()}


def run_ablation(scenes, space: SearchSpace, n_seeds: int = 10,
                 regions_per_scene: int = 4, progress_cb=None):
    """Ablation study over scenes x quadrant regions.

    Returns {"per_region": [...], "means": {config: mean total}}.
    """
    rows = []
    for si, scene in enumerate(scenes):
        regions = quadrant_regions(scene)[:regions_per_scene]
        for ri, region_scene in enumerate(regions):
            totals = ablation_totals(region_scene, space, n_seeds)
            rows.append({"scene": scene.name, "region": ri, "totals": totals})
            if progress_cb is not None:
                progress_cb(scene.name, ri, totals)
    means = {
        cfg: float(np.mean([r["totals"][cfg] for r in rows]))
        for cfg in ABLATION_CONFIGS
    }
    return {"per_region": rows, "means": means}
