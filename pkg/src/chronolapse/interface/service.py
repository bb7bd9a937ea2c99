"""Single-session HTTP service: the backend of the interactive UI.

One scene, one current parameter set. Reads are concurrent; mutations are
serialized and atomic (a rejected update leaves the previous state intact).
Long operations run as background jobs polled by id; previews render
synchronously at thumbnail size with metering off, so scrubbing the time
slider shows the actual lighting change.
"""

import io
import itertools
import os
import tempfile
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, Response
from PIL import Image

from .. import optimize as opt
from ..aesthetics import report_to_dict
from ..color import mean_encoded_luma
from ..params import (CameraPath, ParamsError, ShootingParameters,
                      format_utc, params_from_dict, params_to_dict,
                      parse_utc)
from ..postproc import DeflickerConfig, deflicker, write_output
from ..render import (ExposureAuto, RenderSettings, probe_settings,
                      render_frame, render_sequence)
from ..robotplan import compile_plan, plan_to_dict
from ..scene import GeoReference, SceneDescription

PREVIEW_MAX_W = 320
PREVIEW_MAX_H = 180
MAX_SEQUENCE_FRAMES = 5000


class JobConflict(RuntimeError):
    """Raised when a job is requested while another one is active."""


@dataclass
class Job:
    id: str
    kind: str
    state: str = "queued"          # queued | running | done | failed
    progress: float = 0.0
    result: dict | None = None
    error: str | None = None

    def snapshot(self) -> dict:
        out = {"id": self.id, "kind": self.kind, "state": self.state,
               "progress": self.progress}
        if self.result is not None:
            out["result"] = self.result
        if self.error is not None:
            out["error"] = self.error
        return out


def initial_params(scene: SceneDescription,
                   space: opt.SearchSpace) -> ShootingParameters:
    """A sane starting point: reachable center, aimed at the landmark,
    static camera, first admissible capture window."""
    r = scene.reachable.rects[0]
    lo, hi = scene.reachable.height_range
    loc = (0.5 * (r.xmin + r.xmax), 0.5 * (r.ymin + r.ymax),
           min(max(5.0, lo), hi))
    lm = scene.highest_landmark()
    if lm is not None:
        import math
        yaw = math.degrees(math.atan2(lm.center[1] - loc[1],
                                      lm.center[0] - loc[0]))
    else:
        yaw = 0.0
    vf = opt.ViewfinderParams(loc, yaw, 0.0)
    tws = opt.timewarp_candidates(scene, space)
    if not tws:
        raise ValueError("search space has no admissible capture window")
    return ShootingParameters(vf, CameraPath("static", 0.0, vf),
                              tws[0]).validate(scene)


class Session:
    """Holds the scene, the current parameters and the job table."""

    def __init__(self, scene: SceneDescription, space: opt.SearchSpace,
                 output_root: str | None = None):
        self.scene = scene
        self.space = space
        self.params = initial_params(scene, space)
        self.last_report = None
        self.jobs: dict[str, Job] = {}
        self.output_root = output_root or tempfile.mkdtemp(
            prefix="chronolapse_")
        self._lock = threading.Lock()
        self._executor = ThreadPoolExecutor(max_workers=1)
        self._job_counter = itertools.count(1)

    # -- state ------------------------------------------------------------

    def get_params(self) -> ShootingParameters:
        with self._lock:
            return self.params

    def set_params(self, params: ShootingParameters):
        params.validate(self.scene)
        if params.timewarp.frame_count() > MAX_SEQUENCE_FRAMES:
            raise ParamsError(
                f"timewarp.interval_s: window yields more than "
                f"{MAX_SEQUENCE_FRAMES} frames")
        with self._lock:
            self.params = params

    # -- jobs ---------------------------------------------------------------

    def _busy_locked(self, kinds) -> bool:
        return any(j.kind in kinds and j.state in ("queued", "running")
                   for j in self.jobs.values())

    def _busy(self, kinds=("optimize", "timelapse")) -> bool:
        with self._lock:
            return self._busy_locked(kinds)

    def submit(self, kind: str, fn,
               exclusive_with=("optimize", "timelapse")) -> Job:
        """Queue a background job; refuses while another job is active so
        the check and the enqueue cannot race."""
        with self._lock:
            if self._busy_locked(exclusive_with):
                raise JobConflict("another job is in progress")
            job = Job(id=f"job-{next(self._job_counter)}", kind=kind)
            self.jobs[job.id] = job

        def run():
            job.state = "running"
            try:
                job.result = fn(job)
                job.progress = 1.0
                job.state = "done"
            except Exception as exc:
                job.error = str(exc)
                job.state = "failed"

        self._executor.submit(run)
        return job


def _scene_summary(scene: SceneDescription) -> dict:
    x0, x1, y0, y1 = scene.horizontal_bounds()
    return {
        "name": scene.name,
        "bounds": {"xmin": x0, "xmax": x1, "ymin": y0, "ymax": y1},
        "reachable": {
            "rects": [{"xmin": r.xmin, "xmax": r.xmax,
                       "ymin": r.ymin, "ymax": r.ymax}
                      for r in scene.reachable.rects],
            "height_range": list(scene.reachable.height_range)},
        "landmarks": [{"xy": [s.center[0], s.center[1]],
                       "weight": s.landmark}
                      for s in scene.solids if s.landmark is not None],
        "solids": [{"xy": [s.center[0], s.center[1]],
                    "size_xy": [s.size[0], s.size[1]]}
                   for s in scene.solids],
        "routes": [{"kind": a.kind, "polyline": [list(p) for p in a.polyline]}
                   for a in scene.agents],
        "georef": {"lat0": scene.georef.lat0, "lon0": scene.georef.lon0,
                   "alt0": scene.georef.alt0,
                   "heading_deg": scene.georef.heading_deg},
    }


def create_app(session: Session, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="chronolapse", version="0.1.0")
    scene = session.scene

    @app.exception_handler(ParamsError)
    def params_error(_request: Request, exc: ParamsError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/api/scene")
    def get_scene():
        return _scene_summary(scene)

    @app.get("/api/params")
    def get_params():
        return params_to_dict(session.get_params())

    @app.put("/api/params")
    def put_params(body: dict):
        if session._busy(("optimize",)):
            raise HTTPException(409, "optimization in progress")
        params = params_from_dict(body, scene)
        session.set_params(params)
        return params_to_dict(session.get_params())

    @app.get("/api/preview")
    def preview(time: str = Query(...), w: int = 320, h: int = 180):
        t = parse_utc(time)
        w = max(16, min(int(w), PREVIEW_MAX_W))
        h = max(16, min(int(h), PREVIEW_MAX_H))
        params = session.get_params()
        tw = params.timewarp
        span = (tw.end - tw.start).total_seconds()
        u = 0.0 if span <= 0 else (t - tw.start).total_seconds() / span
        pose = params.path.pose_at(u)
        frame = render_frame(scene, pose, t,
                             probe_settings(width=w, height=h))
        mean_luma = mean_encoded_luma(frame.pixels)
        buf = io.BytesIO()
        Image.fromarray(np.asarray(frame.pixels), mode="RGB").save(
            buf, format="PNG")
        return Response(content=buf.getvalue(), media_type="image/png",
                        headers={"X-Mean-Luminance": f"{mean_luma:.6f}"})

    @app.post("/api/optimize")
    def start_optimize(stages: str = "ivt", seed: int = 0):
        stages = stages.lower()
        if not stages or any(c not in "ivt" for c in stages):
            raise HTTPException(400, "stages: must be a subset of 'ivt'")

        def work(job: Job):
            current = session.get_params()
            vf = current.viewfinder
            path = current.path
            tw = current.timewarp
            total_stages = len(stages)
            done_stages = 0

            def cb(_name, done, total):
                job.progress = (done_stages + done / total) / total_stages

            if "i" in stages:
                vf, _ = opt.optimize_viewfinder(scene, session.space, cb)
                path = CameraPath(path.mode, path.amplitude, vf, path.pivot)
                done_stages += 1
            if "v" in stages:
                path, _ = opt.optimize_path(scene, vf, session.space, cb)
                done_stages += 1
            if "t" in stages:
                tw, _ = opt.optimize_timewarp(scene, vf, path,
                                              session.space, cb)
                done_stages += 1
            params = ShootingParameters(vf, path, tw).validate(scene)
            session.set_params(params)
            report = opt.score_params(scene, params, session.space)
            return {"params": params_to_dict(params),
                    "score": report_to_dict(report)}

        try:
            job = session.submit("optimize", work)
        except JobConflict as exc:
            raise HTTPException(409, str(exc))
        return {"job_id": job.id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        job = session.jobs.get(job_id)
        if job is None:
            raise HTTPException(404, f"unknown job {job_id}")
        return job.snapshot()

    @app.post("/api/timelapse")
    def start_timelapse(body: dict | None = None):
        body = body or {}
        width = int(body.get("width", 640))
        height = int(body.get("height", 360))
        jitter = float(body.get("jitter_sigma", 0.1))
        seed = int(body.get("seed", 0))

        def work(job: Job):
            params = session.get_params()
            settings = RenderSettings(
                width=width, height=height,
                exposure=ExposureAuto(jitter_sigma=jitter),
                shadows=True, seed=seed).validate()

            def cb(frac):
                job.progress = 0.9 * frac

            seq = render_sequence(scene, params, settings, progress_cb=cb)
            seq = deflicker(seq, DeflickerConfig())
            out_dir = os.path.join(session.output_root, job.id)
            report = opt.score_params(scene, params, session.space)
            write_output(seq, out_dir, score=report_to_dict(report))
            return {"directory": out_dir, "frames": len(seq.frames),
                    "score": report_to_dict(report)}

        try:
            job = session.submit("timelapse", work)
        except JobConflict as exc:
            raise HTTPException(409, str(exc))
        return {"job_id": job.id}

    @app.get("/api/score")
    def score():
        report = opt.score_params(scene, session.get_params(), session.space)
        return report_to_dict(report)

    @app.get("/api/export/robotplan")
    def export_plan(lat0: float | None = None, lon0: float | None = None,
                    alt0: float | None = None, heading: float | None = None,
                    waypoints: int = 16):
        g = scene.georef
        georef = GeoReference(
            lat0 if lat0 is not None else g.lat0,
            lon0 if lon0 is not None else g.lon0,
            alt0 if alt0 is not None else g.alt0,
            heading if heading is not None else g.heading_deg)
        try:
            georef.validate()
            plan = compile_plan(session.get_params(), georef,
                                waypoint_count=max(2, int(waypoints)))
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        return plan_to_dict(plan)

    if ui_dir and os.path.isdir(ui_dir):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
