"""Shooting parameter types shared across the pipeline.

Three groups: viewfinder (where to stand and aim), camera path (how to move
during the capture) and time warp (when to shoot and how often). The path
always moves relative to the viewfinder pose, so the wire format carries the
base pose once.
"""

import json
import math
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone

from .scene import SceneDescription, is_reachable

DEFAULT_VFOV_DEG = 60.0

PATH_MODES = ("static", "pan", "truck", "orbit")


class ParamsError(ValueError):
    """Invalid shooting parameters; message names the offending field."""


@dataclass(frozen=True)
class CameraPose:
    position: tuple        # (x, y, z) meters
    yaw_deg: float         # 0 = +x axis, counterclockwise about +z
    pitch_deg: float       # positive up, in [-89, 89]
    vfov_deg: float = DEFAULT_VFOV_DEG

    def validate(self, prefix="pose"):
        if not -89.0 <= self.pitch_deg <= 89.0:
            raise ParamsError(f"{prefix}.pitch_deg: must be in [-89, 89]")
        if not 10.0 < self.vfov_deg < 120.0:
            raise ParamsError(f"{prefix}.vfov_deg: must be in (10, 120)")
        if not all(math.isfinite(c) for c in self.position):
            raise ParamsError(f"{prefix}.position: must be finite")
        return self


@dataclass(frozen=True)
class ViewfinderParams:
    location: tuple        # (x, y, z) meters
    yaw_deg: float
    pitch_deg: float

    def validate(self, scene: SceneDescription | None = None,
                 prefix="viewfinder"):
        if not -89.0 <= self.pitch_deg <= 89.0:
            raise ParamsError(f"{prefix}.pitch_deg: must be in [-89, 89]")
        if scene is not None and not is_reachable(scene.reachable,
                                                  self.location):
            raise ParamsError(
                f"{prefix}.location: {list(self.location)} is outside the "
                f"reachable region")
        return self

    def pose(self, vfov_deg=DEFAULT_VFOV_DEG) -> CameraPose:
        return CameraPose(self.location, self.yaw_deg, self.pitch_deg,
                          vfov_deg)


@dataclass(frozen=True)
class CameraPath:
    mode: str              # static | pan | truck | orbit
    amplitude: float       # pan/orbit: degrees of sweep; truck: meters
    base: ViewfinderParams
    pivot: tuple | None = None   # (x, y) orbit center, required for orbit

    def validate(self, scene=None, prefix="path"):
        if self.mode not in PATH_MODES:
            raise ParamsError(
                f"{prefix}.mode: must be one of {PATH_MODES}")
        if self.amplitude < 0:
            raise ParamsError(f"{prefix}.amplitude: must be >= 0")
        if (self.amplitude == 0) != (self.mode == "static"):
            raise ParamsError(
                f"{prefix}.amplitude: must be 0 exactly for static mode "
                f"and positive otherwise")
        if self.mode == "orbit" and self.pivot is None:
            raise ParamsError(f"{prefix}.pivot: orbit mode needs a pivot")
        self.base.validate(scene, prefix=f"{prefix}.base")
        return self

    def pose_at(self, progress: float,
                vfov_deg=DEFAULT_VFOV_DEG) -> CameraPose:
        """Camera pose at progress u in [0, 1] along the move."""
        u = min(max(progress, 0.0), 1.0)
        b = self.base
        if self.mode == "static":
            return b.pose(vfov_deg)
        if self.mode == "pan":
            yaw = b.yaw_deg + self.amplitude * (u - 0.5)
            return CameraPose(b.location, yaw, b.pitch_deg, vfov_deg)
        if self.mode == "truck":
            yaw_r = math.radians(b.yaw_deg)
            rx, ry = math.sin(yaw_r), -math.cos(yaw_r)
            off = self.amplitude * (u - 0.5)
            pos = (b.location[0] + rx * off, b.location[1] + ry * off,
                   b.location[2])
            return CameraPose(pos, b.yaw_deg, b.pitch_deg, vfov_deg)
        # orbit: swing about the pivot, keeping it framed
        px, py = self.pivot
        theta = math.radians(self.amplitude * (u - 0.5))
        relx = b.location[0] - px
        rely = b.location[1] - py
        ct, st = math.cos(theta), math.sin(theta)
        x = px + relx * ct - rely * st
        y = py + relx * st + rely * ct
        yaw = math.degrees(math.atan2(py - y, px - x))
        return CameraPose((x, y, b.location[2]), yaw, b.pitch_deg, vfov_deg)


@dataclass(frozen=True)
class TimeWarpParams:
    start: datetime        # S_t, UTC
    end: datetime          # E_t, UTC
    interval_s: float      # frame extraction interval, seconds

    def validate(self, prefix="timewarp"):
        if self.start > self.end:
            raise ParamsError(f"{prefix}.start: must be <= end")
        if self.interval_s <= 0:
            raise ParamsError(f"{prefix}.interval_s: must be > 0")
        return self

    def frame_count(self) -> int:
        span = (self.end - self.start).total_seconds()
        return math.floor(span / self.interval_s) + 1

    def frame_times(self):
        return [self.start + timedelta(seconds=k * self.interval_s)
                for k in range(self.frame_count())]


@dataclass(frozen=True)
class ShootingParameters:
    viewfinder: ViewfinderParams
    path: CameraPath
    timewarp: TimeWarpParams

    def validate(self, scene=None):
        self.viewfinder.validate(scene)
        self.path.validate(scene)
        if self.path.base != self.viewfinder:
            raise ParamsError("path.base: must equal the viewfinder params")
        self.timewarp.validate()
        return self

    def with_viewfinder(self, vf: ViewfinderParams) -> "ShootingParameters":
        return ShootingParameters(vf, replace(self.path, base=vf),
                                  self.timewarp)


# ---------------------------------------------------------------------------
# wire format

def format_utc(t: datetime) -> str:
    t = t.astimezone(timezone.utc) if t.tzinfo else t.replace(
        tzinfo=timezone.utc)
    if t.microsecond:
        return t.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_utc(s: str) -> datetime:
    if not isinstance(s, str):
        raise ParamsError(f"timestamp: expected an ISO-8601 string, got {s!r}")
    raw = s[:-1] + "+00:00" if s.endswith("Z") else s
    try:
        t = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ParamsError(f"timestamp: {s!r} is not ISO-8601") from exc
    if t.tzinfo is None:
        t = t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


def params_to_dict(p: ShootingParameters) -> dict:
    path = {"mode": p.path.mode, "amplitude": p.path.amplitude}
    if p.path.pivot is not None:
        path["pivot"] = list(p.path.pivot)
    return {
        "viewfinder": {"location": list(p.viewfinder.location),
                       "yaw_deg": p.viewfinder.yaw_deg,
                       "pitch_deg": p.viewfinder.pitch_deg},
        "path": path,
        "timewarp": {"start": format_utc(p.timewarp.start),
                     "end": format_utc(p.timewarp.end),
                     "interval_s": p.timewarp.interval_s},
    }


def params_from_dict(doc: dict, scene=None) -> ShootingParameters:
    try:
        vf_d = doc["viewfinder"]
        path_d = doc["path"]
        tw_d = doc["timewarp"]
        loc = vf_d["location"]
        if not isinstance(loc, (list, tuple)) or len(loc) != 3:
            raise ParamsError("viewfinder.location: expected [x, y, z]")
        vf = ViewfinderParams(tuple(float(c) for c in loc),
                              float(vf_d["yaw_deg"]),
                              float(vf_d["pitch_deg"]))
        pivot = path_d.get("pivot")
        path = CameraPath(mode=str(path_d["mode"]),
                          amplitude=float(path_d["amplitude"]),
                          base=vf,
                          pivot=tuple(float(c) for c in pivot)
                          if pivot is not None else None)
        tw = TimeWarpParams(parse_utc(tw_d["start"]), parse_utc(tw_d["end"]),
                            float(tw_d["interval_s"]))
    except KeyError as exc:
        raise ParamsError(f"missing parameter field: {exc.args[0]}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParamsError):
            raise
        raise ParamsError(f"malformed parameters: {exc}") from exc
    return ShootingParameters(vf, path, tw).validate(scene)


def serialize_params(p: ShootingParameters) -> str:
    return json.dumps(params_to_dict(p), indent=2) + "\n"


def load_params(text: str, scene=None) -> ShootingParameters:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParamsError(f"parameters file is not valid JSON: {exc}") from exc
    return params_from_dict(doc, scene)
