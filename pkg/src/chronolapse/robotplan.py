"""Compile shooting parameters into a robot shooting plan.

Scene coordinates convert to GPS through an equirectangular local tangent
plane (111320 m per degree of latitude), which is centimeter-accurate at
sub-kilometer scene scale. Gimbal conventions are pinned here and nowhere
else: yaw is a compass bearing (0 = North, clockwise), pitch is positive
down.

With heading h being the compass bearing of the scene's +x axis and the
scene frame right-handed with z up, +y points 90 degrees counterclockwise
from +x on the map, i.e. at bearing h - 90.
"""

import json
import math
from dataclasses import dataclass
from datetime import timedelta

from .params import (CameraPose, ShootingParameters, format_utc, parse_utc)
from .scene import GeoReference

METERS_PER_DEG = 111320.0


class GeodesyError(ValueError):
    pass


@dataclass(frozen=True)
class Waypoint:
    time: object          # UTC datetime
    lat: float
    lon: float
    alt_m: float
    gimbal_pitch_deg: float   # positive down
    gimbal_yaw_deg: float     # compass, [0, 360)


@dataclass(frozen=True)
class RobotPlan:
    georef: GeoReference
    waypoints: tuple
    capture_start: object
    capture_end: object
    capture_interval_s: float
    playback_fps: float

    def validate(self):
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if b.time < a.time:
                raise ValueError("waypoints: times must be non-decreasing")
        if self.capture_start > self.capture_end:
            raise ValueError("capture: start must be <= end")
        if self.capture_interval_s <= 0:
            raise ValueError("capture: interval_s must be > 0")
        return self


def _check_georef(georef: GeoReference):
    if abs(georef.lat0) >= 89.0:
        raise GeodesyError(
            "georef.lat0: tangent-plane conversion is degenerate above "
            "89 degrees latitude")


def local_to_gps(georef: GeoReference, p):
    """Scene (x, y, z) meters -> (lat, lon, alt)."""
    _check_georef(georef)
    x, y, z = p
    if math.hypot(x, y) >= 50_000.0:
        raise GeodesyError("point: must be within 50 km of the origin")
    h = math.radians(georef.heading_deg)
    north = x * math.cos(h) + y * math.sin(h)
    east = x * math.sin(h) - y * math.cos(h)
    lat = georef.lat0 + north / METERS_PER_DEG
    lon = georef.lon0 + east / (METERS_PER_DEG
                                * math.cos(math.radians(georef.lat0)))
    return lat, lon, georef.alt0 + z


def gps_to_local(georef: GeoReference, lat, lon, alt):
    """(lat, lon, alt) -> scene (x, y, z) meters; inverse of local_to_gps."""
    _check_georef(georef)
    north = (lat - georef.lat0) * METERS_PER_DEG
    east = (lon - georef.lon0) * METERS_PER_DEG \
        * math.cos(math.radians(georef.lat0))
    h = math.radians(georef.heading_deg)
    x = north * math.cos(h) + east * math.sin(h)
    y = north * math.sin(h) - east * math.cos(h)
    return x, y, alt - georef.alt0


def gimbal_angles(georef: GeoReference, pose: CameraPose):
    """(gimbal_pitch_deg, gimbal_yaw_deg) for a camera pose.

    Scene yaw rotates counterclockwise from +x while compass bearings run
    clockwise from North, so the camera's bearing is heading - yaw.
    """
    yaw = (georef.heading_deg - pose.yaw_deg) % 360.0
    return -pose.pitch_deg + 0.0, yaw


def compile_plan(params: ShootingParameters, georef: GeoReference,
                 waypoint_count: int = 16,
                 playback_fps: float = 24.0) -> RobotPlan:
    """Sample the camera path into timed GPS waypoints plus the capture
    schedule (start, end, interval copied from the time warp)."""
    if waypoint_count < 2:
        raise ValueError("waypoint_count: must be >= 2")
    params.validate()
    tw = params.timewarp
    span = (tw.end - tw.start).total_seconds()
    waypoints = []
    for i in range(waypoint_count):
        u = i / (waypoint_count - 1)
        pose = params.path.pose_at(u)
        lat, lon, alt = local_to_gps(georef, pose.position)
        pitch, yaw = gimbal_angles(georef, pose)
        waypoints.append(Waypoint(
            time=tw.start + timedelta(seconds=u * span),
            lat=lat, lon=lon, alt_m=alt,
            gimbal_pitch_deg=pitch, gimbal_yaw_deg=yaw))
    return RobotPlan(
        georef=georef, waypoints=tuple(waypoints),
        capture_start=tw.start, capture_end=tw.end,
        capture_interval_s=tw.interval_s,
        playback_fps=playback_fps).validate()


def plan_to_dict(plan: RobotPlan) -> dict:
    return {
        "georef": {"lat0": plan.georef.lat0, "lon0": plan.georef.lon0,
                   "alt0": plan.georef.alt0,
                   "heading_deg": plan.georef.heading_deg},
        "waypoints": [{"time": format_utc(w.time), "lat": w.lat,
                       "lon": w.lon, "alt_m": w.alt_m,
                       "gimbal_pitch_deg": w.gimbal_pitch_deg,
                       "gimbal_yaw_deg": w.gimbal_yaw_deg}
                      for w in plan.waypoints],
        "capture": {"start": format_utc(plan.capture_start),
                    "end": format_utc(plan.capture_end),
                    "interval_s": plan.capture_interval_s},
        "playback_fps": plan.playback_fps,
    }


def serialize_plan(plan: RobotPlan) -> str:
    """JSON text with ISO-8601 UTC timestamps and full float precision
    (shortest round-tripping representation, exact to the bit)."""
    return json.dumps(plan_to_dict(plan), indent=2) + "\n"


def deserialize_plan(text: str) -> RobotPlan:
    doc = json.loads(text)
    g = doc["georef"]
    georef = GeoReference(float(g["lat0"]), float(g["lon0"]),
                          float(g["alt0"]), float(g["heading_deg"]))
    waypoints = tuple(
        Waypoint(time=parse_utc(w["time"]), lat=float(w["lat"]),
                 lon=float(w["lon"]), alt_m=float(w["alt_m"]),
                 gimbal_pitch_deg=float(w["gimbal_pitch_deg"]),
                 gimbal_yaw_deg=float(w["gimbal_yaw_deg"]))
        for w in doc["waypoints"])
    cap = doc["capture"]
    return RobotPlan(
        georef=georef, waypoints=waypoints,
        capture_start=parse_utc(cap["start"]),
        capture_end=parse_utc(cap["end"]),
        capture_interval_s=float(cap["interval_s"]),
        playback_fps=float(doc["playback_fps"])).validate()
