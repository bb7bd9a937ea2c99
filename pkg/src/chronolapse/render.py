"""Deterministic software renderer.

Single-bounce ray cast against the ground and box solids, Lambert-shaded by
the sun state, with a day/night sky gradient and agents drawn as upright
boxes. Exposure is the interesting part: auto mode reproduces the per-shot
metering of a real camera, including an optional seeded log-normal jitter,
which is exactly the artifact the deflicker stage removes.

Everything is a pure function of its inputs; frames of a sequence may be
rendered in any order or in parallel and must assemble identically.
"""

import math
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from . import color
from ._kernels import render_linear
from .params import CameraPose, ShootingParameters
from .scene import Heightfield, SceneDescription, agent_positions, sun_state

AUTO_TARGET_LUMA = 0.45   # encoded mean luma an auto-exposed frame aims for
DEFAULT_PROBE_SIZE = (96, 54)
DEFAULT_FINAL_SIZE = (640, 360)

AGENT_DIMS = {"person": (0.5, 0.5, 1.7), "vehicle": (4.0, 1.8, 1.5)}
AGENT_ALBEDO = {"person": (0.25, 0.28, 0.45), "vehicle": (0.50, 0.12, 0.10)}


@dataclass(frozen=True)
class ExposureAuto:
    """Meter to the target luma, times a seeded log-normal jitter."""
    jitter_sigma: float = 0.1

    def validate(self):
        if not 0.0 <= self.jitter_sigma <= 0.2:
            raise ValueError("exposure.jitter_sigma: must be in [0, 0.2]")
        return self


@dataclass(frozen=True)
class ExposureManual:
    gain: float = 1.0

    def validate(self):
        if self.gain <= 0:
            raise ValueError("exposure.gain: must be > 0")
        return self


@dataclass(frozen=True)
class RenderSettings:
    width: int = DEFAULT_FINAL_SIZE[0]
    height: int = DEFAULT_FINAL_SIZE[1]
    exposure: object = field(default_factory=ExposureAuto)
    shadows: bool = True
    seed: int = 0

    def validate(self):
        if self.width < 16 or self.height < 16:
            raise ValueError("render size: width and height must be >= 16")
        self.exposure.validate()
        return self


def probe_settings(width=DEFAULT_PROBE_SIZE[0], height=DEFAULT_PROBE_SIZE[1],
                   shadows=True, seed=0) -> RenderSettings:
    """Settings for optimizer probes: small, manual unit gain, no jitter.

    Probes meter nothing so that true illumination changes stay visible to
    the scorers; auto exposure would flatten them.
    """
    return RenderSettings(width=width, height=height,
                          exposure=ExposureManual(1.0), shadows=shadows,
                          seed=seed)


@dataclass(eq=False)
class Frame:
    width: int
    height: int
    pixels: np.ndarray          # (height, width, 3) uint8, row-major
    timestamp: datetime
    pose: CameraPose
    pre_gain_mean_luminance: float

    def validate(self):
        if self.pixels.size != self.width * self.height * 3:
            raise ValueError("frame.pixels: length must be width*height*3")
        return self


@dataclass(eq=False)
class FrameSequence:
    frames: list
    params: ShootingParameters | None = None
    fps_playback: float = 24.0

    def validate(self):
        for a, b in zip(self.frames, self.frames[1:]):
            if b.timestamp <= a.timestamp:
                raise ValueError(
                    "frames: timestamps must be strictly increasing")
        dims = {(f.width, f.height) for f in self.frames}
        if len(dims) > 1:
            raise ValueError("frames: all frames must share dimensions")
        return self

    def poses(self):
        return [f.pose for f in self.frames]

    def timestamps(self):
        return [f.timestamp for f in self.frames]


def camera_basis(pose: CameraPose):
    """(right, up, forward) unit vectors for a pose.

    Forward is +x at yaw 0, counterclockwise about +z; the horizontal FOV
    follows from the aspect ratio at render time.
    """
    yaw = math.radians(pose.yaw_deg)
    pitch = math.radians(pose.pitch_deg)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    fwd = (cp * cy, cp * sy, sp)
    right = (sy, -cy, 0.0)
    up = (-sp * cy, -sp * sy, cp)
    return right, up, fwd


def exposure_jitter_z(seed: int, t: datetime) -> float:
    """Standard-normal draw tied to (seed, timestamp), order-independent."""
    ms = int(round(t.timestamp() * 1000.0))
    rng = np.random.default_rng([seed % 2 ** 63, ms % 2 ** 63, 0x11A9])
    return float(rng.standard_normal())


def _encoded_mean_luma(linear_img: np.ndarray, gain: float) -> float:
    enc = np.clip(color.srgb_encode(gain * linear_img), 0.0, 1.0)
    return float(np.mean(color.luma(enc)))


def solve_auto_gain(linear_img: np.ndarray, target: float) -> float:
    """Linear-light gain whose encoded frame has mean luma = target.

    Bracketed secant (Illinois) on log-gain; deterministic. Returns the
    bracket edge when the target is unreachable (all-dark or fully
    saturated frames).
    """
    lo, hi = 1e-8, 1e8
    flo = _encoded_mean_luma(linear_img, lo) - target
    fhi = _encoded_mean_luma(linear_img, hi) - target
    if fhi <= 0.0:
        return hi
    if flo >= 0.0:
        return lo
    xlo, xhi = math.log(lo), math.log(hi)
    for _ in range(80):
        denom = fhi - flo
        if denom == 0.0:
            break
        xm = xlo - flo * (xhi - xlo) / denom
        xm = min(max(xm, xlo + 1e-15), xhi - 1e-15)
        fm = _encoded_mean_luma(linear_img, math.exp(xm)) - target
        if abs(fm) <= 5e-13 or (xhi - xlo) <= 1e-14:
            return math.exp(xm)
        if fm > 0.0:
            xhi, fhi = xm, fm
            flo *= 0.5  # Illinois damping keeps the bracket shrinking
        else:
            xlo, flo = xm, fm
            fhi *= 0.5
    return math.exp(0.5 * (xlo + xhi))


def _scene_boxes(scene: SceneDescription, t: datetime, seed: int):
    rows = []
    for s in scene.solids:
        (x0, y0, z0), (x1, y1, z1) = s.aabb()
        rows.append([x0, y0, z0, x1, y1, z1, *s.albedo])
    for kind, (ax, ay), _heading in agent_positions(scene, t, seed):
        sx, sy, sz = AGENT_DIMS[kind]
        base = scene.ground_height(ax, ay)
        rows.append([ax - sx / 2, ay - sy / 2, base,
                     ax + sx / 2, ay + sy / 2, base + sz,
                     *AGENT_ALBEDO[kind]])
    if not rows:
        return np.zeros((0, 9))
    return np.array(rows, dtype=np.float64)


def render_frame(scene: SceneDescription, pose: CameraPose, t: datetime,
                 settings: RenderSettings) -> Frame:
    """Render one frame; byte-identical for identical inputs."""
    settings.validate()
    pose.validate()
    sun = sun_state(scene.georef, t)
    w = sun.warmth
    tint = (1.0, 1.0 - 0.25 * w, 1.0 - 0.5 * w)
    light_rgb = tuple(sun.irradiance * c for c in tint)

    irr = sun.irradiance
    zen = tuple(n + irr * (d - n) for d, n in
                zip(scene.sky.day_zenith, scene.sky.night_zenith))
    glow_amp = max(irr, 0.05)
    glow = (glow_amp, glow_amp, 0.95 * glow_amp)
    zen_t = tuple(z * c for z, c in zip(zen, tint))
    glow_t = tuple(g * c for g, c in zip(glow, tint))

    right, up, fwd = camera_basis(pose)
    tan_half_v = math.tan(math.radians(pose.vfov_deg) / 2.0)
    tan_half_h = tan_half_v * settings.width / settings.height

    boxes = _scene_boxes(scene, t, settings.seed)
    if isinstance(scene.ground, Heightfield):
        hf = scene.ground
        linear = render_linear(
            pose.position, right, up, fwd, tan_half_h, tan_half_v,
            settings.width, settings.height, hf.albedo, hf.grid(),
            hf.origin[0], hf.origin[1], hf.cell_size,
            3.0 * scene.diagonal() + 100.0, boxes, sun.direction, light_rgb,
            zen_t, glow_t, scene.sky.haze, settings.shadows)
    else:
        linear = render_linear(
            pose.position, right, up, fwd, tan_half_h, tan_half_v,
            settings.width, settings.height, scene.ground.albedo, None,
            0.0, 0.0, 1.0, 0.0, boxes, sun.direction, light_rgb,
            zen_t, glow_t, scene.sky.haze, settings.shadows)

    pre_gain = _encoded_mean_luma(linear, 1.0)
    if isinstance(settings.exposure, ExposureManual):
        gain = settings.exposure.gain
    else:
        sigma = settings.exposure.jitter_sigma
        jitter = math.exp(sigma * exposure_jitter_z(settings.seed, t)) \
            if sigma > 0.0 else 1.0
        gain = solve_auto_gain(linear, AUTO_TARGET_LUMA * jitter)

    pixels = color.quantize_u8(color.srgb_encode(gain * linear))
    return Frame(width=settings.width, height=settings.height, pixels=pixels,
                 timestamp=t, pose=pose, pre_gain_mean_luminance=pre_gain)


def render_sequence(scene: SceneDescription, params: ShootingParameters,
                    settings: RenderSettings,
                    progress_cb=None) -> FrameSequence:
    """Render the whole capture window defined by the time-warp params.

    Frame k sits at S_t + k*interval; the camera path is evaluated at
    progress k/(K-1).
    """
    params.validate(scene)
    times = params.timewarp.frame_times()
    count = len(times)
    frames = []
    for k, t in enumerate(times):
        u = k / max(1, count - 1)
        pose = params.path.pose_at(u)
        frames.append(render_frame(scene, pose, t, settings))
        if progress_cb is not None:
            progress_cb((k + 1) / count)
    return FrameSequence(frames=frames, params=params).validate()
