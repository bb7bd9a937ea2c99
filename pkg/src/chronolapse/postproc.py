"""Deflickering and final packaging of rendered sequences.

Auto exposure decides each shot independently, so a time-lapse assembled
from such shots carries frame-to-frame brightness jumps. The default cure
is temporal gain matching: pull every frame's exposure toward a smoothed
luminance curve, working in linear light the way the camera gain did.
Per-frame histogram equalization is available as an alternative or add-on.

Output is a PNG sequence plus a JSON manifest rather than an encoded video,
so round-trips are bit-exact.
"""

import json
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import color
from .aesthetics import SMOOTH_WINDOW, flicker_stat, smooth_series
from .params import (CameraPose, format_utc, params_from_dict,
                     params_to_dict, parse_utc)
from .render import Frame, FrameSequence

GAIN_CLAMP = (0.25, 4.0)
LUMA_FLOOR = 1e-3

DEFLICKER_METHODS = ("gain_match", "histeq", "both")


@dataclass(frozen=True)
class DeflickerConfig:
    window: int = 5
    method: str = "gain_match"
    gain_clamp: tuple = GAIN_CLAMP

    def validate(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError("deflicker.window: must be odd and >= 3")
        if self.method not in DEFLICKER_METHODS:
            raise ValueError(
                f"deflicker.method: must be one of {DEFLICKER_METHODS}")
        if self.gain_clamp[0] > self.gain_clamp[1]:
            raise ValueError("deflicker.gain_clamp: min must be <= max")
        return self


def flicker_index(frames) -> float:
    """Mean deviation of per-frame mean luma from its smoothed curve.

    Same statistic the time-lapse scorer uses for its flicker penalty.
    """
    seq = frames.frames if isinstance(frames, FrameSequence) else frames
    if len(seq) < SMOOTH_WINDOW:
        raise ValueError(
            f"flicker_index: need at least {SMOOTH_WINDOW} frames")
    return flicker_stat(seq, SMOOTH_WINDOW)


def equalize_histogram(frame: Frame) -> Frame:
    """Classic cdf-remap equalization on the luma channel.

    h(v) = round((cdf(v) - cdf_min) / (N - cdf_min) * 255); chroma scales
    proportionally with clamping. A degenerate histogram (single luma
    value) returns the frame unchanged.
    """
    px = np.asarray(frame.pixels, dtype=np.float64)
    y = np.floor(color.luma(px) + 0.5).astype(np.int64)
    y = np.clip(y, 0, 255)
    hist = np.bincount(y.ravel(), minlength=256)
    cdf = np.cumsum(hist)
    n = int(cdf[-1])
    nonzero = np.nonzero(hist)[0]
    cdf_min = int(cdf[nonzero[0]])
    if cdf_min == n:
        return frame
    mapping = np.floor((cdf - cdf_min) / (n - cdf_min) * 255.0 + 0.5)
    mapping = np.clip(mapping, 0.0, 255.0)
    target = mapping[y]
    scale = np.where(y > 0, target / np.maximum(y, 1), 0.0)
    out = np.clip(np.floor(px * scale[..., None] + 0.5), 0, 255)
    gray = np.repeat(target[..., None], 3, axis=-1)
    out = np.where((y == 0)[..., None], gray, out)
    return Frame(width=frame.width, height=frame.height,
                 pixels=out.astype(np.uint8), timestamp=frame.timestamp,
                 pose=frame.pose,
                 pre_gain_mean_luminance=frame.pre_gain_mean_luminance)


def _gain_match(seq, config: DeflickerConfig):
    """Per-frame linear gains toward the smoothed linear-luma curve.

    Gains are estimated from mean linear luminance (the space they are
    applied in), so inverting the camera's per-shot gain is exact up to
    the smoothing residual.
    """
    lin_mu = np.array([color.mean_linear_luma(f.pixels) for f in seq])
    sm = smooth_series(lin_mu, config.window)
    gains = sm / np.maximum(lin_mu, LUMA_FLOOR)
    return np.clip(gains, config.gain_clamp[0], config.gain_clamp[1])


def _apply_gain(frame: Frame, gain: float) -> Frame:
    linear = color.srgb_decode(color.dequantize(frame.pixels))
    out = color.quantize_u8(color.srgb_encode(gain * linear))
    return Frame(width=frame.width, height=frame.height, pixels=out,
                 timestamp=frame.timestamp, pose=frame.pose,
                 pre_gain_mean_luminance=frame.pre_gain_mean_luminance)


def deflicker(frames: FrameSequence,
              config: DeflickerConfig = DeflickerConfig()) -> FrameSequence:
    """Smooth the exposure curve; count, dims, timestamps, poses unchanged."""
    config.validate()
    seq = frames.frames
    if len(seq) < config.window:
        raise ValueError(
            f"deflicker: need at least {config.window} frames")
    out = list(seq)
    if config.method in ("gain_match", "both"):
        gains = _gain_match(out, config)
        out = [_apply_gain(f, float(g)) for f, g in zip(out, gains)]
    if config.method in ("histeq", "both"):
        out = [equalize_histogram(f) for f in out]
    return FrameSequence(frames=out, params=frames.params,
                         fps_playback=frames.fps_playback).validate()


# ---------------------------------------------------------------------------
# output packaging

FRAME_NAME = "frame_%06d.png"
MANIFEST_NAME = "manifest.json"


def _pose_to_dict(pose: CameraPose) -> dict:
    return {"position": list(pose.position), "yaw_deg": pose.yaw_deg,
            "pitch_deg": pose.pitch_deg, "vfov_deg": pose.vfov_deg}


def _pose_from_dict(d: dict) -> CameraPose:
    return CameraPose(tuple(float(c) for c in d["position"]),
                      float(d["yaw_deg"]), float(d["pitch_deg"]),
                      float(d["vfov_deg"]))


def write_output(frames: FrameSequence, directory, score: dict = None) -> dict:
    """Write PNG frames plus manifest.json; returns the manifest dict."""
    os.makedirs(directory, exist_ok=True)
    entries = []
    for k, f in enumerate(frames.frames):
        name = FRAME_NAME % k
        path = os.path.join(directory, name)
        try:
            Image.fromarray(np.asarray(f.pixels, dtype=np.uint8),
                            mode="RGB").save(path)
        except OSError as exc:
            raise OSError(f"writing frame {path}: {exc}") from exc
        entries.append({
            "file": name,
            "timestamp": format_utc(f.timestamp),
            "pose": _pose_to_dict(f.pose),
            "pre_gain_mean_luminance": f.pre_gain_mean_luminance,
        })
    manifest = {
        "fps": frames.fps_playback,
        "frames": entries,
        "params": params_to_dict(frames.params) if frames.params else None,
    }
    if score is not None:
        manifest["score"] = score
    mpath = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(mpath, "w") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"writing manifest {mpath}: {exc}") from exc
    return manifest


def read_output(directory) -> FrameSequence:
    """Load a written sequence back; inverse of write_output."""
    mpath = os.path.join(directory, MANIFEST_NAME)
    try:
        with open(mpath) as fh:
            manifest = json.load(fh)
    except OSError as exc:
        raise OSError(f"reading manifest {mpath}: {exc}") from exc
    frames = []
    for e in manifest["frames"]:
        path = os.path.join(directory, e["file"])
        try:
            px = np.asarray(Image.open(path).convert("RGB"), dtype=np.uint8)
        except OSError as exc:
            raise OSError(f"reading frame {path}: {exc}") from exc
        frames.append(Frame(
            width=px.shape[1], height=px.shape[0], pixels=px,
            timestamp=parse_utc(e["timestamp"]),
            pose=_pose_from_dict(e["pose"]),
            pre_gain_mean_luminance=float(e["pre_gain_mean_luminance"])))
    params = None
    if manifest.get("params"):
        params = params_from_dict(manifest["params"])
    return FrameSequence(frames=frames, params=params,
                         fps_playback=float(manifest["fps"])).validate()
