"""Deterministic aesthetic scorers for frames, camera moves and sequences.

Three score groups mirror the three parameter groups: single-image quality
(exposure, contrast, colorfulness, rule of thirds), video quality (motion
smoothness and subject framing) and time-lapse quality (light and pixel
dynamics minus flicker). Each component lands in [0, 1] and aggregates are
plain means, so scores stay comparable across scenes.

All normalization constants live here, in one place, so a replacement
scorer only needs to honour the same signatures.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import color
from .params import CameraPose
from .render import FrameSequence, camera_basis
from .scene import SceneDescription

EXPOSURE_IDEAL = 0.5          # mean luma the exposure term peaks at
EXPOSURE_SIGMA = 0.18
CONTRAST_NORM = 0.25          # luma std that counts as full contrast
COLORFULNESS_NORM = 0.3
THIRDS_SIGMA = 0.1            # falloff of the rule-of-thirds term
TRANS_SMOOTH_NORM = 0.001     # accel per scene diagonal
ROT_SMOOTH_NORM_DEG = 0.5
FRAMING_MARGIN = 0.1          # central band counted as "in frame"
LIGHT_DYNAMISM_NORM = 0.3
PIXEL_DYNAMISM_NORM = 0.08
FLICKER_NORM = 0.05
SMOOTH_WINDOW = 5             # frames, for the luma moving average
DYNAMISM_MAX_W = 64           # pixel-dynamism downsample bound
DYNAMISM_MAX_H = 36

THIRDS_POINTS = ((1 / 3, 1 / 3), (1 / 3, 2 / 3), (2 / 3, 1 / 3), (2 / 3, 2 / 3))


@dataclass(frozen=True)
class ImageScore:
    exposure: float
    contrast: float
    colorfulness: float
    thirds: float
    q_i: float

    @classmethod
    def from_components(cls, exposure, contrast, colorfulness, thirds):
        q = 0.25 * (exposure + contrast + colorfulness + thirds)
        return cls(exposure, contrast, colorfulness, thirds, q)


@dataclass(frozen=True)
class VideoScore:
    translational_smoothness: float
    rotational_smoothness: float
    framing_persistence: float
    q_v: float

    @classmethod
    def from_components(cls, trans, rot, framing):
        return cls(trans, rot, framing, (trans + rot + framing) / 3.0)


@dataclass(frozen=True)
class TimeLapseScore:
    light_dynamism: float
    pixel_dynamism: float
    flicker_penalty: float
    q_t: float

    @classmethod
    def from_components(cls, light, pixel, flicker):
        q = 0.25 * light + 0.25 * pixel + 0.5 * (1.0 - flicker)
        return cls(light, pixel, flicker, q)


@dataclass(frozen=True)
class QualityScore:
    q_i: float
    q_v: float
    q_t: float
    total: float

    @classmethod
    def from_components(cls, q_i, q_v, q_t):
        return cls(q_i, q_v, q_t, (q_i + q_v + q_t) / 3.0)


def _clamp01(v):
    return min(max(float(v), 0.0), 1.0)


def project_point(pose: CameraPose, point, aspect: float):
    """Pinhole projection to normalized [0,1]^2 image coordinates.

    Returns None for points behind the camera. x grows rightward, y grows
    downward, matching pixel order.
    """
    right, up, fwd = camera_basis(pose)
    d = (point[0] - pose.position[0], point[1] - pose.position[1],
         point[2] - pose.position[2])
    zc = d[0] * fwd[0] + d[1] * fwd[1] + d[2] * fwd[2]
    if zc <= 1e-9:
        return None
    xc = d[0] * right[0] + d[1] * right[1] + d[2] * right[2]
    yc = d[0] * up[0] + d[1] * up[1] + d[2] * up[2]
    tan_half_v = math.tan(math.radians(pose.vfov_deg) / 2.0)
    tan_half_h = tan_half_v * aspect
    x = 0.5 + (xc / zc) / (2.0 * tan_half_h)
    y = 0.5 - (yc / zc) / (2.0 * tan_half_v)
    return (x, y)


def project_landmarks(scene: SceneDescription, pose: CameraPose,
                      aspect: float = 16.0 / 9.0):
    """Visible landmark centers as (normalized xy, saliency weight).

    Landmarks behind the camera or outside the image are dropped.
    """
    out = []
    for s in scene.solids:
        if s.landmark is None:
            continue
        p = project_point(pose, s.center, aspect)
        if p is None:
            continue
        if 0.0 <= p[0] <= 1.0 and 0.0 <= p[1] <= 1.0:
            out.append((p, s.landmark))
    return out


def score_image(frame, salient) -> ImageScore:
    """Single-frame quality from tone statistics and subject placement.

    salient is the project_landmarks output for the frame's pose; an empty
    list scores the neutral 0.5 on the thirds term.
    """
    px = np.asarray(frame.pixels, dtype=np.float64)
    y = color.luma(px / 255.0)
    mu = float(np.mean(y))
    sigma = float(np.std(y))
    exposure = math.exp(-(mu - EXPOSURE_IDEAL) ** 2
                        / (2.0 * EXPOSURE_SIGMA ** 2))
    contrast = _clamp01(sigma / CONTRAST_NORM)

    rg = (px[..., 0] - px[..., 1]) / 255.0
    yb = ((px[..., 0] + px[..., 1]) / 2.0 - px[..., 2]) / 255.0
    m = math.sqrt(float(np.std(rg)) ** 2 + float(np.std(yb)) ** 2) \
        + 0.3 * math.sqrt(float(np.mean(rg)) ** 2 + float(np.mean(yb)) ** 2)
    colorfulness = _clamp01(m / COLORFULNESS_NORM)

    if salient:
        wsum = sum(w for _, w in salient)
        cx = sum(p[0] * w for p, w in salient) / wsum
        cy = sum(p[1] * w for p, w in salient) / wsum
        d = min(math.hypot(cx - tx, cy - ty) for tx, ty in THIRDS_POINTS)
        thirds = math.exp(-d ** 2 / (2.0 * THIRDS_SIGMA ** 2))
    else:
        thirds = 0.5
    return ImageScore.from_components(exposure, contrast, colorfulness,
                                      thirds)


def score_video(poses, scene: SceneDescription,
                aspect: float = 16.0 / 9.0) -> VideoScore:
    """Camera-move quality over poses sampled at uniform progress."""
    if len(poses) < 3:
        raise ValueError("score_video: need at least 3 poses")
    diag = scene.diagonal()
    pos = np.array([p.position for p in poses], dtype=np.float64)
    acc = pos[2:] - 2.0 * pos[1:-1] + pos[:-2]
    acc_mag = float(np.mean(np.sqrt(np.sum(acc * acc, axis=1))))
    trans = math.exp(-acc_mag / (TRANS_SMOOTH_NORM * diag))

    yaw = np.unwrap(np.radians([p.yaw_deg for p in poses]))
    pitch = np.radians([p.pitch_deg for p in poses])
    ddyaw = np.degrees(yaw[2:] - 2.0 * yaw[1:-1] + yaw[:-2])
    ddpitch = np.degrees(pitch[2:] - 2.0 * pitch[1:-1] + pitch[:-2])
    ang = float(np.mean(np.hypot(ddyaw, ddpitch)))
    rot = math.exp(-ang / ROT_SMOOTH_NORM_DEG)

    lm = scene.highest_landmark()
    if lm is None:
        framing = 1.0
    else:
        inside = 0
        for p in poses:
            pt = project_point(p, lm.center, aspect)
            if pt is not None and \
                    FRAMING_MARGIN <= pt[0] <= 1.0 - FRAMING_MARGIN and \
                    FRAMING_MARGIN <= pt[1] <= 1.0 - FRAMING_MARGIN:
                inside += 1
        framing = inside / len(poses)
    return VideoScore.from_components(trans, rot, framing)


def mean_luma_series(frames) -> np.ndarray:
    """Per-frame mean encoded luma, the series all flicker math runs on."""
    return np.array([color.mean_encoded_luma(f.pixels) for f in frames])


def smooth_series(mu: np.ndarray, window: int = SMOOTH_WINDOW) -> np.ndarray:
    """Centered moving average; endpoints take the nearest full window."""
    n = len(mu)
    if window % 2 == 0 or window < 3:
        raise ValueError("smooth window must be odd and >= 3")
    if n < window:
        raise ValueError(f"need at least {window} frames")
    half = window // 2
    kernel = np.full(window, 1.0 / window)
    valid = np.convolve(mu, kernel, mode="valid")
    out = np.empty(n)
    out[half:n - half] = valid
    out[:half] = valid[0]
    out[n - half:] = valid[-1]
    return out


def flicker_stat(frames, window: int = SMOOTH_WINDOW) -> float:
    """Mean |mu_k - smoothed mu_k| over frames with a full window."""
    mu = mean_luma_series(frames)
    sm = smooth_series(mu, window)
    half = window // 2
    inner = slice(half, len(mu) - half)
    return float(np.mean(np.abs(mu[inner] - sm[inner])))


def score_timelapse(frames: FrameSequence) -> TimeLapseScore:
    """Time-lapse quality: does light change, does content move, and is
    the exposure curve steady."""
    seq = frames.frames if isinstance(frames, FrameSequence) else frames
    if len(seq) < SMOOTH_WINDOW:
        raise ValueError(
            f"score_timelapse: need at least {SMOOTH_WINDOW} frames")
    mu = mean_luma_series(seq)
    sm = smooth_series(mu, SMOOTH_WINDOW)
    half = SMOOTH_WINDOW // 2
    inner = slice(half, len(mu) - half)
    light = _clamp01((float(np.max(sm[inner])) - float(np.min(sm[inner])))
                     / LIGHT_DYNAMISM_NORM)

    f0 = seq[0]
    fx = max(1, math.ceil(f0.width / DYNAMISM_MAX_W))
    fy = max(1, math.ceil(f0.height / DYNAMISM_MAX_H))
    w = (f0.width // fx) * fx
    h = (f0.height // fy) * fy
    stack = []
    for f in seq:
        y = color.luma(np.asarray(f.pixels, dtype=np.float64) / 255.0)
        blocks = y[:h, :w].reshape(h // fy, fy, w // fx, fx).mean(axis=(1, 3))
        stack.append(blocks)
    temporal_std = np.std(np.stack(stack), axis=0)
    pixel = _clamp01(float(np.mean(temporal_std)) / PIXEL_DYNAMISM_NORM)

    flicker = _clamp01(
        float(np.mean(np.abs(mu[inner] - sm[inner]))) / FLICKER_NORM)
    return TimeLapseScore.from_components(light, pixel, flicker)


def assess(frames: FrameSequence, scene: SceneDescription) -> QualityScore:
    """Overall sequence quality: image, video and time-lapse terms."""
    report = assess_report(frames, scene)
    return report["score"]


def assess_report(frames: FrameSequence, scene: SceneDescription) -> dict:
    """assess() plus every component, for score reports."""
    seq = frames.frames
    if not seq:
        raise ValueError("assess: empty sequence")
    n = len(seq)
    idx = sorted(set(int(round(i)) for i in
                     np.linspace(0, n - 1, min(9, n))))
    image_scores = []
    for i in idx:
        f = seq[i]
        salient = project_landmarks(scene, f.pose, aspect=f.width / f.height)
        image_scores.append(score_image(f, salient))
    q_i = float(np.mean([s.q_i for s in image_scores]))

    f0 = seq[0]
    video = score_video([f.pose for f in seq], scene,
                        aspect=f0.width / f0.height)
    timelapse = score_timelapse(frames)
    score = QualityScore.from_components(q_i, video.q_v, timelapse.q_t)
    return {
        "score": score,
        "image_mean": q_i,
        "image_samples": image_scores,
        "video": video,
        "timelapse": timelapse,
    }


def report_to_dict(report: dict) -> dict:
    """JSON-ready view of an assess_report result."""
    s = report["score"]
    v = report["video"]
    t = report["timelapse"]
    return {
        "q_i": s.q_i,
        "q_v": s.q_v,
        "q_t": s.q_t,
        "total": s.total,
        "image": {
            "mean_q_i": report["image_mean"],
            "samples": [{"exposure": i.exposure, "contrast": i.contrast,
                         "colorfulness": i.colorfulness, "thirds": i.thirds,
                         "q_i": i.q_i} for i in report["image_samples"]],
        },
        "video": {
            "translational_smoothness": v.translational_smoothness,
            "rotational_smoothness": v.rotational_smoothness,
            "framing_persistence": v.framing_persistence,
            "q_v": v.q_v,
        },
        "timelapse": {
            "light_dynamism": t.light_dynamism,
            "pixel_dynamism": t.pixel_dynamism,
            "flicker_penalty": t.flicker_penalty,
            "q_t": t.q_t,
        },
    }
