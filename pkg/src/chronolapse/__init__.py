"""Time-lapse shot planning toolkit.

Simulates a geo-referenced 3D scene, scores candidate shooting parameters
with deterministic aesthetic models, searches the parameter space in three
stages (viewfinder, camera path, time warp), renders and deflickers the
resulting sequence, and compiles the plan for a camera robot.
"""

__version__ = "0.1.0"

from ._kernels import active_backend
from .aesthetics import (ImageScore, QualityScore, TimeLapseScore,
                         VideoScore, assess, assess_report,
                         project_landmarks, score_image, score_timelapse,
                         score_video)
from .optimize import (OptimizationReport, SearchSpace, optimize_all,
                       optimize_path, optimize_timewarp,
                       optimize_viewfinder, random_params, run_ablation)
from .params import (CameraPath, CameraPose, ShootingParameters,
                     TimeWarpParams, ViewfinderParams)
from .postproc import (DeflickerConfig, deflicker, equalize_histogram,
                       flicker_index, read_output, write_output)
from .render import (ExposureAuto, ExposureManual, Frame, FrameSequence,
                     RenderSettings, render_frame, render_sequence)
from .robotplan import (RobotPlan, compile_plan, gps_to_local, local_to_gps,
                        serialize_plan)
from .scene import (GeoReference, SceneDescription, SunState,
                    agent_positions, is_reachable, load_scene,
                    serialize_scene, sun_state)

__all__ = [
    "__version__", "active_backend",
    "SceneDescription", "GeoReference", "SunState", "load_scene",
    "serialize_scene", "sun_state", "agent_positions", "is_reachable",
    "CameraPose", "ViewfinderParams", "CameraPath", "TimeWarpParams",
    "ShootingParameters",
    "RenderSettings", "ExposureAuto", "ExposureManual", "Frame",
    "FrameSequence", "render_frame", "render_sequence",
    "ImageScore", "VideoScore", "TimeLapseScore", "QualityScore",
    "project_landmarks", "score_image", "score_video", "score_timelapse",
    "assess", "assess_report",
    "SearchSpace", "OptimizationReport", "optimize_viewfinder",
    "optimize_path", "optimize_timewarp", "optimize_all", "random_params",
    "run_ablation",
    "DeflickerConfig", "flicker_index", "equalize_histogram", "deflicker",
    "write_output", "read_output",
    "RobotPlan", "local_to_gps", "gps_to_local", "compile_plan",
    "serialize_plan",
]
