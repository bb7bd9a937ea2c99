"""Command-line entry points for the full pipeline.

Subcommands: plan, render, deflicker, assess, export, serve. Outputs are
deterministic for fixed seeds. Scene and search-space arguments accept a
file path or the name of a packaged resource (e.g. `tutorial`, `default`).
"""

import argparse
import json
import os
import sys
from importlib import resources

from .. import optimize as opt
from ..aesthetics import report_to_dict
from ..params import ParamsError, load_params, serialize_params
from ..postproc import (DeflickerConfig, deflicker, read_output,
                        write_output)
from ..render import (ExposureAuto, ExposureManual, RenderSettings,
                      render_sequence)
from ..robotplan import compile_plan, serialize_plan
from ..scene import (GeoReference, SceneDescription, SceneParseError,
                     SceneValidationError, load_scene, serialize_scene)


class CliError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _write(path: str, text: str):
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


def _resolve_scene_text(arg: str) -> str:
    if os.path.exists(arg):
        return _read(arg)
    name = arg[:-5] if arg.endswith(".json") else arg
    ref = resources.files("chronolapse") / f"data/scenes/{name}.json"
    if ref.is_file():
        return ref.read_text()
    raise CliError(f"scene not found: {arg} (no such file or packaged scene)")


def _load_scene_arg(arg: str) -> SceneDescription:
    return load_scene(_resolve_scene_text(arg))


def _load_space_arg(arg: str | None) -> opt.SearchSpace:
    if arg is None or arg == "default" or arg == "default.json":
        ref = resources.files("chronolapse") / "data/default_space.json"
        return opt.load_space(ref.read_text())
    return opt.load_space(_read(arg))


def cmd_plan(args) -> int:
    scene = _load_scene_arg(args.scene)
    space = _load_space_arg(args.space)
    params, report = opt.optimize_all(scene, space, seed=args.seed,
                                      workers=args.workers)
    _write(args.out, serialize_params(params))
    if args.report:
        _write(args.report,
               json.dumps(opt.report_to_dict(report), indent=2) + "\n")
    print(f"plan: {report.total_evaluations} evaluations, "
          f"score {report.score.total:.4f}, wrote {args.out}")
    return 0


def cmd_render(args) -> int:
    scene = _load_scene_arg(args.scene)
    params = load_params(_read(args.params), scene)
    if args.manual_gain is not None:
        exposure = ExposureManual(args.manual_gain)
    else:
        exposure = ExposureAuto(jitter_sigma=args.jitter)
    settings = RenderSettings(width=args.width, height=args.height,
                              exposure=exposure,
                              shadows=not args.no_shadows,
                              seed=args.seed).validate()
    seq = render_sequence(scene, params, settings)
    seq.fps_playback = args.fps
    write_output(seq, args.out)
    _write(os.path.join(args.out, "scene.json"), serialize_scene(scene))
    print(f"render: {len(seq.frames)} frames -> {args.out}")
    return 0


def cmd_deflicker(args) -> int:
    seq = read_output(args.frames)
    config = DeflickerConfig(window=args.window, method=args.method)
    out = deflicker(seq, config)
    write_output(out, args.out)
    scene_copy = os.path.join(args.frames, "scene.json")
    if os.path.exists(scene_copy):
        _write(os.path.join(args.out, "scene.json"), _read(scene_copy))
    print(f"deflicker: {args.method} window {args.window} -> {args.out}")
    return 0


def cmd_assess(args) -> int:
    seq = read_output(args.frames)
    if args.scene:
        scene = _load_scene_arg(args.scene)
    else:
        scene_copy = os.path.join(args.frames, "scene.json")
        if not os.path.exists(scene_copy):
            raise CliError(
                "assess: pass --scene or keep the scene.json that the "
                "render command writes next to the frames")
        scene = load_scene(_read(scene_copy))
    from ..aesthetics import assess_report
    report = report_to_dict(assess_report(seq, scene))
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_export(args) -> int:
    params = load_params(_read(args.params))
    if args.scene:
        georef = _load_scene_arg(args.scene).georef
    elif None not in (args.lat0, args.lon0):
        georef = GeoReference(args.lat0, args.lon0, args.alt0 or 0.0,
                              args.heading or 0.0)
    else:
        raise CliError("export: pass --scene or --lat0/--lon0")
    georef.validate()
    plan = compile_plan(params, georef, waypoint_count=args.waypoints,
                        playback_fps=args.fps)
    _write(args.out, serialize_plan(plan))
    print(f"export: {len(plan.waypoints)} waypoints -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import Session, create_app
    scene = _load_scene_arg(args.scene)
    space = _load_space_arg(args.space)
    session = Session(scene, space)
    app = create_app(session, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="chronolapse",
        description="Plan, render, deflicker, assess and export time-lapse "
                    "shots over a simulated scene.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="optimize shooting parameters")
    sp.add_argument("--scene", required=True)
    sp.add_argument("--space", default=None,
                    help="search space JSON (default: packaged space)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True, help="output params JSON")
    sp.add_argument("--report", default=None, help="optimization report JSON")
    sp.add_argument("--workers", type=int, default=1,
                    help="parallel candidate evaluations (same result)")
    sp.set_defaults(fn=cmd_plan)

    sp = sub.add_parser("render", help="render a parameter set to frames")
    sp.add_argument("--scene", required=True)
    sp.add_argument("--params", required=True)
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--width", type=int, default=640)
    sp.add_argument("--height", type=int, default=360)
    sp.add_argument("--jitter", type=float, default=0.1,
                    help="auto-exposure jitter sigma")
    sp.add_argument("--manual-gain", type=float, default=None,
                    help="disable auto exposure, use this gain")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-shadows", action="store_true")
    sp.add_argument("--fps", type=float, default=24.0)
    sp.set_defaults(fn=cmd_render)

    sp = sub.add_parser("deflicker", help="smooth a rendered sequence")
    sp.add_argument("--frames", required=True, help="input directory")
    sp.add_argument("--out", required=True, help="output directory")
    sp.add_argument("--method", default="gain_match",
                    choices=["gain_match", "histeq", "both"])
    sp.add_argument("--window", type=int, default=5)
    sp.set_defaults(fn=cmd_deflicker)

    sp = sub.add_parser("assess", help="score a rendered sequence")
    sp.add_argument("--frames", required=True)
    sp.add_argument("--scene", default=None)
    sp.add_argument("--out", default=None, help="write report here instead "
                                                "of stdout")
    sp.set_defaults(fn=cmd_assess)

    sp = sub.add_parser("export", help="compile a robot shooting plan")
    sp.add_argument("--params", required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--scene", default=None,
                    help="take the geo-reference from this scene")
    sp.add_argument("--lat0", type=float, default=None)
    sp.add_argument("--lon0", type=float, default=None)
    sp.add_argument("--alt0", type=float, default=None)
    sp.add_argument("--heading", type=float, default=None)
    sp.add_argument("--waypoints", type=int, default=16)
    sp.add_argument("--fps", type=float, default=24.0)
    sp.set_defaults(fn=cmd_export)

    sp = sub.add_parser("serve", help="start the HTTP service")
    sp.add_argument("--scene", default=os.environ.get("CHRONO_SCENE"),
                    required=os.environ.get("CHRONO_SCENE") is None)
    sp.add_argument("--space", default=None)
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int,
                    default=int(os.environ.get("CHRONO_PORT", "8000")))
    sp.add_argument("--ui", default=os.environ.get("CHRONO_UI_DIR"),
                    help="directory of built UI assets to serve at /")
    sp.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, ParamsError, SceneParseError, SceneValidationError,
            opt.SearchSpaceError, ValueError, OSError) as exc:
        print(f"chronolapse {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
