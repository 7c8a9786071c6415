"""Command line interface.

Exit codes: 0 on full success, 1 for invalid arguments or configuration,
2 when a dataset render completed but one or more sequences failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import FogConfig, default_level_configs, normalize_mode
from .depthio import SceneReference
from .errors import ConfigError, FogsimError
from .harness import DegradationModel, SyntheticScene, sweep
from .metrics import evaluate, load_mot_file
from .pipeline import (
    discover_sequence,
    render_dataset,
    render_sequence,
)

_SCENE_KEYS = {
    "n_objects",
    "n_frames",
    "image_size",
    "box_size",
    "motion",
    "depth_profile",
    "seed",
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(f"{self.prog}: {message}")


def _parse_light(text: str) -> tuple[str, tuple[float, float, float] | None]:
    if text in ("dcp", "sky"):
        return text, None
    if text.startswith("rgb:"):
        parts = text[len("rgb:"):].split(",")
        if len(parts) != 3:
            raise ConfigError(f"rgb light needs three channels, got {text!r}")
        try:
            color = tuple(float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError(f"invalid rgb light {text!r}: {exc}") from exc
        return "fixed", color  # type: ignore[return-value]
    raise ConfigError(f"light must be 'dcp', 'sky' or 'rgb:R,G,B', got {text!r}")


def _parse_levels(text: str) -> tuple[int, ...]:
    try:
        levels = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ConfigError(f"invalid levels {text!r}: {exc}") from exc
    if not levels:
        raise ConfigError("levels must name at least one severity")
    return levels


def _load_scene(path: str | None, seed: int) -> SyntheticScene:
    if path is None:
        return SyntheticScene(n_objects=5, n_frames=100, seed=seed)
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid scene JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{path}: scene JSON must be an object")
    unknown = set(payload) - _SCENE_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown scene keys {sorted(unknown)}")
    kwargs = dict(payload)
    if "image_size" in kwargs:
        kwargs["image_size"] = tuple(kwargs["image_size"])
    if kwargs.get("motion") is not None:
        kwargs["motion"] = tuple(tuple(v) for v in kwargs["motion"])
    if kwargs.get("depth_profile") is not None:
        kwargs["depth_profile"] = tuple(kwargs["depth_profile"])
    kwargs.setdefault("seed", seed)
    try:
        return SyntheticScene(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: invalid scene: {exc}") from exc


def _fog_config_from_args(args: argparse.Namespace) -> FogConfig:
    if (args.dmin is None) != (args.dmax is None):
        raise ConfigError("--dmin and --dmax must be given together")
    reference = (
        SceneReference(args.dmin, args.dmax) if args.dmin is not None else None
    )
    light, light_color = _parse_light(args.light)
    return FogConfig(
        mode=normalize_mode(args.mode),
        level=args.level,
        visibility=args.visibility,
        seed=args.seed,
        light=light,
        light_color=light_color,
        reference=reference,
        patch_size=args.patch,
        octaves=args.octaves,
        brightness=args.brightness,
        lossless=args.lossless,
    )


def _is_single_sequence(input_dir: Path) -> bool:
    if (input_dir / "img1").is_dir():
        return True
    return any(
        p.suffix.lower() in (".jpg", ".jpeg", ".png")
        for p in input_dir.iterdir()
        if p.is_file()
    )


def _cmd_render(args: argparse.Namespace) -> int:
    cfg = _fog_config_from_args(args)
    input_dir = Path(args.input)
    if not input_dir.is_dir():
        raise ConfigError(f"input directory not found: {input_dir}")
    if _is_single_sequence(input_dir):
        seq = discover_sequence(input_dir, args.depth_dir)
        rendered = render_sequence(seq, cfg, args.output)
        print(f"rendered {rendered.name}: {rendered.n_frames} frame(s)")
        print(f"manifest: {rendered.manifest_path}")
        return 0
    result = render_dataset(
        input_dir, cfg, args.output, depth_root=args.depth_dir
    )
    for seq_out in result.rendered:
        print(f"rendered {seq_out.name}: {seq_out.n_frames} frame(s)")
    for name, message in result.failures:
        print(f"failed {name}: {message}", file=sys.stderr)
    return 0 if result.ok else 2


def _cmd_eval(args: argparse.Namespace) -> int:
    gt = load_mot_file(args.gt, kind="gt")
    predictions = load_mot_file(args.results, kind="result")
    report = evaluate(gt, predictions, args.iou)
    print(f"hota={report.hota:.6f}")
    print(f"mota={report.mota:.6f}")
    print(f"motp={report.motp:.6f}")
    print(f"idf1={report.idf1:.6f}")
    print(f"id_switches={report.id_switches}")
    print(f"false_positives={report.false_positives}")
    print(f"false_negatives={report.false_negatives}")
    print(f"gt_count={report.gt_count}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    scene = _load_scene(args.scene, args.seed)
    configs = default_level_configs(
        _parse_levels(args.levels), mode=normalize_mode(args.mode), seed=args.seed
    )
    model = DegradationModel(
        slope=args.slope,
        intercept=args.intercept,
        noise_sigma=args.noise_sigma,
        seed=args.seed,
    )
    report = sweep(scene, configs, model=model, iou_threshold=args.iou)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep.csv").write_text(report.to_csv(), encoding="utf-8")
    (out_dir / "sweep.md").write_text(report.to_markdown(), encoding="utf-8")
    print(report.to_markdown(), end="")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="fog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    render = sub.add_parser("render", help="render fog over a sequence or dataset")
    render.add_argument("--input", required=True, help="sequence or dataset root")
    render.add_argument("--output", required=True, help="output directory")
    render.add_argument(
        "--mode", default="homo", help="fog density: homo or hetero"
    )
    intensity = render.add_mutually_exclusive_group(required=True)
    intensity.add_argument("--level", type=int, help="abstract severity 1..4")
    intensity.add_argument(
        "--visibility", type=float, help="meteorological visibility in meters"
    )
    render.add_argument("--seed", type=int, default=0, help="turbulence seed")
    render.add_argument(
        "--depth-dir",
        help="depth map directory (default: <sequence>/depth)",
    )
    render.add_argument(
        "--light",
        default="dcp",
        help="airlight strategy: dcp, sky or rgb:R,G,B with channels in [0, 1]",
    )
    render.add_argument("--dmin", type=float, help="nearest scene distance, meters")
    render.add_argument("--dmax", type=float, help="farthest scene distance, meters")
    render.add_argument(
        "--patch", type=int, default=10, help="dark channel patch size"
    )
    render.add_argument(
        "--octaves", type=int, default=5, help="turbulence octave count"
    )
    render.add_argument(
        "--brightness",
        type=float,
        default=0.8,
        help="upper bound of the turbulence density in (0, 1]",
    )
    render.add_argument(
        "--lossless",
        action="store_true",
        help="write PNG frames regardless of the input format",
    )
    render.set_defaults(func=_cmd_render)

    evaluate_p = sub.add_parser("eval", help="score tracker output against gt")
    evaluate_p.add_argument("--gt", required=True, help="ground truth file")
    evaluate_p.add_argument("--results", required=True, help="tracker output file")
    evaluate_p.add_argument(
        "--iou", type=float, default=0.5, help="match threshold (default 0.5)"
    )
    evaluate_p.set_defaults(func=_cmd_eval)

    sweep_p = sub.add_parser(
        "sweep", help="score a synthetic scene across fog severities"
    )
    sweep_p.add_argument(
        "--scene", help="scene JSON file (default: 5 objects, 100 frames)"
    )
    sweep_p.add_argument(
        "--levels", default="1,2,3,4", help="comma-separated severity levels"
    )
    sweep_p.add_argument("--out", required=True, help="report output directory")
    sweep_p.add_argument("--mode", default="homo", help="fog density: homo or hetero")
    sweep_p.add_argument("--seed", type=int, default=0)
    sweep_p.add_argument("--iou", type=float, default=0.5)
    sweep_p.add_argument("--slope", type=float, default=1.0)
    sweep_p.add_argument("--intercept", type=float, default=0.0)
    sweep_p.add_argument("--noise-sigma", type=float, default=0.0)
    sweep_p.set_defaults(func=_cmd_sweep)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (FogsimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
